#include "tor/matrix.hpp"

#include <utility>

namespace tor {

RMat to_real(const QMat &m)
{
    RMat r(m.rows, m.cols);
    for (size_t i = 0; i < m.a.size(); i++)
        r.a[i] = to_real(m.a[i]);
    return r;
}

RMat to_real(const IMat &m)
{
    RMat r(m.rows, m.cols);
    for (size_t i = 0; i < m.a.size(); i++)
        r.a[i] = Real(m.a[i]);
    return r;
}

DMat to_double(const RMat &m)
{
    DMat r(m.rows, m.cols);
    for (size_t i = 0; i < m.a.size(); i++)
        r.a[i] = static_cast<double>(m.a[i]);
    return r;
}

IMat ipow(const IMat &g, long e)
{
    IMat r = IMat::identity(g.rows), b = g;
    while (e > 0) {
        if (e & 1)
            r = r * b;
        e >>= 1;
        if (e)
            b = b * b;
    }
    return r;
}

Int det(const IMat &m0)
{
    IMat m = m0;
    int n = m.rows;
    Int prev = 1;
    int sign = 1;
    for (int k = 0; k < n - 1; k++) {
        if (m(k, k) == 0) {
            int p = k + 1;
            while (p < n && m(p, k) == 0)
                p++;
            if (p == n)
                return 0;
            for (int j = 0; j < n; j++)
                std::swap(m(k, j), m(p, j));
            sign = -sign;
        }
        for (int i = k + 1; i < n; i++)
            for (int j = k + 1; j < n; j++)
                m(i, j) = (m(i, j) * m(k, k) - m(i, k) * m(k, j)) / prev;
        prev = m(k, k);
    }
    return sign * m(n - 1, n - 1);
}

template <class T>
static T gauss_det(Matrix<T> m)
{
    int n = m.rows;
    T d = 1;
    for (int k = 0; k < n; k++) {
        int p = k;
        for (int i = k + 1; i < n; i++)
            if (abs(m(i, k)) > abs(m(p, k)))
                p = i;
        if (m(p, k) == 0)
            return T(0);
        if (p != k) {
            for (int j = 0; j < n; j++)
                std::swap(m(k, j), m(p, j));
            d = -d;
        }
        d *= m(k, k);
        for (int i = k + 1; i < n; i++) {
            T f = m(i, k) / m(k, k);
            for (int j = k; j < n; j++)
                m(i, j) -= f * m(k, j);
        }
    }
    return d;
}

Rat det(const QMat &m) { return gauss_det(m); }
Real det(const RMat &m) { return gauss_det(m); }

template <class T>
static Matrix<T> gauss_inverse(const Matrix<T> &m0, const T &tiny)
{
    int n = m0.rows;
    Matrix<T> m = m0, r = Matrix<T>::identity(n);
    for (int k = 0; k < n; k++) {
        int p = k;
        for (int i = k + 1; i < n; i++)
            if (abs(m(i, k)) > abs(m(p, k)))
                p = i;
        if (abs(m(p, k)) <= tiny)
            throw Error("Singular", "matrix is not invertible");
        for (int j = 0; j < n; j++) {
            std::swap(m(k, j), m(p, j));
            std::swap(r(k, j), r(p, j));
        }
        T inv = T(1) / m(k, k);
        for (int j = 0; j < n; j++) {
            m(k, j) *= inv;
            r(k, j) *= inv;
        }
        for (int i = 0; i < n; i++) {
            if (i == k || m(i, k) == 0)
                continue;
            T f = m(i, k);
            for (int j = 0; j < n; j++) {
                m(i, j) -= f * m(k, j);
                r(i, j) -= f * r(k, j);
            }
        }
    }
    return r;
}

QMat inverse(const QMat &m) { return gauss_inverse(m, Rat(0)); }

RMat inverse(const RMat &m)
{
    Real scale = 0;
    for (auto &x : m.a)
        scale = std::max(scale, Real(abs(x)));
    return gauss_inverse(m, Real(scale * tol(0.5)));
}

IMat inverse_unimodular(const IMat &m)
{
    QMat q = inverse(convert<Int, Rat>(m));
    IMat r(m.rows, m.cols);
    for (size_t i = 0; i < q.a.size(); i++) {
        if (denominator(q.a[i]) != 1)
            throw Error("NotUnimodular", "inverse is not integral");
        r.a[i] = numerator(q.a[i]);
    }
    return r;
}

std::vector<Int> charpoly(const IMat &a)
{
    std::vector<Rat> c = charpoly(convert<Int, Rat>(a));
    std::vector<Int> out(c.size());
    for (size_t i = 0; i < c.size(); i++)
        out[i] = numerator(c[i]);
    return out;
}

std::vector<Rat> charpoly(const QMat &A)
{
    // Faddeev-LeVerrier; exact over Q
    int n = A.rows;
    QMat M(n, n);
    std::vector<Rat> c(n + 1);
    c[n] = 1;
    for (int k = 1; k <= n; k++) {
        M = A * M;
        for (int i = 0; i < n; i++)
            M(i, i) += c[n - k + 1];
        QMat AM = A * M;
        Rat tr = 0;
        for (int i = 0; i < n; i++)
            tr += AM(i, i);
        c[n - k] = -tr / k;
    }
    return c;
}

static int rref(QMat &m, std::vector<int> &pivots)
{
    int r = 0;
    pivots.clear();
    for (int j = 0; j < m.cols && r < m.rows; j++) {
        int p = r;
        while (p < m.rows && m(p, j) == 0)
            p++;
        if (p == m.rows)
            continue;
        for (int k = 0; k < m.cols; k++)
            std::swap(m(r, k), m(p, k));
        Rat inv = 1 / m(r, j);
        for (int k = 0; k < m.cols; k++)
            m(r, k) *= inv;
        for (int i = 0; i < m.rows; i++) {
            if (i == r || m(i, j) == 0)
                continue;
            Rat f = m(i, j);
            for (int k = 0; k < m.cols; k++)
                m(i, k) -= f * m(r, k);
        }
        pivots.push_back(j);
        r++;
    }
    return r;
}

int rank(const QMat &m)
{
    QMat c = m;
    std::vector<int> piv;
    return rref(c, piv);
}

std::vector<std::vector<Rat>> kernel(const QMat &m)
{
    QMat c = m;
    std::vector<int> piv;
    rref(c, piv);
    std::vector<bool> is_piv(m.cols, false);
    for (int p : piv)
        is_piv[p] = true;
    std::vector<std::vector<Rat>> out;
    for (int f = 0; f < m.cols; f++) {
        if (is_piv[f])
            continue;
        std::vector<Rat> v(m.cols, Rat(0));
        v[f] = 1;
        for (size_t r = 0; r < piv.size(); r++)
            v[piv[r]] = -c(static_cast<int>(r), f);
        out.push_back(std::move(v));
    }
    return out;
}

std::vector<Real> singular_values(const RMat &m)
{
    RMat u = m;
    int rows = u.rows, cols = u.cols;
    Real eps = tol(1.0) * 256;
    for (int sweep = 0; sweep < 200; sweep++) {
        bool rotated = false;
        for (int p = 0; p < cols - 1; p++)
            for (int q = p + 1; q < cols; q++) {
                Real al = 0, be = 0, ga = 0;
                for (int i = 0; i < rows; i++) {
                    al += u(i, p) * u(i, p);
                    be += u(i, q) * u(i, q);
                    ga += u(i, p) * u(i, q);
                }
                if (ga == 0 || abs(ga) <= eps * sqrt(al * be))
                    continue;
                rotated = true;
                Real zeta = (be - al) / (2 * ga);
                Real t = (zeta >= 0 ? Real(1) : Real(-1)) / (abs(zeta) + sqrt(1 + zeta * zeta));
                Real c = 1 / sqrt(1 + t * t), s = c * t;
                for (int i = 0; i < rows; i++) {
                    Real x = u(i, p), y = u(i, q);
                    u(i, p) = c * x - s * y;
                    u(i, q) = s * x + c * y;
                }
            }
        if (!rotated)
            break;
    }
    std::vector<Real> sv(cols);
    for (int j = 0; j < cols; j++) {
        Real s = 0;
        for (int i = 0; i < rows; i++)
            s += u(i, j) * u(i, j);
        sv[j] = sqrt(s);
    }
    std::sort(sv.begin(), sv.end(), [](const Real &x, const Real &y) { return x > y; });
    return sv;
}

Real opnorm(const RMat &m) { return singular_values(m).front(); }

void symmetric_eigen(const RMat &s, std::vector<Real> &vals, RMat &vecs)
{
    int n = s.rows;
    RMat a = s;
    vecs = RMat::identity(n);
    Real eps = tol(1.0) * 256;
    for (int sweep = 0; sweep < 200; sweep++) {
        Real off = 0, tot = 0;
        for (int i = 0; i < n; i++)
            for (int j = 0; j < n; j++) {
                tot += a(i, j) * a(i, j);
                if (i != j)
                    off += a(i, j) * a(i, j);
            }
        if (off <= eps * eps * tot)
            break;
        for (int p = 0; p < n - 1; p++)
            for (int q = p + 1; q < n; q++) {
                if (a(p, q) == 0)
                    continue;
                Real theta = (a(q, q) - a(p, p)) / (2 * a(p, q));
                Real t = (theta >= 0 ? Real(1) : Real(-1)) / (abs(theta) + sqrt(1 + theta * theta));
                Real c = 1 / sqrt(1 + t * t), sn = t * c;
                for (int k = 0; k < n; k++) {
                    Real x = a(k, p), y = a(k, q);
                    a(k, p) = c * x - sn * y;
                    a(k, q) = sn * x + c * y;
                }
                for (int k = 0; k < n; k++) {
                    Real x = a(p, k), y = a(q, k);
                    a(p, k) = c * x - sn * y;
                    a(q, k) = sn * x + c * y;
                }
                for (int k = 0; k < n; k++) {
                    Real x = vecs(k, p), y = vecs(k, q);
                    vecs(k, p) = c * x - sn * y;
                    vecs(k, q) = sn * x + c * y;
                }
            }
    }
    std::vector<int> idx(n);
    for (int i = 0; i < n; i++)
        idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](int x, int y) { return a(x, x) < a(y, y); });
    vals.resize(n);
    RMat sorted(n, n);
    for (int k = 0; k < n; k++) {
        vals[k] = a(idx[k], idx[k]);
        for (int i = 0; i < n; i++)
            sorted(i, k) = vecs(i, idx[k]);
    }
    vecs = sorted;
}

static Int floor_div(const Int &a, const Int &b)
{
    Int q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0)))
        q -= 1;
    return q;
}

static void row_axpy(IMat &m, int dst, int src, const Int &f)
{
    for (int k = 0; k < m.cols; k++)
        m(dst, k) -= f * m(src, k);
}

static void row_swap(IMat &m, int x, int y)
{
    for (int k = 0; k < m.cols; k++)
        std::swap(m(x, k), m(y, k));
}

void hnf(const IMat &m, IMat &h, IMat &u)
{
    h = m;
    u = IMat::identity(m.rows);
    int r = 0;
    for (int j = 0; j < h.cols && r < h.rows; j++) {
        for (;;) {
            int best = -1;
            for (int i = r; i < h.rows; i++)
                if (h(i, j) != 0 && (best < 0 || abs(h(i, j)) < abs(h(best, j))))
                    best = i;
            if (best < 0)
                break;
            row_swap(h, r, best);
            row_swap(u, r, best);
            bool done = true;
            for (int i = r + 1; i < h.rows; i++) {
                if (h(i, j) == 0)
                    continue;
                Int q = floor_div(h(i, j), h(r, j));
                row_axpy(h, i, r, q);
                row_axpy(u, i, r, q);
                if (h(i, j) != 0)
                    done = false;
            }
            if (done)
                break;
        }
        if (h(r, j) == 0)
            continue;
        if (h(r, j) < 0) {
            for (int k = 0; k < h.cols; k++)
                h(r, k) = -h(r, k);
            for (int k = 0; k < u.cols; k++)
                u(r, k) = -u(r, k);
        }
        for (int i = 0; i < r; i++) {
            Int q = floor_div(h(i, j), h(r, j));
            if (q != 0) {
                row_axpy(h, i, r, q);
                row_axpy(u, i, r, q);
            }
        }
        r++;
    }
}

IMat lll(const IMat &b0)
{
    IMat b = b0;
    int n = b.rows, m = b.cols;
    auto dot = [&](const std::vector<Rat> &x, const std::vector<Rat> &y) {
        Rat s = 0;
        for (int k = 0; k < m; k++)
            s += x[k] * y[k];
        return s;
    };
    std::vector<std::vector<Rat>> bs(n, std::vector<Rat>(m));
    Matrix<Rat> mu(n, n);
    std::vector<Rat> bn(n);
    auto gso = [&]() {
        for (int i = 0; i < n; i++) {
            std::vector<Rat> bi(m);
            for (int k = 0; k < m; k++)
                bi[k] = Rat(b(i, k));
            bs[i] = bi;
            for (int j = 0; j < i; j++) {
                mu(i, j) = bn[j] == 0 ? Rat(0) : dot(bi, bs[j]) / bn[j];
                for (int k = 0; k < m; k++)
                    bs[i][k] -= mu(i, j) * bs[j][k];
            }
            bn[i] = dot(bs[i], bs[i]);
        }
    };
    gso();
    const Rat delta(3, 4);
    int k = 1;
    while (k < n) {
        for (int j = k - 1; j >= 0; j--) {
            Rat x = mu(k, j);
            Int q = floor_div(numerator(x) * 2 + denominator(x), denominator(x) * 2);
            if (q != 0) {
                row_axpy(b, k, j, q);
                gso();
            }
        }
        if (bn[k] >= (delta - mu(k, k - 1) * mu(k, k - 1)) * bn[k - 1]) {
            k++;
        } else {
            row_swap(b, k, k - 1);
            gso();
            k = std::max(k - 1, 1);
        }
    }
    return b;
}

} // namespace tor
