#include "tor/numfield.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <complex>
#include <numeric>

namespace tor {

namespace {

std::vector<Cx> companion_guess(const IntPoly &p)
{
    int d = degree(p);
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(d, d);
    for (int i = 1; i < d; i++)
        c(i, i - 1) = 1.0;
    for (int i = 0; i < d; i++)
        c(i, d - 1) = -static_cast<double>(p[i]);
    Eigen::EigenSolver<Eigen::MatrixXd> es(c, false);
    std::vector<Cx> z;
    for (int i = 0; i < d; i++) {
        std::complex<double> e = es.eigenvalues()[i];
        // nudge off the real axis so conjugate pairs can separate under Aberth
        z.emplace_back(Real(e.real()), Real(e.imag() + 1e-3 * (i + 1)));
    }
    return z;
}

/* Simultaneous Aberth iteration at the current precision. */
bool aberth(const IntPoly &p, std::vector<Cx> &z)
{
    IntPoly dp = derivative(p);
    int d = static_cast<int>(z.size());
    Real stop = tol(1.0) * 16;
    for (int it = 0; it < 2000; it++) {
        Real worst = 0;
        for (int i = 0; i < d; i++) {
            Cx pv = eval(p, z[i]), dv = eval(dp, z[i]);
            if (dv.norm2() == 0) {
                z[i] = z[i] + Cx(tol(0.5), tol(0.5));
                worst = 1;
                continue;
            }
            Cx w = pv / dv, s;
            for (int j = 0; j < d; j++)
                if (j != i)
                    s += Cx(Real(1)) / (z[i] - z[j]);
            Cx step = w / (Cx(Real(1)) - w * s);
            z[i] -= step;
            Real mag = step.abs() / (1 + z[i].abs());
            if (mag > worst)
                worst = mag;
        }
        if (worst <= stop)
            return true;
    }
    return false;
}

bool try_certify(const IntPoly &p, unsigned bits, std::vector<CertRoot> &out)
{
    int d = degree(p);
    PrecisionGuard guard(bits + 32);
    std::vector<Cx> z = companion_guess(p);
    if (!aberth(p, z))
        return false;
    IntPoly dp = derivative(p);
    Real limit = exp2r(Real(-static_cast<double>(bits) / 2));
    std::vector<CertRoot> rs(d);
    for (int i = 0; i < d; i++) {
        Cx dv = eval(dp, z[i]);
        if (dv.norm2() == 0)
            return false;
        rs[i].z = z[i];
        rs[i].radius = (eval(p, z[i]) / dv).abs() * d;
        // floor at the arithmetic resolution so disks are never degenerate
        Real floor_r = tol(1.0) * (1 + z[i].abs()) * 4;
        if (rs[i].radius < floor_r)
            rs[i].radius = floor_r;
        if (rs[i].radius > limit)
            return false;
    }
    for (int i = 0; i < d; i++)
        for (int j = i + 1; j < d; j++)
            if ((rs[i].z - rs[j].z).abs() <= rs[i].radius + rs[j].radius)
                return false;

    int r1 = real_root_count(p);
    std::vector<CertRoot> reals, upper, lower;
    for (auto &r : rs) {
        if (abs(r.z.im) <= r.radius) {
            r.real = true;
            r.z.im = 0;
            reals.push_back(r);
        } else {
            r.real = false;
            (r.z.im > 0 ? upper : lower).push_back(r);
        }
    }
    if (static_cast<int>(reals.size()) != r1 || upper.size() != lower.size())
        return false;
    std::sort(reals.begin(), reals.end(), [](auto &a, auto &b) { return a.z.re < b.z.re; });
    std::sort(upper.begin(), upper.end(), [](auto &a, auto &b) {
        return a.z.re != b.z.re ? a.z.re < b.z.re : a.z.im < b.z.im;
    });
    for (auto &u : upper) {
        bool matched = false;
        for (auto &l : lower)
            if ((l.z - u.z.conj()).abs() <= l.radius + u.radius)
                matched = true;
        if (!matched)
            return false;
    }
    out = reals;
    for (auto &u : upper)
        out.push_back(u);
    for (auto &u : upper)
        out.push_back({u.z.conj(), u.radius, false});
    return true;
}

} // namespace

std::vector<CertRoot> find_roots(const IntPoly &p0, unsigned bits)
{
    IntPoly p = p0;
    trim(p);
    int d = degree(p);
    if (d < 1 || p[d] != 1)
        throw Error("InvalidInput", "polynomial must be monic of degree >= 1");
    if (!is_squarefree(p))
        throw Error("NotSquarefree", to_string(p));
    if (d == 1) {
        CertRoot r{Cx(Real(-p[0])), Real(0), true};
        return {r};
    }
    std::vector<CertRoot> out;
    for (unsigned b = bits; b <= kMaxPrecision; b *= 2)
        if (try_certify(p, b, out))
            return out;
    throw Error("PrecisionExhausted", "root certification failed for " + to_string(p));
}

static std::vector<Cx> subset_poly(const std::vector<CertRoot> &rs, unsigned mask)
{
    std::vector<Cx> c{Cx(Real(1))};
    for (size_t i = 0; i < rs.size(); i++) {
        if (!(mask >> i & 1))
            continue;
        std::vector<Cx> n(c.size() + 1);
        for (size_t k = 0; k < c.size(); k++) {
            n[k + 1] += c[k];
            n[k] -= c[k] * rs[i].z;
        }
        c = n;
    }
    return c;
}

bool is_irreducible(const IntPoly &p0)
{
    IntPoly p = p0;
    trim(p);
    int d = degree(p);
    if (d > 8)
        throw Error("Unsupported", "irreducibility test limited to degree 8");
    if (d <= 1)
        return d == 1;
    if (!is_squarefree(p))
        return false;
    for (unsigned bits = std::max(precision(), 128u); bits <= kMaxPrecision; bits *= 2) {
        PrecisionGuard guard(bits);
        std::vector<CertRoot> rs = find_roots(p, bits);
        Real t = exp2r(Real(-static_cast<double>(bits) / 4));
        bool ambiguous = false;
        for (unsigned mask = 1; mask + 1 < (1u << d); mask++) {
            if (__builtin_popcount(mask) * 2 > d)
                continue;
            std::vector<Cx> c = subset_poly(rs, mask);
            IntPoly cand;
            bool near = true;
            for (auto &x : c) {
                Real r = round(x.re);
                if (abs(x.im) > t || abs(x.re - r) > t * (1 + abs(r))) {
                    near = false;
                    break;
                }
                cand.push_back(round_to_int(r));
            }
            if (!near)
                continue;
            RatPoly q, rem;
            divmod(to_rat(p), to_rat(cand), q, rem);
            if (rem.empty())
                return false;
            ambiguous = true;
        }
        if (!ambiguous)
            return true;
    }
    throw Error("PrecisionExhausted", "ambiguous root subset for " + to_string(p));
}

Field make_field(const IntPoly &min_poly, unsigned bits)
{
    if (bits == 0)
        bits = precision();
    IntPoly p = min_poly;
    trim(p);
    if (!is_irreducible(p))
        throw Error("Reducible", to_string(p));
    auto k = std::make_shared<NumberField>();
    k->min_poly = p;
    k->d = degree(p);
    k->roots = find_roots(p, bits);
    k->r1 = 0;
    for (auto &r : k->roots)
        k->r1 += r.real;
    k->r2 = (k->d - k->r1) / 2;
    k->disc = discriminant(p);
    k->precision_bits = bits;
    return k;
}

AlgebraicNumber::AlgebraicNumber(Field k, std::vector<Rat> coords)
    : k_(std::move(k)), c_(std::move(coords))
{
    c_.resize(k_->d, Rat(0));
}

AlgebraicNumber AlgebraicNumber::from_int(Field k, const Int &n)
{
    std::vector<Rat> c(k->d, Rat(0));
    c[0] = Rat(n);
    return AlgebraicNumber(std::move(k), c);
}

AlgebraicNumber AlgebraicNumber::gen(Field k)
{
    std::vector<Rat> c(k->d, Rat(0));
    if (k->d == 1)
        c[0] = Rat(-k->min_poly[0]);
    else
        c[1] = 1;
    return AlgebraicNumber(std::move(k), c);
}

AlgebraicNumber AlgebraicNumber::operator+(const AlgebraicNumber &o) const
{
    std::vector<Rat> r = c_;
    for (size_t i = 0; i < r.size(); i++)
        r[i] += o.c_[i];
    return AlgebraicNumber(k_, r);
}

AlgebraicNumber AlgebraicNumber::operator-(const AlgebraicNumber &o) const
{
    std::vector<Rat> r = c_;
    for (size_t i = 0; i < r.size(); i++)
        r[i] -= o.c_[i];
    return AlgebraicNumber(k_, r);
}

AlgebraicNumber AlgebraicNumber::operator-() const
{
    std::vector<Rat> r = c_;
    for (auto &x : r)
        x = -x;
    return AlgebraicNumber(k_, r);
}

AlgebraicNumber AlgebraicNumber::operator*(const AlgebraicNumber &o) const
{
    int d = k_->d;
    std::vector<Rat> prod(2 * d - 1, Rat(0));
    for (int i = 0; i < d; i++) {
        if (c_[i] == 0)
            continue;
        for (int j = 0; j < d; j++)
            prod[i + j] += c_[i] * o.c_[j];
    }
    const IntPoly &m = k_->min_poly;
    for (int e = 2 * d - 2; e >= d; e--) {
        if (prod[e] == 0)
            continue;
        Rat f = prod[e];
        for (int i = 0; i <= d; i++)
            prod[e - d + i] -= f * Rat(m[i]);
    }
    prod.resize(d);
    return AlgebraicNumber(k_, prod);
}

AlgebraicNumber AlgebraicNumber::operator*(const Rat &s) const
{
    std::vector<Rat> r = c_;
    for (auto &x : r)
        x *= s;
    return AlgebraicNumber(k_, r);
}

QMat AlgebraicNumber::mult_matrix() const
{
    int d = k_->d;
    QMat m(d, d);
    AlgebraicNumber t = *this, th = gen(k_);
    for (int j = 0; j < d; j++) {
        for (int i = 0; i < d; i++)
            m(i, j) = t.c_[i];
        t = t * th;
    }
    return m;
}

AlgebraicNumber AlgebraicNumber::inverse() const
{
    if (is_zero())
        throw Error("DivisionByZero", "inverse of zero");
    QMat mi = tor::inverse(mult_matrix());
    return AlgebraicNumber(k_, mi.col(0));
}

AlgebraicNumber AlgebraicNumber::pow(long e) const
{
    AlgebraicNumber base = e < 0 ? inverse() : *this;
    unsigned long n = static_cast<unsigned long>(e < 0 ? -e : e);
    AlgebraicNumber r = from_int(k_, 1);
    while (n) {
        if (n & 1)
            r = r * base;
        n >>= 1;
        if (n)
            base = base * base;
    }
    return r;
}

bool AlgebraicNumber::is_zero() const
{
    return std::all_of(c_.begin(), c_.end(), [](const Rat &x) { return x == 0; });
}

bool AlgebraicNumber::is_one() const
{
    if (c_.empty() || c_[0] != 1)
        return false;
    return std::all_of(c_.begin() + 1, c_.end(), [](const Rat &x) { return x == 0; });
}

bool AlgebraicNumber::is_integral() const
{
    if (std::all_of(c_.begin(), c_.end(), [](const Rat &x) { return denominator(x) == 1; }))
        return true;
    std::vector<Rat> cp = charpoly(mult_matrix());
    return std::all_of(cp.begin(), cp.end(), [](const Rat &x) { return denominator(x) == 1; });
}

Cx AlgebraicNumber::embed(int i) const
{
    const Cx &z = k_->root(i);
    Cx s;
    for (int k = k_->d - 1; k >= 0; k--)
        s = s * z + Cx(to_real(c_[k]));
    return s;
}

Real mahler_height(const AlgebraicNumber &a)
{
    if (!a.is_integral())
        throw Error("NotIntegral", "height restricted to algebraic integers");
    Real h = 0;
    for (int i = 0; i < a.field()->d; i++) {
        Real m = a.embed(i).abs();
        if (m > 1)
            h += log2r(m);
    }
    return h;
}

std::pair<Rat, Rat> norm_trace(const AlgebraicNumber &a)
{
    QMat m = a.mult_matrix();
    Rat tr = 0;
    for (int i = 0; i < m.rows; i++)
        tr += m(i, i);
    return {det(m), tr};
}

namespace {

/* Integer relation among 1, x, ..., x^k by LLL; empty if none verified. */
enum class Rel { Found, None, Ambiguous };

Rel find_relation(const Real &x, int k, unsigned bits, IntPoly &out)
{
    int n = k + 1;
    IMat b(n, n + 1);
    Real scale = exp2r(Real(0.75 * bits));
    Real pw = 1;
    for (int i = 0; i < n; i++) {
        b(i, i) = 1;
        b(i, n) = round_to_int(pw * scale);
        pw *= x;
    }
    IMat r = lll(b);
    IntPoly cand(n);
    for (int i = 0; i < n; i++)
        cand[i] = r(0, i);
    trim(cand);
    if (degree(cand) < 1)
        return Rel::None;
    Real mag = 0, pwr = 1;
    for (int i = 0; i < n; i++) {
        mag = std::max(mag, Real(abs(Real(cand[i])) * pwr));
        pwr *= std::max(Real(1), Real(abs(x)));
    }
    Real res = abs(eval(cand, x));
    Int big = 0;
    for (auto &c : cand)
        big = std::max(big, Int(abs(c)));
    // a spurious short vector has coefficients near scale^(1/n)
    if (Real(big) > exp2r(Real(bits / 8.0)))
        return Rel::None;
    if (res <= exp2r(Real(-0.5 * bits)) * mag) {
        if (cand.back() < 0)
            for (auto &c : cand)
                c = -c;
        out = cand;
        return Rel::Found;
    }
    if (res <= exp2r(Real(-0.25 * bits)) * mag)
        return Rel::Ambiguous;
    return Rel::None;
}

} // namespace

bool is_cm(const NumberField &k)
{
    if (k.r1 != 0)
        return false;
    int half = k.d / 2;
    for (unsigned bits = k.precision_bits; bits <= kMaxPrecision; bits *= 2) {
        PrecisionGuard guard(bits);
        std::vector<CertRoot> rs = find_roots(k.min_poly, bits);
        Real gamma = 2 * rs[k.r1].z.re;
        bool ambiguous = false;
        for (int deg = 1; deg <= half; deg++) {
            IntPoly rel;
            Rel st = find_relation(gamma, deg, bits, rel);
            if (st == Rel::Ambiguous) {
                ambiguous = true;
                break;
            }
            if (st == Rel::Found) {
                int dg = degree(rel);
                return dg == half && is_squarefree(rel) && real_root_count(rel) == dg;
            }
        }
        if (!ambiguous)
            return false;
    }
    throw Error("Inconclusive", "integer-relation search did not settle at max precision");
}

} // namespace tor
