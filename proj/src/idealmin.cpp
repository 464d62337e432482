#include "tor/idealmin.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <unordered_map>

namespace tor {

namespace {

using LMat = std::vector<std::vector<long>>; /* row-major, small entries */

long to_long(const Int &z)
{
    if (z > Int(std::numeric_limits<long>::max()) || z < Int(std::numeric_limits<long>::min()))
        throw Error("BudgetExceeded", "integer exceeds 64 bits");
    return z.convert_to<long>();
}

long floor_div(long a, long b)
{
    long q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0)))
        q--;
    return q;
}

long pmod(long a, long m)
{
    long r = a % m;
    return r < 0 ? r + m : r;
}

/* column j = coordinates of theta^(j+1) */
LMat theta_matrix(const NumberField &k)
{
    int d = k.d;
    LMat t(d, std::vector<long>(d, 0));
    for (int j = 0; j + 1 < d; j++)
        t[j + 1][j] = 1;
    for (int i = 0; i < d; i++)
        t[i][d - 1] = -to_long(k.min_poly[i]);
    return t;
}

/* column j = coordinates of y theta^j */
std::vector<Coords> mult_columns(const NumberField &k, const Coords &y)
{
    int d = k.d;
    LMat t = theta_matrix(k);
    std::vector<Coords> cols(d);
    cols[0] = y;
    for (int j = 1; j < d; j++) {
        cols[j].assign(d, 0);
        for (int i = 0; i < d; i++)
            for (int l = 0; l < d; l++)
                cols[j][i] += t[i][l] * cols[j - 1][l];
    }
    return cols;
}

Coords times(const NumberField &k, const Coords &a, const Coords &b)
{
    auto cols = mult_columns(k, a);
    Coords r(k.d, 0);
    for (int j = 0; j < k.d; j++)
        for (int i = 0; i < k.d; i++)
            r[i] += cols[j][i] * b[j];
    return r;
}

Coords times_mod(const NumberField &k, const Coords &a, const Coords &b, long N)
{
    auto cols = mult_columns(k, a);
    Coords r(k.d, 0);
    for (int j = 0; j < k.d; j++)
        for (int i = 0; i < k.d; i++)
            r[i] = pmod(r[i] + pmod(cols[j][i], N) * b[j], N);
    return r;
}

IdealLattice from_rows(const Field &k, const IMat &rows, std::string name)
{
    int d = k->d;
    IMat h, u;
    hnf(rows, h, u);
    IMat top(d, d);
    Int n = 1;
    for (int i = 0; i < d; i++) {
        if (h(i, i) == 0)
            throw Error("NotAnIdeal", "generators do not span a full-rank lattice");
        for (int j = 0; j < d; j++)
            top(i, j) = h(i, j);
        n *= h(i, i);
    }
    return {k, top.transpose(), n, std::move(name)};
}

/* row HNF with small entries */
struct Quotient {
    int d = 0;
    long N = 1;
    LMat H; /* H[i] = row i, pivot at i */
    std::vector<long> radix; /* place value of coordinate i in class ids */

    explicit Quotient(const IdealLattice &I)
    {
        d = I.field->d;
        N = to_long(I.norm);
        H.assign(d, std::vector<long>(d, 0));
        for (int i = 0; i < d; i++)
            for (int j = 0; j < d; j++)
                H[i][j] = to_long(I.basis(j, i));
        radix.assign(d, 1);
        for (int i = d - 2; i >= 0; i--)
            radix[i] = radix[i + 1] * H[i + 1][i + 1];
    }

    Coords reduce(Coords y) const
    {
        for (auto &x : y)
            x = pmod(x, N);
        for (int i = 0; i < d; i++) {
            long q = floor_div(y[i], H[i][i]);
            if (q != 0)
                for (int j = i; j < d; j++)
                    y[j] -= q * H[i][j];
        }
        return y;
    }
    long id(const Coords &y) const
    {
        Coords r = reduce(y);
        long s = 0;
        for (int i = 0; i < d; i++)
            s += r[i] * radix[i];
        return s;
    }
    Coords rep(long id) const
    {
        Coords r(d);
        for (int i = 0; i < d; i++) {
            r[i] = id / radix[i];
            id %= radix[i];
        }
        return r;
    }
};

/* Embedding matrix: row i = coordinate i of sigma(theta^j). */
RMat sigma_matrix(const NumberField &k)
{
    int d = k.d, r1 = k.r1, r2 = k.r2;
    RMat s(d, d);
    for (int p = 0; p < r1 + r2; p++) {
        Cx z = k.root(p), w(Real(1));
        for (int j = 0; j < d; j++) {
            if (p < r1) {
                s(p, j) = w.re;
            } else {
                s(p, j) = w.re;
                s(p + r2, j) = w.im;
            }
            w = w * z;
        }
    }
    return s;
}

Real sup_norm(const Vec &v)
{
    Real m = 0;
    for (auto &x : v)
        if (abs(x) > m)
            m = abs(x);
    return m;
}

/* Integer points x with sup(A x) <= R. */
std::vector<Coords> box_points(const RMat &A, const Real &R, double max_box)
{
    int d = A.rows;
    RMat Ai = inverse(A);
    std::vector<long> b(d);
    double vol = 1;
    for (int i = 0; i < d; i++) {
        Real s = 0;
        for (int j = 0; j < d; j++)
            s += abs(Ai(i, j));
        b[i] = static_cast<long>(std::floor((s * R).convert_to<double>() + 1e-9));
        vol *= 2.0 * b[i] + 1;
    }
    if (vol > max_box)
        throw Error("BudgetExceeded", "reduced-basis box of " + std::to_string(vol) + " points");
    DMat Ad = to_double(A);
    double Rd = R.convert_to<double>() * (1 + 1e-9);
    std::vector<Coords> out;
    Coords x(d);
    for (int i = 0; i < d; i++)
        x[i] = -b[i];
    for (;;) {
        double m = 0;
        for (int i = 0; i < d; i++) {
            double s = 0;
            for (int j = 0; j < d; j++)
                s += Ad(i, j) * x[j];
            m = std::max(m, std::abs(s));
        }
        if (m <= Rd)
            out.push_back(x);
        int i = 0;
        while (i < d && x[i] == b[i])
            x[i] = -b[i], i++;
        if (i == d)
            break;
        x[i]++;
    }
    return out;
}

Vec embed_lattice(const RMat &A, const Coords &x)
{
    Vec v(A.rows, Real(0));
    for (int i = 0; i < A.rows; i++)
        for (int j = 0; j < A.cols; j++)
            if (x[j] != 0)
                v[i] += A(i, j) * x[j];
    return v;
}

int rank_of(const std::vector<Coords> &vs, int d)
{
    if (vs.empty())
        return 0;
    QMat m(static_cast<int>(vs.size()), d);
    for (size_t i = 0; i < vs.size(); i++)
        for (int j = 0; j < d; j++)
            m(static_cast<int>(i), j) = vs[i][j];
    return rank(m);
}

Rat dot(const std::vector<Rat> &a, const std::vector<Rat> &b)
{
    Rat s = 0;
    for (size_t i = 0; i < a.size(); i++)
        s += a[i] * b[i];
    return s;
}

std::vector<Rat> to_rat(const Coords &x)
{
    return std::vector<Rat>(x.begin(), x.end());
}

/* Z-basis of Z^d intersected with the rational span of vs. */
std::vector<Coords> saturation(const std::vector<Coords> &vs, int d)
{
    int i = static_cast<int>(vs.size());
    if (i == d) {
        std::vector<Coords> e(d, Coords(d, 0));
        for (int t = 0; t < d; t++)
            e[t][t] = 1;
        return e;
    }
    QMat m(i, d);
    for (int a = 0; a < i; a++)
        for (int b = 0; b < d; b++)
            m(a, b) = vs[a][b];
    auto ker = kernel(m); /* d - i vectors orthogonal to span */
    int kr = static_cast<int>(ker.size());
    IMat At(d, kr); /* columns = integer kernel vectors */
    for (int c = 0; c < kr; c++) {
        Int l = 1;
        for (auto &q : ker[c])
            l = lcm(l, denominator(q));
        for (int r = 0; r < d; r++)
            At(r, c) = numerator(Rat(ker[c][r] * l));
    }
    IMat h, u;
    hnf(At, h, u);
    std::vector<Coords> out;
    for (int r = 0; r < d; r++) {
        bool zero = true;
        for (int c = 0; c < kr; c++)
            zero = zero && h(r, c) == 0;
        if (!zero)
            continue;
        Coords y(d);
        for (int c = 0; c < d; c++)
            y[c] = to_long(u(r, c));
        out.push_back(y);
    }
    return out;
}

/* gcd g of rationals and integer coefficients e with sum e_t q_t = g */
Rat rational_bezout(const std::vector<Rat> &q, std::vector<Int> &e)
{
    Int L = 1;
    for (auto &x : q)
        L = lcm(L, denominator(x));
    Int g = 0;
    e.assign(q.size(), 0);
    for (size_t t = 0; t < q.size(); t++) {
        Int n = numerator(Rat(q[t] * L));
        if (n == 0)
            continue;
        if (g == 0) {
            g = n;
            e[t] = 1;
            continue;
        }
        /* extended Euclid on (g, n) */
        Int a = g, b = n, x0 = 1, x1 = 0, y0 = 0, y1 = 1;
        while (b != 0) {
            Int qq = a / b, r = a - qq * b;
            a = b, b = r;
            Int tx = x0 - qq * x1, ty = y0 - qq * y1;
            x0 = x1, x1 = tx, y0 = y1, y1 = ty;
        }
        for (size_t s = 0; s < t; s++)
            e[s] *= x0;
        e[t] = y0;
        g = a;
    }
    return Rat(g, L);
}

/* Product of embedding absolute values, double precision. */
double approx_norm(const DMat &S, const Coords &y, int r1, int r2)
{
    int d = S.rows;
    std::vector<double> v(d, 0.0);
    for (int i = 0; i < d; i++)
        for (int j = 0; j < d; j++)
            v[i] += S(i, j) * static_cast<double>(y[j]);
    double p = 1;
    for (int i = 0; i < r1; i++)
        p *= std::abs(v[i]);
    for (int i = 0; i < r2; i++)
        p *= v[r1 + i] * v[r1 + i] + v[r1 + r2 + i] * v[r1 + r2 + i];
    return p;
}

/* |det| of the multiplication matrix, exactly via 128-bit Bareiss. */
long exact_norm(const NumberField &k, const Coords &y)
{
    int d = k.d;
    auto cols = mult_columns(k, y);
    std::vector<std::vector<__int128>> m(d, std::vector<__int128>(d));
    for (int i = 0; i < d; i++)
        for (int j = 0; j < d; j++)
            m[i][j] = cols[j][i];
    __int128 prev = 1;
    int sign = 1;
    for (int c = 0; c < d - 1; c++) {
        if (m[c][c] == 0) {
            int p = c + 1;
            while (p < d && m[p][c] == 0)
                p++;
            if (p == d)
                return 0;
            std::swap(m[c], m[p]);
            sign = -sign;
        }
        for (int i = c + 1; i < d; i++)
            for (int j = c + 1; j < d; j++)
                m[i][j] = (m[i][j] * m[c][c] - m[i][c] * m[c][j]) / prev;
        prev = m[c][c];
    }
    __int128 r = m[d - 1][d - 1] * sign;
    if (r < 0)
        r = -r;
    if (r > std::numeric_limits<long>::max())
        throw Error("BudgetExceeded", "norm exceeds 64 bits");
    return static_cast<long>(r);
}

using PolyP = std::vector<long>; /* ascending coefficients mod p */

PolyP norm_p(PolyP a, long p)
{
    for (auto &x : a)
        x = pmod(x, p);
    while (!a.empty() && a.back() == 0)
        a.pop_back();
    return a;
}

int degree_p(const PolyP &a) { return static_cast<int>(a.size()) - 1; }

/* p = 0 multiplies over Z */
PolyP mul_p(const PolyP &a, const PolyP &b, long p)
{
    PolyP r(a.size() + b.size() - 1, 0);
    for (size_t i = 0; i < a.size(); i++)
        for (size_t j = 0; j < b.size(); j++)
            r[i + j] = p ? pmod(r[i + j] + a[i] * b[j], p) : r[i + j] + a[i] * b[j];
    return p ? norm_p(r, p) : r;
}

long inv_p(long a, long p)
{
    long r = 1, b = pmod(a, p), e = p - 2;
    while (e > 0) {
        if (e & 1)
            r = r * b % p;
        b = b * b % p;
        e >>= 1;
    }
    return r;
}

PolyP rem_p(PolyP a, const PolyP &b, long p, PolyP *q = nullptr)
{
    a = norm_p(a, p);
    long li = inv_p(b.back(), p);
    if (q)
        q->assign(a.size() >= b.size() ? a.size() - b.size() + 1 : 1, 0);
    while (a.size() >= b.size()) {
        long c = a.back() * li % p;
        size_t s = a.size() - b.size();
        if (q)
            (*q)[s] = c;
        for (size_t i = 0; i < b.size(); i++)
            a[s + i] = pmod(a[s + i] - c * b[i], p);
        a = norm_p(a, p);
    }
    return a;
}

PolyP gcd_p(PolyP a, PolyP b, long p)
{
    a = norm_p(a, p), b = norm_p(b, p);
    while (!b.empty()) {
        PolyP r = rem_p(a, b, p);
        a = b, b = r;
    }
    if (!a.empty()) {
        long li = inv_p(a.back(), p);
        for (auto &x : a)
            x = x * li % p;
    }
    return a;
}

/* Monic irreducible factors with multiplicity, by trial division in increasing degree. */
std::vector<std::pair<PolyP, int>> factor_mod(const PolyP &f0, long p)
{
    PolyP f = norm_p(f0, p);
    std::vector<std::pair<PolyP, int>> factors;
    for (int deg = 1; 2 * deg <= degree_p(f); deg++) {
        if (std::pow(static_cast<double>(p), deg) > 1e7)
            throw Error("BudgetExceeded", "factoring modulo " + std::to_string(p));
        PolyP g(deg + 1, 0);
        g[deg] = 1;
        for (;;) {
            int e = 0;
            PolyP q;
            while (degree_p(f) >= deg && rem_p(f, g, p, &q).empty()) {
                f = norm_p(q, p);
                e++;
            }
            if (e > 0)
                factors.push_back({g, e});
            int i = 0;
            while (i < deg && g[i] == p - 1)
                g[i] = 0, i++;
            if (i == deg)
                break;
            g[i]++;
        }
    }
    if (degree_p(f) > 0)
        factors.push_back({f, 1});
    return factors;
}

struct UnitAction {
    std::vector<Coords> units; /* generator eigenvalues, integral */
};

UnitAction unit_action(const ConjugacyData &c)
{
    UnitAction a;
    for (auto &p : c.phi) {
        Coords y;
        for (auto &q : p.coords()) {
            if (denominator(q) != 1)
                throw Error("NotIntegral", "unit outside Z[theta]");
            y.push_back(to_long(numerator(q)));
        }
        a.units.push_back(y);
    }
    return a;
}

Coords unit_coords(const ConjugacyData &c, const Exps &e)
{
    AlgebraicNumber u = phi_of(c, e);
    Coords y;
    for (auto &q : u.coords()) {
        if (denominator(q) != 1)
            throw Error("NotIntegral", "unit outside Z[theta]");
        y.push_back(to_long(numerator(q)));
    }
    return y;
}

void require_maximal(const NumberField &k)
{
    if (!power_basis_is_maximal(k))
        throw Error("NotMaximal", "Z[theta] is not the maximal order");
}

/* Enumerates y with sup(sigma y) <= rho and reports each with its exact norm. */
template <class F>
void search_box(const NumberField &k, const Real &rho, double max_box, double &points, F &&visit)
{
    int d = k.d;
    RMat S = sigma_matrix(k);
    RMat Si = inverse(S);
    std::vector<long> b(d);
    double vol = 1;
    for (int i = 0; i < d; i++) {
        Real s = 0;
        for (int j = 0; j < d; j++)
            s += abs(Si(i, j));
        b[i] = static_cast<long>(std::floor((s * rho).convert_to<double>() + 1e-9));
        vol *= 2.0 * b[i] + 1;
    }
    if (vol > max_box)
        throw Error("SearchBudgetExceeded", "coset box of " + std::to_string(vol) + " points");
    points = vol;
    DMat Sd = to_double(S);
    double r = rho.convert_to<double>() * (1 + 1e-9);
    Coords y(d);
    for (int i = 0; i < d; i++)
        y[i] = -b[i];
    for (;;) {
        bool zero = true, in = true;
        for (int i = 0; i < d && in; i++) {
            double s = 0;
            for (int j = 0; j < d; j++)
                s += Sd(i, j) * y[j];
            in = std::abs(s) <= r;
        }
        for (auto x : y)
            zero = zero && x == 0;
        if (in && !zero)
            visit(y);
        int i = 0;
        while (i < d && y[i] == b[i])
            y[i] = -b[i], i++;
        if (i == d)
            break;
        y[i]++;
    }
}

/* Largest rho needed so that every recorded minimum n is certified: 2^kappa n^(1/d). */
Real needed_radius(const Real &c_search, long n, int d)
{
    return c_search * pow(Real(n), Real(1) / d);
}

} // namespace

bool power_basis_is_maximal(const NumberField &k)
{
    Int D = abs(k.disc);
    int d = k.d;
    std::vector<long> f(d + 1);
    for (int i = 0; i <= d; i++)
        f[i] = to_long(k.min_poly[i]);
    for (long p = 2; Int(p) * p <= D; p++) {
        if (D % (Int(p) * p) != 0)
            continue;
        /* f = prod g_i^e_i mod p; g = prod g_i, h = prod g_i^(e_i - 1), F = (g h - f) / p */
        PolyP g{1}, h{1};
        for (auto &[gi, e] : factor_mod(f, p)) {
            g = mul_p(g, gi, p);
            for (int t = 1; t < e; t++)
                h = mul_p(h, gi, p);
        }
        PolyP gh = mul_p(g, h, 0);
        PolyP F(std::max(gh.size(), f.size()), 0);
        for (size_t i = 0; i < F.size(); i++)
            F[i] = ((i < gh.size() ? gh[i] : 0) - (i < f.size() ? f[i] : 0)) / p;
        if (degree_p(gcd_p(gcd_p(F, g, p), h, p)) > 0)
            return false;
    }
    return true;
}

IdealLattice ideal_from_generators(const Field &k, const std::vector<Coords> &gens, std::string name)
{
    int d = k->d;
    IMat rows(static_cast<int>(gens.size()) * d, d);
    int r = 0;
    for (auto &g : gens) {
        if (static_cast<int>(g.size()) != d)
            throw Error("DimensionMismatch", "generator has wrong length");
        for (auto &col : mult_columns(*k, g)) {
            for (int j = 0; j < d; j++)
                rows(r, j) = col[j];
            r++;
        }
    }
    return from_rows(k, rows, std::move(name));
}

IdealLattice ideal_from_matrix(const Field &k, const IMat &cols, std::string name)
{
    if (cols.rows != k->d)
        throw Error("DimensionMismatch", "basis has wrong row count");
    IdealLattice I = from_rows(k, cols.transpose(), std::move(name));
    if (!theta_closed(I))
        throw Error("NotAnIdeal", "lattice not closed under multiplication by theta");
    return I;
}

IdealLattice principal_ideal(const Field &k, long n)
{
    Coords g(k->d, 0);
    g[0] = n;
    return ideal_from_generators(k, {g}, "(" + std::to_string(n) + ")");
}

IdealLattice ideal_product(const IdealLattice &a, const IdealLattice &b)
{
    int d = a.field->d;
    IMat rows(d * d, d);
    int r = 0;
    for (int i = 0; i < d; i++)
        for (int j = 0; j < d; j++) {
            Coords x(d), y(d);
            for (int t = 0; t < d; t++) {
                x[t] = to_long(a.basis(t, i));
                y[t] = to_long(b.basis(t, j));
            }
            Coords z = times(*a.field, x, y);
            for (int t = 0; t < d; t++)
                rows(r, t) = z[t];
            r++;
        }
    std::string name = a.name.empty() || b.name.empty() ? a.name + b.name : a.name + "*" + b.name;
    return from_rows(a.field, rows, name);
}

std::vector<IdealLattice> prime_ideals_over(const Field &k, long p)
{
    int d = k->d;
    std::vector<long> f(d + 1);
    for (int i = 0; i <= d; i++)
        f[i] = to_long(k->min_poly[i]);
    auto factors = factor_mod(f, p);
    std::vector<IdealLattice> out;
    char tag = 'a';
    for (auto &[g, e] : factors) {
        Coords pc(d, 0), gc(d, 0);
        pc[0] = p;
        if (static_cast<int>(g.size()) - 1 == d) {
            out.push_back(principal_ideal(k, p));
            out.back().name = "P" + std::to_string(p);
            continue;
        }
        for (size_t i = 0; i < g.size(); i++)
            gc[i] = g[i];
        out.push_back(ideal_from_generators(k, {pc, gc}, "P" + std::to_string(p) + tag));
        tag++;
    }
    return out;
}

std::vector<IdealLattice> ideals_up_to(const Field &k, long cap)
{
    std::vector<IdealLattice> primes;
    std::vector<bool> composite(cap + 1, false);
    for (long p = 2; p <= cap; p++) {
        if (composite[p])
            continue;
        for (long q = p * p; q <= cap; q += p)
            composite[q] = true;
        for (auto &P : prime_ideals_over(k, p))
            if (P.norm <= cap)
                primes.push_back(P);
    }
    Coords one(k->d, 0);
    one[0] = 1;
    IdealLattice unit = ideal_from_generators(k, {one}, "O");
    std::vector<IdealLattice> out;
    std::function<void(size_t, const IdealLattice &)> dfs = [&](size_t from, const IdealLattice &I) {
        out.push_back(I);
        for (size_t j = from; j < primes.size(); j++)
            if (I.norm * primes[j].norm <= cap) {
                IdealLattice J = I.name == "O" ? primes[j] : ideal_product(I, primes[j]);
                dfs(j, J);
            }
    };
    dfs(0, unit);
    std::sort(out.begin(), out.end(), [](const IdealLattice &a, const IdealLattice &b) {
        if (a.norm != b.norm)
            return a.norm < b.norm;
        return a.basis.a < b.basis.a;
    });
    return out;
}

bool theta_closed(const IdealLattice &I)
{
    int d = I.field->d;
    Coords th(d, 0);
    if (d > 1)
        th[1] = 1;
    else
        th[0] = -to_long(I.field->min_poly[0]);
    for (int j = 0; j < d; j++) {
        Coords b(d);
        for (int i = 0; i < d; i++)
            b[i] = to_long(I.basis(i, j));
        if (!contains(I, times(*I.field, th, b)))
            return false;
    }
    return true;
}

Coords reduce(const IdealLattice &I, const Coords &y)
{
    int d = I.field->d;
    std::vector<Int> r(y.begin(), y.end());
    for (int i = 0; i < d; i++) {
        Int h = I.basis(i, i);
        Int q = r[i] / h;
        if (r[i] - q * h < 0)
            q -= 1;
        if (q != 0)
            for (int j = i; j < d; j++)
                r[j] -= q * I.basis(j, i);
    }
    Coords out(d);
    for (int i = 0; i < d; i++)
        out[i] = to_long(r[i]);
    return out;
}

bool contains(const IdealLattice &I, const Coords &y)
{
    for (auto x : reduce(I, y))
        if (x != 0)
            return false;
    return true;
}

bool is_invertible(const IdealLattice &I, const Coords &y)
{
    int d = I.field->d;
    IMat rows(2 * d, d);
    auto cols = mult_columns(*I.field, y);
    for (int j = 0; j < d; j++)
        for (int i = 0; i < d; i++) {
            rows(j, i) = cols[j][i];
            rows(d + j, i) = I.basis(i, j);
        }
    IMat h, u;
    hnf(rows, h, u);
    for (int i = 0; i < d; i++)
        if (h(i, i) != 1)
            return false;
    return true;
}

Int field_norm(const Field &k, const Coords &y)
{
    int d = k->d;
    IMat m(d, d);
    auto cols = mult_columns(*k, y);
    for (int i = 0; i < d; i++)
        for (int j = 0; j < d; j++)
            m(i, j) = cols[j][i];
    return det(m);
}

ReducedBasis reduced_basis(const IdealLattice &I)
{
    const NumberField &k = *I.field;
    int d = k.d;
    RMat A = sigma_matrix(k) * to_real(I.basis);
    Real R = pow(abs(det(A)), Real(1) / d);
    std::vector<std::pair<Real, Coords>> cand;
    std::vector<Coords> picked;
    std::vector<Real> minima;
    for (int round = 0; picked.size() < static_cast<size_t>(d); round++) {
        if (round > 60)
            throw Error("InvariantViolation", "reduced basis search did not terminate");
        cand.clear();
        for (auto &x : box_points(A, R, 5e7)) {
            bool zero = std::all_of(x.begin(), x.end(), [](long t) { return t == 0; });
            if (!zero)
                cand.push_back({sup_norm(embed_lattice(A, x)), x});
        }
        std::sort(cand.begin(), cand.end(), [](const auto &a, const auto &b) {
            if (a.first != b.first)
                return a.first < b.first;
            return a.second < b.second;
        });
        picked.clear();
        minima.clear();
        for (auto &[s, x] : cand) {
            picked.push_back(x);
            if (rank_of(picked, d) < static_cast<int>(picked.size())) {
                picked.pop_back();
                continue;
            }
            minima.push_back(s);
            if (picked.size() == static_cast<size_t>(d))
                break;
        }
        R *= Real(3) / 2;
    }

    /* inductive construction in lattice coordinates */
    std::vector<Coords> w;
    std::vector<std::vector<Rat>> gs; /* Gram-Schmidt of the v^i */
    for (int i = 0; i < d; i++) {
        const Coords &v = picked[i];
        std::vector<Rat> u = to_rat(v);
        for (auto &b : gs) {
            Rat c = dot(u, b) / dot(b, b);
            for (int t = 0; t < d; t++)
                u[t] -= c * b[t];
        }
        std::vector<Coords> span(picked.begin(), picked.begin() + i + 1);
        std::vector<Coords> S = saturation(span, d);
        std::vector<Rat> cs;
        Rat uu = dot(u, u);
        for (auto &s : S)
            cs.push_back(dot(to_rat(s), u) / uu);
        std::vector<Int> e;
        Rat g = rational_bezout(cs, e);
        if (g < 0) {
            g = -g;
            for (auto &x : e)
                x = -x;
        }
        Coords wt(d, 0);
        for (size_t t = 0; t < S.size(); t++)
            for (int j = 0; j < d; j++)
                wt[j] += to_long(e[t]) * S[t][j];
        Rat nq = 1 / g;
        if (denominator(nq) != 1)
            throw Error("InvariantViolation", "projection index is not an integer");
        long n = to_long(numerator(nq));
        /* v - n wt lies in span(w^1..w^(i-1)); solve for its coefficients l */
        std::vector<Rat> rest(d);
        for (int j = 0; j < d; j++)
            rest[j] = Rat(v[j] - n * wt[j]);
        Coords wi(d, 0);
        if (i > 0) {
            QMat G(i, i);
            std::vector<Rat> rhs(i);
            for (int a = 0; a < i; a++) {
                for (int b = 0; b < i; b++)
                    G(a, b) = dot(to_rat(w[a]), to_rat(w[b]));
                rhs[a] = dot(to_rat(w[a]), rest);
            }
            std::vector<Rat> l = inverse(G) * rhs;
            /* w = v/n - sum (l_j/n) w^j; shift each coefficient into [-1/2, 1/2] */
            for (int j = 0; j < d; j++)
                wi[j] = wt[j];
            for (int a = 0; a < i; a++) {
                if (denominator(l[a]) != 1)
                    throw Error("InvariantViolation", "non-integral lattice coefficient");
                Rat cq = -l[a] / n;
                Int shift = round_to_int(to_real(cq));
                for (int j = 0; j < d; j++)
                    wi[j] -= to_long(shift) * w[a][j];
            }
        } else {
            wi = wt;
        }
        w.push_back(wi);
        gs.push_back(u);
    }

    ReducedBasis rb;
    rb.minima = minima;
    rb.membership = true;
    Real slack = 1 + tol(0.5);
    Real f = 1;
    for (int i = 0; i < d; i++) {
        Vec sv = embed_lattice(A, w[i]);
        Real s = sup_norm(sv);
        rb.sup.push_back(s);
        if (s > f * minima[i] * slack)
            rb.membership = false;
        f *= Real(3) / 2;
    }
    IMat W(d, d);
    for (int i = 0; i < d; i++)
        for (int j = 0; j < d; j++)
            W(j, i) = w[i][j];
    rb.unimodular = abs(det(W)) == 1;
    /* report vectors in power-basis coordinates */
    auto to_power = [&](const Coords &x) {
        Coords y(d, 0);
        for (int r = 0; r < d; r++) {
            Int s = 0;
            for (int c = 0; c < d; c++)
                s += I.basis(r, c) * x[c];
            y[r] = to_long(s);
        }
        return y;
    };
    for (int i = 0; i < d; i++) {
        rb.v.push_back(to_power(picked[i]));
        rb.w.push_back(to_power(w[i]));
    }
    return rb;
}

IdealUniformity ideal_uniformity(const IdealLattice &I, const ReducedBasis &rb)
{
    const NumberField &k = *I.field;
    int d = k.d;
    RMat S = sigma_matrix(k);
    IdealUniformity u;
    u.psi = RMat(d, d);
    for (int j = 0; j < d; j++) {
        Vec c = embed_lattice(S, rb.w[j]);
        for (int i = 0; i < d; i++)
            u.psi(i, j) = c[i];
    }
    Uniformity m = uniformity(u.psi);
    u.M = m.M;
    u.S = m.S;
    u.ratio = u.M / pow(abs(to_real(k.disc)), Real(d - 1) / (2 * d));
    return u;
}

IdealUniformity ideal_uniformity(const IdealLattice &I)
{
    return ideal_uniformity(I, reduced_basis(I));
}

SearchConstant search_constant(const ConjugacyData &c, long samples, std::uint64_t seed)
{
    LogLattice l = log_lattice(c);
    int n = c.r1() + c.r2();
    if (l.rank != n - 1)
        throw Error("RankDeficient", "generators do not reach full unit rank");
    SearchConstant sc;
    sc.kappa = 0;
    for (auto &b : l.basis)
        sc.kappa += sup_norm(b);
    sc.kappa /= 2;
    sc.c_search = exp2r(sc.kappa);

    /* sampled sup-norm covering radius: nearest lattice point to random points of the
       fundamental parallelepiped, over the coordinate box that can hold it */
    int r = l.rank;
    DMat B(n, r);
    for (int j = 0; j < r; j++)
        for (int i = 0; i < n; i++)
            B(i, j) = l.basis[j][i].convert_to<double>();
    /* least-squares pseudo-inverse row sums bound the coordinate box */
    RMat Br(n, r);
    for (int j = 0; j < r; j++)
        for (int i = 0; i < n; i++)
            Br(i, j) = l.basis[j][i];
    RMat pinv = inverse(Br.transpose() * Br) * Br.transpose();
    double kap = sc.kappa.convert_to<double>();
    std::vector<long> half(r);
    for (int j = 0; j < r; j++) {
        Real s = 0;
        for (int i = 0; i < n; i++)
            s += abs(pinv(j, i));
        half[j] = static_cast<long>(std::ceil(s.convert_to<double>() * kap)) + 1;
    }
    SplitMix64 rng(seed);
    double worst = 0;
    for (long s = 0; s < samples; s++) {
        std::vector<double> t(r), a(n, 0.0);
        for (int j = 0; j < r; j++) {
            t[j] = rng.uniform();
            for (int i = 0; i < n; i++)
                a[i] += t[j] * B(i, j);
        }
        double best = std::numeric_limits<double>::infinity();
        std::vector<long> x(r);
        for (int j = 0; j < r; j++)
            x[j] = -half[j];
        for (;;) {
            double m = 0;
            for (int i = 0; i < n; i++) {
                double v = a[i];
                for (int j = 0; j < r; j++)
                    v -= static_cast<double>(x[j]) * B(i, j);
                m = std::max(m, std::abs(v));
            }
            best = std::min(best, m);
            int j = 0;
            while (j < r && x[j] == half[j] + 1)
                x[j] = -half[j], j++;
            if (j == r)
                break;
            x[j]++;
        }
        worst = std::max(worst, best);
    }
    sc.kappa_sample = Real(worst);
    if (sc.kappa_sample > sc.kappa * (1 + 1e-9))
        throw Error("InvariantViolation", "sampled covering radius exceeds the proven bound");
    return sc;
}

MinimalNorm minimal_norm(const ConjugacyData &c, const IdealLattice &I, const Coords &beta,
                         const IdealOptions &o)
{
    const NumberField &k = *c.field;
    int d = k.d;
    require_maximal(k);
    if (!is_invertible(I, beta))
        throw Error("NotInvertible", "class is not a unit modulo I");
    if (I.norm > Int(1000000000))
        throw Error("BudgetExceeded", "ideal norm too large for the class table");
    Quotient q(I);
    UnitAction ua = unit_action(c);
    size_t gens = ua.units.size();

    /* orbit of beta with exponents reaching each class */
    std::unordered_map<long, Exps> orbit;
    std::vector<Coords> frontier{q.reduce(beta)};
    orbit[q.id(beta)] = Exps(gens, 0);
    while (!frontier.empty()) {
        std::vector<Coords> next;
        for (auto &y : frontier) {
            const Exps &e = orbit[q.id(y)];
            for (size_t g = 0; g < gens; g++) {
                Coords z = q.reduce(times_mod(k, ua.units[g], y, q.N));
                long id = q.id(z);
                if (orbit.count(id))
                    continue;
                Exps f = e;
                f[g]++;
                orbit[id] = f;
                next.push_back(z);
            }
        }
        frontier.swap(next);
    }

    SearchConstant sc = search_constant(c, o.samples, o.seed);
    Real rho = needed_radius(sc.c_search, q.N, d);
    DMat Sd = to_double(sigma_matrix(k));
    for (;;) {
        long best = -1;
        Coords witness;
        double pts = 0;
        double cap = std::pow(rho.convert_to<double>(), d) * std::pow(2.0, k.r2) * (1 + 1e-6);
        search_box(k, rho, o.max_box, pts, [&](const Coords &y) {
            if (approx_norm(Sd, y, k.r1, k.r2) > cap)
                return;
            if (!orbit.count(q.id(y)))
                return;
            long n = exact_norm(k, y);
            if (best < 0 || n < best || (n == best && y < witness))
                best = n, witness = y;
        });
        if (best > 0 && needed_radius(sc.c_search, best, d) <= rho) {
            MinimalNorm m;
            m.value = best;
            m.witness = witness;
            m.exps = orbit[q.id(witness)];
            m.rho = rho;
            return m;
        }
        Real grow = best > 0 ? needed_radius(sc.c_search, best, d) : rho * 2;
        rho = grow > 2 * rho ? grow : Real(2 * rho);
    }
}

LInvariant L_invariant(const ConjugacyData &c, const IdealLattice &I, const IdealOptions &o,
                       bool keep_table)
{
    const NumberField &k = *c.field;
    int d = k.d;
    require_maximal(k);
    if (I.norm > o.norm_cap)
        throw Error("BudgetExceeded", "N(I) = " + I.norm.str() + " above the norm cap " +
                                          std::to_string(o.norm_cap));
    Quotient q(I);
    UnitAction ua = unit_action(c);
    long N = q.N;

    /* unit orbits on O_K / I by union-find */
    std::vector<long> parent(N);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<long(long)> find = [&](long x) {
        while (parent[x] != x)
            x = parent[x] = parent[parent[x]];
        return x;
    };
    for (long id = 0; id < N; id++) {
        Coords y = q.rep(id);
        for (auto &u : ua.units) {
            long j = q.id(times_mod(k, u, y, N));
            long a = find(id), b = find(j);
            if (a != b)
                parent[std::max(a, b)] = std::min(a, b);
        }
    }
    std::vector<long> root(N);
    std::map<long, bool> invertible;
    for (long id = 0; id < N; id++) {
        root[id] = find(id);
        if (!invertible.count(root[id]))
            invertible[root[id]] = is_invertible(I, q.rep(root[id]));
    }

    LInvariant out;
    out.N = I.norm;
    for (auto &[r, inv] : invertible)
        out.orbits += inv;
    for (long id = 0; id < N; id++)
        out.classes += invertible[root[id]];

    SearchConstant sc = search_constant(c, o.samples, o.seed);
    Real rho = needed_radius(sc.c_search, N, d);
    DMat Sd = to_double(sigma_matrix(k));
    std::map<long, long> best;
    for (;;) {
        best.clear();
        double pts = 0;
        double cap = std::pow(rho.convert_to<double>(), d) * std::pow(2.0, k.r2) * (1 + 1e-6);
        search_box(k, rho, o.max_box, pts, [&](const Coords &y) {
            if (approx_norm(Sd, y, k.r1, k.r2) > cap)
                return;
            long r = root[q.id(y)];
            if (!invertible[r])
                return;
            long n = exact_norm(k, y);
            auto it = best.find(r);
            if (it == best.end() || n < it->second)
                best[r] = n;
        });
        out.box_points = pts;
        Real need = 0;
        bool complete = true;
        for (auto &[r, inv] : invertible) {
            if (!inv)
                continue;
            auto it = best.find(r);
            if (it == best.end()) {
                complete = false;
                continue;
            }
            {
                Real r = needed_radius(sc.c_search, it->second, d);
                if (r > need)
                    need = r;
            }
        }
        if (complete && need <= rho)
            break;
        rho = need > 2 * rho ? need : Real(2 * rho);
    }
    out.rho = rho;
    long L = 0;
    for (auto &[r, n] : best)
        L = std::max(L, n);
    out.L = L;
    out.ratio = to_real(out.L) / to_real(out.N);
    if (keep_table)
        for (long id = 0; id < N; id++)
            if (invertible[root[id]])
                out.table.push_back({q.rep(id), best[root[id]]});
    return out;
}

StabilizerReport stabilizer_floor(const ConjugacyData &c, const IdealLattice &I, const Coords &beta)
{
    const NumberField &k = *c.field;
    int d = k.d;
    if (!is_invertible(I, beta))
        throw Error("NotInvertible", "class is not a unit modulo I");
    if (I.norm > Int(1000000000))
        throw Error("BudgetExceeded", "ideal norm too large for the orbit search");
    Quotient q(I);
    UnitAction ua = unit_action(c);
    long N = q.N;

    std::unordered_map<long, bool> seen;
    std::vector<Coords> frontier{q.reduce(beta)};
    seen[q.id(beta)] = true;
    while (!frontier.empty()) {
        std::vector<Coords> next;
        for (auto &y : frontier)
            for (auto &u : ua.units) {
                Coords z = q.reduce(times_mod(k, u, y, N));
                if (seen.emplace(q.id(z), true).second)
                    next.push_back(z);
            }
        frontier.swap(next);
    }

    StabilizerReport rep;
    rep.orbit = seen.size();
    LogLattice l = log_lattice(c);
    FundamentalSize fs = fundamental_size(l);
    Real target = log2r(to_real(I.norm)) - d;
    Real x = target / (d * fs.value);
    long per = x > 0 ? static_cast<long>(ceil(x).convert_to<double>()) : 1;
    rep.floor = 1;
    for (int j = 0; j < l.rank; j++)
        rep.floor *= per;
    rep.holds = static_cast<long>(rep.orbit) >= rep.floor;

    Coords one(d, 0);
    one[0] = 1;
    Coords one_mod = q.reduce(one);
    Coords b0 = q.reduce(beta);
    rep.congruent = true;
    rep.height_floor = true;
    for (auto &wit : fs.witnesses) {
        Exps e = l.exps(wit);
        Coords u = q.reduce(unit_coords(c, e));
        /* period of beta under u */
        long period = 0;
        Coords y = b0;
        do {
            y = q.reduce(times_mod(k, u, y, N));
            period++;
        } while (y != b0);
        Exps s = e;
        for (auto &t : s)
            t *= period;
        rep.stabilizers.push_back(s);
        Coords p = one_mod;
        for (long t = 0; t < period; t++)
            p = q.reduce(times_mod(k, u, p, N));
        rep.congruent = rep.congruent && p == one_mod;
        Real h = h0_norm(l.point(wit), l.weights) * period;
        rep.heights.push_back(h);
        if (h < target - tol(0.5))
            rep.height_floor = false;
    }
    if (!rep.holds)
        throw Error("InvariantViolation", "orbit of size " + std::to_string(rep.orbit) +
                                              " below the floor " + std::to_string(rep.floor));
    return rep;
}

} // namespace tor
