#include "tor/conjugacy.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tor {

ToralGroup validate_group(const std::vector<IMat> &gens)
{
    if (gens.empty())
        throw Error("InvalidInput", "no generators");
    int d = gens[0].rows;
    if (d < 3)
        throw Error("DimensionTooSmall", "d = " + std::to_string(d));
    for (size_t i = 0; i < gens.size(); i++) {
        if (gens[i].rows != d || gens[i].cols != d)
            throw Error("InvalidInput", "generator " + std::to_string(i) + " has wrong shape");
        if (det(gens[i]) != 1)
            throw Error("NotUnimodular", "generator " + std::to_string(i));
    }
    for (size_t i = 0; i < gens.size(); i++)
        for (size_t j = i + 1; j < gens.size(); j++)
            if (!(gens[i] * gens[j] == gens[j] * gens[i]))
                throw Error("NotCommuting",
                            "generators " + std::to_string(i) + ", " + std::to_string(j));
    return {d, gens};
}

IMat group_element(const ToralGroup &g, const std::vector<long> &e)
{
    IMat m = IMat::identity(g.d);
    for (size_t j = 0; j < e.size(); j++) {
        if (e[j] == 0)
            continue;
        IMat b = e[j] > 0 ? g.generators[j] : inverse_unimodular(g.generators[j]);
        m = m * ipow(b, std::labs(e[j]));
    }
    return m;
}

static Eigen::VectorXcd eigenvalues_double(const IMat &g)
{
    Eigen::MatrixXd m(g.rows, g.cols);
    for (int i = 0; i < g.rows; i++)
        for (int j = 0; j < g.cols; j++)
            m(i, j) = static_cast<double>(g(i, j));
    return Eigen::EigenSolver<Eigen::MatrixXd>(m, false).eigenvalues();
}

double matrix_mahler(const IMat &g)
{
    double s = 0;
    for (auto &e : eigenvalues_double(g))
        if (std::abs(e) > 1)
            s += std::log2(std::abs(e));
    return s;
}

int max_root_of_unity_order(int n)
{
    // phi(m) >= sqrt(m/2), so m <= 2 n^2 bounds the search
    int best = 1;
    for (int m = 1; m <= 2 * n * n + 2; m++) {
        int phi = m, x = m;
        for (int p = 2; p * p <= x; p++)
            if (x % p == 0) {
                while (x % p == 0)
                    x /= p;
                phi -= phi / p;
            }
        if (x > 1)
            phi -= phi / x;
        if (phi <= n)
            best = m;
    }
    return best;
}

static bool is_torsion(const IMat &g)
{
    for (auto &e : eigenvalues_double(g))
        if (std::abs(std::abs(e) - 1.0) > 1e-9)
            return false;
    int mmax = max_root_of_unity_order(g.rows);
    IMat id = IMat::identity(g.rows), p = g;
    for (int m = 1; m <= mmax; m++) {
        if (p == id)
            return true;
        p = p * g;
    }
    return false;
}

/* One-dimensional kernel of g - theta over K, normalised. */
static std::vector<AlgebraicNumber> eigenvector(const IMat &g, const Field &k)
{
    int d = g.rows;
    auto th = AlgebraicNumber::gen(k);
    std::vector<std::vector<AlgebraicNumber>> m(d);
    for (int i = 0; i < d; i++)
        for (int j = 0; j < d; j++) {
            auto e = AlgebraicNumber::from_int(k, g(i, j));
            m[i].push_back(i == j ? e - th : e);
        }
    std::vector<int> pivots;
    int r = 0;
    for (int j = 0; j < d && r < d; j++) {
        int p = r;
        while (p < d && m[p][j].is_zero())
            p++;
        if (p == d)
            continue;
        std::swap(m[r], m[p]);
        auto inv = m[r][j].inverse();
        for (int c = 0; c < d; c++)
            m[r][c] = m[r][c] * inv;
        for (int i = 0; i < d; i++) {
            if (i == r || m[i][j].is_zero())
                continue;
            auto f = m[i][j];
            for (int c = 0; c < d; c++)
                m[i][c] = m[i][c] - f * m[r][c];
        }
        pivots.push_back(j);
        r++;
    }
    if (r != d - 1)
        throw Error("InvariantViolation", "eigenspace is not one-dimensional");
    std::vector<bool> is_piv(d, false);
    for (int p : pivots)
        is_piv[p] = true;
    int f = 0;
    while (is_piv[f])
        f++;
    std::vector<AlgebraicNumber> v(d, AlgebraicNumber::from_int(k, 0));
    v[f] = AlgebraicNumber::from_int(k, 1);
    for (size_t i = 0; i < pivots.size(); i++)
        v[pivots[i]] = -m[i][f];
    int first = 0;
    while (v[first].is_zero())
        first++;
    auto inv = v[first].inverse();
    for (auto &x : v)
        x = x * inv;
    return v;
}

std::vector<Real> ConjugacyData::embed(const AlgebraicNumber &t) const
{
    int d = this->d(), a = r1(), b = r2();
    std::vector<Real> x(d);
    for (int i = 0; i < a; i++)
        x[i] = t.embed(i).re;
    for (int j = 0; j < b; j++) {
        Cx z = t.embed(a + j);
        x[a + j] = z.re;
        x[a + b + j] = z.im;
    }
    return x;
}

RMat ConjugacyData::mult(const AlgebraicNumber &t) const
{
    int d = this->d(), a = r1(), b = r2();
    RMat m(d, d);
    for (int i = 0; i < a; i++)
        m(i, i) = t.embed(i).re;
    for (int j = 0; j < b; j++) {
        Cx z = t.embed(a + j);
        int p = a + j, q = a + b + j;
        m(p, p) = z.re;
        m(p, q) = -z.im;
        m(q, p) = z.im;
        m(q, q) = z.re;
    }
    return m;
}

std::vector<Rat> ConjugacyData::to_torus(const AlgebraicNumber &t) const
{
    std::vector<Rat> x(d());
    for (int k = 0; k < d(); k++)
        x[k] = norm_trace(t * v1[k]).second;
    return x;
}

AlgebraicNumber ConjugacyData::eigenvalue(const IMat &h) const
{
    int d = this->d();
    std::vector<AlgebraicNumber> hv;
    for (int i = 0; i < d; i++) {
        auto s = AlgebraicNumber::from_int(field, 0);
        for (int j = 0; j < d; j++)
            if (h(i, j) != 0)
                s = s + v1[j] * Rat(h(i, j));
        hv.push_back(s);
    }
    int j0 = 0;
    while (v1[j0].is_zero())
        j0++;
    AlgebraicNumber lam = hv[j0]; // v1[j0] == 1
    for (int i = 0; i < d; i++)
        if (hv[i] != lam * v1[i])
            throw Error("InvariantViolation", "matrix does not preserve the eigenline");
    return lam;
}

Uniformity uniformity(const RMat &psi)
{
    int d = psi.rows;
    Real dt = abs(det(psi));
    if (dt < tol(0.5))
        throw Error("Singular", "|det psi| below tolerance");
    Real s = exp(log(dt) / d);
    Real a = opnorm(psi) / s;
    Real b = opnorm(inverse(psi)) * s;
    return {a > b ? a : b, s};
}

Real conjugation_residual(const ConjugacyData &c)
{
    Real worst = 0, np = opnorm(c.psi);
    for (size_t i = 0; i < c.group.generators.size(); i++) {
        RMat lhs = c.psi * to_real(c.group.generators[i]);
        RMat rhs = c.mult(c.phi[i]) * c.psi;
        for (size_t k = 0; k < lhs.a.size(); k++) {
            Real e = abs(lhs.a[k] - rhs.a[k]) / np;
            if (e > worst)
                worst = e;
        }
    }
    return worst;
}

ConjugacyData build_conjugacy(const ToralGroup &g, const ConjugacyOptions &opt)
{
    int k = static_cast<int>(g.generators.size());
    int N = opt.search_bound;
    struct Cand {
        double mahler;
        std::vector<long> e;
    };
    std::vector<Cand> cands;
    std::vector<long> e(k, -N);
    for (;;) {
        IMat m = group_element(g, e);
        cands.push_back({std::round(matrix_mahler(m) * 1e9) / 1e9, e});
        int j = 0;
        while (j < k && e[j] == N)
            e[j++] = -N;
        if (j == k)
            break;
        e[j]++;
    }
    // ties: fewer generator factors, then earlier generators, positive powers first
    auto key = [](const std::vector<long> &e) {
        std::vector<long> k{0};
        for (long x : e) {
            k[0] += std::labs(x);
            k.push_back(x == 0 ? 1000 : 2 * std::labs(x) + (x < 0));
        }
        return k;
    };
    std::stable_sort(cands.begin(), cands.end(), [&](const Cand &a, const Cand &b) {
        return a.mahler != b.mahler ? a.mahler < b.mahler : key(a.e) < key(b.e);
    });

    ConjugacyData c;
    c.group = g;
    IMat w;
    bool found = false;
    for (auto &cand : cands) {
        w = group_element(g, cand.e);
        IntPoly cp = charpoly(w);
        if (is_irreducible(cp)) {
            c.witness = cand.e;
            c.field = make_field(cp);
            found = true;
            break;
        }
    }
    if (!found)
        throw Error("NoIrreducibleElement",
                    "no element with exponents in [-" + std::to_string(N) + ", " +
                        std::to_string(N) + "] has irreducible characteristic polynomial");

    c.v1 = eigenvector(w, c.field);
    for (auto &h : g.generators) {
        c.phi.push_back(c.eigenvalue(h));
        c.torsion.push_back(is_torsion(h));
    }
    for (size_t i = 0; i < g.generators.size(); i++)
        if (c.phi[i].is_one() && !(g.generators[i] == IMat::identity(g.d)))
            throw Error("InvariantViolation", "phi is not injective on generators");

    int d = g.d, a = c.r1(), b = c.r2();
    RMat W(d, d);
    for (int i = 0; i < d; i++) {
        for (int r = 0; r < a; r++)
            W(i, r) = c.v1[i].embed(r).re;
        for (int j = 0; j < b; j++) {
            Cx z = c.v1[i].embed(a + j);
            W(i, a + j) = 2 * z.re;
            W(i, a + b + j) = -2 * z.im;
        }
    }
    c.psi_inverse = W;
    c.psi = inverse(W);
    Uniformity u = uniformity(c.psi);
    c.uniformity = u.M;
    c.scale = u.S;
    if (conjugation_residual(c) > tol(0.25))
        throw Error("ConjugationResidualTooLarge", dec(conjugation_residual(c), 10));
    return c;
}

RankReport rank_and_maximality(const ConjugacyData &c)
{
    int m = c.r1() + c.r2();
    std::vector<std::vector<Real>> basis;
    Real eps = tol(0.25);
    for (size_t i = 0; i < c.phi.size(); i++) {
        std::vector<Real> v(m);
        for (int j = 0; j < m; j++)
            v[j] = log2r(c.phi[i].embed(j).abs());
        Real n0 = 0;
        for (auto &x : v)
            n0 += x * x;
        for (auto &q : basis) {
            Real dt = 0;
            for (int j = 0; j < m; j++)
                dt += v[j] * q[j];
            for (int j = 0; j < m; j++)
                v[j] -= dt * q[j];
        }
        Real n = 0;
        for (auto &x : v)
            n += x * x;
        if (n > eps * eps * (1 + n0)) {
            n = sqrt(n);
            for (auto &x : v)
                x /= n;
            basis.push_back(v);
        }
    }
    RankReport r;
    r.rank = static_cast<int>(basis.size());
    r.unit_rank = m - 1;
    r.maximal = r.rank == r.unit_rank;
    r.rank_at_least_two = r.rank >= 2;
    return r;
}

} // namespace tor
