#include "tor/unitlog.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace tor {

std::vector<int> place_weights(const NumberField &k)
{
    std::vector<int> w(k.r1, 1);
    w.resize(k.r1 + k.r2, 2);
    return w;
}

Vec log_embed(const AlgebraicNumber &t)
{
    const NumberField &k = *t.field();
    if (!t.is_integral() || abs(norm_trace(t).first) != 1)
        throw Error("NotAUnit", "log embedding needs a unit of the order");
    Vec w(k.r1 + k.r2);
    for (int j = 0; j < k.r1 + k.r2; j++)
        w[j] = log2r(t.embed(j).abs());
    return w;
}

Real h0_norm(const Vec &w, const std::vector<int> &dw)
{
    Real s = 0;
    for (size_t j = 0; j < w.size(); j++)
        s += dw[j] * abs(w[j]);
    return s / 2;
}

Real q0_form(const Vec &w, const Vec &z, const std::vector<int> &dw)
{
    Real s = 0;
    for (size_t j = 0; j < w.size(); j++)
        s += dw[j] * w[j] * z[j];
    return s / 2;
}

static Rat rationalize(const Real &x, long maxden, const Real &eps)
{
    // continued fraction convergents
    Int p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    Real y = x;
    for (int it = 0; it < 64; it++) {
        Real a = floor(y);
        Int ai = round_to_int(a);
        Int p2 = ai * p1 + p0, q2 = ai * q1 + q0;
        if (q2 > maxden)
            break;
        Rat r(p2, q2);
        if (abs(x - to_real(r)) <= eps)
            return r;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        Real frac = y - a;
        if (frac == 0)
            break;
        y = 1 / frac;
    }
    throw Error("InvariantViolation", "log coefficients are not rational with small denominator");
}

static void fill_gram(LogLattice &l)
{
    l.gram = RMat(l.rank, l.rank);
    for (int i = 0; i < l.rank; i++)
        for (int j = 0; j < l.rank; j++)
            l.gram(i, j) = q0_form(l.basis[i], l.basis[j], l.weights);
}

Vec LogLattice::point(const std::vector<long> &x) const
{
    Vec w(weights.size(), Real(0));
    for (int i = 0; i < rank; i++)
        if (x[i] != 0)
            for (size_t j = 0; j < w.size(); j++)
                w[j] += basis[i][j] * x[i];
    return w;
}

Exps LogLattice::exps(const std::vector<long> &x) const
{
    if (basis_exps.empty())
        throw Error("InvalidInput", "lattice has no generator data");
    Exps e(basis_exps[0].size(), 0);
    for (int i = 0; i < rank; i++)
        for (size_t j = 0; j < e.size(); j++)
            e[j] += x[i] * basis_exps[i][j];
    return e;
}

LogLattice log_lattice(const ConjugacyData &c)
{
    LogLattice l;
    l.weights = place_weights(*c.field);
    int k = static_cast<int>(c.phi.size());
    int m = static_cast<int>(l.weights.size());
    std::vector<Vec> lv;
    for (auto &p : c.phi)
        lv.push_back(log_embed(p));

    // greedy independent subset
    std::vector<int> chosen;
    std::vector<Vec> ortho;
    Real eps = tol(0.25);
    for (int j = 0; j < k; j++) {
        Vec v = lv[j];
        Real n0 = 0;
        for (auto &x : v)
            n0 += x * x;
        for (auto &q : ortho) {
            Real dt = 0;
            for (int i = 0; i < m; i++)
                dt += v[i] * q[i];
            for (int i = 0; i < m; i++)
                v[i] -= dt * q[i];
        }
        Real n = 0;
        for (auto &x : v)
            n += x * x;
        if (n > eps * eps * (1 + n0)) {
            n = sqrt(n);
            for (auto &x : v)
                x /= n;
            ortho.push_back(v);
            chosen.push_back(j);
        }
    }
    int r = static_cast<int>(chosen.size());
    l.rank = r;
    if (r == 0) {
        for (int j = 0; j < k; j++) {
            Exps e(k, 0);
            e[j] = 1;
            l.torsion_exps.push_back(e);
        }
        fill_gram(l);
        return l;
    }

    // coordinates of every generator in the chosen basis, made rational
    RMat B(m, r);
    for (int i = 0; i < m; i++)
        for (int j = 0; j < r; j++)
            B(i, j) = lv[chosen[j]][i];
    RMat Bt = B.transpose();
    RMat pinv = inverse(Bt * B) * Bt;
    std::vector<std::vector<Rat>> coef(k);
    Int D = 1;
    for (int j = 0; j < k; j++) {
        Vec x = pinv * lv[j];
        for (int i = 0; i < r; i++) {
            Rat q = rationalize(x[i], 1000000, tol(0.25) * 64);
            coef[j].push_back(q);
            D = lcm(D, Int(denominator(q)));
        }
    }
    IMat M(k, r);
    for (int j = 0; j < k; j++)
        for (int i = 0; i < r; i++)
            M(j, i) = numerator(coef[j][i] * Rat(D));
    IMat H, U;
    hnf(M, H, U);
    for (int i = 0; i < k; i++) {
        bool zero = true;
        for (int c2 = 0; c2 < r; c2++)
            zero = zero && H(i, c2) == 0;
        Exps e(k);
        for (int j = 0; j < k; j++)
            e[j] = static_cast<long>(U(i, j));
        if (zero) {
            l.torsion_exps.push_back(e);
        } else {
            Vec w(m, Real(0));
            for (int j = 0; j < k; j++)
                for (int t = 0; t < m; t++)
                    w[t] += lv[j][t] * e[j];
            l.basis.push_back(w);
            l.basis_exps.push_back(e);
        }
    }
    fill_gram(l);
    return l;
}

LogLattice lattice_from_basis(const std::vector<Vec> &basis, const std::vector<int> &weights)
{
    LogLattice l;
    l.weights = weights;
    l.basis = basis;
    l.rank = static_cast<int>(basis.size());
    fill_gram(l);
    return l;
}

LogLattice scaled(const LogLattice &l, const Real &s)
{
    LogLattice o = l;
    for (auto &b : o.basis)
        for (auto &x : b)
            x *= s;
    fill_gram(o);
    return o;
}

namespace {

/* Coordinate box half-widths: |x_i| <= ||row_i(B^+)||_1 * R since |w_j| <= h0(w). */
std::vector<Real> box_widths(const LogLattice &l, RMat &pinv)
{
    int m = static_cast<int>(l.weights.size()), r = l.rank;
    RMat B(m, r);
    for (int i = 0; i < m; i++)
        for (int j = 0; j < r; j++)
            B(i, j) = l.basis[j][i];
    RMat Bt = B.transpose();
    pinv = inverse(Bt * B) * Bt;
    std::vector<Real> wdt(r, Real(0));
    for (int i = 0; i < r; i++)
        for (int j = 0; j < m; j++)
            wdt[i] += abs(pinv(i, j));
    return wdt;
}

template <class F>
void for_box(const std::vector<long> &lo, const std::vector<long> &hi, F &&f)
{
    size_t r = lo.size();
    std::vector<long> x = lo;
    if (r == 0) {
        f(x);
        return;
    }
    for (;;) {
        f(x);
        size_t j = 0;
        while (j < r && x[j] == hi[j]) {
            x[j] = lo[j];
            j++;
        }
        if (j == r)
            return;
        x[j]++;
    }
}

bool lex_less(const LatticePoint &a, const LatticePoint &b)
{
    if (a.h0 != b.h0)
        return a.h0 < b.h0;
    return a.x < b.x;
}

} // namespace

std::vector<long> enumeration_box(const LogLattice &l, const Real &radius)
{
    RMat pinv;
    std::vector<Real> wdt = box_widths(l, pinv);
    std::vector<long> b(l.rank);
    for (int i = 0; i < l.rank; i++)
        b[i] = static_cast<long>(std::floor(static_cast<double>(wdt[i] * radius) + 1e-9));
    return b;
}

std::vector<LatticePoint> enumerate_ball(const LogLattice &l, const Real &radius)
{
    std::vector<long> hi = enumeration_box(l, radius);
    int r = l.rank;
    std::vector<long> lo(r);
    for (int i = 0; i < r; i++)
        lo[i] = -hi[i];
    // double filter, then exact recheck
    std::vector<std::vector<double>> bd(r, std::vector<double>(l.weights.size()));
    for (int i = 0; i < r; i++)
        for (size_t j = 0; j < l.weights.size(); j++)
            bd[i][j] = static_cast<double>(l.basis[i][j]);
    double rd = static_cast<double>(radius);
    std::vector<LatticePoint> out;
    std::vector<double> w(l.weights.size());
    for_box(lo, hi, [&](const std::vector<long> &x) {
        std::fill(w.begin(), w.end(), 0.0);
        for (int i = 0; i < r; i++)
            for (size_t j = 0; j < w.size(); j++)
                w[j] += x[i] * bd[i][j];
        double h = 0;
        for (size_t j = 0; j < w.size(); j++)
            h += l.weights[j] * std::abs(w[j]);
        h /= 2;
        if (h > rd * (1 + 1e-9) + 1e-12)
            return;
        Real hr = h0_norm(l.point(x), l.weights);
        if (hr <= radius)
            out.push_back({x, hr});
    });
    std::sort(out.begin(), out.end(), lex_less);
    return out;
}

Minima successive_minima(const LogLattice &l, const Real &radius_bound)
{
    Minima res;
    std::vector<LatticePoint> pts = enumerate_ball(l, radius_bound);
    QMat sel(0, l.rank);
    for (auto &p : pts) {
        if (static_cast<int>(res.m.size()) == l.rank)
            break;
        bool zero = std::all_of(p.x.begin(), p.x.end(), [](long v) { return v == 0; });
        if (zero)
            continue;
        QMat trial(sel.rows + 1, l.rank);
        for (size_t i = 0; i < sel.a.size(); i++)
            trial.a[i] = sel.a[i];
        for (int j = 0; j < l.rank; j++)
            trial(sel.rows, j) = Rat(p.x[j]);
        if (rank(trial) == trial.rows) {
            sel = trial;
            res.m.push_back(p.h0);
            res.witnesses.push_back(p.x);
        }
    }
    if (static_cast<int>(res.m.size()) < l.rank)
        throw Error("RadiusTooSmall", "fewer than rank independent vectors within " + dec(radius_bound, 8));
    return res;
}

Minima successive_minima(const LogLattice &l)
{
    Real R = 0;
    for (auto &b : l.basis)
        R = std::max(R, h0_norm(b, l.weights));
    return successive_minima(l, R * (1 + tol(0.5)));
}

NearestPoint jarnik_nearest(const LogLattice &l, const Vec &target)
{
    NearestPoint np;
    int r = l.rank;
    RMat pinv;
    std::vector<Real> wdt = box_widths(l, pinv);
    Vec y = pinv * target;
    std::vector<long> x0(r);
    for (int i = 0; i < r; i++)
        x0[i] = static_cast<long>(round_to_int(y[i]));
    auto dist = [&](const std::vector<long> &x) {
        Vec w = l.point(x);
        for (size_t j = 0; j < w.size(); j++)
            w[j] -= target[j];
        return h0_norm(w, l.weights);
    };
    Real rho = dist(x0);
    std::vector<long> lo(r), hi(r);
    for (int i = 0; i < r; i++) {
        double c = static_cast<double>(y[i]), wd = static_cast<double>(wdt[i] * rho);
        lo[i] = static_cast<long>(std::floor(c - wd - 1e-9));
        hi[i] = static_cast<long>(std::ceil(c + wd + 1e-9));
    }
    np.x = x0;
    np.distance = rho;
    for_box(lo, hi, [&](const std::vector<long> &x) {
        Real dd = dist(x);
        if (dd < np.distance || (dd == np.distance && x < np.x)) {
            np.distance = dd;
            np.x = x;
        }
    });
    np.w = l.point(np.x);
    Minima mn = successive_minima(l);
    np.bound = 0;
    for (auto &m : mn.m)
        np.bound += m;
    np.bound /= 2;
    np.within_bound = np.distance <= np.bound * (1 + tol(0.25));
    return np;
}

FundamentalSize fundamental_size(const LogLattice &l)
{
    Minima mn = successive_minima(l);
    FundamentalSize fs;
    fs.value = mn.m.empty() ? Real(0) : mn.m.back();
    fs.witnesses = mn.witnesses;
    return fs;
}

AlgebraicNumber phi_of(const ConjugacyData &c, const Exps &e)
{
    auto t = AlgebraicNumber::from_int(c.field, 1);
    for (size_t j = 0; j < e.size(); j++)
        if (e[j] != 0)
            t = t * c.phi[j].pow(e[j]);
    return t;
}

bool ratio_test(const IMat &g)
{
    IntPoly cp = charpoly(g);
    if (!is_squarefree(cp))
        return false;
    std::vector<CertRoot> rs = find_roots(cp, precision());
    int d = g.rows;
    int mmax = max_root_of_unity_order(d * d);
    Real eps = tol(0.25);
    for (size_t i = 0; i < rs.size(); i++)
        for (size_t j = i + 1; j < rs.size(); j++) {
            Cx r = rs[i].z / rs[j].z;
            if (abs(r.abs() - 1) > eps)
                continue;
            Cx p = r;
            for (int m = 1; m <= mmax; m++) {
                if ((p - Cx(Real(1))).abs() <= eps)
                    return false;
                p *= r;
            }
        }
    return true;
}

bool is_totally_irreducible(const IMat &g)
{
    return is_irreducible(charpoly(g)) && ratio_test(g);
}

TotallyIrreducible find_totally_irreducible(const ConjugacyData &c, int search_N, double c3)
{
    LogLattice l = log_lattice(c);
    Real F = fundamental_size(l).value;
    int k = static_cast<int>(c.group.generators.size());
    for (int shell = 1; shell <= search_N; shell++) {
        struct Cand {
            double mahler;
            Exps e;
        };
        std::vector<Cand> cands;
        Exps e(k, -shell);
        for (;;) {
            long mx = 0;
            for (long v : e)
                mx = std::max(mx, std::labs(v));
            if (mx == shell)
                cands.push_back(
                    {std::round(matrix_mahler(group_element(c.group, e)) * 1e9) / 1e9, e});
            int j = 0;
            while (j < k && e[j] == shell)
                e[j++] = -shell;
            if (j == k)
                break;
            e[j]++;
        }
        auto key = [](const Exps &x) {
            std::vector<long> kk{0};
            for (long v : x) {
                kk[0] += std::labs(v);
                kk.push_back(v == 0 ? 1000 : 2 * std::labs(v) + (v < 0));
            }
            return kk;
        };
        std::stable_sort(cands.begin(), cands.end(), [&](const Cand &a, const Cand &b) {
            return a.mahler != b.mahler ? a.mahler < b.mahler : key(a.e) < key(b.e);
        });
        for (auto &cd : cands) {
            IMat g = group_element(c.group, cd.e);
            if (!is_totally_irreducible(g))
                continue;
            TotallyIrreducible ti;
            ti.exps = cd.e;
            ti.g = g;
            ti.phi = phi_of(c, cd.e);
            ti.height = mahler_height(ti.phi);
            ti.F = F;
            ti.within_c3F = ti.height <= F * c3;
            return ti;
        }
    }
    throw Error("SearchExhausted", "no totally irreducible element with exponents up to " +
                                       std::to_string(search_N));
}

double voutier_constant(int d)
{
    double x = std::log2(std::max(d, 3));
    double t = std::log2(x) / x;
    return t * t * t / (4.0 * d);
}

std::vector<IMat> torsion_subgroup(const ConjugacyData &c, const LogLattice &l)
{
    std::vector<IMat> gens;
    for (auto &e : l.torsion_exps)
        gens.push_back(group_element(c.group, e));
    std::vector<IMat> out{IMat::identity(c.d())};
    for (size_t i = 0; i < out.size(); i++) {
        for (auto &g : gens) {
            IMat h = out[i] * g;
            if (std::find(out.begin(), out.end(), h) == out.end())
                out.push_back(h);
        }
        if (out.size() > 10000)
            throw Error("InvariantViolation", "torsion subgroup is not finite");
    }
    return out;
}

} // namespace tor
