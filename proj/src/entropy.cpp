#include "tor/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

namespace tor {

Real FiniteMeasure::total_mass() const
{
    Real s = 0;
    for (auto &w : weights)
        s += w;
    return s;
}

namespace {

Vec frac_vec(Vec x)
{
    for (auto &v : x)
        v -= floor(v);
    return x;
}

bool in_unit_cube(const Vec &x)
{
    for (auto &v : x)
        if (v < 0 || v >= 1)
            return false;
    return true;
}

} // namespace

FiniteMeasure make_measure(const ConjugacyData &c, FiniteMeasure::Space space,
                           std::vector<Vec> points, Vec weights)
{
    if (points.size() != weights.size())
        throw Error("InvalidInput", "point and weight counts differ");
    for (auto &w : weights)
        if (w < 0)
            throw Error("InvalidInput", "negative weight");
    int d = c.d();
    for (auto &p : points) {
        if (static_cast<int>(p.size()) != d)
            throw Error("InvalidInput", "point dimension mismatch");
        if (space == FiniteMeasure::Space::Torus) {
            p = frac_vec(p);
        } else {
            Vec x = c.psi_inverse * p;
            if (!in_unit_cube(x))
                p = c.psi * frac_vec(x);
        }
    }
    FiniteMeasure m;
    m.space = space;
    m.points = std::move(points);
    m.weights = std::move(weights);
    return m;
}

FiniteMeasure uniform_measure(const ConjugacyData &c, FiniteMeasure::Space space,
                              std::vector<Vec> points)
{
    Vec w(points.size(), Real(1) / Real(static_cast<long>(points.size())));
    return make_measure(c, space, std::move(points), std::move(w));
}

FiniteMeasure push_to_X(const ConjugacyData &c, const FiniteMeasure &mu)
{
    if (mu.space == FiniteMeasure::Space::X)
        return mu;
    FiniteMeasure t;
    t.space = FiniteMeasure::Space::X;
    t.weights = mu.weights;
    for (auto &p : mu.points)
        t.points.push_back(c.psi * p);
    return t;
}

FiniteMeasure pull_to_torus(const ConjugacyData &c, const FiniteMeasure &tau)
{
    if (tau.space == FiniteMeasure::Space::Torus)
        return tau;
    FiniteMeasure m;
    m.weights = tau.weights;
    for (auto &p : tau.points)
        m.points.push_back(frac_vec(c.psi_inverse * p));
    return m;
}

static Real plogp(const Real &u)
{
    return u > 0 ? Real(-u * log2r(u)) : Real(0);
}

Real grid_entropy(const FiniteMeasure &mu, const Real &eps)
{
    if (eps <= 0)
        throw Error("InvalidInput", "mesh must be positive");
    if (mu.space != FiniteMeasure::Space::Torus)
        throw Error("InvalidInput", "grid entropy needs a measure on the torus");
    Real n = ceil(Real(1) / eps);
    std::map<std::vector<long>, Real> cells;
    for (size_t a = 0; a < mu.size(); a++) {
        std::vector<long> key;
        for (auto &x : mu.points[a])
            key.push_back(floor(x * n).convert_to<long>());
        cells[key] += mu.weights[a];
    }
    Real h = 0;
    for (auto &[k, m] : cells)
        h += plogp(m);
    return h;
}

std::vector<int> coordinate_places(const ConjugacyData &c)
{
    int r1 = c.r1(), r2 = c.r2();
    std::vector<int> pl;
    for (int j = 0; j < r1 + r2; j++)
        pl.push_back(j);
    for (int j = 0; j < r2; j++)
        pl.push_back(r1 + j);
    return pl;
}

BoxSpec cube_box(const ConjugacyData &c, const Real &R)
{
    return {Vec(c.r1() + c.r2(), R), Vec(c.d(), Real(0))};
}

Vec box_sides(const ConjugacyData &c, const BoxSpec &b)
{
    auto pl = coordinate_places(c);
    Vec L(c.d());
    for (int j = 0; j < c.d(); j++)
        L[j] = exp2r(-b.w[pl[j]]) * c.scale;
    return L;
}

Real injectivity_radius(const ConjugacyData &c)
{
    return log2r(sqrt(Real(c.d())) * c.uniformity);
}

bool is_injective(const ConjugacyData &c, const BoxSpec &b)
{
    Real r = injectivity_radius(c);
    for (auto &w : b.w)
        if (w < r)
            return false;
    return true;
}

BoxSpec refine(const BoxSpec &b, const std::vector<long> &t)
{
    BoxSpec r = b;
    for (size_t i = 0; i < t.size(); i++)
        r.w[i] += t[i];
    int d = static_cast<int>(b.anchor.size());
    int m = static_cast<int>(b.w.size());
    int r2 = d - m;
    for (int j = 0; j < d; j++) {
        int p = j < m ? j : j - r2;
        r.anchor[j] *= exp2r(Real(-t[p]));
    }
    return r;
}

namespace {

/* A translate of the box around atom `a`: atom `atom` sits in x + B exactly when
   o + u lies in [0, L), where u = y_a - x - anchor ranges over [0, L). */
struct Nb {
    size_t atom;
    Vec o;
};

struct Layout {
    int d = 0;
    Vec L, ell;
    std::vector<bool> refined;
    std::vector<std::vector<Nb>> nb; /* nb[a][0] is a itself */
};

Layout make_layout(const ConjugacyData &c, const FiniteMeasure &tau, const BoxSpec &b,
                   const std::vector<long> &t)
{
    if (!is_injective(c, b))
        throw Error("NotInjective", "box side exponents below log2(sqrt(d) M)");
    for (auto x : t)
        if (x < 0 || x > 60)
            throw Error("InvalidInput", "refinement exponents must lie in 0..60");
    int d = c.d();
    auto pl = coordinate_places(c);
    Layout ly;
    ly.d = d;
    ly.L = box_sides(c, b);
    ly.ell.resize(d);
    ly.refined.resize(d);
    for (int j = 0; j < d; j++) {
        long tj = t.empty() ? 0 : t[pl[j]];
        ly.refined[j] = tj > 0;
        ly.ell[j] = ly.L[j] * exp2r(Real(-tj));
    }

    size_t N = tau.size();
    std::vector<Vec> x(N);
    std::vector<std::vector<double>> xd(N, std::vector<double>(d));
    for (size_t a = 0; a < N; a++) {
        x[a] = frac_vec(c.psi_inverse * tau.points[a]);
        for (int j = 0; j < d; j++)
            xd[a][j] = x[a][j].convert_to<double>();
    }
    DMat psid = to_double(c.psi), wd = to_double(c.psi_inverse);
    std::vector<double> Ld(d), rad(d);
    for (int j = 0; j < d; j++)
        Ld[j] = ly.L[j].convert_to<double>();
    for (int j = 0; j < d; j++) {
        double s = 0;
        for (int k = 0; k < d; k++)
            s += std::fabs(wd(j, k)) * Ld[k];
        rad[j] = s * (1 + 1e-9) + 1e-12;
    }

    std::vector<long> nbk(d);
    for (int j = 0; j < d; j++)
        nbk[j] = std::clamp(static_cast<long>(std::floor(1.0 / rad[j])), 1L, 64L);
    auto bucket = [&](const std::vector<double> &p) {
        std::vector<long> k(d);
        for (int j = 0; j < d; j++)
            k[j] = std::min(nbk[j] - 1, static_cast<long>(std::floor(p[j] * nbk[j])));
        return k;
    };
    std::map<std::vector<long>, std::vector<size_t>> buckets;
    for (size_t a = 0; a < N; a++)
        buckets[bucket(xd[a])].push_back(a);

    ly.nb.resize(N);
    for (size_t a = 0; a < N; a++) {
        ly.nb[a].push_back({a, Vec(d, Real(0))});
        auto home = bucket(xd[a]);
        std::vector<std::vector<long>> offs(d);
        for (int j = 0; j < d; j++) {
            std::vector<long> v;
            for (long s = -1; s <= 1; s++)
                v.push_back(((home[j] + s) % nbk[j] + nbk[j]) % nbk[j]);
            std::sort(v.begin(), v.end());
            v.erase(std::unique(v.begin(), v.end()), v.end());
            offs[j] = v;
        }
        std::vector<size_t> idx(d, 0);
        while (true) {
            std::vector<long> key(d);
            for (int j = 0; j < d; j++)
                key[j] = offs[j][idx[j]];
            auto it = buckets.find(key);
            if (it != buckets.end()) {
                for (size_t a2 : it->second) {
                    std::vector<double> del(d);
                    std::vector<long> lo(d), hi(d);
                    for (int j = 0; j < d; j++) {
                        del[j] = xd[a2][j] - xd[a][j];
                        lo[j] = static_cast<long>(std::ceil(del[j] - rad[j]));
                        hi[j] = static_cast<long>(std::floor(del[j] + rad[j]));
                    }
                    std::vector<long> n(lo);
                    bool any = true;
                    for (int j = 0; j < d; j++)
                        any = any && lo[j] <= hi[j];
                    while (any) {
                        bool self = a2 == a;
                        for (int j = 0; j < d; j++)
                            self = self && n[j] == 0;
                        bool ok = !self;
                        for (int k = 0; ok && k < d; k++) {
                            double s = 0;
                            for (int j = 0; j < d; j++)
                                s += psid(k, j) * (del[j] - n[j]);
                            ok = std::fabs(s) < Ld[k] * (1 + 1e-9);
                        }
                        if (ok) {
                            Vec v(d);
                            for (int j = 0; j < d; j++)
                                v[j] = x[a2][j] - x[a][j] - Real(n[j]);
                            Vec o = c.psi * v;
                            bool in = true;
                            for (int k = 0; k < d; k++)
                                in = in && abs(o[k]) < ly.L[k];
                            if (in)
                                ly.nb[a].push_back({a2, o});
                        }
                        int j = 0;
                        while (j < d && ++n[j] > hi[j]) {
                            n[j] = lo[j];
                            j++;
                        }
                        if (j == d)
                            break;
                    }
                }
            }
            int j = 0;
            while (j < d && ++idx[j] >= offs[j].size()) {
                idx[j] = 0;
                j++;
            }
            if (j == d)
                break;
        }
    }
    return ly;
}

/* Values of the integrand for one configuration: the covering entries of nb[a]
   and, per entry, the label of the refined sub-box containing its atom. */
using Integrand = std::function<void(size_t a, const std::vector<int> &cover,
                                     const std::vector<int> &labels, std::vector<Real> &out)>;

struct SweepResult {
    std::vector<std::vector<Real>> per_atom; /* sum over cells of measure * value */
    std::vector<Real> total;
    std::vector<Real> stderr_;
    bool sampled = false;
};

void sorted_points(std::vector<Real> &v, const Real &merge)
{
    std::sort(v.begin(), v.end());
    std::vector<Real> r;
    for (auto &x : v)
        if (r.empty() || x - r.back() > merge)
            r.push_back(x);
    v.swap(r);
}

struct AtomGrid {
    std::vector<std::vector<Real>> coarse; /* per axis, breakpoints in [0, L] */
    std::vector<std::vector<Real>> phase;  /* per refined axis, breakpoints in [0, ell] */
};

AtomGrid atom_grid(const Layout &ly, size_t a)
{
    int d = ly.d;
    AtomGrid g;
    g.coarse.resize(d);
    g.phase.resize(d);
    for (int j = 0; j < d; j++) {
        Real merge = ly.L[j] * tol(0.75);
        auto &cb = g.coarse[j];
        cb = {Real(0), ly.L[j]};
        for (auto &n : ly.nb[a]) {
            for (Real e : {Real(-n.o[j]), Real(ly.L[j] - n.o[j])})
                if (e > 0 && e < ly.L[j])
                    cb.push_back(e);
        }
        sorted_points(cb, merge);
        if (ly.refined[j]) {
            auto &pb = g.phase[j];
            pb = {Real(0), ly.ell[j]};
            for (auto &n : ly.nb[a]) {
                Real e = -n.o[j];
                e -= floor(e / ly.ell[j]) * ly.ell[j];
                if (e > 0 && e < ly.ell[j])
                    pb.push_back(e);
            }
            sorted_points(pb, ly.ell[j] * tol(0.75));
        }
    }
    return g;
}

double grid_cells(const Layout &ly, const AtomGrid &g)
{
    double n = 1;
    for (int j = 0; j < ly.d; j++) {
        n *= static_cast<double>(g.coarse[j].size() - 1);
        if (ly.refined[j])
            n *= static_cast<double>(g.phase[j].size() - 1);
    }
    return n;
}

double layout_cells(const Layout &ly)
{
    double n = 0;
    for (size_t a = 0; a < ly.nb.size(); a++)
        n += grid_cells(ly, atom_grid(ly, a)) * static_cast<double>(ly.nb[a].size());
    return n;
}

/* measure of {u in [c0, c1) : u mod ell in [p0, p1)} */
Real phase_measure(const Real &c0, const Real &c1, const Real &p0, const Real &p1, const Real &ell)
{
    auto lam = [&](const Real &x) {
        Real k = floor(x / ell);
        Real r = x - k * ell - p0;
        Real w = p1 - p0;
        if (r < 0)
            r = 0;
        if (r > w)
            r = w;
        return Real(k * w + r);
    };
    return lam(c1) - lam(c0);
}

/* Labels numbered by first occurrence, so equal partitions give equal label vectors. */
std::vector<int> canonical_labels(const std::vector<std::vector<long>> &keys)
{
    size_t n = keys.size();
    std::vector<size_t> ord(n);
    for (size_t k = 0; k < n; k++)
        ord[k] = k;
    std::stable_sort(ord.begin(), ord.end(),
                     [&](size_t x, size_t y) { return keys[x] < keys[y]; });
    std::vector<size_t> group(n), first;
    for (size_t r = 0; r < n; r++) {
        if (r == 0 || keys[ord[r]] != keys[ord[r - 1]])
            first.push_back(ord[r]);
        group[ord[r]] = first.size() - 1;
    }
    std::vector<size_t> gorder(first.size());
    for (size_t g = 0; g < first.size(); g++)
        gorder[g] = g;
    std::sort(gorder.begin(), gorder.end(),
              [&](size_t x, size_t y) { return first[x] < first[y]; });
    std::vector<int> rank(first.size());
    for (size_t r = 0; r < gorder.size(); r++)
        rank[gorder[r]] = static_cast<int>(r);
    std::vector<int> lab(n);
    for (size_t k = 0; k < n; k++)
        lab[k] = rank[group[k]];
    return lab;
}

SweepResult sweep_exact(const Layout &ly, size_t nq, const Integrand &fn)
{
    int d = ly.d;
    size_t N = ly.nb.size();
    SweepResult res;
    res.per_atom.assign(N, std::vector<Real>(nq, Real(0)));
    res.total.assign(nq, Real(0));
    res.stderr_.assign(nq, Real(0));
    std::vector<int> ref;
    for (int j = 0; j < d; j++)
        if (ly.refined[j])
            ref.push_back(j);

    std::vector<Real> out(nq);
    for (size_t a = 0; a < N; a++) {
        AtomGrid g = atom_grid(ly, a);
        const auto &nb = ly.nb[a];
        /* per refined axis: sub-box index of every neighbour in each phase cell, and the
           measure of each (coarse interval, phase cell) pair as a fraction of L */
        std::vector<std::vector<std::vector<long>>> sub(ref.size());
        std::vector<std::vector<std::vector<Real>>> pm(ref.size());
        for (size_t r = 0; r < ref.size(); r++) {
            int j = ref[r];
            size_t np = g.phase[j].size() - 1, nc = g.coarse[j].size() - 1;
            sub[r].assign(np, std::vector<long>(nb.size()));
            pm[r].assign(nc, std::vector<Real>(np));
            for (size_t p = 0; p < np; p++) {
                Real ph = (g.phase[j][p] + g.phase[j][p + 1]) / 2;
                for (size_t k = 0; k < nb.size(); k++)
                    sub[r][p][k] = floor((nb[k].o[j] + ph) / ly.ell[j]).convert_to<long>();
                for (size_t ci = 0; ci < nc; ci++)
                    pm[r][ci][p] = phase_measure(g.coarse[j][ci], g.coarse[j][ci + 1],
                                                 g.phase[j][p], g.phase[j][p + 1], ly.ell[j]) /
                                   ly.L[j];
            }
        }

        std::map<std::vector<int>, Real> configs;
        std::vector<size_t> ci(d, 0);
        while (true) {
            Vec mid(d);
            for (int j = 0; j < d; j++)
                mid[j] = (g.coarse[j][ci[j]] + g.coarse[j][ci[j] + 1]) / 2;
            std::vector<int> cover;
            for (size_t k = 0; k < nb.size(); k++) {
                bool in = true;
                for (int j = 0; in && j < d; j++) {
                    Real s = nb[k].o[j] + mid[j];
                    in = s >= 0 && s < ly.L[j];
                }
                if (in)
                    cover.push_back(static_cast<int>(k));
            }
            Real base = 1;
            for (int j = 0; j < d; j++)
                if (!ly.refined[j])
                    base *= (g.coarse[j][ci[j] + 1] - g.coarse[j][ci[j]]) / ly.L[j];

            std::vector<int> key = cover;
            key.push_back(-1);
            if (ref.empty()) {
                configs[key] += base;
            } else {
                std::vector<size_t> pi(ref.size(), 0);
                std::vector<std::vector<long>> keys(cover.size(), std::vector<long>(ref.size()));
                while (true) {
                    Real m = base;
                    for (size_t r = 0; r < ref.size(); r++) {
                        m *= pm[r][ci[ref[r]]][pi[r]];
                        for (size_t k = 0; k < cover.size(); k++)
                            keys[k][r] = sub[r][pi[r]][cover[k]];
                    }
                    if (m > 0) {
                        auto lab = canonical_labels(keys);
                        key.resize(cover.size() + 1);
                        key.insert(key.end(), lab.begin(), lab.end());
                        configs[key] += m;
                    }
                    size_t r = 0;
                    while (r < ref.size() && ++pi[r] + 1 >= g.phase[ref[r]].size()) {
                        pi[r] = 0;
                        r++;
                    }
                    if (r == ref.size())
                        break;
                }
            }

            int j = 0;
            while (j < d && ++ci[j] + 1 >= g.coarse[j].size()) {
                ci[j] = 0;
                j++;
            }
            if (j == d)
                break;
        }
        for (auto &[key, m] : configs) {
            auto sep = std::find(key.begin(), key.end(), -1);
            std::vector<int> cover(key.begin(), sep);
            std::vector<int> lab(sep + 1, key.end());
            if (lab.empty())
                lab.assign(cover.size(), 0);
            std::fill(out.begin(), out.end(), Real(0));
            fn(a, cover, lab, out);
            for (size_t q = 0; q < nq; q++)
                res.per_atom[a][q] += m * out[q];
        }
        for (size_t q = 0; q < nq; q++)
            res.total[q] += res.per_atom[a][q];
    }
    return res;
}

/* Atom a uniform, u uniform in [0, L): N * E[value] estimates the exact sum.
   Positions are tested in double precision; values are memoized per configuration. */
SweepResult sweep_sampled(const Layout &ly, size_t nq, const Integrand &fn, long samples,
                          std::uint64_t seed)
{
    int d = ly.d;
    size_t N = ly.nb.size();
    SweepResult res;
    res.sampled = true;
    res.per_atom.assign(N, std::vector<Real>(nq, Real(0)));
    res.total.assign(nq, Real(0));
    res.stderr_.assign(nq, Real(0));
    std::vector<double> L(d), ell(d);
    for (int j = 0; j < d; j++) {
        L[j] = ly.L[j].convert_to<double>();
        ell[j] = ly.ell[j].convert_to<double>();
    }
    std::vector<std::vector<std::vector<double>>> od(N);
    for (size_t a = 0; a < N; a++)
        for (auto &n : ly.nb[a]) {
            std::vector<double> v(d);
            for (int j = 0; j < d; j++)
                v[j] = n.o[j].convert_to<double>();
            od[a].push_back(v);
        }
    std::map<std::pair<size_t, std::vector<int>>, std::vector<Real>> memo;
    std::vector<Real> sum(nq, Real(0)), sum2(nq, Real(0)), out(nq);
    SplitMix64 rng(seed);
    Real scale = Real(static_cast<long>(N));
    std::vector<double> u(d);
    for (long s = 0; s < samples; s++) {
        size_t a = static_cast<size_t>(rng.range(0, static_cast<long>(N) - 1));
        for (int j = 0; j < d; j++)
            u[j] = L[j] * rng.uniform();
        std::vector<int> cover;
        std::vector<std::vector<long>> keys;
        for (size_t k = 0; k < od[a].size(); k++) {
            bool in = true;
            std::vector<long> key;
            for (int j = 0; in && j < d; j++) {
                double p = od[a][k][j] + u[j];
                in = p >= 0 && p < L[j];
                if (ly.refined[j])
                    key.push_back(static_cast<long>(std::floor(p / ell[j])));
            }
            if (in) {
                cover.push_back(static_cast<int>(k));
                keys.push_back(key);
            }
        }
        std::vector<int> lab = canonical_labels(keys);
        std::vector<int> mk = cover;
        mk.push_back(-1);
        mk.insert(mk.end(), lab.begin(), lab.end());
        auto it = memo.find({a, mk});
        if (it == memo.end()) {
            std::fill(out.begin(), out.end(), Real(0));
            fn(a, cover, lab, out);
            it = memo.emplace(std::make_pair(a, mk), out).first;
        }
        for (size_t q = 0; q < nq; q++) {
            Real v = scale * it->second[q];
            sum[q] += v;
            sum2[q] += v * v;
            res.per_atom[a][q] += v;
        }
    }
    Real n = Real(samples);
    for (size_t q = 0; q < nq; q++) {
        Real mean = sum[q] / n;
        Real var = sum2[q] / n - mean * mean;
        res.total[q] = mean;
        res.stderr_[q] = var > 0 ? Real(sqrt(var / n)) : Real(0);
        for (size_t a = 0; a < N; a++)
            res.per_atom[a][q] /= n;
    }
    return res;
}

bool exact_allowed(const ConjugacyData &c, const FiniteMeasure &tau, const EntropyOptions &o)
{
    return !o.force_sampling && c.d() <= o.exact_dim_limit && tau.size() <= o.exact_atom_limit;
}

SweepResult run_sweep(const ConjugacyData &c, const FiniteMeasure &tau, const Layout &ly,
                      size_t nq, const Integrand &fn, const EntropyOptions &o)
{
    if (exact_allowed(c, tau, o) && layout_cells(ly) <= o.cell_budget)
        return sweep_exact(ly, nq, fn);
    return sweep_sampled(ly, nq, fn, o.samples, o.seed);
}

FiniteMeasure as_X(const ConjugacyData &c, const FiniteMeasure &tau)
{
    if (tau.size() == 0)
        throw Error("InvalidInput", "empty measure");
    return push_to_X(c, tau);
}

/* -u log2 u, cached: masses repeat across cells */
class Plogp {
public:
    const Real &operator()(const Real &u)
    {
        auto it = cache_.find(u);
        if (it == cache_.end())
            it = cache_.emplace(u, plogp(u)).first;
        return it->second;
    }

private:
    std::map<Real, Real> cache_;
};

Real cover_mass(const FiniteMeasure &tau, const std::vector<Nb> &nb, const std::vector<int> &cover)
{
    Real s = 0;
    for (int k : cover)
        s += tau.weights[nb[k].atom];
    return s;
}

std::vector<Real> group_masses(const FiniteMeasure &tau, const std::vector<Nb> &nb,
                               const std::vector<int> &cover, const std::vector<int> &lab)
{
    int ng = lab.empty() ? 0 : *std::max_element(lab.begin(), lab.end()) + 1;
    std::vector<Real> m(ng, Real(0));
    for (size_t k = 0; k < cover.size(); k++)
        m[lab[k]] += tau.weights[nb[cover[k]].atom];
    return m;
}

EntropyEstimate to_estimate(const SweepResult &r, size_t q)
{
    return {r.total[q], r.stderr_[q], r.sampled ? "sampled" : "exact"};
}

} // namespace

EntropyEstimate hom_entropy(const ConjugacyData &c, const FiniteMeasure &tau0, const BoxSpec &b,
                            const EntropyOptions &o)
{
    FiniteMeasure tau = as_X(c, tau0);
    Layout ly = make_layout(c, tau, b, {});
    Plogp f;
    Integrand fn = [&](size_t a, const std::vector<int> &cover, const std::vector<int> &,
                       std::vector<Real> &out) {
        out[0] = f(cover_mass(tau, ly.nb[a], cover)) / Real(static_cast<long>(cover.size()));
    };
    return to_estimate(run_sweep(c, tau, ly, 1, fn, o), 0);
}

EntropyEstimate box_measure_mass(const ConjugacyData &c, const FiniteMeasure &tau0,
                                 const BoxSpec &b, const EntropyOptions &o)
{
    FiniteMeasure tau = as_X(c, tau0);
    Layout ly = make_layout(c, tau, b, {});
    Integrand fn = [&](size_t a, const std::vector<int> &cover, const std::vector<int> &,
                       std::vector<Real> &out) {
        out[0] = cover_mass(tau, ly.nb[a], cover) / Real(static_cast<long>(cover.size()));
    };
    return to_estimate(run_sweep(c, tau, ly, 1, fn, o), 0);
}

EntropyEstimate hom_cond_entropy(const ConjugacyData &c, const FiniteMeasure &tau0,
                                 const BoxSpec &b, const std::vector<long> &t,
                                 const EntropyOptions &o)
{
    FiniteMeasure tau = as_X(c, tau0);
    if (t.size() != b.w.size())
        throw Error("InvalidInput", "refinement vector needs one entry per place");
    Layout ly = make_layout(c, tau, b, t);
    if (std::all_of(t.begin(), t.end(), [](long x) { return x == 0; }))
        return {Real(0), Real(0), "exact"};

    bool exact = exact_allowed(c, tau, o);
    if (exact && layout_cells(ly) > o.cell_budget) {
        /* direct sweep too fine: H(B, Q_t B) = H(F_t B) - H(B) */
        Layout fine = make_layout(c, tau, refine(b, t), {});
        Layout coarse = make_layout(c, tau, b, {});
        if (layout_cells(fine) <= o.cell_budget && layout_cells(coarse) <= o.cell_budget) {
            EntropyEstimate hf = hom_entropy(c, tau, refine(b, t), o);
            EntropyEstimate hc = hom_entropy(c, tau, b, o);
            return {hf.value - hc.value, Real(0), "chain"};
        }
        exact = false;
    }
    Plogp f;
    Integrand fn = [&](size_t a, const std::vector<int> &cover, const std::vector<int> &lab,
                       std::vector<Real> &out) {
        const auto &nb = ly.nb[a];
        Real s = 0;
        for (auto &m : group_masses(tau, nb, cover, lab))
            s += f(m);
        out[0] = (s - f(cover_mass(tau, nb, cover))) / Real(static_cast<long>(cover.size()));
    };
    SweepResult r = exact ? sweep_exact(ly, 1, fn) : sweep_sampled(ly, 1, fn, o.samples, o.seed);
    return to_estimate(r, 0);
}

namespace {

std::vector<long> unit_refinement(const ConjugacyData &c, int place, long T)
{
    std::vector<long> t(c.r1() + c.r2(), 0);
    if (place < 0)
        std::fill(t.begin(), t.end(), T);
    else
        t[place] = T;
    return t;
}

int place_dim(const ConjugacyData &c, int place) { return place < c.r1() ? 1 : 2; }

} // namespace

ScaleDirection positive_scale_direction(const ConjugacyData &c, const FiniteMeasure &mu0,
                                        const Real &alpha, const Real &delta, long T,
                                        const Real &eps, const EntropyOptions &o,
                                        const EntropyConstants &k)
{
    if (T < 1 || delta * Real(T) < 1)
        throw Error("InvalidInput", "need an integer T >= 1 with delta T >= 1");
    if (eps <= 0 || eps >= 1)
        throw Error("InvalidInput", "scale must lie in (0, 1)");
    FiniteMeasure mu = pull_to_torus(c, mu0);
    FiniteMeasure tau = push_to_X(c, mu);
    int d = c.d();

    ScaleDirection out;
    out.T = T;
    out.grid_H = grid_entropy(mu, eps);
    out.entropy_hypothesis = out.grid_H >= alpha * Real(d) * log2r(Real(1) / eps);
    out.R0 = injectivity_radius(c) + log2r(Real(1) / eps);
    Real Md = pow(c.uniformity, d);
    out.delta_lower_ok = delta >= Real(k.c16) * Md / out.R0;
    out.delta_upper_ok = delta <= alpha / 10;
    out.T_range_ok = Real(T) * delta >= 1 && Real(T) <= delta * out.R0 / 2;
    Real span = out.R0 - delta * out.R0;
    out.p = span > 0 ? floor(span / Real(T)).convert_to<long>() : 0;
    out.S = out.R0 - Real(out.p * T);

    Real need = (alpha - 3 * delta) * Real(d * T);
    bool found = false;
    for (long r = 0; r < out.p && !found; r++) {
        ScaleRow row;
        row.R = out.S + Real(r * T);
        BoxSpec b = cube_box(c, row.R);
        row.injective = is_injective(c, b);
        if (row.injective) {
            row.H = hom_cond_entropy(c, tau, b, unit_refinement(c, -1, T), o);
            if (row.H.value >= need) {
                found = true;
                out.R = row.R;
                out.B = b;
                out.H = row.H;
            }
        }
        out.profile.push_back(row);
    }
    if (!found) {
        std::ostringstream os;
        os << "no scale reaches (alpha - 3 delta) d T = " << dec(need, 6) << "; profile:";
        for (auto &row : out.profile)
            os << " R=" << dec(row.R, 4) << ":"
               << (row.injective ? dec(row.H.value, 6) : std::string("non-injective"));
        if (out.profile.empty())
            os << " empty scan range";
        throw Error("NotFound", os.str());
    }

    int m = c.r1() + c.r2();
    int best = -1;
    Real best_ratio;
    for (int p = 0; p < m; p++) {
        out.H_dir.push_back(hom_cond_entropy(c, tau, out.B, unit_refinement(c, p, T), o));
        Real ratio = out.H_dir.back().value / Real(place_dim(c, p));
        if (best < 0 || ratio > best_ratio) {
            best = p;
            best_ratio = ratio;
        }
    }
    out.i = best + 1;
    Real need_i = (alpha - 3 * delta) * Real(place_dim(c, best) * T);
    Real slack = out.H_dir[best].mode == "sampled" ? Real(4 * out.H_dir[best].stderr_)
                                                   : Real(tol(0.5) * Real(d * T));
    if (out.H_dir[best].value + slack < need_i)
        throw Error("InvariantViolation", "best direction misses (alpha - 3 delta) d_i T: " +
                                              dec(out.H_dir[best].value, 8) + " < " +
                                              dec(need_i, 8));
    return out;
}

NuData build_nu(const ConjugacyData &c, const FiniteMeasure &tau0, const BoxSpec &b, long T,
                int i, const Real &delta, const Real &alpha, const EntropyOptions &o)
{
    if (T < 1 || delta * Real(T) < 1)
        throw Error("InvalidInput", "need an integer T >= 1 with delta T >= 1");
    int m = c.r1() + c.r2();
    if (i < 1 || i > m)
        throw Error("InvalidInput", "place index outside 1.." + std::to_string(m));
    FiniteMeasure tau = as_X(c, tau0);
    int p = i - 1;
    int di = place_dim(c, p);
    Layout ly = make_layout(c, tau, b, unit_refinement(c, p, T));

    NuData nd;
    nd.R = b.w[0];
    nd.T = T;
    nd.i = i;
    nd.B = b;
    nd.threshold = exp2r(-Real(di) * delta * Real(T));
    nd.max_nu_x = 0;

    /* 0: own atom lies in a small sub-box (per atom), 1: |nu_x| / k,
       2: tau(x+B) sum_S tau_x(Q)^2 / k, 3: conditional entropy integrand */
    Plogp f;
    Integrand fn = [&](size_t a, const std::vector<int> &cover, const std::vector<int> &lab,
                       std::vector<Real> &out) {
        const auto &nb = ly.nb[a];
        Real tb = cover_mass(tau, nb, cover);
        Real kk = Real(static_cast<long>(cover.size()));
        auto gm = group_masses(tau, nb, cover, lab);
        if (tb <= 0)
            return;
        Real small = 0, sq = 0, h = 0;
        std::vector<bool> in_s(gm.size());
        for (size_t g = 0; g < gm.size(); g++) {
            h += f(gm[g]);
            in_s[g] = gm[g] <= nd.threshold * tb;
            if (in_s[g]) {
                small += gm[g];
                sq += (gm[g] / tb) * (gm[g] / tb);
            }
        }
        out[0] = in_s[lab[0]] ? 1 : 0;
        out[1] = small / kk;
        out[2] = tb * sq / kk;
        out[3] = (h - f(tb)) / kk;
        Real nx = small / tb;
        if (nx > nd.max_nu_x)
            nd.max_nu_x = nx;
    };
    SweepResult r = run_sweep(c, tau, ly, 4, fn, o);
    nd.mode = r.sampled ? "sampled" : "exact";

    nd.nu.space = FiniteMeasure::Space::X;
    nd.nu.points = tau.points;
    Real e = tol(0.5);
    nd.dominated = true;
    for (size_t a = 0; a < tau.size(); a++) {
        Real f = r.per_atom[a][0];
        if (r.sampled && f > 1)
            f = 1;
        nd.nu.weights.push_back(tau.weights[a] * f);
        if (f > 1 + e)
            nd.dominated = false;
    }
    nd.mass = nd.nu.total_mass();
    nd.mean_nu_x = r.total[1];
    nd.l2 = r.total[2];
    nd.H_dir = r.total[3];
    nd.mass_bound = (nd.H_dir - 1) / Real(di * T) - delta;
    nd.alpha_bound = alpha - 5 * delta;

    Real slack_mass = r.sampled ? Real(4 * (r.stderr_[3] / Real(di * T) + r.stderr_[1])) : e;
    Real slack_l2 = r.sampled ? Real(4 * r.stderr_[2]) : e;
    nd.nu_x_ok = nd.max_nu_x <= 1 + e;
    nd.mass_ok = nd.mass + slack_mass >= nd.mass_bound;
    bool hyp = nd.H_dir >= (alpha - 3 * delta) * Real(di * T);
    nd.alpha_ok = !hyp || nd.mass + slack_mass >= nd.alpha_bound;
    nd.l2_ok = nd.l2 <= nd.threshold + slack_l2;

    std::string bad;
    if (!nd.dominated)
        bad += " nu<=tau";
    if (!nd.nu_x_ok)
        bad += " |nu_x|<=1";
    if (!nd.mass_ok)
        bad += " mass>=(H-1)/(d_i T)-delta";
    if (!nd.alpha_ok)
        bad += " mass>=alpha-5delta";
    if (!nd.l2_ok)
        bad += " L2";
    if (!bad.empty())
        throw Error("InvariantViolation", "dominated measure checks failed:" + bad);
    return nd;
}

} // namespace tor
