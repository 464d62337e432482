#include "tor/density.hpp"
#include "tor/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace tor {

MahlerBall mahler_ball(const ConjugacyData &c, const Real &L, const DensityOptions &o)
{
    if (L < 0)
        throw Error("InvalidInput", "negative ball radius");
    LogLattice l = log_lattice(c);
    MahlerBall ball;
    ball.L = L;
    ball.torsion = torsion_subgroup(c, l);
    ball.box = enumeration_box(l, L);
    double vol = 1;
    for (long b : ball.box)
        vol *= 2.0 * static_cast<double>(b) + 1;
    if (vol > static_cast<double>(o.max_box))
        throw Error("BudgetExceeded", "enumeration box of " + std::to_string(vol) + " points");
    std::vector<LatticePoint> pts = enumerate_ball(l, L);
    if (pts.size() * ball.torsion.size() > o.max_elements)
        throw Error("BudgetExceeded",
                    "ball holds " + std::to_string(pts.size() * ball.torsion.size()) + " elements");
    for (auto &p : pts) {
        Exps e = l.exps(p.x);
        IMat g = group_element(c.group, e);
        for (size_t t = 0; t < ball.torsion.size(); t++)
            ball.elements.push_back({e, static_cast<int>(t), p.h0, g * ball.torsion[t]});
    }
    return ball;
}

RationalPoint rational_point(const std::vector<long> &v, long Q)
{
    if (Q < 1)
        throw Error("InvalidInput", "denominator must be positive");
    RationalPoint x;
    x.Q = Q;
    for (long a : v) {
        Int r = Int(a) % x.Q;
        if (r < 0)
            r += x.Q;
        x.v.push_back(r);
    }
    return x;
}

RationalPoint act(const IMat &g, const RationalPoint &x)
{
    RationalPoint y;
    y.Q = x.Q;
    y.v.resize(x.v.size());
    for (int r = 0; r < g.rows; r++) {
        Int acc = 0;
        for (int j = 0; j < g.cols; j++)
            acc += g(r, j) * x.v[j];
        acc %= x.Q;
        if (acc < 0)
            acc += x.Q;
        y.v[r] = acc;
    }
    return y;
}

Vec to_vec(const RationalPoint &x)
{
    Vec v;
    for (auto &a : x.v)
        v.push_back(to_real(Rat(a, x.Q)));
    return v;
}

namespace {

/* coordinates rounded to multiples of 2^-h, taken mod 1 */
std::vector<Int> merge_key(const Vec &x, long h)
{
    std::vector<Int> k;
    Int mod = Int(1) << static_cast<unsigned>(h);
    for (auto &v : x) {
        Real s = v;
        mpfr_mul_2si(s.backend().data(), s.backend().data(), h, MPFR_RNDN);
        Int r = round_to_int(s) % mod;
        if (r < 0)
            r += mod;
        k.push_back(r);
    }
    return k;
}

bool lex_less(const Vec &a, const Vec &b)
{
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

} // namespace

std::vector<Vec> orbit_points(const MahlerBall &ball, const std::vector<Vec> &E, size_t max_points)
{
    long h = static_cast<long>(precision() / 2);
    std::set<std::vector<Int>> seen;
    std::vector<Vec> out;
    for (auto &e : ball.elements)
        for (auto &x : E) {
            Vec y = torus_action(e.g, x);
            if (seen.insert(merge_key(y, h)).second) {
                out.push_back(std::move(y));
                if (out.size() > max_points)
                    throw Error("BudgetExceeded", "orbit exceeds " + std::to_string(max_points) + " points");
            }
        }
    std::sort(out.begin(), out.end(), lex_less);
    return out;
}

std::vector<Vec> orbit_set(const ConjugacyData &c, const std::vector<Vec> &E, const Real &L,
                           const DensityOptions &o)
{
    return orbit_points(mahler_ball(c, L, o), E, o.max_points);
}

std::vector<RationalPoint> orbit_points(const MahlerBall &ball, const std::vector<RationalPoint> &E,
                                        size_t max_points)
{
    std::set<RationalPoint> seen;
    for (auto &e : ball.elements)
        for (auto &x : E) {
            seen.insert(act(e.g, x));
            if (seen.size() > max_points)
                throw Error("BudgetExceeded", "orbit exceeds " + std::to_string(max_points) + " points");
        }
    return {seen.begin(), seen.end()};
}

Real toral_distance(const Vec &a, const Vec &b)
{
    Real s = 0;
    for (size_t j = 0; j < a.size(); j++) {
        Real t = a[j] - b[j];
        t -= round(t);
        s += t * t;
    }
    return sqrt(s);
}

Real x_norm(const ConjugacyData &c, const Vec &y)
{
    int d = c.d();
    Vec y0(d);
    for (int j = 0; j < d; j++)
        y0[j] = y[j] - round(y[j]);
    auto len = [&](const Vec &v) {
        Vec w = c.psi * v;
        Real s = 0;
        for (auto &t : w)
            s += t * t;
        return sqrt(s);
    };
    Real best = len(y0);
    // |y0 - k| <= ||psi^-1|| |psi(y0 - k)| <= ||psi^-1|| best for any better k
    double rho = static_cast<double>(opnorm(c.psi_inverse) * best) + 1e-9;
    long b = static_cast<long>(std::ceil(rho));
    std::vector<long> k(d, -b);
    Vec v(d);
    for (;;) {
        bool inside = true;
        for (int j = 0; j < d; j++)
            if (std::abs(static_cast<double>(y0[j]) - k[j]) > rho)
                inside = false;
        if (inside) {
            for (int j = 0; j < d; j++)
                v[j] = y0[j] - k[j];
            best = std::min(best, len(v));
        }
        int j = 0;
        while (j < d && k[j] == b)
            k[j++] = -b;
        if (j == d)
            break;
        k[j]++;
    }
    return best;
}

namespace {

/* Bucket grid on [0,1)^d for nearest-point queries under the toral metric. */
class NearGrid {
public:
    explicit NearGrid(const std::vector<Vec> &pts) : d_(pts.empty() ? 0 : static_cast<int>(pts[0].size()))
    {
        for (auto &p : pts) {
            std::vector<double> q;
            for (auto &x : p) {
                double v = static_cast<double>(x);
                q.push_back(v - std::floor(v));
            }
            pts_.push_back(std::move(q));
        }
        double n = static_cast<double>(pts_.size());
        B_ = std::clamp(static_cast<int>(std::floor(std::pow(n, 1.0 / std::max(d_, 1)))), 1, 64);
        size_t cells = 1;
        for (int j = 0; j < d_; j++)
            cells *= B_;
        buckets_.resize(cells);
        for (size_t i = 0; i < pts_.size(); i++)
            buckets_[cell(pts_[i])].push_back(i);
    }

    double dist2(const std::vector<double> &a, size_t i) const
    {
        double s = 0;
        for (int j = 0; j < d_; j++) {
            double t = a[j] - pts_[i][j];
            t -= std::round(t);
            s += t * t;
        }
        return s;
    }

    /* nearest point other than `skip`; returns (squared distance, index) */
    std::pair<double, size_t> nearest(const std::vector<double> &x, size_t skip = SIZE_MAX) const
    {
        std::vector<int> home(d_);
        for (int j = 0; j < d_; j++)
            home[j] = std::min(B_ - 1, static_cast<int>(x[j] * B_));
        double best = INFINITY;
        size_t arg = SIZE_MAX;
        auto scan = [&](size_t b) {
            for (size_t i : buckets_[b]) {
                if (i == skip)
                    continue;
                double t = dist2(x, i);
                if (t < best) {
                    best = t;
                    arg = i;
                }
            }
        };
        for (int r = 0;; r++) {
            if (2 * r + 1 >= B_) {
                // ring covers every bucket: finish with a full scan
                best = INFINITY;
                for (size_t b = 0; b < buckets_.size(); b++)
                    scan(b);
                return {best, arg};
            }
            std::vector<int> off(d_, -r);
            for (;;) {
                int m = 0;
                for (int v : off)
                    m = std::max(m, std::abs(v));
                if (m == r) {
                    size_t b = 0;
                    for (int j = d_ - 1; j >= 0; j--)
                        b = b * B_ + static_cast<size_t>(((home[j] + off[j]) % B_ + B_) % B_);
                    scan(b);
                }
                int j = 0;
                while (j < d_ && off[j] == r)
                    off[j++] = -r;
                if (j == d_)
                    break;
                off[j]++;
            }
            double reach = static_cast<double>(r) / B_;
            if (best <= reach * reach)
                return {best, arg};
        }
    }

    const std::vector<double> &point(size_t i) const { return pts_[i]; }

private:
    size_t cell(const std::vector<double> &x) const
    {
        size_t b = 0;
        for (int j = d_ - 1; j >= 0; j--)
            b = b * B_ + static_cast<size_t>(std::min(B_ - 1, static_cast<int>(x[j] * B_)));
        return b;
    }

    int d_;
    int B_ = 1;
    std::vector<std::vector<double>> pts_;
    std::vector<std::vector<size_t>> buckets_;
};

} // namespace

Covering covering_radius(const std::vector<Vec> &points, int grid_n)
{
    if (points.empty())
        throw Error("EmptySet", "covering radius of an empty set");
    if (grid_n < 1)
        throw Error("InvalidInput", "grid_n must be positive");
    int d = static_cast<int>(points[0].size());
    NearGrid ng(points);
    std::vector<int> k(d, 0);
    std::vector<double> x(d);
    double worst = -1;
    std::vector<int> arg;
    size_t arg_pt = 0;
    for (;;) {
        for (int j = 0; j < d; j++)
            x[j] = (k[j] + 0.5) / grid_n;
        auto [t, i] = ng.nearest(x);
        if (t > worst) {
            worst = t;
            arg = k;
            arg_pt = i;
        }
        int j = 0;
        while (j < d && k[j] == grid_n - 1)
            k[j++] = 0;
        if (j == d)
            break;
        k[j]++;
    }
    Covering cv;
    cv.grid_n = grid_n;
    for (int j = 0; j < d; j++)
        cv.witness.push_back((Real(arg[j]) + Real(0.5)) / grid_n);
    Real far = toral_distance(cv.witness, points[arg_pt]);
    Real half = sqrt(Real(d)) / (2 * grid_n);
    cv.upper = far + half;
    cv.lower = far - half;
    cv.cell_diagonal = 2 * half;
    return cv;
}

Separation min_separation(const std::vector<Vec> &points)
{
    Separation s;
    if (points.size() < 2)
        return s;
    NearGrid ng(points);
    double best = INFINITY;
    for (size_t i = 0; i < points.size(); i++) {
        auto [t, j] = ng.nearest(ng.point(i), i);
        if (t < best) {
            best = t;
            s.i = std::min(i, j);
            s.j = std::max(i, j);
        }
    }
    s.defined = true;
    s.min = toral_distance(points[s.i], points[s.j]);
    return s;
}

DensityReport density_of(const std::vector<Vec> &points, const Real &L, size_t elements, int grid_n)
{
    DensityReport r;
    r.L = L;
    r.elements = elements;
    r.count = points.size();
    r.cover = covering_radius(points, grid_n);
    r.separation = min_separation(points);
    r.target = 1;
    return r;
}

namespace {

/* b^(-c), or 1 where the base is at most 1 */
Real density_target(const Real &base, const Real &c)
{
    return base > 1 ? Real(exp2r(-c * log2r(base))) : Real(1);
}

} // namespace

DensityReport harness_efftopo(const ConjugacyData &c, const std::vector<Vec> &E, const Real &eps,
                              const Real &alpha, double L_mult, const DensityOptions &o)
{
    if (E.empty())
        throw Error("EmptySet", "starting set is empty");
    if (!(eps > 0 && eps < 1) || L_mult < 0)
        throw Error("InvalidInput", "need 0 < eps < 1 and L_mult >= 0");
    std::vector<std::string> failed;
    Separation sep = min_separation(E);
    if (sep.defined && sep.min < eps)
        failed.push_back("not eps-separated: points " + std::to_string(sep.i) + " and " +
                         std::to_string(sep.j) + " at distance " + dec(sep.min, 6));
    Real log_inv = -log2r(eps);
    if (log2r(Real(E.size())) < alpha * c.d() * log_inv)
        failed.push_back("|E| = " + std::to_string(E.size()) + " below eps^(-alpha d)");
    if (!failed.empty()) {
        std::string msg;
        for (auto &f : failed)
            msg += (msg.empty() ? "" : "; ") + f;
        throw Error("PreconditionsViolated", msg);
    }
    Real L = Real(L_mult) * log_inv;
    MahlerBall ball = mahler_ball(c, L, o);
    DensityReport r = density_of(orbit_points(ball, E, o.max_points), L, ball.elements.size(), o.grid_n);
    r.target = density_target(log_inv, Real(o.c_density) * alpha);
    return r;
}

DioqReport harness_dioq(const ConjugacyData &c, const std::vector<long> &v, long Q, int k,
                        const DensityOptions &o)
{
    int d = c.d();
    if (static_cast<int>(v.size()) != d || Q < 1 || k < 1)
        throw Error("InvalidInput", "need a length-d vector, Q >= 1 and k >= 1");
    Int g = Q;
    for (long a : v)
        g = gcd(g, Int(a));
    if (g != 1)
        throw Error("NotCoprime", "gcd(v, Q) = " + g.str());

    DioqReport r;
    LogLattice l = log_lattice(c);
    Minima mn = successive_minima(l);
    r.F = mn.m.back();
    r.g = l.exps(mn.witnesses[0]);
    r.g_height = mn.m[0];
    IMat gm = group_element(c.group, r.g);

    // m < min(1/F, 1) log2(2^-d Q)
    Real span = std::min(Real(1) / r.F, Real(1)) * (log2r(Real(Q)) - d);
    r.m_count = span > 0 ? static_cast<long>(ceil(span)) : 0;
    RationalPoint x = rational_point(v, Q);
    RationalPoint y = x;
    for (long m = 0; m < r.m_count; m++) {
        r.start.push_back(y);
        y = act(gm, y);
    }

    r.bound = c.scale / (c.uniformity * pow(Real(Q), k));
    r.min_distance = INFINITY;
    for (size_t a = 0; a < r.start.size(); a++)
        for (size_t b = a + 1; b < r.start.size(); b++) {
            Vec diff(d);
            for (int j = 0; j < d; j++)
                diff[j] = to_real(Rat(r.start[a].v[j] - r.start[b].v[j], Int(Q)));
            r.min_distance = std::min(r.min_distance, x_norm(c, diff));
        }
    r.separated = r.start.size() < 2 || r.min_distance >= r.bound;
    if (!r.separated)
        throw Error("InvariantViolation", "orbit separation " + dec(r.min_distance, 8) +
                                              " below M^-1 Q^-k S = " + dec(r.bound, 8));

    Real L = Real(k + 2) * log2r(Real(Q));
    MahlerBall ball = mahler_ball(c, L, o);
    std::vector<Vec> pts;
    for (auto &p : orbit_points(ball, std::vector<RationalPoint>{x}, o.max_points))
        pts.push_back(to_vec(p));
    r.density = density_of(pts, L, ball.elements.size(), o.grid_n);
    Real ll = log2r(log2r(Real(Q)));
    r.density.target = density_target(ll > 0 ? log2r(ll) : Real(0), Real(o.c_density));
    return r;
}

namespace {

/* component norms of y in the place blocks (real places, then complex pairs) */
Vec place_components(const ConjugacyData &c, const Vec &y)
{
    int r1 = c.r1(), r2 = c.r2();
    Vec out;
    for (int j = 0; j < r1; j++)
        out.push_back(abs(y[j]));
    for (int j = 0; j < r2; j++)
        out.push_back(sqrt(y[r1 + j] * y[r1 + j] + y[r1 + r2 + j] * y[r1 + r2 + j]));
    return out;
}

void trace_progression(const ConjugacyData &c, const std::vector<Vec> &E, int s, LargeTrace &t)
{
    ExpandingPair pair = expander(c, t.place);
    ProgressionData prog = arith_progression(c, pair, s);
    t.s = s;
    t.Delta = prog.delta.abs();
    t.zeta_u = pair.zeta_u.abs();
    int places = c.r1() + c.r2();
    // largest n with |zeta_u|^n s |Delta| |y_i| <= (r1+r2)^(-1/2) / (2M) S
    Real target = c.scale / (2 * c.uniformity * sqrt(Real(places)));
    Real start = Real(s) * t.Delta * t.components[t.place - 1];
    Real n = floor((log2r(target) - log2r(start)) / log2r(t.zeta_u));
    t.n = n > 0 ? static_cast<long>(n) : 0;

    std::vector<IMat> g;
    for (int a = 0; a < s; a++) {
        Exps e(pair.u.size());
        for (size_t j = 0; j < e.size(); j++)
            e[j] = t.n * pair.u[j] + static_cast<long>(a) * prog.step[j];
        g.push_back(group_element(c.group, e));
    }
    std::vector<Vec> e1;
    for (auto &m : g) {
        Vec p = torus_action(m, E[t.a]), q = torus_action(m, E[t.b]);
        for (size_t j = 0; j < p.size(); j++) {
            p[j] -= q[j];
            p[j] -= floor(p[j]);
        }
        e1.push_back(p);
    }
    Separation s1 = min_separation(e1);
    t.e1_separation = s1.min;
    Real sm2 = Real(1) / (Real(s) * s);
    t.e1_separated = s1.defined && s1.min >= 2 * sm2;

    // greedy maximal s^-2 separated subset of E2
    std::vector<Vec> e3;
    for (auto &m : g)
        for (auto &x : E) {
            Vec p = torus_action(m, x);
            bool far = std::all_of(e3.begin(), e3.end(),
                                   [&](const Vec &q) { return toral_distance(p, q) >= sm2; });
            if (far)
                e3.push_back(p);
        }
    t.e3_size = e3.size();
    t.e3_large = Real(e3.size()) >= sqrt(Real(s));
}

} // namespace

LargeReport harness_large(const ConjugacyData &c, const std::vector<Vec> &E, const Real &eps0,
                          double L_mult, int trace_s, const DensityOptions &o)
{
    if (E.empty())
        throw Error("EmptySet", "starting set is empty");
    if (!(eps0 > 0) || L_mult < 0)
        throw Error("InvalidInput", "need eps0 > 0 and L_mult >= 0");
    int d = c.d();
    LargeReport r;
    r.separation_x = INFINITY;
    for (size_t a = 0; a < E.size(); a++)
        for (size_t b = a + 1; b < E.size(); b++) {
            Vec diff(d);
            for (int j = 0; j < d; j++)
                diff[j] = E[a][j] - E[b][j];
            r.separation_x = std::min(r.separation_x, x_norm(c, diff));
        }
    if (E.size() >= 2 && r.separation_x < eps0 * c.scale)
        throw Error("PreconditionsViolated", "psi(E) is not eps0 S separated: min distance " +
                                                 dec(r.separation_x, 6));

    if (E.size() >= 2) {
        r.has_trace = true;
        LargeTrace &t = r.trace;
        Separation s = min_separation(E);
        t.a = s.i;
        t.b = s.j;
        t.distance = s.min;
        for (int j = 0; j < d; j++) {
            Real v = E[t.a][j] - E[t.b][j];
            t.lift.push_back(v - round(v));
        }
        t.y = c.psi * t.lift;
        t.components = place_components(c, t.y);
        t.place = 1 + static_cast<int>(std::max_element(t.components.begin(), t.components.end()) -
                                       t.components.begin());
        if (trace_s > 0)
            trace_progression(c, E, trace_s, t);
    }

    Real L = -log2r(eps0) + Real(L_mult) * log2r(Real(E.size()));
    if (L < 0)
        L = 0;
    MahlerBall ball = mahler_ball(c, L, o);
    r.density = density_of(orbit_points(ball, E, o.max_points), L, ball.elements.size(), o.grid_n);
    Real ll = log2r(Real(E.size()));
    r.density.target = density_target(ll > 1 ? log2r(ll) : Real(0), Real(o.c_density));
    return r;
}

} // namespace tor
