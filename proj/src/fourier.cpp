#include "tor/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

namespace tor {

namespace {

Real wrap(const Real &x)
{
    Real f = x - floor(x);
    return f >= 1 ? Real(0) : f;
}

FiniteMeasure on_torus(const ConjugacyData &c, const FiniteMeasure &m)
{
    return m.space == FiniteMeasure::Space::Torus ? m : pull_to_torus(c, m);
}

Real dot(const Freq &q, const Vec &x)
{
    Real s = 0;
    for (size_t j = 0; j < q.size(); j++)
        if (q[j] != 0)
            s += Real(q[j]) * x[j];
    return s;
}

Real freq_norm(const Freq &q)
{
    Real s = 0;
    for (long v : q)
        s += Real(v) * Real(v);
    return sqrt(s);
}

long ceil_long(const Real &x)
{
    return ceil(x).convert_to<long>();
}

void fail(const std::string &what)
{
    throw Error("InfeasiblePlan", what);
}

} // namespace

Real Character::norm() const { return freq_norm(q); }

bool Character::trivial() const
{
    return std::all_of(q.begin(), q.end(), [](long v) { return v == 0; });
}

Cx unit_phase(const Real &beta)
{
    Real a = 2 * pi() * wrap(beta);
    return {cos(a), -sin(a)};
}

Cx fourier_coeff(const ConjugacyData &c, const FiniteMeasure &m, const Freq &q)
{
    if (static_cast<int>(q.size()) != c.d())
        throw Error("InvalidInput", "frequency dimension mismatch");
    Cx s;
    for (size_t a = 0; a < m.size(); a++) {
        Real beta = m.space == FiniteMeasure::Space::Torus ? dot(q, m.points[a])
                                                           : dot(q, c.psi_inverse * m.points[a]);
        s += unit_phase(beta) * m.weights[a];
    }
    return s;
}

Real pushforward_gap(const ConjugacyData &c, const FiniteMeasure &mu, const Freq &q)
{
    FiniteMeasure t = on_torus(c, mu);
    return (fourier_coeff(c, push_to_X(c, t), q) - fourier_coeff(c, t, q)).abs();
}

Cx geometric_sum(const Real &beta, long s)
{
    Cx acc;
    for (long t = 0; t < s; t++)
        acc += unit_phase(beta * Real(t));
    return acc;
}

Vec torus_action(const IMat &g, const Vec &x)
{
    int d = g.rows;
    std::vector<Int> num(d);
    std::vector<long> ex(d, 0);
    long E = 0;
    for (int j = 0; j < d; j++) {
        if (x[j] == 0)
            continue;
        ex[j] = mpfr_get_z_2exp(num[j].backend().data(), x[j].backend().data());
        E = std::max(E, -ex[j]);
    }
    for (int j = 0; j < d; j++)
        if (num[j] != 0)
            num[j] <<= static_cast<unsigned long>(ex[j] + E);
    Vec y(d);
    for (int r = 0; r < d; r++) {
        Int acc = 0;
        for (int j = 0; j < d; j++)
            acc += g(r, j) * num[j];
        mpz_fdiv_r_2exp(acc.backend().data(), acc.backend().data(), static_cast<unsigned long>(E));
        Real v;
        mpfr_set_z_2exp(v.backend().data(), acc.backend().data(), -E, MPFR_RNDN);
        y[r] = v >= 1 ? Real(0) : v;
    }
    return y;
}

Exps gadget_element(const Gadgets &g, long n, int t, int k)
{
    const Exps &u = g.pair.u;
    Exps e(u.size());
    for (size_t j = 0; j < e.size(); j++)
        e[j] = n * u[j] + static_cast<long>(t) * g.prog.step[j] + g.esc.b[k - 1][j];
    return e;
}

namespace {

struct Orbit {
    std::vector<Exps> elements;
    std::vector<std::vector<Vec>> images; /* [element][atom], torus */
};

Orbit orbit_images(const ConjugacyData &c, const std::vector<Vec> &pts, const Gadgets &g, long n,
                   int s, int l)
{
    if (s < 1 || l < 1 || s > g.prog.s || l > static_cast<int>(g.esc.b.size()))
        throw Error("InvalidInput", "averaging range exceeds the gadget sequences");
    Orbit o;
    for (int t = 0; t < s; t++)
        for (int k = 1; k <= l; k++) {
            o.elements.push_back(gadget_element(g, n, t, k));
            IMat m = group_element(c.group, o.elements.back());
            std::vector<Vec> img;
            img.reserve(pts.size());
            for (auto &p : pts)
                img.push_back(torus_action(m, p));
            o.images.push_back(std::move(img));
        }
    return o;
}

/* merged atoms keyed by position; several weight columns share the keys */
std::map<Vec, std::vector<Real>> merge(const Orbit &o, const std::vector<const Vec *> &weights,
                                       const Real &scale)
{
    std::map<Vec, std::vector<Real>> out;
    for (size_t e = 0; e < o.images.size(); e++)
        for (size_t a = 0; a < o.images[e].size(); a++) {
            auto &slot = out[o.images[e][a]];
            slot.resize(weights.size(), Real(0));
            for (size_t w = 0; w < weights.size(); w++)
                slot[w] += (*weights[w])[a] * scale;
        }
    return out;
}

FiniteMeasure column(const std::map<Vec, std::vector<Real>> &m, size_t w)
{
    FiniteMeasure f;
    for (auto &[p, ws] : m) {
        f.points.push_back(p);
        f.weights.push_back(ws[w]);
    }
    return f;
}

} // namespace

FiniteMeasure average_measure(const ConjugacyData &c, const FiniteMeasure &nu, const Gadgets &g,
                              long n, int s, int l)
{
    FiniteMeasure t = on_torus(c, nu);
    Orbit o = orbit_images(c, t.points, g, n, s, l);
    auto m = merge(o, {&t.weights}, Real(1) / Real(static_cast<long>(s) * l));
    FiniteMeasure out = column(m, 0);
    return nu.space == FiniteMeasure::Space::X ? push_to_X(c, out) : out;
}

ParameterPlan plan_parameters(const Real &eps, const Real &alpha, const Real &delta,
                              const ConjugacyData &c, const PlanOptions &o)
{
    if (eps <= 0 || eps >= 1)
        throw Error("InvalidInput", "scale must lie in (0, 1)");
    if (delta <= 0 || alpha <= 0 || alpha > 1)
        throw Error("InvalidInput", "need alpha in (0, 1] and delta > 0");
    ParameterPlan p;
    p.eps = eps;
    p.alpha = alpha;
    p.delta = delta;
    p.k = o.k;
    p.d = c.d();
    p.M = c.uniformity;
    p.log_inv_eps = log2r(Real(1) / eps);
    p.R0 = injectivity_radius(c) + p.log_inv_eps;
    int m = c.r1() + c.r2();
    p.i = o.i.value_or(1);
    if (p.i < 1 || p.i > m)
        throw Error("InvalidInput", "place index outside 1.." + std::to_string(m));
    p.di = eigen_index(c, p.i).di;
    p.gadgets.pair = expander(c, p.i, o.gadgets);
    p.F = p.gadgets.pair.F;
    const Real F2 = p.F * p.F;
    const int d = p.d;
    auto flag = [&](bool ok, const std::string &what) {
        if (!ok) {
            p.flags.push_back(what);
            if (o.strict)
                fail(what);
        }
    };

    Real Mlog = log2r(p.M);
    p.eps_ok = p.log_inv_eps > std::max(exp2r(Real(30 * d) * Mlog), Real(4));
    flag(p.eps_ok, "log(1/eps) <= max(M^(30d), 4)");
    Real ll = p.log_inv_eps > 1 ? log2r(p.log_inv_eps) : Real(0);
    p.delta_ok = ll > 0 && delta >= Real(o.k.c10) * F2 / ll && delta <= alpha / 10;
    flag(p.delta_ok, "delta outside [c10 F^2 / loglog(1/eps), alpha/10]");

    Real arg = exp2r(-Real(10 * d) * Mlog) * delta * p.log_inv_eps;
    long tmin = ceil_long(Real(1) / delta);
    bool defined = arg > 0;
    p.T_setting = defined ? ceil_long(log2r(arg) / (Real(o.k.c17) * F2)) : 0;
    if (o.T) {
        p.T = *o.T;
    } else {
        p.T = p.T_setting;
        if (p.T < tmin) {
            p.T_raised = true;
            p.T = tmin;
        }
    }
    if (p.T < 1 || delta * Real(p.T) < 1)
        fail("T = " + std::to_string(p.T) + " gives delta T < 1");
    p.T_ok = Real(p.T) * delta >= 1 && Real(p.T) <= delta * p.R0 / 2;
    flag(!p.T_raised, "T setting below 1/delta");
    flag(p.T_ok, "T outside [1/delta, delta R0 / 2]");

    p.R = o.R.value_or(delta * p.R0);
    Real didT = Real(p.di) * delta * Real(p.T);
    p.A = ceil(exp2r(didT));
    if (p.A > Real(1e9))
        fail("l = A = " + dec(p.A, 6) + " exceeds the escape budget");
    p.l = p.A.convert_to<long>();

    Real log_s = Real(d * (d - 1)) / 2 * Real(o.k.c3) * p.F + Real(d) * Mlog +
                 (1 + (Real(d + 1) + Real(o.k.c9) * F2) * Real(p.di) * delta) * Real(p.T);
    if (log_s > log2r(Real(o.s_cap)))
        fail("s setting 2^" + dec(log_s, 6) + " exceeds the budget");
    p.s_setting = ceil(exp2r(log_s));
    p.s = std::max(2, static_cast<int>(std::min(p.s_setting, Real(o.s_exec)).convert_to<long>()));
    p.s_clamped = p.s_setting > Real(p.s);
    flag(!p.s_clamped, "s setting " + dec(p.s_setting, 6) + " clamped to " +
                           std::to_string(p.s));

    p.gadgets.prog = arith_progression(c, p.gadgets.pair, p.s, o.gadgets);
    p.gadgets.esc = escape_sequence(c, p.gadgets.pair, static_cast<int>(p.l), o.gadgets);
    p.zeta_u = p.gadgets.pair.zeta_u.abs();
    p.Delta = p.gadgets.prog.delta.abs();

    Real lz = log2r(p.zeta_u);
    Real lhs0 = Mlog + log2r(p.A) + log2r(p.Delta) + Real(o.k.c9) * F2 * log2r(Real(p.l)) - p.R;
    Real steps = floor((Real(-2) - lhs0) / lz);
    if (steps < 0) {
        flag(false, "xi condition fails already at n = 0");
        p.n = 0;
    } else {
        p.n = steps.convert_to<long>();
    }
    Real lhs = lhs0 + Real(p.n) * lz;
    p.xi_lhs = exp2r(lhs);
    p.n_bracket = lhs <= -2 && lhs + lz > -2;

    p.R_bound = p.R >= exp2r(Real(o.k.c17) * F2 * Real(p.T - 1) + Real(10 * d) * Mlog);
    flag(p.R_bound, "R below 2^(c17 F^2 (T-1)) M^(10d)");
    return p;
}

std::vector<Freq> frequency_ball(int d, const Real &A)
{
    std::vector<Freq> out;
    long r = floor(A).convert_to<long>();
    long r2max = r >= 0 ? r * r : -1;
    /* tighten to A^2 when A is not an integer */
    Real A2 = A * A;
    Freq q(d, -r);
    if (r < 0)
        return out;
    std::function<void(int, long)> rec = [&](int j, long used) {
        if (j == d) {
            if (used == 0 || Real(used) > A2)
                return;
            out.push_back(q);
            return;
        }
        for (long v = -r; v <= r; v++) {
            long u = used + v * v;
            if (u > r2max)
                continue;
            q[j] = v;
            rec(j + 1, u);
        }
    };
    rec(0, 0);
    return out;
}

namespace {

double ball_volume(int d, double r)
{
    return std::pow(M_PI, d / 2.0) / std::tgamma(d / 2.0 + 1) * std::pow(r, d);
}

} // namespace

FrequencySweep frequency_sweep(const ConjugacyData &c, const FiniteMeasure &m, const Real &A,
                               const SweepOptions &o)
{
    FrequencySweep sw;
    sw.A = A;
    sw.max_coef2 = -1;
    int d = c.d();
    FiniteMeasure t = on_torus(c, m);
    double a = A.convert_to<double>();
    double count = ball_volume(d, a + std::sqrt(d) / 2);
    std::vector<Freq> qs;
    if (a > o.exact_limit || count > o.count_limit) {
        sw.sampled = true;
        SplitMix64 rng(o.seed);
        std::set<Freq> seen;
        long r = static_cast<long>(std::floor(a));
        for (long k = 0; k < o.samples * 64 && static_cast<long>(seen.size()) < o.samples; k++) {
            Freq q(d);
            long s2 = 0;
            for (int j = 0; j < d; j++) {
                q[j] = rng.range(-r, r);
                s2 += q[j] * q[j];
            }
            if (s2 == 0 || Real(s2) > A * A || !seen.insert(q).second)
                continue;
            qs.push_back(q);
        }
        sw.coverage = static_cast<double>(qs.size()) / ball_volume(d, a);
    } else {
        qs = frequency_ball(d, A);
    }
    for (auto &q : qs) {
        Real v = fourier_coeff(c, t, q).norm2();
        if (v > sw.max_coef2) {
            sw.max_coef2 = v;
            sw.argmax = q;
        }
        sw.rows.push_back({q, v});
    }
    if (sw.rows.empty())
        sw.max_coef2 = 0;
    return sw;
}

BoundCertificate bound_terms(const ParameterPlan &p, const ConjugacyData &c)
{
    (void)c;
    BoundCertificate b;
    int d = p.d;
    Real F2 = p.F * p.F;
    Real lM = log2r(p.M), lA = log2r(p.A), lz = log2r(p.zeta_u), lD = log2r(p.Delta);
    Real ls = log2r(Real(p.s)), ll = log2r(Real(p.l));
    Real n = Real(p.n), R = p.R, T = Real(p.T);
    Real lip = log2r(2 * pi() * sqrt(Real(d)));
    Real s10 = pow(Real(p.s), 10);
    b.log2_L[0] = log2r(Real(9)) - Real(p.di) * p.delta * T;
    b.log2_L[1] = lip + lM + lA + s10 + Real(p.k.c8) * F2 * Real(p.l) - R;
    b.log2_L[2] = lip + lM + lA + n * lz - ls + lD + Real(p.k.c9) * F2 * ll - R;
    b.log2_L[3] = log2r(Real(d) / 2) + Real(d * (d - 1)) / 2 * Real(p.k.c3) * p.F +
                  Real(d - 1) * (lM + lA) - n * lz - ls - lD + R + T;
    b.log2_L[4] = log2r(Real(100)) - ll;
    b.sum = 0;
    for (int j = 0; j < 5; j++) {
        b.L[j] = exp2r(b.log2_L[j]);
        b.sum += b.L[j];
    }
    b.xi_upper = p.xi_lhs <= Real(1) / 4;
    b.measured = -1;
    return b;
}

void certify(BoundCertificate &b, const FrequencySweep &sweep)
{
    b.measured = sweep.max_coef2;
    b.holds = b.measured <= b.sum;
    if (b.xi_upper && !b.holds)
        throw Error("InvariantViolation", "coefficient " + dec(b.measured, 8) +
                                              " exceeds the certificate " + dec(b.sum, 8));
}

Cx integrate(const FiniteMeasure &gamma, const TrigPoly &f)
{
    Cx s;
    for (auto &[q, fq] : f.coef) {
        Cx g;
        for (size_t a = 0; a < gamma.size(); a++)
            g += unit_phase(dot(q, gamma.points[a])) * gamma.weights[a];
        s += fq * g;
    }
    return s;
}

Real evaluate(const TrigPoly &f, const Vec &x)
{
    Real s = 0;
    for (auto &[q, fq] : f.coef)
        s += (fq * unit_phase(dot(q, x))).re;
    return s;
}

Real sobolev_norm(const TrigPoly &f)
{
    Real s = 0;
    for (auto &[q, fq] : f.coef) {
        long n2 = 0;
        for (long v : q)
            n2 += v * v;
        if (n2 == 0)
            continue;
        /* |q|^(d+1) |f_q|^2 */
        s += pow(Real(n2), Real(f.d + 1) / 2) * fq.norm2();
    }
    return sqrt(s);
}

namespace {

SobolevConstant compute_sobolev_constant(int d)
{
    SobolevConstant k;
    k.d = d;
    double vol1 = ball_volume(d, 1);
    k.N = std::min(10000L, static_cast<long>(std::floor(std::pow(2e6 / vol1, 1.0 / d))));
    long N = k.N;
    std::map<long, long> shells; /* |q|^2 -> count */
    Freq q(d);
    std::function<void(int, long)> rec = [&](int j, long used) {
        if (j == d) {
            if (used > 0)
                shells[used]++;
            return;
        }
        for (long v = -N; v <= N; v++) {
            long u = used + v * v;
            if (u <= N * N)
                rec(j + 1, u);
        }
    };
    rec(0, 0);

    const long double w = (d + 1) / 2.0L;
    long double h = std::sqrt(static_cast<long double>(d)) / 2;
    long double omega = 2 * std::pow(static_cast<long double>(M_PI), d / 2.0L) / std::tgamma(d / 2.0L);
    auto tail_bound = [&](long double a) {
        long double kappa = (a - h) / (a - 2 * h);
        return omega * std::pow(kappa, static_cast<long double>(d + 1)) / (a - h);
    };
    std::vector<std::pair<long, long double>> partial; /* shell |q|^2, sum up to it */
    long double run = 0;
    for (auto &[n2, cnt] : shells) {
        run += cnt * std::pow(static_cast<long double>(n2), -w);
        partial.push_back({n2, run});
    }
    long double safety = 1 + 1e-12L;
    long double K2 = (run + tail_bound(static_cast<long double>(N))) * safety;
    /* sup over A of A * (K2 - partial(A)): right ends of the constant pieces */
    long double best = K2; /* A -> 1 from below */
    for (size_t j = 0; j + 1 < partial.size(); j++) {
        long double a = std::sqrt(static_cast<long double>(partial[j + 1].first));
        best = std::max(best, a * (K2 - partial[j].second));
    }
    best = std::max(best, static_cast<long double>(N) * (K2 - run));
    best = std::max(best, static_cast<long double>(N) * tail_bound(static_cast<long double>(N)));
    k.K = sqrt(Real(static_cast<double>(K2)));
    k.tail = sqrt(Real(static_cast<double>(best * safety)));
    k.c14 = std::max(k.K, k.tail);
    return k;
}

} // namespace

const SobolevConstant &sobolev_constant(int d)
{
    static std::map<int, SobolevConstant> cache;
    if (d < 1 || d > 8)
        throw Error("InvalidInput", "dimension outside 1..8");
    auto it = cache.find(d);
    if (it == cache.end())
        it = cache.emplace(d, compute_sobolev_constant(d)).first;
    return it->second;
}

SobolevGap sobolev_gap(const ConjugacyData &c, const FiniteMeasure &gamma0, const TrigPoly &f,
                       const Real &A, const Real &C)
{
    if (f.d != c.d())
        throw Error("InvalidInput", "test function dimension mismatch");
    FiniteMeasure gamma = on_torus(c, gamma0);
    SobolevGap g;
    Real mass = gamma.total_mass();
    Cx f0;
    if (auto it = f.coef.find(Freq(f.d, 0)); it != f.coef.end())
        f0 = it->second;
    g.lhs = (integrate(gamma, f) - f0 * mass).abs();
    const SobolevConstant &k = sobolev_constant(f.d);
    g.rhs = k.c14 * (C + 1) / sqrt(A) * sobolev_norm(f);
    FrequencySweep sw = frequency_sweep(c, gamma, A);
    g.max_coef = sqrt(sw.max_coef2);
    g.hypothesis = !sw.sampled && mass <= 1 + tol(0.75) && g.max_coef <= C / sqrt(A);
    g.holds = g.lhs <= g.rhs;
    if (g.hypothesis && !g.holds)
        throw Error("InvariantViolation",
                    "Sobolev gap " + dec(g.lhs, 8) + " exceeds " + dec(g.rhs, 8));
    return g;
}

Bump bump_function(const Vec &center, const Real &rho, int band_limit)
{
    if (!(rho > 0 && rho < Real(1) / 2))
        throw Error("BadRadius", "radius must lie in (0, 1/2)");
    if (band_limit < 0)
        throw Error("InvalidInput", "negative band limit");
    int d = static_cast<int>(center.size());
    long double r = (rho / sqrt(Real(d))).convert_to<long double>();
    /* trapezoid rule is spectrally accurate for a smooth compactly supported profile */
    const int M = 1 << 12;
    std::vector<long double> t(M + 1), v(M + 1);
    for (int j = 0; j <= M; j++) {
        t[j] = -r + 2 * r * j / M;
        long double u = t[j] / r;
        v[j] = std::fabs(u) < 1 ? std::exp(-1 / (1 - u * u)) : 0;
    }
    auto coef1 = [&](long k) {
        long double s = 0;
        for (int j = 0; j <= M; j++)
            s += v[j] * std::cos(2 * static_cast<long double>(M_PI) * k * t[j]);
        return s * 2 * r / M;
    };
    long double norm0 = coef1(0);
    long full = std::max<long>(4L * band_limit, static_cast<long>(16 / r));
    std::vector<long double> phi(full + 1);
    long double sum_all = 0, sum_band = 0;
    for (long k = 0; k <= full; k++) {
        phi[k] = coef1(k) / norm0;
        long double a = std::fabs(phi[k]) * (k == 0 ? 1 : 2);
        sum_all += a;
        if (k <= band_limit)
            sum_band += a;
    }

    Bump b;
    b.rho = rho;
    b.center = center;
    b.f.d = d;
    Freq q(d, -band_limit);
    std::function<void(int, long double)> rec = [&](int j, long double prod) {
        if (j == d) {
            Real beta = -dot(q, center);
            b.f.coef[q] = unit_phase(beta) * Real(static_cast<double>(prod));
            return;
        }
        for (long k = -band_limit; k <= band_limit; k++) {
            q[j] = k;
            rec(j + 1, prod * phi[std::labs(k)]);
        }
    };
    rec(0, 1);
    b.mass = b.f.coef[Freq(d, 0)].re;
    b.norm = sobolev_norm(b.f);
    long double trunc = std::pow(sum_all, d) - std::pow(sum_band, d);
    b.truncation = Real(static_cast<double>(std::max(trunc, 0.0L))) + Real(1e-12);
    return b;
}

namespace {

Real mahler_of(const ConjugacyData &c, const std::vector<Vec> &gen_logs, const Exps &e)
{
    Vec w(gen_logs[0].size(), Real(0));
    for (size_t k = 0; k < e.size(); k++)
        for (size_t j = 0; j < w.size(); j++)
            w[j] += Real(e[k]) * gen_logs[k][j];
    return h0_norm(w, place_weights(*c.field));
}

} // namespace

MuPrimeReport build_mu_prime(const FiniteMeasure &mu0, const Real &eps, const Real &alpha,
                             const Real &delta, const ConjugacyData &c, const MuPrimeOptions &o)
{
    MuPrimeReport rep;
    FiniteMeasure mu = on_torus(c, mu0);
    if (mu.size() == 0)
        throw Error("InvalidInput", "empty measure");
    if (mu.total_mass() > 1 + tol(0.75))
        throw Error("InvalidInput", "measure mass exceeds 1");

    ParameterPlan first = plan_parameters(eps, alpha, delta, c, o.plan);
    EntropyConstants ek;
    ek.c16 = o.plan.k.c16;
    rep.scale = positive_scale_direction(c, mu, alpha, delta, first.T, eps, o.entropy, ek);
    FiniteMeasure tau = push_to_X(c, mu);
    rep.nu = build_nu(c, tau, rep.scale.B, first.T, rep.scale.i, delta, alpha, o.entropy);

    PlanOptions po = o.plan;
    po.R = rep.scale.R;
    po.i = rep.scale.i;
    po.T = first.T;
    rep.plan = plan_parameters(eps, alpha, delta, c, po);
    rep.plan.T_setting = first.T_setting;
    rep.plan.T_raised = first.T_raised;
    for (auto &f : first.flags)
        if (std::find(rep.plan.flags.begin(), rep.plan.flags.end(), f) == rep.plan.flags.end())
            rep.plan.flags.push_back(f);
    const ParameterPlan &p = rep.plan;
    rep.A = p.A;

    FiniteMeasure nu_t = pull_to_torus(c, rep.nu.nu);
    Orbit orb = orbit_images(c, mu.points, p.gadgets, p.n, p.s, static_cast<int>(p.l));
    rep.elements = orb.elements.size();
    Real scale = Real(1) / Real(static_cast<long>(rep.elements));
    auto merged = merge(orb, {&rep.nu.nu.weights, &mu.weights}, scale);
    rep.mu_prime = column(merged, 0);
    rep.mu_second = column(merged, 1);
    rep.dominated = true;
    for (size_t a = 0; a < rep.mu_prime.size(); a++)
        if (rep.mu_prime.weights[a] > rep.mu_second.weights[a] * (1 + tol(0.75)))
            rep.dominated = false;
    if (!rep.dominated)
        throw Error("InvariantViolation", "averaged measure is not dominated");

    rep.mass = rep.mu_prime.total_mass();
    if (abs(rep.mass - rep.nu.mass) > tol(0.5))
        throw Error("InvariantViolation", "averaging changed the mass");
    rep.mass_ok = rep.mass + tol(0.5) >= alpha - 5 * delta;

    rep.sweep_nu = frequency_sweep(c, nu_t, p.A, o.sweep);
    rep.sweep_avg = frequency_sweep(c, rep.mu_prime, p.A, o.sweep);
    rep.decay = rep.sweep_avg.max_coef2 < rep.sweep_nu.max_coef2;
    if (!rep.sweep_avg.argmax.empty()) {
        Real gap = pushforward_gap(c, rep.mu_prime, rep.sweep_avg.argmax);
        if (gap > tol(0.25))
            throw Error("InvariantViolation", "pushforward identity off by " + dec(gap, 6));
    }
    rep.certificate = bound_terms(p, c);
    certify(rep.certificate, rep.sweep_avg);

    std::vector<Vec> logs;
    for (auto &g : c.phi)
        logs.push_back(log_embed(g));
    rep.mahler_radius = 0;
    for (auto &e : orb.elements)
        rep.mahler_radius = std::max(rep.mahler_radius, mahler_of(c, logs, e));
    rep.radius_ratio = rep.mahler_radius / p.log_inv_eps;
    return rep;
}

} // namespace tor
