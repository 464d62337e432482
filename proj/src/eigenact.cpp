#include "tor/eigenact.hpp"

#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace tor {

EigenIndex eigen_index(const ConjugacyData &c, int i)
{
    int m = c.r1() + c.r2();
    if (i < 1 || i > m)
        throw Error("InvalidInput", "eigenspace index " + std::to_string(i) + " outside 1.." +
                                        std::to_string(m));
    return {i, i <= c.r1() ? 1 : 2};
}

static unsigned bitlen(const Int &e)
{
    return e == 0 ? 0 : static_cast<unsigned>(mpz_sizeinbase(e.backend().data(), 2));
}

Cx zeta_power(const Cx &z0, const Int &e0)
{
    static const bool wide = [] {
        mpfr_set_emax(mpfr_get_emax_max());
        mpfr_set_emin(mpfr_get_emin_min());
        return true;
    }();
    (void)wide;
    unsigned bits = precision() + bitlen(e0) + 32;
    PrecisionGuard g(bits);
    Cx z{fresh(z0.re), fresh(z0.im)};
    Int e = e0;
    if (e < 0) {
        z = Cx(Real(1)) / z;
        e = -e;
    }
    Cx r(Real(1));
    while (e > 0) {
        if (mpz_odd_p(e.backend().data()))
            r = r * z;
        e >>= 1;
        if (e > 0)
            z = z * z;
    }
    return r;
}

namespace {

Vec scale_vec(const Vec &v, const Real &s)
{
    Vec r(v);
    for (auto &x : r)
        x *= s;
    return r;
}

std::vector<long> lin(long p, const std::vector<long> &a, long q, const std::vector<long> &b)
{
    std::vector<long> r(a.size());
    for (size_t j = 0; j < a.size(); j++)
        r[j] = p * a[j] + q * b[j];
    return r;
}

Cx eval_coeffs(const std::vector<Int> &cf, const Cx &z)
{
    Cx s, pw(Real(1));
    for (auto &x : cf) {
        s += pw * to_real(x);
        pw = pw * z;
    }
    return s;
}

/* Places k < l (both != p) with |sigma_k| = |sigma_l| on the subfield fixed by
   complex conjugation through sigma_p; empty if that subfield is Q. */
std::optional<std::pair<int, int>> subfield_pair(const ConjugacyData &c, int p)
{
    const NumberField &k = *c.field;
    int d = k.d, m = k.r1 + k.r2;
    unsigned bits = precision();
    Cx al = k.root(p);
    IMat b(d, d + 1);
    Real scale = exp2r(Real(0.75 * bits));
    Cx pw(Real(1));
    for (int j = 0; j < d; j++) {
        b(j, j) = 1;
        b(j, d) = round_to_int(pw.im * scale);
        pw = pw * al;
    }
    IMat red = lll(b);
    Real cap = exp2r(Real(bits / 8.0)), eps = exp2r(Real(-0.5 * bits));
    std::vector<std::vector<Int>> sub;
    for (int r = 0; r < d; r++) {
        std::vector<Int> cf(d);
        Real mag = 0, big = 0, apw = 1;
        for (int j = 0; j < d; j++) {
            cf[j] = red(r, j);
            big = std::max(big, Real(abs(Real(cf[j]))));
            mag += abs(Real(cf[j])) * apw;
            apw *= std::max(Real(1), al.abs());
        }
        if (big == 0 || big > cap)
            continue;
        if (abs(eval_coeffs(cf, al).im) <= eps * mag)
            sub.push_back(cf);
    }
    if (sub.size() <= 1)
        return std::nullopt;
    if (d % static_cast<int>(sub.size()) != 0)
        throw Error("InvariantViolation", "real subfield degree does not divide d");
    Real match = tol(0.25);
    for (int a = 0; a < m; a++)
        for (int bb = a + 1; bb < m; bb++) {
            if (a == p || bb == p)
                continue;
            bool same = true, conj = true;
            for (auto &cf : sub) {
                Cx x = eval_coeffs(cf, k.root(a)), y = eval_coeffs(cf, k.root(bb));
                Real s = 1 + x.abs();
                same = same && (x - y).abs() <= match * s;
                conj = conj && (x - y.conj()).abs() <= match * s;
            }
            if (same || conj)
                return std::make_pair(a, bb);
        }
    throw Error("InvariantViolation", "no place pair agrees on the real subfield");
}

} // namespace

ExpandingPair expander(const ConjugacyData &c, int i, const GadgetConstants &kc)
{
    ExpandingPair ep;
    ep.idx = eigen_index(c, i);
    int p = i - 1;
    LogLattice L = log_lattice(c);
    int m = c.r1() + c.r2(), d = c.d(), r = L.rank;
    if (r < 2)
        throw Error("NotApplicable", "log lattice rank " + std::to_string(r) + " < 2");
    if (r != m - 1)
        throw Error("NotApplicable", "group is not of finite index in the unit group");
    const auto &dw = L.weights;

    Minima mn = successive_minima(L);
    ep.F = mn.m.back();
    ep.mstar = 0;
    for (auto &x : mn.m)
        ep.mstar += x;
    ep.mstar /= 2;
    ep.m = ep.mstar + ep.F;
    Real rr = Real(r) / 2 + 1;
    ep.Z = 4 * d * rr * ep.F;

    // hyperplane w_k = w_l containing the logs of units real at place p
    std::optional<std::pair<int, int>> kl;
    if (ep.idx.is_complex())
        kl = subfield_pair(c, p);
    ep.subfield_nontrivial = kl.has_value();
    if (!kl) {
        for (int a = 0; a < m && !kl; a++)
            for (int b = a + 1; b < m && !kl; b++)
                if (a != p && b != p)
                    kl = std::make_pair(a, b);
    }
    ep.k = kl->first;
    ep.l = kl->second;

    Vec a(m), b(m, Real(0));
    for (int j = 0; j < m; j++)
        a[j] = j == p ? Real(1) / dw[p] : Real(-1) / (d - dw[p]);
    b[ep.k] = Real(1) / dw[ep.k];
    b[ep.l] = Real(-1) / dw[ep.l];

    NearestPoint as = jarnik_nearest(L, scale_vec(a, ep.Z));
    NearestPoint bs = jarnik_nearest(L, scale_vec(b, ep.Z));

    Real eps = tol(0.25) * (1 + ep.Z);
    auto off_plane = [&](const Vec &w) { return abs(w[ep.k] - w[ep.l]) > eps; };
    std::vector<long> ax;
    std::vector<std::vector<long>> cands{as.x};
    for (auto &f : mn.witnesses)
        cands.push_back(lin(1, as.x, 1, f));
    for (auto &x : cands)
        if (off_plane(L.point(x))) {
            ax = x;
            break;
        }
    if (ax.empty())
        throw Error("InvariantViolation", "all candidates lie in the hyperplane");
    const std::vector<long> &bx = bs.x;
    Vec aw = L.point(ax), bw = L.point(bx);

    // generator of (Z a' + Z b') on the hyperplane, by bounded search
    Real ca = aw[ep.k] - aw[ep.l], cb = bw[ep.k] - bw[ep.l];
    std::optional<std::pair<long, long>> gen;
    long best = 0;
    int B = kc.lambda_bound;
    for (long q = -B; q <= B; q++)
        for (long pp = 0; pp <= B; pp++) {
            if ((pp == 0 && q <= 0) || std::gcd(pp, std::labs(q)) != 1)
                continue;
            if (abs(pp * ca + q * cb) > eps * (pp + std::labs(q)))
                continue;
            long w = pp + std::labs(q);
            if (!gen || w < best) {
                gen = std::make_pair(pp, q);
                best = w;
            }
        }

    std::vector<long> utx = lin(1, ax, 1, bx);
    ep.case_tag = "1";
    if (gen) {
        std::vector<long> g2 = lin(gen->first, ax, gen->second, bx);
        Vec gw = L.point(g2);
        if (gw[p] < 0) {
            gen = std::make_pair(-gen->first, -gen->second);
            g2 = lin(-1, g2, 0, g2);
            gw = L.point(g2);
        }
        ep.lambda = gen;
        ep.lambda_log = gw[p];
        Real hg = h0_norm(gw, dw);
        if (hg >= ep.Z) {
            ep.case_tag = "2.i";
        } else {
            ep.case_tag = "2.ii";
            long N = static_cast<long>(round_to_int(floor(ep.Z / hg))) + 1;
            utx = lin(N, g2, 0, g2);
        }
    }

    ep.u = L.exps(ax);
    ep.ut = L.exps(utx);
    AlgebraicNumber pu = phi_of(c, ep.u), put = phi_of(c, ep.ut);
    ep.u_log = log_embed(pu);
    ep.ut_log = log_embed(put);
    ep.zeta_u = pu.embed(p);
    ep.zeta_ut = put.embed(p);

    ep.sign_pattern = true;
    for (int j = 0; j < m; j++)
        ep.sign_pattern = ep.sign_pattern && (j == p ? ep.u_log[j] > 0 : ep.u_log[j] < 0);
    Real g11 = q0_form(ep.u_log, ep.u_log, dw), g22 = q0_form(ep.ut_log, ep.ut_log, dw),
         g12 = q0_form(ep.u_log, ep.ut_log, dw);
    ep.independent = g11 * g22 - g12 * g12 > tol(0.25) * g11 * g22;
    if (ep.idx.is_complex()) {
        Real arg = atan2(ep.zeta_u.im, ep.zeta_u.re) / pi();
        for (int n = 1; n <= kc.n_check; n++) {
            Real x = n * arg;
            if (abs(x - round(x)) <= tol(0.25) * n)
                ep.non_real_powers = false;
        }
    }
    if (!ep.sign_pattern)
        throw Error("InvariantViolation", "expanding element has the wrong sign pattern");
    if (!ep.independent)
        throw Error("InvariantViolation", "expanding pair is dependent");
    if (!ep.non_real_powers)
        throw Error("InvariantViolation", "a small power of u has a real eigenvalue");

    Real unit = d * rr * ep.F;
    Real hu = h0_norm(ep.u_log, dw), hut = h0_norm(ep.ut_log, dw);
    ep.height_bound = hu < 9 * unit && hut < 9 * unit;
    ep.expansion_bound = ep.u_log[p] >= unit;
    ep.expansion_bound_ut = ep.ut_log[p] >= unit / 4;
    return ep;
}

namespace {

struct Polar {
    Real theta; /* ln |z| */
    Real beta;  /* arg z / 2 pi in [0, 1) */
};

Polar polar(const Cx &z)
{
    Real b = atan2(z.im, z.re) / (2 * pi());
    if (b < 0)
        b += 1;
    if (b >= 1)
        b -= 1;
    return {log(z.abs()), b};
}

std::uint64_t fixed_point(const Real &x)
{
    Real f = x - floor(x);
    Int v = round_to_int(f * exp2r(Real(64)));
    mpz_fdiv_r_2exp(v.backend().data(), v.backend().data(), 64);
    return static_cast<std::uint64_t>(mpz_get_ui(v.backend().data()));
}

std::uint64_t torus_dist(std::uint64_t x) { return x <= (1ULL << 63) ? x : 0 - x; }

} // namespace

ProgressionData arith_progression(const ConjugacyData &c, const ExpandingPair &pair, int s,
                                  const GadgetConstants &kc)
{
    if (s < 2)
        throw Error("InvalidInput", "progression length must be at least 2");
    if (s > 255)
        throw Error("InvalidInput", "s^8 must fit in 64 bits");
    bool cx = pair.idx.is_complex();
    ProgressionData pd;
    pd.s = s;
    std::uint64_t P = 1;
    for (int j = 0; j < 8; j++)
        P *= static_cast<std::uint64_t>(s);
    pd.P = Int(P);

    Polar pu = polar(pair.zeta_u), pt = polar(pair.zeta_ut);
    if (pu.theta <= 0 || pt.theta <= 0)
        throw Error("InvariantViolation", "pair does not expand the eigenspace");
    Real gamma = pu.theta / pt.theta;
    Real second = pu.beta - gamma * pt.beta;
    Real window = 2 / sqrt(Real(P));
    Real slimit = pow(Real(s), -3);

    std::uint64_t st1 = fixed_point(gamma), st2 = fixed_point(second);
    long double wl = std::ldexp(2.0L / std::sqrt(static_cast<long double>(P)), 64);
    std::uint64_t W = wl >= std::ldexp(1.0L, 63) ? (1ULL << 63)
                                                 : static_cast<std::uint64_t>(wl) + P + 1;
    std::uint64_t acc1 = 0, acc2 = 0;
    bool have_first = false;
    for (std::uint64_t n = 1; n <= P; n++) {
        acc1 += st1;
        acc2 += st2;
        if (torus_dist(acc1) > W || torus_dist(acc2) > W)
            continue;
        Real x1 = gamma * Real(n), x2 = second * Real(n);
        Int m1 = round_to_int(x1), m2 = round_to_int(x2);
        Real o1 = abs(x1 - to_real(m1)), o2 = abs(x2 - to_real(m2));
        if (o1 > window || o2 > window)
            continue;
        if (!have_first) {
            have_first = true;
            pd.first_hit_n = Int(n);
        }
        Real r1 = x1 - to_real(m1);
        Cx delta(pt.theta * r1, cx ? 2 * pi() * (pt.beta * r1 + x2 - to_real(m2)) : Real(0));
        Real dn = delta.abs();
        if (dn <= tol(0.75))
            throw Error("DegenerateStep", "step vanishes at n = " + std::to_string(n));
        if (dn > slimit)
            continue;

        std::vector<Cx> zs;
        Real dev = 0;
        for (int t = 0; t < s; t++) {
            Int e1 = Int(n) * t, e2 = -m1 * t;
            Cx z = t == 0 ? Cx(Real(1))
                          : zeta_power(pair.zeta_u, e1) * zeta_power(pair.zeta_ut, e2);
            Cx lin1 = Cx(Real(1)) + delta * Real(t);
            dev = std::max(dev, Real((z - lin1).abs()));
            zs.push_back({fresh(z.re), fresh(z.im)});
        }
        if (dev > dn / s)
            continue;

        pd.n = Int(n);
        pd.m1 = m1;
        pd.m2 = m2;
        pd.omega1 = o1;
        pd.omega2 = o2;
        pd.delta = delta;
        pd.zeta = zs;
        pd.max_deviation = dev;
        long mm = m1.convert_to<long>();
        pd.step.resize(pair.u.size());
        for (size_t j = 0; j < pd.step.size(); j++)
            pd.step[j] = static_cast<long>(n) * pair.u[j] - mm * pair.ut[j];
        break;
    }
    if (pd.zeta.empty())
        throw Error("SearchExhausted",
                    "no n <= s^8 gives a step within s^-3 for s = " + std::to_string(s));

    Real dn = pd.delta.abs();
    pd.step_bound = dn <= slimit;
    pd.accuracy = pd.max_deviation <= dn / s;
    pd.first_window_hit = pd.first_hit_n == pd.n;
    pd.lower_bound_holds = dn >= pow(Real(s), -kc.c7 * pair.F * pair.F);
    pd.length_threshold = Real(s) >= kc.c6 * pair.F;
    Vec w(pair.u_log.size());
    for (size_t j = 0; j < w.size(); j++)
        w[j] = to_real(pd.n) * pair.u_log[j] - to_real(pd.m1) * pair.ut_log[j];
    std::vector<int> dw = place_weights(*c.field);
    pd.max_height = (s - 1) * h0_norm(w, dw);
    pd.height_bound = pd.max_height <= pow(Real(s), 10);
    return pd;
}

EscapeSequence escape_sequence(const ConjugacyData &c, const ExpandingPair &pair, int l,
                               const GadgetConstants &kc)
{
    if (l < 2)
        throw Error("InvalidInput", "escape sequence length must be at least 2");
    (void)c;
    EscapeSequence es;
    es.l = l;
    es.c_esc_used = kc.c_esc;
    Polar pu = polar(pair.zeta_u), pt = polar(pair.zeta_ut);
    es.gamma = pu.theta / pt.theta;
    if (!pair.idx.is_complex()) {
        es.b.assign(l, pair.u);
        es.zeta.assign(l, pair.zeta_u);
        es.max_log = log2r(pair.zeta_u.abs());
        es.band_ok = es.max_log >= 0;
        es.band_upper_ok = true;
        es.distinct = false;
        return es;
    }
    Real F2 = pair.F * pair.F, lnl = log(Real(l));
    // the band needs l^(c F^2 / 2) >= e^theta~
    if (Real(kc.c_esc) * F2 * lnl / 2 < pt.theta) {
        es.c_esc_used = static_cast<double>(2 * pt.theta / (F2 * lnl));
        es.c_esc_raised = true;
    }
    es.J = static_cast<long>(round_to_int(ceil(Real(es.c_esc_used) * F2 * lnl / pu.theta)));
    std::set<Exps> seen;
    es.band_ok = true;
    es.max_log = 0;
    for (int k = 1; k <= l; k++) {
        long e1 = k + es.J;
        long e2 = static_cast<long>(round_to_int(ceil(es.gamma * k)));
        Exps e(pair.u.size());
        for (size_t j = 0; j < e.size(); j++)
            e[j] = e1 * pair.u[j] - e2 * pair.ut[j];
        Cx z = zeta_power(pair.zeta_u, Int(e1)) * zeta_power(pair.zeta_ut, Int(-e2));
        z = {fresh(z.re), fresh(z.im)};
        Real lg = log2r(z.abs());
        es.band_ok = es.band_ok && lg >= 0;
        es.max_log = std::max(es.max_log, lg);
        seen.insert(e);
        es.b.push_back(e);
        es.zeta.push_back(z);
    }
    es.distinct = static_cast<int>(seen.size()) == l;
    es.band_upper_ok = es.max_log <= kc.c9 * es.c_esc_used * F2 * log2r(Real(l)) +
                                         log2r(pair.zeta_u.abs());
    if (!es.band_ok)
        throw Error("InvariantViolation", "escape element contracts the eigenspace");
    return es;
}

int near_line_count(const EscapeSequence &seq, bool complex_place, const Real &f1, const Real &f2)
{
    Real nf = complex_place ? sqrt(f1 * f1 + f2 * f2) : abs(f1);
    if (nf == 0)
        throw Error("ZeroForm", "linear form vanishes");
    int n = 0;
    for (auto &z : seq.zeta) {
        Real v = complex_place ? f1 * z.re + f2 * z.im : f1 * z.re;
        if (abs(v) <= nf)
            n++;
    }
    return n;
}

IrrationalityResult irrationality_floor(const ConjugacyData &c, const std::vector<long> &q, int i,
                                        const Real &h)
{
    EigenIndex idx = eigen_index(c, i);
    int d = c.d();
    if (static_cast<int>(q.size()) != d)
        throw Error("InvalidInput", "character has the wrong dimension");
    Real qn = 0;
    for (long x : q)
        qn += Real(x) * x;
    if (qn == 0)
        throw Error("ZeroCharacter", "q = 0");
    qn = sqrt(qn);
    auto coef = [&](int col) {
        Real s = 0;
        for (int m = 0; m < d; m++)
            if (q[m] != 0)
                s += q[m] * c.psi_inverse(m, col);
        return s;
    };
    IrrationalityResult res;
    int p = i - 1;
    if (idx.is_complex()) {
        Real x = coef(p), y = coef(p + c.r2());
        res.actual = sqrt(x * x + y * y);
    } else {
        res.actual = abs(coef(p));
    }
    Real dd = d;
    res.floor = exp2r(-(dd * (dd - 1) / 2) * h) / dd * pow(c.uniformity, -(dd - 1)) *
                pow(qn, -(dd - 1)) / c.scale;
    return res;
}

IrrationalitySweep irrationality_sweep(const ConjugacyData &c, int i, double radius, const Real &h)
{
    int d = c.d();
    long B = static_cast<long>(std::floor(radius));
    IrrationalitySweep sw;
    bool first = true;
    std::vector<long> q(d, -B);
    for (;;) {
        long n2 = 0;
        for (long x : q)
            n2 += x * x;
        if (n2 > 0 && n2 <= radius * radius) {
            IrrationalityResult r = irrationality_floor(c, q, i, h);
            Real ratio = r.actual / r.floor;
            if (first || r.actual < sw.min_actual)
                sw.min_actual = r.actual;
            if (first || ratio < sw.min_ratio)
                sw.min_ratio = ratio;
            first = false;
            sw.checked++;
            if (r.actual < r.floor)
                sw.violations++;
        }
        int j = 0;
        while (j < d && q[j] == B)
            q[j++] = -B;
        if (j == d)
            break;
        q[j]++;
    }
    return sw;
}

} // namespace tor
