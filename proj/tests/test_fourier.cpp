#include "fixtures.hpp"
#include "util.hpp"

#include "tor/fourier.hpp"

#include <cmath>
#include <complex>

using namespace tor;

namespace {

using Space = FiniteMeasure::Space;

ConjugacyData cubic_group() { return build_conjugacy(validate_group({cubic_A(), cubic_B()})); }

Real qnorm(const Freq &q)
{
    Real s = 0;
    for (long v : q)
        s += Real(v * v);
    return sqrt(s);
}

std::vector<Vec> random_points(int n, int d, std::uint64_t seed)
{
    SplitMix64 rng(seed);
    std::vector<Vec> pts(n, Vec(d));
    for (auto &p : pts)
        for (auto &x : p)
            x = Real(rng.uniform());
    return pts;
}

Vec random_weights(size_t n, std::uint64_t seed, const Real &total = 1)
{
    SplitMix64 rng(seed);
    Vec w(n);
    Real s = 0;
    for (auto &x : w) {
        x = Real(0.1 + rng.uniform());
        s += x;
    }
    for (auto &x : w)
        x = x * total / s;
    return w;
}

/* 4 x 4 x 4 torus cluster with spacing 2^-14 */
std::vector<Vec> torus_cluster(int n, const Real &sp)
{
    std::vector<Vec> pts;
    for (int i = 0; i < n; i++)
        for (int j = 0; j < n; j++)
            for (int k = 0; k < n; k++)
                pts.push_back({Real("0.31") + sp * i, Real("0.47") + sp * j,
                               Real("0.59") + sp * k});
    return pts;
}

Rat exact_rational(const Real &x)
{
    if (x == 0)
        return Rat(0);
    Int z;
    long e = mpfr_get_z_2exp(z.backend().data(), x.backend().data());
    Rat r(z);
    Int p = 1;
    p <<= static_cast<unsigned long>(std::labs(e));
    return e >= 0 ? r * Rat(p) : r / Rat(p);
}

/* (g_* nu)^(q) = nu^(g^T q), phases reduced in exact rational arithmetic */
Real coeff_transposed_abs(const FiniteMeasure &nu, const IMat &g, const Freq &q)
{
    int d = static_cast<int>(q.size());
    std::vector<Int> gq(d, Int(0));
    for (int j = 0; j < d; j++)
        for (int r = 0; r < d; r++)
            gq[j] += g(r, j) * q[r];
    Real re = 0, im = 0;
    for (size_t a = 0; a < nu.size(); a++) {
        Rat beta = 0;
        for (int j = 0; j < d; j++)
            beta += Rat(gq[j]) * exact_rational(nu.points[a][j]);
        Int fl = numerator(beta) / denominator(beta);
        if (beta < 0 && Rat(fl) != beta)
            fl -= 1;
        Real f = to_real(beta - Rat(fl));
        re += nu.weights[a] * cos(2 * pi() * f);
        im -= nu.weights[a] * sin(2 * pi() * f);
    }
    return sqrt(re * re + im * im);
}

} // namespace

TEST_CASE("fourier coefficients of simple measures")
{
    ConjugacyData c = cubic_group();
    FiniteMeasure dirac = make_measure(c, Space::Torus, {Vec(3, Real(0))}, {Real(1)});
    for (long a = -3; a <= 3; a++)
        for (long b = -3; b <= 3; b++) {
            Cx z = fourier_coeff(c, dirac, {a, b, 2});
            CHECK(z.re == 1);
            CHECK(z.im == 0);
        }

    const int N = 5;
    std::vector<Vec> grid;
    for (int i = 0; i < N; i++)
        for (int j = 0; j < N; j++)
            for (int k = 0; k < N; k++)
                grid.push_back({Real(i) / N, Real(j) / N, Real(k) / N});
    FiniteMeasure g = uniform_measure(c, Space::Torus, grid);
    for (auto &q : frequency_ball(3, Real(4))) {
        bool all_div = q[0] % N == 0 && q[1] % N == 0 && q[2] % N == 0;
        Real v = fourier_coeff(c, g, q).abs();
        if (!all_div)
            CHECK(v <= tol(0.75));
    }
    CHECK(near(fourier_coeff(c, g, {5, 0, -5}).re, Real(1), tol(0.75)));

    FiniteMeasure two = make_measure(c, Space::Torus, {Vec(3, Real(0)), {Real("0.5"), 0, 0}},
                                     {Real("0.5"), Real("0.5")});
    CHECK(fourier_coeff(c, two, {1, 0, 0}).abs() <= tol(0.75));
    CHECK(near(fourier_coeff(c, two, {2, 0, 0}).re, Real(1), tol(0.75)));

    // sign convention: e(beta) = exp(-2 pi i beta)
    FiniteMeasure quarter = make_measure(c, Space::Torus, {{Real("0.25"), 0, 0}}, {Real(1)});
    Cx z = fourier_coeff(c, quarter, {1, 0, 0});
    CHECK(abs(z.re) <= tol(0.75));
    CHECK(near(z.im, Real(-1), tol(0.75)));
}

TEST_CASE("pushforward identity on random measures")
{
    ConjugacyData c = cubic_group();
    SplitMix64 rng(7);
    for (int trial = 0; trial < 20; trial++) {
        FiniteMeasure mu = make_measure(c, Space::Torus, random_points(12, 3, 100 + trial),
                                        random_weights(12, 200 + trial));
        for (int k = 0; k < 10; k++) {
            Freq q(3);
            do {
                for (auto &v : q)
                    v = rng.range(-10, 10);
            } while (qnorm(q) > 10 || qnorm(q) == 0);
            CHECK(pushforward_gap(c, mu, q) <= tol(0.8));
        }
    }
}

TEST_CASE("geometric sum bound")
{
    SplitMix64 rng(11);
    for (int trial = 0; trial < 400; trial++) {
        Real beta = Real(rng.uniform() * 0.5 - 0.25);
        if (beta == 0)
            continue;
        long s = rng.range(1, 300);
        Real lhs = geometric_sum(beta, s).abs();
        CHECK(lhs <= 1 / (2 * abs(beta)));
        // closed form |sin(pi s beta) / sin(pi beta)|
        Real closed = abs(sin(pi() * Real(s) * beta) / sin(pi() * beta));
        CHECK(near(lhs, closed, tol(0.6)));
    }
}

TEST_CASE("exact torus action")
{
    ConjugacyData c = cubic_group();
    IMat g = group_element(c.group, {5, -3});
    auto pts = random_points(10, 3, 3);
    for (auto &p : pts) {
        Vec y = torus_action(g, p);
        // oracle: the same product at a much higher precision
        Vec z;
        {
            PrecisionGuard pg(precision() + 512);
            for (int r = 0; r < 3; r++) {
                Real s = 0;
                for (int j = 0; j < 3; j++)
                    s += to_real(g(r, j)) * p[j];
                z.push_back(s - floor(s));
            }
        }
        for (int r = 0; r < 3; r++) {
            CHECK(y[r] >= 0);
            CHECK(y[r] < 1);
            CHECK(near(y[r], fresh(z[r]), tol(0.9)));
        }
    }
    // dyadic rationals stay exact
    Vec h = torus_action(cubic_A(), {Real("0.125"), Real("0.5"), Real("0.75")});
    CHECK(h[0] == Real("0.75"));
    CHECK(h[1] == Real("0.625"));
    CHECK(h[2] == Real("0.75"));
}

TEST_CASE("average measure")
{
    ConjugacyData c = cubic_group();
    Gadgets g;
    g.pair.u = {1, 0};
    g.prog.s = 1;
    g.prog.step = {0, 1};
    g.esc.b = {{0, 0}};
    FiniteMeasure nu = make_measure(c, Space::Torus, random_points(6, 3, 5), random_weights(6, 6));
    FiniteMeasure same = average_measure(c, nu, g, 0, 1, 1);
    REQUIRE(same.size() == nu.size());
    Real tot = 0;
    for (size_t a = 0; a < nu.size(); a++)
        tot += same.weights[a];
    CHECK(near(tot, Real(1), tol(0.75)));

    FiniteMeasure dirac = make_measure(c, Space::Torus, {Vec(3, Real(0))}, {Real("0.7")});
    PlanOptions po;
    ParameterPlan p = plan_parameters(exp2r(Real(-64)), Real("0.5"), Real("0.25"), c, po);
    FiniteMeasure avg0 = average_measure(c, dirac, p.gadgets, 1, p.s, static_cast<int>(p.l));
    REQUIRE(avg0.size() == 1);
    CHECK(avg0.points[0] == Vec(3, Real(0)));
    CHECK(near(avg0.weights[0], Real("0.7"), tol(0.75)));

    FiniteMeasure avg = average_measure(c, nu, p.gadgets, p.n, p.s, static_cast<int>(p.l));
    CHECK(avg.size() <= static_cast<size_t>(p.s * p.l) * nu.size());
    CHECK(near(avg.total_mass(), nu.total_mass(), tol(0.75)));

    // triangle inequality through the transposed action
    std::vector<IMat> mats;
    for (int t = 0; t < p.s; t++)
        for (int k = 1; k <= p.l; k++)
            mats.push_back(group_element(c.group, gadget_element(p.gadgets, p.n, t, k)));
    for (auto &q : frequency_ball(3, Real(2))) {
        Real bound = 0;
        for (auto &m : mats)
            bound += coeff_transposed_abs(nu, m, q);
        bound /= Real(p.s * p.l);
        CHECK(fourier_coeff(c, avg, q).abs() <= bound + tol(0.5));
    }

    // the X-space version acts on the pulled-back atoms
    FiniteMeasure nu_x = push_to_X(c, nu);
    FiniteMeasure avg_x = average_measure(c, nu_x, p.gadgets, p.n, p.s, static_cast<int>(p.l));
    CHECK(avg_x.space == Space::X);
    FiniteMeasure via = average_measure(c, pull_to_torus(c, nu_x), p.gadgets, p.n, p.s,
                                        static_cast<int>(p.l));
    Freq q{1, -2, 0};
    CHECK((fourier_coeff(c, avg_x, q) - fourier_coeff(c, via, q)).abs() <= tol(0.25));
}

TEST_CASE("parameter planner")
{
    ConjugacyData c = cubic_group();
    Real eps = exp2r(Real(-64)), alpha("0.5"), delta("0.25");
    ParameterPlan p = plan_parameters(eps, alpha, delta, c);
    CHECK(p.A == ceil(exp2r(Real(p.di) * delta * Real(p.T))));
    CHECK(Real(p.l) == p.A);
    CHECK(p.s_setting >= p.A);
    CHECK(delta * Real(p.T) >= 1);

    // independent double-precision evaluation of the settings
    double M = c.uniformity.convert_to<double>(), F = p.F.convert_to<double>();
    double arg = std::pow(M, -30) * 0.25 * 64;
    double Tset = std::ceil(std::log2(arg) / (F * F));
    CHECK(p.T_setting == static_cast<long>(Tset));
    CHECK(p.T == std::max<long>(static_cast<long>(Tset), 4));
    CHECK(p.T_raised == (Tset < 4));
    double ls = 3 * F + 3 * std::log2(M) + (1 + (4 + F * F) * p.di * 0.25) * p.T;
    CHECK(std::abs(std::log2(p.s_setting.convert_to<double>()) - ls) < 1e-3);
    CHECK(p.s == 8);
    CHECK(p.s_clamped);

    // n brackets the left side into (1/(4|zeta|), 1/4]
    CHECK(p.n >= 0);
    CHECK(p.n_bracket);
    CHECK(p.xi_lhs <= Real(1) / 4);
    CHECK(p.xi_lhs * p.zeta_u > Real(1) / 4);

    // strict mode refuses tiny instances
    PlanOptions strict;
    strict.strict = true;
    CHECK_THROWS_WITH_AS(plan_parameters(Real("0.5"), alpha, delta, c, strict),
                         doctest::Contains("InfeasiblePlan"), Error);
    CHECK_THROWS_AS(plan_parameters(Real(2), alpha, delta, c), Error);

    // budget overflow is infeasible in either mode
    PlanOptions tight;
    tight.s_cap = 100;
    CHECK_THROWS_WITH_AS(plan_parameters(eps, alpha, delta, c, tight),
                         doctest::Contains("InfeasiblePlan"), Error);

    // a huge R leaves n negative: flagged with n = 0
    PlanOptions lowR;
    lowR.R = Real(-40);
    ParameterPlan q = plan_parameters(eps, alpha, delta, c, lowR);
    CHECK(q.n == 0);
    CHECK_FALSE(q.n_bracket);
    lowR.strict = true;
    CHECK_THROWS_AS(plan_parameters(eps, alpha, delta, c, lowR), Error);
}

TEST_CASE("bound terms")
{
    ConjugacyData c = cubic_group();
    ParameterPlan p = plan_parameters(exp2r(Real(-64)), Real("0.5"), Real("0.25"), c);
    p.l = 100;
    p.A = 100;
    BoundCertificate b = bound_terms(p, c);
    CHECK(near(b.L[4], Real(1), tol(0.75)));
    p.delta = Real("2.5");
    p.T = 4;
    p.di = 1;
    b = bound_terms(p, c);
    CHECK(near(b.L[0], Real(9) / 1024, tol(0.75)));

    // L3 against a direct product
    Real l3 = 2 * pi() * sqrt(Real(3)) * p.M * p.A * pow(p.zeta_u, Real(p.n)) / Real(p.s) *
              p.Delta * pow(Real(p.l), Real(p.k.c9) * p.F * p.F) * exp2r(-p.R);
    CHECK(near(b.L[2] / l3, Real(1), tol(0.5)));
    Real sum = 0;
    for (auto &x : b.L)
        sum += x;
    CHECK(b.sum == sum);
}

TEST_CASE("Sobolev constant")
{
    // d = 1: sum_{q != 0} q^-2 = pi^2 / 3
    const SobolevConstant &k1 = sobolev_constant(1);
    Real exact1 = sqrt(pi() * pi() / 3);
    CHECK(k1.K >= exact1);
    CHECK(k1.K <= exact1 * Real(1.001));
    // d = 2: sum |q|^-3 = 4 zeta(3/2) beta(3/2)
    const SobolevConstant &k2 = sobolev_constant(2);
    double exact2 = std::sqrt(4 * 2.6123753486854883 * 0.8645026534612020);
    CHECK(k2.K.convert_to<double>() >= exact2);
    CHECK(k2.K.convert_to<double>() <= exact2 * 1.01);
    // the tail constant dominates A^(1/2) tail(A) at sample radii (d = 1 closed form ~ 2/A)
    for (double A : {1.0, 2.5, 10.0, 1000.0}) {
        double tail = 0;
        for (long q = static_cast<long>(std::floor(A)) + 1; q < 2000000; q++)
            tail += 2.0 / (static_cast<double>(q) * q);
        CHECK(std::sqrt(A * tail) <= k1.tail.convert_to<double>());
    }
    const SobolevConstant &k3 = sobolev_constant(3);
    CHECK(k3.c14 >= k3.K);
    CHECK(k3.c14 >= k3.tail);
}

TEST_CASE("Sobolev gap")
{
    ConjugacyData c = cubic_group();
    SplitMix64 rng(19);
    auto random_poly = [&](int band) {
        TrigPoly f;
        f.d = 3;
        for (auto &q : frequency_ball(3, Real(band)))
            f.coef[q] = Cx(Real(rng.uniform() - 0.5), Real(rng.uniform() - 0.5));
        f.coef[Freq(3, 0)] = Cx(Real(rng.uniform()));
        return f;
    };

    // constant function: both sides vanish on the left
    TrigPoly one;
    one.d = 3;
    one.coef[Freq(3, 0)] = Cx(Real(2));
    FiniteMeasure mu = make_measure(c, Space::Torus, random_points(9, 3, 2), random_weights(9, 3));
    SobolevGap g0 = sobolev_gap(c, mu, one, Real(3), Real(1));
    CHECK(g0.lhs <= tol(0.75));
    CHECK(g0.rhs == 0);

    // uniform grid finer than the band: nontrivial coefficients vanish
    const int N = 6;
    std::vector<Vec> grid;
    for (int i = 0; i < N; i++)
        for (int j = 0; j < N; j++)
            for (int k = 0; k < N; k++)
                grid.push_back({Real(i) / N, Real(j) / N, Real(k) / N});
    FiniteMeasure u = uniform_measure(c, Space::Torus, grid);
    SobolevGap gu = sobolev_gap(c, u, random_poly(2), Real(3), Real("0.01"));
    CHECK(gu.lhs <= tol(0.7));
    CHECK(gu.hypothesis);

    // Dirac and a single mode: lhs = 1 exactly
    FiniteMeasure dirac = make_measure(c, Space::Torus, {{Real("0.2"), Real("0.3"), 0}},
                                       {Real(1)});
    TrigPoly mode;
    mode.d = 3;
    mode.coef[{1, 0, 0}] = Cx(Real(1));
    Real A(4);
    SobolevGap gd = sobolev_gap(c, dirac, mode, A, sqrt(A));
    CHECK(near(gd.lhs, Real(1), tol(0.75)));
    CHECK(gd.hypothesis);
    Real expect = sobolev_constant(3).c14 * (sqrt(A) + 1) / sqrt(A);
    CHECK(near(gd.rhs, expect, tol(0.75)));
    CHECK(gd.holds);

    // random pairs: whenever the coefficient hypothesis holds so does the bound
    int with_hyp = 0;
    for (int trial = 0; trial < 30; trial++) {
        int n = 3 + trial % 20;
        FiniteMeasure g = make_measure(c, Space::Torus, random_points(n, 3, 300 + trial),
                                       random_weights(n, 400 + trial, Real("0.9")));
        Real At(1 + trial % 4);
        Real C = Real(0.5 + rng.uniform()) * sqrt(At);
        SobolevGap r = sobolev_gap(c, g, random_poly(1 + trial % 3), At, C);
        if (r.hypothesis) {
            with_hyp++;
            CHECK(r.lhs <= r.rhs);
        }
    }
    CHECK(with_hyp > 10);
}

TEST_CASE("bump function")
{
    Vec center{Real("0.3")};
    Bump b = bump_function(center, Real("0.1"), 400);
    CHECK(near(b.mass, Real(1), Real(1e-12)));
    CHECK(b.truncation < Real(1e-4));
    // positive inside, below the truncation bound outside
    CHECK(evaluate(b.f, {Real("0.3")}) > 0);
    for (double x : {0.05, 0.15, 0.41, 0.6, 0.9}) {
        if (std::abs(x - 0.3) < 0.1)
            continue;
        CHECK(abs(evaluate(b.f, {Real(x)})) <= b.truncation);
    }
    // equispaced mean, exact for K above the band
    Real s = 0;
    const int K = 450;
    for (int j = 0; j < K; j++)
        s += evaluate(b.f, {Real(j) / K});
    CHECK(near(s / K, Real(1), Real(1e-9)));

    CHECK_THROWS_WITH_AS(bump_function(center, Real("0.6"), 10), doctest::Contains("BadRadius"),
                         Error);

    // halving rho scales the norm by 2^(d/2 + (d+1)/2)
    for (int d : {1, 2}) {
        Vec ctr(d, Real("0.5"));
        Real prev = 0;
        for (const char *rho : {"0.4", "0.2", "0.1"}) {
            int band = d == 1 ? 400 : 80;
            Bump bb = bump_function(ctr, Real(rho), band);
            if (prev > 0) {
                double ratio = (bb.norm / prev).convert_to<double>();
                double expect = std::pow(2.0, d / 2.0 + (d + 1) / 2.0);
                CHECK(std::abs(ratio / expect - 1) < 0.02);
                CHECK(ratio <= std::pow(2.0, d / 2.0 + std::ceil((d + 1) / 2.0)) * 1.02);
            }
            prev = bb.norm;
        }
    }
}

TEST_CASE("mu prime pipeline")
{
    ConjugacyData c = cubic_group();
    FiniteMeasure mu = uniform_measure(c, Space::Torus, torus_cluster(4, exp2r(Real(-14))));
    Real eps = exp2r(Real(-16)), alpha("0.5"), delta("0.125");
    MuPrimeReport r = build_mu_prime(mu, eps, alpha, delta, c);
    CHECK(r.plan.T == 8);
    CHECK(r.plan.T_raised);
    CHECK(r.dominated);
    CHECK(near(r.mass, r.nu.mass, tol(0.5)));
    CHECK(r.mass_ok);
    CHECK(r.certificate.holds);
    CHECK(r.decay);
    CHECK(r.elements == static_cast<size_t>(r.plan.s * r.plan.l));
    CHECK(r.mahler_radius > 0);

    // domination against an explicitly formed mu'': weights of mu'' add up to 1
    CHECK(near(r.mu_second.total_mass(), Real(1), tol(0.5)));
    for (size_t a = 0; a < r.mu_prime.size(); a++)
        CHECK(r.mu_prime.weights[a] <= r.mu_second.weights[a] + tol(0.75));

    // exhaustive certificate on a 20-atom instance
    std::vector<Vec> pts = torus_cluster(3, exp2r(Real(-14)));
    pts.resize(20);
    FiniteMeasure small = uniform_measure(c, Space::Torus, pts);
    MuPrimeReport r2 = build_mu_prime(small, eps, Real("0.4"), Real("0.125"), c);
    CHECK_FALSE(r2.sweep_avg.sampled);
    CHECK(r2.certificate.measured <= r2.certificate.sum);
    CHECK(r2.dominated);
}
