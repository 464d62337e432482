#include "fixtures.hpp"
#include "util.hpp"

#include "tor/eigenact.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <set>

using namespace tor;

namespace {

ConjugacyData cubic_group() { return build_conjugacy(validate_group({cubic_A(), cubic_B()})); }
ConjugacyData quartic_group()
{
    return build_conjugacy(validate_group({quartic_A(), quartic_B()}));
}

/* zeta_u^e1 zeta_ut^e2 through polar form, independent of repeated squaring */
Cx polar_power(const Cx &zu, long double e1, const Cx &zt, long double e2)
{
    Real lr = Real(e1) * log(zu.abs()) + Real(e2) * log(zt.abs());
    Real ar = Real(e1) * atan2(zu.im, zu.re) + Real(e2) * atan2(zt.im, zt.re);
    Real m = exp(lr);
    return {m * cos(ar), m * sin(ar)};
}

/* eigenvalue moduli of an integer matrix in double precision */
std::vector<double> moduli(const IMat &g)
{
    Eigen::MatrixXd m(g.rows, g.cols);
    for (int i = 0; i < g.rows; i++)
        for (int j = 0; j < g.cols; j++)
            m(i, j) = static_cast<double>(g(i, j));
    std::vector<double> out;
    Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
    for (auto &e : es.eigenvalues())
        out.push_back(std::abs(e));
    return out;
}

} // namespace

TEST_CASE("expander on the totally real cubic")
{
    ConjugacyData c = cubic_group();
    for (int i = 1; i <= 3; i++) {
        ExpandingPair ep = expander(c, i);
        CHECK(ep.sign_pattern);
        CHECK(ep.independent);
        CHECK(ep.idx.di == 1);
        CHECK((ep.case_tag == "1" || ep.case_tag == "2.i" || ep.case_tag == "2.ii"));

        // exactly one expanding eigenvalue of the integer matrix of u
        IMat gu = group_element(c.group, ep.u);
        int big = 0;
        for (double x : moduli(gu))
            big += x > 1;
        CHECK(big == 1);

        // and it belongs to place i: g_u w_i = zeta w_i for column i of psi^-1
        for (int row = 0; row < 3; row++) {
            Real lhs = 0;
            for (int j = 0; j < 3; j++)
                lhs += Real(gu(row, j).convert_to<long>()) * c.psi_inverse(j, i - 1);
            Real rhs = ep.zeta_u.re * c.psi_inverse(row, i - 1);
            CHECK(near(lhs, rhs, tol(0.5) * (1 + abs(rhs))));
        }
        CHECK(log2r(ep.zeta_u.abs()) > 0);
    }
}

TEST_CASE("expander on the cubic, i = 3 brute-force comparison")
{
    ConjugacyData c = cubic_group();
    ExpandingPair ep = expander(c, 3);
    // some small exponent vector already has the pattern; u must share it
    bool found = false;
    for (long x = -3; x <= 3 && !found; x++)
        for (long y = -3; y <= 3 && !found; y++) {
            if (x == 0 && y == 0)
                continue;
            Vec w = log_embed(phi_of(c, {x, y}));
            found = w[2] > 0 && w[0] < 0 && w[1] < 0;
        }
    CHECK(found);
    CHECK(ep.u_log[2] > 0);
    CHECK(ep.u_log[0] < 0);
    CHECK(ep.u_log[1] < 0);
    // reported bounds are evaluated, not enforced
    CHECK(near(ep.Z, 4 * 3 * 2 * ep.F, tol(0.75)));
}

TEST_CASE("expander errors")
{
    ConjugacyData c = cubic_group();
    CHECK_THROWS_WITH_AS(expander(c, 0), doctest::Contains("InvalidInput"), Error);
    CHECK_THROWS_WITH_AS(expander(c, 4), doctest::Contains("InvalidInput"), Error);
    ConjugacyData one = build_conjugacy(validate_group({cubic_A()}));
    CHECK_THROWS_WITH_AS(expander(one, 1), doctest::Contains("NotApplicable"), Error);
}

TEST_CASE("expander on the complex place of the quartic")
{
    ConjugacyData c = quartic_group();
    ExpandingPair ep = expander(c, 3);
    CHECK(ep.idx.is_complex());
    CHECK(ep.sign_pattern);
    CHECK(ep.non_real_powers);
    CHECK(ep.k != 2);
    CHECK(ep.l != 2);
    CHECK(abs(ep.zeta_u.im) > 0);
}

TEST_CASE("arithmetic progression on the cubic")
{
    ConjugacyData c = cubic_group();
    ExpandingPair ep = expander(c, 3);
    for (int s : {4, 8}) {
        ProgressionData pd = arith_progression(c, ep, s);
        CHECK(pd.P == Int(1) << (8 * static_cast<int>(std::log2(s))));
        CHECK(pd.zeta.size() == static_cast<size_t>(s));
        CHECK(pd.zeta[0].re == 1);
        CHECK(pd.zeta[0].im == 0);
        CHECK(pd.step_bound);
        CHECK(pd.accuracy);
        CHECK(pd.delta.abs() <= pow(Real(s), -3));
        CHECK(pd.delta.abs() > 0);
        CHECK(pd.n <= pd.P);
        CHECK(pd.first_hit_n <= pd.n);
        CHECK(pd.omega1 <= 2 / sqrt(to_real(pd.P)));
        for (size_t j = 0; j < pd.step.size(); j++)
            CHECK(pd.step[j] == pd.n.convert_to<long>() * ep.u[j] -
                                    pd.m1.convert_to<long>() * ep.ut[j]);

        // polar-form oracle for every term
        Real worst = 0;
        for (int t = 0; t < s; t++) {
            long double e1 = pd.n.convert_to<long double>() * t;
            long double e2 = -pd.m1.convert_to<long double>() * t;
            Cx o = polar_power(ep.zeta_u, e1, ep.zeta_ut, e2);
            CHECK((o - pd.zeta[t]).abs() <= pow(Real(2), -40));
            Cx lin1 = Cx(Real(1)) + pd.delta * Real(t);
            worst = std::max(worst, Real((o - lin1).abs()));
        }
        CHECK(worst <= pd.delta.abs() / s);
    }
}

TEST_CASE("arithmetic progression rejects short lengths")
{
    ConjugacyData c = cubic_group();
    ExpandingPair ep = expander(c, 1);
    CHECK_THROWS_AS(arith_progression(c, ep, 1), Error);
}

TEST_CASE("escape sequence on the complex place")
{
    ConjugacyData c = quartic_group();
    ExpandingPair ep = expander(c, 3);
    EscapeSequence es = escape_sequence(c, ep, 50);
    CHECK(es.b.size() == 50);
    CHECK(es.distinct);
    CHECK(es.band_ok);
    Real lu = log2r(ep.zeta_u.abs()), lt = log2r(ep.zeta_ut.abs());
    std::set<Exps> seen(es.b.begin(), es.b.end());
    CHECK(seen.size() == 50);
    for (int k = 1; k <= 50; k++) {
        long e1 = k + es.J;
        long e2 = static_cast<long>(std::ceil(static_cast<double>(es.gamma) * k));
        // log modulus from the exact log embedding
        Real lg = e1 * ep.u_log[2] - e2 * ep.ut_log[2];
        CHECK(lg >= 0);
        CHECK(near(log2r(es.zeta[k - 1].abs()), lg, tol(0.25) * (1 + abs(lg))));
        Cx o = polar_power(ep.zeta_u, e1, ep.zeta_ut, -e2);
        CHECK((o - es.zeta[k - 1]).abs() <= pow(Real(2), -40) * o.abs());
    }
    (void)lu;
    (void)lt;
}

TEST_CASE("escape sequence on a real place and near-line counts")
{
    ConjugacyData c = cubic_group();
    ExpandingPair ep = expander(c, 2);
    EscapeSequence es = escape_sequence(c, ep, 10);
    CHECK(es.b.size() == 10);
    for (auto &b : es.b)
        CHECK(b == ep.u);
    CHECK(es.band_ok);
    CHECK(near_line_count(es, false, Real(1), Real(0)) == 0);
    CHECK(near_line_count(es, false, Real(-3.5), Real(0)) == 0);
    CHECK_THROWS_WITH_AS(near_line_count(es, false, Real(0), Real(0)),
                         doctest::Contains("ZeroForm"), Error);
    CHECK_THROWS_AS(escape_sequence(c, ep, 1), Error);
}

TEST_CASE("near-line counts on the complex place")
{
    ConjugacyData c = quartic_group();
    ExpandingPair ep = expander(c, 3);
    EscapeSequence es = escape_sequence(c, ep, 50);
    int n = near_line_count(es, true, Real(1), Real(0));
    int brute = 0;
    for (int k = 1; k <= 50; k++) {
        long e1 = k + es.J;
        long e2 = static_cast<long>(std::ceil(static_cast<double>(es.gamma) * k));
        Cx o = polar_power(ep.zeta_u, e1, ep.zeta_ut, -e2);
        brute += abs(o.re) <= 1;
    }
    CHECK(n == brute);
    CHECK(n <= 100);
    CHECK(near_line_count(es, true, Real(10), Real(0)) == n);
    CHECK(near_line_count(es, true, Real("0.3"), Real("-1.7")) ==
          near_line_count(es, true, Real(3), Real(-17)));
    SplitMix64 rng(7);
    int worst = 0;
    for (int j = 0; j < 200; j++) {
        double a = 2 * M_PI * rng.uniform();
        worst = std::max(worst, near_line_count(es, true, Real(std::cos(a)), Real(std::sin(a))));
    }
    CHECK(worst <= 100);
}

TEST_CASE("irrationality floor")
{
    ConjugacyData c = cubic_group();
    TotallyIrreducible ti = find_totally_irreducible(c, 3);
    CHECK_THROWS_WITH_AS(irrationality_floor(c, {0, 0, 0}, 1, ti.height),
                         doctest::Contains("ZeroCharacter"), Error);
    // coordinate character: xi(x) is the m-th coordinate of psi^-1 x
    for (int m = 0; m < 3; m++) {
        std::vector<long> q(3, 0);
        q[m] = 1;
        for (int i = 1; i <= 3; i++) {
            auto r = irrationality_floor(c, q, i, ti.height);
            CHECK(near(r.actual, abs(c.psi_inverse(m, i - 1)), tol(0.75)));
        }
    }
    // oracle: restriction norm from the eigenvector embeddings
    std::vector<long> q{3, -7, 2};
    for (int i = 1; i <= 3; i++) {
        Real s = 0;
        for (int m = 0; m < 3; m++)
            s += q[m] * c.v1[m].embed(i - 1).re;
        CHECK(near(irrationality_floor(c, q, i, ti.height).actual, abs(s), tol(0.5)));
    }
    for (int i = 1; i <= 3; i++) {
        IrrationalitySweep sw = irrationality_sweep(c, i, 20, ti.height);
        CHECK(sw.checked > 30000);
        CHECK(sw.violations == 0);
        CHECK(sw.min_actual > 0);
        CHECK(sw.min_ratio >= 1);
    }
}

TEST_CASE("irrationality floor on a complex place")
{
    ConjugacyData c = quartic_group();
    TotallyIrreducible ti = find_totally_irreducible(c, 3);
    std::vector<long> q{1, -2, 0, 5};
    Cx s;
    for (int m = 0; m < 4; m++)
        s += c.v1[m].embed(2) * Real(q[m]);
    auto r = irrationality_floor(c, q, 3, ti.height);
    CHECK(near(r.actual, 2 * s.abs(), tol(0.5)));
    CHECK(r.actual >= r.floor);
}

TEST_CASE("expander uses the real subfield of a complex place")
{
    ConjugacyData c = build_conjugacy(validate_group({subfield_A(), subfield_B()}));
    REQUIRE(c.r1() == 2);
    REQUIRE(c.r2() == 1);
    ExpandingPair ep = expander(c, 3);
    CHECK(ep.subfield_nontrivial);
    CHECK(ep.k == 0);
    CHECK(ep.l == 1);
    // 1 + sqrt 2 lies in the subfield, so its log vector sits on w_k = w_l
    Vec w = log_embed(c.phi[1]);
    CHECK(near(w[0], w[1], tol(0.5)));
    CHECK(abs(w[0] - w[2]) > 0.1);
    CHECK(ep.non_real_powers);
    CHECK(ep.sign_pattern);
}
