#include "fixtures.hpp"
#include "util.hpp"

#include "tor/conjugacy.hpp"

using namespace tor;

TEST_CASE("group validation")
{
    CHECK_NOTHROW(validate_group({IMat::identity(3)}));
    CHECK_NOTHROW(validate_group({cubic_A(), cubic_B()}));
    CHECK(det(cubic_B()) == 1);
    IMat e = imat(3, {1, 1, 0, 0, 1, 0, 0, 0, 1});
    try {
        validate_group({cubic_A(), e});
        FAIL("expected NotCommuting");
    } catch (const Error &err) {
        CHECK(err.kind() == "NotCommuting");
    }
    try {
        validate_group({imat(3, {2, 0, 0, 0, 1, 0, 0, 0, 1})});
        FAIL("expected NotUnimodular");
    } catch (const Error &err) {
        CHECK(err.kind() == "NotUnimodular");
    }
    CHECK_THROWS_AS(validate_group({IMat::identity(2)}), Error);
}

TEST_CASE("conjugacy of the single companion matrix")
{
    auto c = build_conjugacy(validate_group({cubic_A()}));
    CHECK(c.field->min_poly == IntPoly{-1, -2, 1, 1});
    CHECK(c.r1() == 3);
    CHECK(c.phi[0] == AlgebraicNumber::gen(c.field));
    CHECK(conjugation_residual(c) <= tol(0.25));
}

TEST_CASE("second generator maps to theta^2 - 2")
{
    auto c = build_conjugacy(validate_group({cubic_A(), cubic_B()}));
    auto th = AlgebraicNumber::gen(c.field);
    CHECK(c.phi[1] == th * th - AlgebraicNumber::from_int(c.field, 2));
    CHECK(conjugation_residual(c) <= tol(0.25));
    CHECK(c.uniformity >= 1);
    // matrix Mahler measure equals the height of the eigenvalue
    for (size_t i = 0; i < 2; i++)
        CHECK(std::abs(matrix_mahler(c.group.generators[i]) -
                       static_cast<double>(mahler_height(c.phi[i]))) < 1e-9);
    auto rep = rank_and_maximality(c);
    CHECK(rep.rank == 2);
    CHECK(rep.maximal);
}

TEST_CASE("lattice is preserved by the multiplication action")
{
    auto c = build_conjugacy(validate_group({cubic_A(), cubic_B()}));
    for (size_t i = 0; i < 2; i++) {
        RMat img = c.psi_inverse * c.mult(c.phi[i]) * c.psi;
        for (auto &x : img.a)
            CHECK(abs(x - round(x)) <= tol(0.25));
    }
}

TEST_CASE("exact torus coordinates agree with psi inverse")
{
    auto c = build_conjugacy(validate_group({cubic_A(), cubic_B()}));
    auto th = AlgebraicNumber::gen(c.field);
    auto t = th * th * Rat(3, 7) - th + AlgebraicNumber::from_int(c.field, 5);
    auto x = c.to_torus(t);
    auto y = c.psi_inverse * c.embed(t);
    for (int k = 0; k < 3; k++)
        CHECK(abs(to_real(x[k]) - y[k]) <= tol(0.25));
}

TEST_CASE("reducible block matrix has no irreducible element")
{
    IMat m = imat(3, {2, 1, 0, 1, 1, 0, 0, 0, 1});
    try {
        build_conjugacy(validate_group({m}));
        FAIL("expected NoIrreducibleElement");
    } catch (const Error &err) {
        CHECK(err.kind() == "NoIrreducibleElement");
    }
}

TEST_CASE("uniformity closed forms")
{
    auto u = uniformity(RMat::identity(3));
    CHECK(near(u.M, 1, 1e-30));
    CHECK(near(u.S, 1, 1e-30));
    u = uniformity(RMat::identity(3).scaled(Real(2)));
    CHECK(near(u.M, 1, 1e-30));
    CHECK(near(u.S, 2, 1e-30));
    RMat m = RMat::identity(3);
    m(0, 0) = 4;
    u = uniformity(m);
    CHECK(near(u.S, R("1.587401051968199474751705639272308260391"), tol(0.5)));
    CHECK(near(u.M, R("2.519842099789746329534421214556456701140"), tol(0.5)));
}

TEST_CASE("uniformity is scale invariant")
{
    auto c = build_conjugacy(validate_group({cubic_A(), cubic_B()}));
    for (double s : {0.01, 3.0, 1000.0}) {
        auto u = uniformity(c.psi.scaled(Real(s)));
        CHECK(abs(u.M - c.uniformity) <= tol(0.25));
    }
}

TEST_CASE("root of unity orders")
{
    CHECK(max_root_of_unity_order(1) == 2);
    CHECK(max_root_of_unity_order(2) == 6);
    CHECK(max_root_of_unity_order(4) == 12);
    CHECK(max_root_of_unity_order(8) == 30);
}
