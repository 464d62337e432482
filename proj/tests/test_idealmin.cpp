#include "fixtures.hpp"
#include "util.hpp"

#include "tor/idealmin.hpp"

#include <map>
#include <set>

using namespace tor;

namespace {

ConjugacyData cubic_group() { return build_conjugacy(validate_group({cubic_A(), cubic_B()})); }
ConjugacyData quartic_group()
{
    return build_conjugacy(validate_group({quartic_A(), quartic_B()}));
}

Coords col(const IdealLattice &I, int j)
{
    Coords y(I.basis.rows);
    for (int i = 0; i < I.basis.rows; i++)
        y[i] = I.basis(i, j).convert_to<long>();
    return y;
}

Coords coords_of(const AlgebraicNumber &a)
{
    Coords y;
    for (auto &q : a.coords())
        y.push_back(numerator(q).convert_to<long>());
    return y;
}

AlgebraicNumber number(const Field &k, const Coords &y)
{
    return AlgebraicNumber(k, std::vector<Rat>(y.begin(), y.end()));
}

Real sup_embed(const AlgebraicNumber &x)
{
    Real s = 0;
    for (int i = 0; i < x.field()->d; i++)
        if (x.embed(i).abs() > s)
            s = x.embed(i).abs();
    return s;
}

/* Minimum |N_K| per residue class over the coefficient box |y_j| <= B, exact norms. */
std::map<Coords, Int> naive_class_minima(const Field &k, const IdealLattice &I, long B)
{
    std::map<Coords, Int> best;
    int d = k->d;
    Coords y(d, -B);
    for (;;) {
        Int n = abs(field_norm(k, y));
        if (n != 0) {
            Coords r = reduce(I, y);
            auto it = best.find(r);
            if (it == best.end() || n < it->second)
                best[r] = n;
        }
        int i = 0;
        while (i < d && y[i] == B)
            y[i] = -B, i++;
        if (i == d)
            break;
        y[i]++;
    }
    return best;
}

} // namespace

TEST_CASE("maximality and prime ideals over split, inert and ramified primes")
{
    auto c = cubic_group();
    CHECK(power_basis_is_maximal(*c.field));
    /* Z[2 theta] has index 8 in O_K */
    IntPoly scaled_poly = {Int(-8), Int(-8), Int(2), Int(1)}; /* minimal polynomial of 2 theta */
    CHECK_FALSE(power_basis_is_maximal(*make_field(scaled_poly)));

    for (long p : {2L, 3L, 7L, 13L, 29L, 101L, 1009L}) {
        auto P = prime_ideals_over(c.field, p);
        /* product of the prime powers recovers (p): here every e_i f_i sum is 3 */
        Int prod = 1;
        for (auto &Q : P) {
            CHECK(theta_closed(Q));
            prod *= Q.norm;
            Coords pc(3, 0);
            pc[0] = p;
            CHECK(contains(Q, pc));
        }
        if (p == 7) {
            REQUIRE(P.size() == 1);
            auto cube = ideal_product(ideal_product(P[0], P[0]), P[0]);
            CHECK(cube.basis == principal_ideal(c.field, 7).basis);
        } else if (p == 2 || p == 3 || p == 101) {
            CHECK(P.size() == 1);
            CHECK(P[0].norm == Int(p) * p * p);
        } else {
            CHECK(P.size() == 3);
            CHECK(prod == Int(p) * p * p);
            auto all = ideal_product(ideal_product(P[0], P[1]), P[2]);
            CHECK(all.basis == principal_ideal(c.field, p).basis);
        }
    }
}

TEST_CASE("ideal lattices are theta-closed and norms divide element norms")
{
    auto c = cubic_group();
    auto ideals = ideals_up_to(c.field, 60);
    CHECK(ideals.front().norm == 1);
    std::set<std::vector<Int>> seen;
    for (auto &I : ideals) {
        CHECK(theta_closed(I));
        CHECK(I.norm <= 60);
        CHECK(seen.insert(I.basis.a).second);
        /* every small combination of basis vectors has norm divisible by N(I) */
        for (long a = -2; a <= 2; a++)
            for (long b = -2; b <= 2; b++)
                for (long e = -2; e <= 2; e++) {
                    Coords y(3, 0);
                    auto c0 = col(I, 0), c1 = col(I, 1), c2 = col(I, 2);
                    for (int i = 0; i < 3; i++)
                        y[i] = a * c0[i] + b * c1[i] + e * c2[i];
                    CHECK(contains(I, y));
                    CHECK(field_norm(c.field, y) % I.norm == 0);
                }
    }
    /* count of ideals of norm <= 60 from the prime decomposition: 1, 7, 8, 13^3, 27,
       29^3, 41^3, 43^3, 49, 56 */
    CHECK(ideals.size() == 18);

    IMat not_closed = IMat::identity(3);
    not_closed(0, 0) = 2;
    CHECK_THROWS_WITH_AS(ideal_from_matrix(c.field, not_closed), doctest::Contains("NotAnIdeal"),
                         Error);
    auto I7 = principal_ideal(c.field, 7);
    CHECK(ideal_from_matrix(c.field, I7.basis).basis == I7.basis);
}

TEST_CASE("unit multiplication preserves the norm up to sign")
{
    auto c = cubic_group();
    SplitMix64 rng(5);
    for (int t = 0; t < 30; t++) {
        Coords y = {rng.range(-9, 9), rng.range(-9, 9), rng.range(-9, 9)};
        Exps e = {rng.range(-3, 3), rng.range(-3, 3)};
        Coords uy = coords_of(phi_of(c, e) * number(c.field, y));
        CHECK(abs(field_norm(c.field, uy)) == abs(field_norm(c.field, y)));
    }
}

TEST_CASE("reduce gives canonical representatives and invertibility is exact")
{
    auto c = cubic_group();
    auto P = prime_ideals_over(c.field, 13)[0];
    SplitMix64 rng(2);
    for (int t = 0; t < 50; t++) {
        Coords y = {rng.range(-100, 100), rng.range(-100, 100), rng.range(-100, 100)};
        Coords r = reduce(P, y);
        for (int i = 0; i < 3; i++) {
            CHECK(r[i] >= 0);
            CHECK(Int(r[i]) < P.basis(i, i));
        }
        Coords diff(3);
        for (int i = 0; i < 3; i++)
            diff[i] = y[i] - r[i];
        CHECK(contains(P, diff));
        /* prime ideal: invertible iff not in P */
        CHECK(is_invertible(P, y) == !contains(P, y));
    }
    /* (13) splits: an element of one prime above 13 has norm divisible by 13 yet is a unit
       modulo the other primes */
    auto primes = prime_ideals_over(c.field, 13);
    Coords g = col(primes[0], 1);
    CHECK(field_norm(c.field, g) % 13 == 0);
    CHECK(is_invertible(primes[1], g));
    CHECK_FALSE(is_invertible(principal_ideal(c.field, 13), g));
}

TEST_CASE("reduced basis of the maximal order")
{
    auto c = cubic_group();
    Coords one = {1, 0, 0};
    auto O = ideal_from_generators(c.field, {one});
    CHECK(O.norm == 1);
    auto rb = reduced_basis(O);
    /* shortest nonzero vector of sigma(O_K) in the sup norm: 1 by the norm bound, attained
       by 1 */
    CHECK(near(rb.minima[0], 1.0, 1e-30));
    CHECK(rb.membership);
    CHECK(rb.unimodular);
    for (size_t i = 1; i < rb.minima.size(); i++)
        CHECK(rb.minima[i - 1] <= rb.minima[i]);
    /* enumeration oracle: every element with small coefficients has sup norm >= m1, and
       the v^i attain the minima */
    for (long a = -3; a <= 3; a++)
        for (long b = -3; b <= 3; b++)
            for (long e = -3; e <= 3; e++) {
                if (a == 0 && b == 0 && e == 0)
                    continue;
                CHECK(sup_embed(number(c.field, {a, b, e})) >= rb.minima[0] - tol(0.5));
            }
    for (size_t i = 0; i < 3; i++) {
        CHECK(near(sup_embed(number(c.field, rb.v[i])), rb.minima[i], tol(0.5)));
    }
}

TEST_CASE("doubling an ideal doubles its minima and keeps M")
{
    auto c = cubic_group();
    for (auto &I : ideals_up_to(c.field, 30)) {
        auto J = ideal_product(principal_ideal(c.field, 2), I);
        CHECK(J.norm == 8 * I.norm);
        auto a = reduced_basis(I), b = reduced_basis(J);
        for (int i = 0; i < 3; i++)
            CHECK(near(b.minima[i], 2 * a.minima[i], tol(0.5)));
        auto ua = ideal_uniformity(I, a), ub = ideal_uniformity(J, b);
        CHECK(near(ua.M, ub.M, tol(0.25)));
        CHECK(ua.M >= 1 - tol(0.5));
    }
}

TEST_CASE("uniformity sweep is finite on both fixture fields")
{
    for (auto c : {cubic_group(), quartic_group()}) {
        auto ideals = ideals_up_to(c.field, c.d() == 3 ? 500 : 100);
        Real worst = 0;
        for (auto &I : ideals) {
            auto rb = reduced_basis(I);
            CHECK(rb.membership);
            CHECK(rb.unimodular);
            auto u = ideal_uniformity(I, rb);
            CHECK(u.M >= 1 - tol(0.5));
            if (u.ratio > worst)
                worst = u.ratio;
        }
        CHECK(isfinite(worst.convert_to<double>()));
        CHECK(worst < 100);
    }
}

TEST_CASE("search constant bounds the sampled covering radius")
{
    auto c = cubic_group();
    auto sc = search_constant(c, 500, 3);
    CHECK(sc.kappa_sample <= sc.kappa);
    CHECK(sc.kappa_sample > 0);
    CHECK(near(sc.c_search, exp2r(sc.kappa), tol(0.5)));
    /* each class met by a unit multiple inside the box: a sampled element of norm n has a
       unit multiple of sup norm <= c_search n^(1/3) */
    auto l = log_lattice(c);
    SplitMix64 rng(9);
    for (int t = 0; t < 10; t++) {
        Coords y = {rng.range(-20, 20), rng.range(-20, 20), rng.range(-20, 20)};
        Int n = abs(field_norm(c.field, y));
        if (n == 0)
            continue;
        Real bound = sc.c_search * pow(to_real(n), Real(1) / 3);
        bool found = false;
        for (long a = -12; a <= 12 && !found; a++)
            for (long b = -12; b <= 12 && !found; b++) {
                found = sup_embed(phi_of(c, {a, b}) * number(c.field, y)) <= bound;
            }
        CHECK(found);
    }
}

TEST_CASE("minimal norms of trivial classes")
{
    auto c = cubic_group();
    auto I7 = principal_ideal(c.field, 7);
    auto m = minimal_norm(c, I7, {1, 0, 0});
    CHECK(m.value == 1);
    CHECK_THROWS_WITH_AS(minimal_norm(c, I7, {0, 0, 0}), doctest::Contains("NotInvertible"),
                         Error);
    CHECK_THROWS_WITH_AS(minimal_norm(c, I7, {7, 14, -21}), doctest::Contains("NotInvertible"),
                         Error);
    Coords one = {1, 0, 0};
    auto O = ideal_from_generators(c.field, {one});
    auto L = L_invariant(c, O);
    CHECK(L.L == 1);
    CHECK(L.classes == 1);
    auto s = stabilizer_floor(c, O, one);
    CHECK(s.orbit == 1);
    CHECK(s.floor <= 1);

    IdealOptions tight;
    tight.norm_cap = 100;
    CHECK_THROWS_WITH_AS(L_invariant(c, principal_ideal(c.field, 5), tight),
                         doctest::Contains("BudgetExceeded"), Error);
    IdealOptions small_box;
    small_box.max_box = 10;
    CHECK_THROWS_WITH_AS(L_invariant(c, I7, small_box), doctest::Contains("SearchBudgetExceeded"),
                         Error);
}

TEST_CASE("minimal norms agree with a naive coset enumeration")
{
    auto check_field = [](const ConjugacyData &c, const std::vector<IdealLattice> &ideals, long B) {
        for (auto &I : ideals) {
            auto naive = naive_class_minima(c.field, I, B);
            auto L = L_invariant(c, I, {}, true);
            INFO(I.name);
            CHECK(L.table.size() == L.classes);
            Int worst = 0;
            for (auto &row : L.table) {
                REQUIRE(naive.count(row.rep));
                CHECK(row.value == naive[row.rep]);
                worst = max(worst, row.value);
            }
            CHECK(L.L == worst);
            if (I.norm >= 2)
                CHECK(L.L < L.N);
            /* single-class entry point and its witness */
            auto &row = L.table.back();
            auto m = minimal_norm(c, I, row.rep);
            CHECK(m.value == row.value);
            CHECK(abs(field_norm(c.field, m.witness)) == m.value);
            Coords moved = coords_of(phi_of(c, m.exps) * number(c.field, row.rep));
            CHECK(reduce(I, moved) == reduce(I, m.witness));
        }
    };
    auto c = cubic_group();
    std::vector<IdealLattice> cubic = {principal_ideal(c.field, 2), principal_ideal(c.field, 3),
                                       prime_ideals_over(c.field, 7)[0]};
    for (long p : {13L, 29L})
        for (auto &P : prime_ideals_over(c.field, p))
            cubic.push_back(P);
    check_field(c, cubic, 25);

    auto q = quartic_group();
    std::vector<IdealLattice> quartic;
    for (auto &I : ideals_up_to(q.field, 30))
        if (I.norm >= 2)
            quartic.push_back(I);
    check_field(q, quartic, 8);
}

TEST_CASE("class table for (7) and the value at (2)")
{
    auto c = cubic_group();
    auto L = L_invariant(c, principal_ideal(c.field, 7), {}, true);
    CHECK(L.N == 343);
    CHECK(L.classes == 294); /* (7) is the cube of a prime of norm 7 */
    CHECK(L.L == 1);
    for (auto &row : L.table)
        CHECK(row.value == 1);
    for (size_t i = 1; i < L.table.size(); i++)
        CHECK(L.table[i - 1].rep < L.table[i].rep);
    auto L2 = L_invariant(c, principal_ideal(c.field, 2));
    CHECK(L2.classes == 7);
    CHECK(L2.L <= L2.N);
}

TEST_CASE("stabilizer floor at (7) for the class of theta")
{
    auto c = cubic_group();
    auto I = principal_ideal(c.field, 7);
    Coords theta = {0, 1, 0};
    auto s = stabilizer_floor(c, I, theta);
    /* independent orbit: breadth-first search with field multiplication */
    std::set<Coords> orbit{reduce(I, theta)};
    std::vector<Coords> frontier{reduce(I, theta)};
    while (!frontier.empty()) {
        std::vector<Coords> next;
        for (auto &y : frontier)
            for (auto &u : c.phi) {
                Coords z = reduce(I, coords_of(u * number(c.field, y)));
                if (orbit.insert(z).second)
                    next.push_back(z);
            }
        frontier.swap(next);
    }
    CHECK(s.orbit == orbit.size());
    CHECK(s.holds);
    CHECK(static_cast<long>(s.orbit) >= s.floor);
    CHECK(s.congruent);
    CHECK(s.height_floor);
    /* stabilizers fix theta modulo I */
    for (auto &e : s.stabilizers) {
        Coords z = coords_of(phi_of(c, e) * number(c.field, theta));
        CHECK(reduce(I, z) == reduce(I, theta));
        Coords u = coords_of(phi_of(c, e));
        u[0] -= 1;
        CHECK(contains(I, u));
    }
}
