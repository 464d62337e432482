#pragma once

#include "tor/eigenact.hpp"

namespace tor {

struct DensityOptions {
    int grid_n = 32;                  /* covering-radius grid cells per axis */
    size_t max_elements = 100000;     /* Mahler ball size cap */
    size_t max_box = 100000000;       /* enumeration box size cap */
    size_t max_points = 2000000;      /* orbit size cap */
    double c_density = 1;             /* exponent constant of the reported density target */
};

struct BallElement {
    Exps exps;       /* generator exponents of the non-torsion part */
    int torsion = 0; /* index into MahlerBall::torsion */
    Real h;          /* h0 of the log vector, equal to h^Mah */
    IMat g;
};

struct MahlerBall {
    Real L;
    std::vector<IMat> torsion; /* identity first */
    std::vector<long> box;     /* enumeration half-widths in lattice coordinates */
    std::vector<BallElement> elements; /* sorted by h, then exponents, then torsion index */
};

/* All elements with h^Mah <= L. Throws BudgetExceeded past the caps. */
MahlerBall mahler_ball(const ConjugacyData &c, const Real &L, const DensityOptions &o = {});

/* Point v / Q on the torus, entries reduced to [0, Q). */
struct RationalPoint {
    std::vector<Int> v;
    Int Q;

    bool operator<(const RationalPoint &o) const { return v < o.v; }
    bool operator==(const RationalPoint &o) const { return v == o.v && Q == o.Q; }
};

RationalPoint rational_point(const std::vector<long> &v, long Q);
RationalPoint act(const IMat &g, const RationalPoint &x);
Vec to_vec(const RationalPoint &x);

/* {g x mod 1}, lexicographic, merged at resolution 2^(-p/2). */
std::vector<Vec> orbit_points(const MahlerBall &ball, const std::vector<Vec> &E,
                              size_t max_points = 2000000);
std::vector<Vec> orbit_set(const ConjugacyData &c, const std::vector<Vec> &E, const Real &L,
                           const DensityOptions &o = {});
/* Exact version for rational points; sorted and deduplicated exactly. */
std::vector<RationalPoint> orbit_points(const MahlerBall &ball, const std::vector<RationalPoint> &E,
                                        size_t max_points = 2000000);

/* Euclidean distance on R^d / Z^d. */
Real toral_distance(const Vec &a, const Vec &b);
/* min over lattice vectors k of |psi(y - k)|: the distance of psi(y) to 0 in X. */
Real x_norm(const ConjugacyData &c, const Vec &y);

struct Covering {
    int grid_n = 0;
    Real upper, lower;
    Real cell_diagonal; /* upper - lower */
    Vec witness;        /* cell center farthest from the set */
};

/* Throws EmptySet. */
Covering covering_radius(const std::vector<Vec> &points, int grid_n);

struct Separation {
    bool defined = false; /* at least two points */
    Real min;
    size_t i = 0, j = 0;  /* closest pair */
};

Separation min_separation(const std::vector<Vec> &points);

struct DensityReport {
    Real L;
    size_t elements = 0;
    size_t count = 0;
    Covering cover;
    Separation separation;
    Real target; /* density scale the proof predicts, up to constants; reported only */
};

DensityReport density_of(const std::vector<Vec> &points, const Real &L, size_t elements,
                         int grid_n);

/* Orbit of an eps-separated set with |E| >= eps^(-alpha d) under the ball of radius
   L_mult log2(1/eps). Throws PreconditionsViolated. */
DensityReport harness_efftopo(const ConjugacyData &c, const std::vector<Vec> &E, const Real &eps,
                              const Real &alpha, double L_mult, const DensityOptions &o = {});

struct DioqReport {
    Exps g;          /* element of least positive height */
    Real g_height;
    Real F;
    long m_count = 0;
    std::vector<RationalPoint> start; /* g^m x, 0 <= m < m_count */
    Real bound;                       /* M^-1 Q^-k S */
    Real min_distance;                /* min pairwise X-distance of psi(start) */
    bool separated = true;
    DensityReport density; /* ball of radius (k+2) log2 Q applied to x */
};

/* Throws NotCoprime, and InvariantViolation if the separation bound fails. */
DioqReport harness_dioq(const ConjugacyData &c, const std::vector<long> &v, long Q, int k = 1,
                        const DensityOptions &o = {});

struct LargeTrace {
    size_t a = 0, b = 0;     /* closest pair */
    Real distance;           /* toral distance of the pair */
    Vec lift;                /* z_a - z_b lifted to the shortest representative */
    Vec y;                   /* psi(lift) */
    Vec components;          /* |y_j| per place */
    int place = 0;           /* 1-based place of the largest component */
    /* progression stage, filled when s > 0 */
    int s = 0;
    long n = 0;
    Real Delta, zeta_u;
    Real e1_separation;      /* min distance in {u^n a_t (z_a - z_b)} */
    bool e1_separated = false; /* >= 2 s^-2 */
    size_t e3_size = 0;      /* greedy maximal s^-2 separated subset of E2 */
    bool e3_large = false;   /* >= sqrt(s) */
};

struct LargeReport {
    Real separation_x; /* min pairwise X-distance of psi(E) */
    bool has_trace = false;
    LargeTrace trace;
    DensityReport density;
};

/* Ball radius log2(1/eps0) + L_mult log2 |E|. Throws PreconditionsViolated. */
LargeReport harness_large(const ConjugacyData &c, const std::vector<Vec> &E, const Real &eps0,
                          double L_mult = 1, int trace_s = 0, const DensityOptions &o = {});

} // namespace tor
