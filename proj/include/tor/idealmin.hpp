#pragma once

#include "tor/unitlog.hpp"

namespace tor {

/* Element of O_K = Z[theta] in power-basis coordinates. */
using Coords = std::vector<long>;

/* Dedekind criterion at every p with p^2 | disc. */
bool power_basis_is_maximal(const NumberField &k);

struct IdealLattice {
    Field field;
    IMat basis; /* columns form a Z-basis in power-basis coordinates; transpose of the row HNF */
    Int norm;   /* N(I) = |det basis| */
    std::string name;
};

/* Ideal generated over O_K by the given elements. */
IdealLattice ideal_from_generators(const Field &k, const std::vector<Coords> &gens,
                                   std::string name = "");
/* Z-lattice spanned by the columns; throws NotAnIdeal unless closed under theta. */
IdealLattice ideal_from_matrix(const Field &k, const IMat &cols, std::string name = "");
IdealLattice principal_ideal(const Field &k, long n);
IdealLattice ideal_product(const IdealLattice &a, const IdealLattice &b);

/* Distinct primes above p as (p, g(theta)) for the irreducible factors g of the minimal
   polynomial mod p. */
std::vector<IdealLattice> prime_ideals_over(const Field &k, long p);
/* Every ideal with N(I) <= cap, ordered by norm then basis. */
std::vector<IdealLattice> ideals_up_to(const Field &k, long cap);

bool theta_closed(const IdealLattice &I);
bool contains(const IdealLattice &I, const Coords &y);
/* canonical representative of y + I: 0 <= coordinate i < i-th diagonal entry */
Coords reduce(const IdealLattice &I, const Coords &y);
/* y O_K + I = O_K */
bool is_invertible(const IdealLattice &I, const Coords &y);
Int field_norm(const Field &k, const Coords &y);

struct ReducedBasis {
    std::vector<Real> minima; /* successive minima of the sup-norm box */
    std::vector<Coords> v;    /* independent vectors attaining them */
    std::vector<Coords> w;    /* basis built from v */
    std::vector<Real> sup;    /* sup norm of sigma(w^i) */
    bool membership = false;  /* sup_i <= (3/2)^(i-1) m_i */
    bool unimodular = false;  /* w spans I */
};

ReducedBasis reduced_basis(const IdealLattice &I);

struct IdealUniformity {
    RMat psi; /* columns sigma(w^i) */
    Real M, S;
    Real ratio; /* M / D^((d-1)/(2d)) */
};

IdealUniformity ideal_uniformity(const IdealLattice &I, const ReducedBasis &rb);
IdealUniformity ideal_uniformity(const IdealLattice &I);

/* Every nonzero y has a unit multiple with all |sigma_i| <= 2^kappa |N(y)|^(1/d). */
struct SearchConstant {
    Real kappa;        /* half the sum of sup norms of a log-lattice basis */
    Real kappa_sample; /* sampled covering radius, a lower estimate */
    Real c_search;     /* 2^kappa */
};

SearchConstant search_constant(const ConjugacyData &c, long samples = 2000, std::uint64_t seed = 1);

struct IdealOptions {
    long norm_cap = 500;
    double max_box = 5e7; /* coset-box points */
    long samples = 2000;
    std::uint64_t seed = 1;
};

struct MinimalNorm {
    Int value;
    Coords witness; /* y with y = u^exps beta mod I and |N_K(y)| = value */
    Exps exps;
    Real rho;       /* box radius that certified the value */
};

/* Throws NotInvertible, SearchBudgetExceeded. */
MinimalNorm minimal_norm(const ConjugacyData &c, const IdealLattice &I, const Coords &beta,
                         const IdealOptions &o = {});

struct ClassRow {
    Coords rep;
    Int value;
};

struct LInvariant {
    Int N;
    Int L;
    Real ratio;          /* L / N */
    size_t classes = 0;  /* invertible classes */
    size_t orbits = 0;   /* unit orbits among them */
    Real rho;
    double box_points = 0;
    std::vector<ClassRow> table; /* every invertible class, by representative */
};

/* Throws BudgetExceeded above the norm cap, SearchBudgetExceeded. */
LInvariant L_invariant(const ConjugacyData &c, const IdealLattice &I, const IdealOptions &o = {},
                       bool keep_table = false);

struct StabilizerReport {
    size_t orbit = 0;
    long floor = 1;       /* prod over the F witnesses of ceil(log2(2^-d N) / (d F)) */
    bool holds = false;
    std::vector<Exps> stabilizers; /* u_j^(k_j) with k_j the orbit period of beta */
    std::vector<Real> heights;     /* their h^Mah */
    bool congruent = false;        /* each is 1 mod I */
    bool height_floor = false;     /* each non-identity one has h >= log2(2^-d N) */
};

/* Throws NotInvertible, and InvariantViolation when the orbit is below the floor. */
StabilizerReport stabilizer_floor(const ConjugacyData &c, const IdealLattice &I, const Coords &beta);

} // namespace tor
