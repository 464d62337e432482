#pragma once

#include "tor/numfield.hpp"

namespace tor {

struct ToralGroup {
    int d = 0;
    std::vector<IMat> generators;
};

ToralGroup validate_group(const std::vector<IMat> &gens);

/* Product of gens[j]^e[j]. */
IMat group_element(const ToralGroup &g, const std::vector<long> &e);

/* Sum of log2+ |eigenvalue|, double precision. */
double matrix_mahler(const IMat &g);

struct ConjugacyData {
    ToralGroup group;
    Field field;
    std::vector<AlgebraicNumber> phi; /* one per generator */
    std::vector<AlgebraicNumber> v1;  /* eigenvector of the witness, first nonzero entry 1 */
    std::vector<long> witness;        /* exponent vector of the irreducible element */
    RMat psi, psi_inverse;
    Real scale;      /* S = |det psi|^(1/d) */
    Real uniformity; /* M */
    std::vector<bool> torsion; /* per generator */

    int d() const { return group.d; }
    int r1() const { return field->r1; }
    int r2() const { return field->r2; }

    /* Coordinates (sigma_real..., Re sigma_c..., Im sigma_c...). */
    std::vector<Real> embed(const AlgebraicNumber &t) const;
    /* Block multiplication matrix of t acting on embedded coordinates. */
    RMat mult(const AlgebraicNumber &t) const;
    /* psi^{-1}(embed(t)) = (Tr(t v1_k))_k, exact. */
    std::vector<Rat> to_torus(const AlgebraicNumber &t) const;
    /* eigenvalue of an integer matrix commuting with the witness */
    AlgebraicNumber eigenvalue(const IMat &h) const;
};

struct ConjugacyOptions {
    int search_bound = 2;
};

ConjugacyData build_conjugacy(const ToralGroup &g, const ConjugacyOptions &opt = {});

struct Uniformity {
    Real M, S;
};
Uniformity uniformity(const RMat &psi);

struct RankReport {
    int rank = 0;
    int unit_rank = 0; /* r1 + r2 - 1 */
    bool maximal = false;
    bool rank_at_least_two = false;
};
RankReport rank_and_maximality(const ConjugacyData &c);

/* max over generators of max-entry |psi g - mult(phi(g)) psi| / ||psi|| */
Real conjugation_residual(const ConjugacyData &c);

/* Largest m with Euler phi(m) <= n. */
int max_root_of_unity_order(int n);

} // namespace tor
