#pragma once

#include "tor/conjugacy.hpp"

namespace tor {

using Vec = std::vector<Real>;
using Exps = std::vector<long>;

/* d_j = 1 for real places, 2 for complex places. */
std::vector<int> place_weights(const NumberField &k);

/* (log2 |sigma_j(t)|)_{j < r1+r2}; throws NotAUnit. */
Vec log_embed(const AlgebraicNumber &t);
Real h0_norm(const Vec &w, const std::vector<int> &dw);
Real q0_form(const Vec &w, const Vec &z, const std::vector<int> &dw);

struct LogLattice {
    std::vector<int> weights;
    int rank = 0;
    std::vector<Vec> basis;        /* log vectors, independent */
    std::vector<Exps> basis_exps;  /* exponent vectors over the generators */
    std::vector<Exps> torsion_exps; /* generators of the kernel of the log map */
    RMat gram;                     /* Q0 Gram matrix of the basis */

    Vec point(const std::vector<long> &x) const; /* sum x_i basis_i */
    Exps exps(const std::vector<long> &x) const; /* matching generator exponents */
};

/* Lattice generated by the log images of the group generators. */
LogLattice log_lattice(const ConjugacyData &c);
/* Lattice spanned by explicit independent vectors (no generator data). */
LogLattice lattice_from_basis(const std::vector<Vec> &basis, const std::vector<int> &weights);
LogLattice scaled(const LogLattice &l, const Real &s);

/* Lattice points with h0 <= radius, as integer coordinate vectors, sorted by h0. */
struct LatticePoint {
    std::vector<long> x;
    Real h0;
};
std::vector<LatticePoint> enumerate_ball(const LogLattice &l, const Real &radius);
/* Half-widths of the coordinate box holding every lattice point with h0 <= radius. */
std::vector<long> enumeration_box(const LogLattice &l, const Real &radius);

struct Minima {
    std::vector<Real> m;
    std::vector<std::vector<long>> witnesses;
};
Minima successive_minima(const LogLattice &l, const Real &radius_bound);
Minima successive_minima(const LogLattice &l); /* grows the radius until it succeeds */

struct NearestPoint {
    std::vector<long> x;
    Vec w;
    Real distance; /* h0(w - target) */
    Real bound;    /* (m_1 + ... + m_r) / 2 */
    bool within_bound = false;
};
NearestPoint jarnik_nearest(const LogLattice &l, const Vec &target);

struct FundamentalSize {
    Real value;
    std::vector<std::vector<long>> witnesses;
};
FundamentalSize fundamental_size(const LogLattice &l);

struct TotallyIrreducible {
    Exps exps;
    IMat g;
    AlgebraicNumber phi;
    Real height;
    Real F;
    bool within_c3F = false;
};
TotallyIrreducible find_totally_irreducible(const ConjugacyData &c, int search_N, double c3 = 4.0);

/* Ratio test: true if no two distinct eigenvalues of equal modulus differ by a root of unity. */
bool ratio_test(const IMat &g);
bool is_totally_irreducible(const IMat &g);

/* Default lower bound for heights of non-torsion units. */
double voutier_constant(int d);

/* Element of the group and its eigenvalue for an exponent vector. */
AlgebraicNumber phi_of(const ConjugacyData &c, const Exps &e);

/* Finite group of torsion elements of G, identity first. */
std::vector<IMat> torsion_subgroup(const ConjugacyData &c, const LogLattice &l);

} // namespace tor
