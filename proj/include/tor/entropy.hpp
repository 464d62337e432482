#pragma once

#include "tor/unitlog.hpp"

#include <cstdint>
#include <optional>

namespace tor {

/* Atomic measure on T^d (torus coordinates in [0,1)^d) or on X = R^d / psi(Z^d)
   (embedded coordinates inside psi([0,1)^d)). */
struct FiniteMeasure {
    enum class Space { Torus, X };
    Space space = Space::Torus;
    std::vector<Vec> points;
    Vec weights;

    size_t size() const { return points.size(); }
    Real total_mass() const;
};

/* Reduces positions to the fundamental domain; throws InvalidInput on a negative weight. */
FiniteMeasure make_measure(const ConjugacyData &c, FiniteMeasure::Space space,
                           std::vector<Vec> points, Vec weights);
FiniteMeasure uniform_measure(const ConjugacyData &c, FiniteMeasure::Space space,
                              std::vector<Vec> points);
FiniteMeasure push_to_X(const ConjugacyData &c, const FiniteMeasure &mu);
FiniteMeasure pull_to_torus(const ConjugacyData &c, const FiniteMeasure &tau);

/* Entropy against the grid of ceil(1/eps)^d cubes anchored at 0. */
Real grid_entropy(const FiniteMeasure &mu, const Real &eps);

struct BoxSpec {
    Vec w;      /* one entry per place */
    Vec anchor; /* corner in R^d */
};

BoxSpec cube_box(const ConjugacyData &c, const Real &R);
Vec box_sides(const ConjugacyData &c, const BoxSpec &b);
Real injectivity_radius(const ConjugacyData &c); /* log2(sqrt(d) M) */
bool is_injective(const ConjugacyData &c, const BoxSpec &b);
/* F_t B: block i shrunk by 2^(-t_i) about the origin */
BoxSpec refine(const BoxSpec &b, const std::vector<long> &t);
/* place index of each embedded coordinate */
std::vector<int> coordinate_places(const ConjugacyData &c);

struct EntropyOptions {
    size_t exact_atom_limit = 200;
    int exact_dim_limit = 3;
    double cell_budget = 2e7; /* coarse x phase cells summed over atoms */
    long samples = 100000;
    std::uint64_t seed = 1;
    bool force_sampling = false;
};

struct EntropyEstimate {
    Real value;
    Real stderr_;     /* 0 unless sampled */
    std::string mode; /* exact, chain, sampled */
};

EntropyEstimate hom_entropy(const ConjugacyData &c, const FiniteMeasure &tau, const BoxSpec &b,
                            const EntropyOptions &o = {});
/* conditional entropy against Q_t B */
EntropyEstimate hom_cond_entropy(const ConjugacyData &c, const FiniteMeasure &tau,
                                 const BoxSpec &b, const std::vector<long> &t,
                                 const EntropyOptions &o = {});
/* total mass of m_{tau,B} */
EntropyEstimate box_measure_mass(const ConjugacyData &c, const FiniteMeasure &tau,
                                 const BoxSpec &b, const EntropyOptions &o = {});

struct EntropyConstants {
    double c16 = 1.0;
};

struct ScaleRow {
    Real R;
    bool injective = false;
    EntropyEstimate H; /* H(B_R, Q_{T1} B_R), unset if not injective */
};

struct ScaleDirection {
    Real R0, S;
    long p = 0; /* number of scan steps */
    Real R;
    BoxSpec B;
    int i = 0; /* 1-based place */
    long T = 0;
    EntropyEstimate H;                /* full refinement at R */
    std::vector<EntropyEstimate> H_dir; /* per place */
    std::vector<ScaleRow> profile;
    Real grid_H;
    bool entropy_hypothesis = false; /* grid_H >= alpha d log2(1/eps) */
    bool delta_lower_ok = false;     /* delta >= c16 M^d / R0 */
    bool delta_upper_ok = false;     /* delta <= alpha / 10 */
    bool T_range_ok = false;         /* 1/delta <= T <= delta R0 / 2 */
};

/* mu lives on the torus. Throws InvalidInput when delta T < 1, NotFound when no scale passes. */
ScaleDirection positive_scale_direction(const ConjugacyData &c, const FiniteMeasure &mu,
                                        const Real &alpha, const Real &delta, long T,
                                        const Real &eps, const EntropyOptions &o = {},
                                        const EntropyConstants &k = {});

struct NuData {
    Real R;
    long T = 0;
    int i = 0;
    BoxSpec B;
    FiniteMeasure nu;
    std::string mode;
    Real threshold;      /* 2^(-d_i delta T) */
    Real H_dir;          /* H(B, Q_{T1_i} B) from the same sweep */
    Real mass;           /* |nu| */
    Real mass_bound;     /* (H_dir - 1) / (d_i T) - delta */
    Real alpha_bound;    /* alpha - 5 delta */
    Real max_nu_x;       /* sup_x |nu_x| */
    Real l2;             /* E sum_Q nu_x(x+Q)^2 */
    Real mean_nu_x;      /* E |nu_x|, equals |nu| */
    bool dominated = false;
    bool nu_x_ok = false;
    bool mass_ok = false;  /* |nu| >= mass_bound */
    bool alpha_ok = false; /* |nu| >= alpha - 5 delta whenever H_dir >= (alpha-3delta) d_i T */
    bool l2_ok = false;
};

/* Throws InvalidInput when delta T < 1 and InvariantViolation when a conclusion fails. */
NuData build_nu(const ConjugacyData &c, const FiniteMeasure &tau, const BoxSpec &b, long T, int i,
                const Real &delta, const Real &alpha, const EntropyOptions &o = {});

} // namespace tor
