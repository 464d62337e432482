#pragma once

#include "tor/unitlog.hpp"

#include <optional>

namespace tor {

/* Effective constants the paper never fixes numerically. */
struct GadgetConstants {
    double c3 = 4.0;     /* height of the totally irreducible element vs F */
    double c6 = 1.0;     /* progression length threshold s >= c6 F (reported) */
    double c7 = 1.0;     /* |Delta| >= s^(-c7 F^2) (reported) */
    double c8 = 1.0;     /* escape height bound c8 F^2 l (reported) */
    double c9 = 1.0;     /* escape band log|zeta| <= c9 F^2 log l (reported) */
    double c_esc = 1.0;  /* J = ceil(c_esc F^2 ln l / theta) */
    int lambda_bound = 50;
    int n_check = 100;
};

struct EigenIndex {
    int i = 0;  /* 1-based place index */
    int di = 1;
    bool is_complex() const { return di == 2; }
};

EigenIndex eigen_index(const ConjugacyData &c, int i);

/* (sigma_i(phi(g)))^e evaluated by repeated squaring at raised precision. */
Cx zeta_power(const Cx &z, const Int &e);

struct ExpandingPair {
    EigenIndex idx;
    Exps u, ut;
    Vec u_log, ut_log;
    Cx zeta_u, zeta_ut;
    std::string case_tag; /* "1", "2.i", "2.ii" */
    int k = 0, l = 1;     /* hyperplane w_k = w_l */
    bool subfield_nontrivial = false;
    Real F, Z, m, mstar;
    std::optional<std::pair<long, long>> lambda; /* generator of real-eigenvalue exponents */
    Real lambda_log; /* log2 |zeta| of that generator, if any */
    /* checked on the instance */
    bool sign_pattern = false;
    bool independent = false;
    bool non_real_powers = true;
    /* paper bounds, reported */
    bool height_bound = false;      /* h(u), h(ut) < 9 d (r/2+1) F */
    bool expansion_bound = false;   /* log|zeta_u| >= d (r/2+1) F */
    bool expansion_bound_ut = false;/* log|zeta_ut| >= d (r/2+1) F / 4 */
};

ExpandingPair expander(const ConjugacyData &c, int i, const GadgetConstants &k = {});

struct ProgressionData {
    int s = 0;
    Int P;
    Int n, m1, m2;
    Cx delta;
    Exps step;                  /* exponents of a_1 = u^n ut^-m1 */
    std::vector<Cx> zeta;       /* zeta_{a_t}, t < s, direct evaluation */
    Real max_deviation;         /* max_t |zeta_t - (1 + t Delta)| */
    Real omega1, omega2;
    bool step_bound = false;    /* |Delta| <= s^-3 */
    bool accuracy = false;      /* max deviation <= |Delta| / s */
    bool first_window_hit = false; /* n is the first pigeonhole hit */
    Int first_hit_n;
    bool lower_bound_holds = false; /* |Delta| >= s^(-c7 F^2) */
    bool length_threshold = false;  /* s >= c6 F */
    Real max_height;                /* max_t h(phi(a_t)) */
    bool height_bound = false;      /* <= s^10 */
};

ProgressionData arith_progression(const ConjugacyData &c, const ExpandingPair &pair, int s,
                                  const GadgetConstants &k = {});

struct EscapeSequence {
    int l = 0;
    long J = 0;
    Real gamma;
    double c_esc_used = 0;
    bool c_esc_raised = false;
    std::vector<Exps> b;
    std::vector<Cx> zeta;
    bool band_ok = false;     /* all log2|zeta| >= 0 */
    Real max_log;             /* max log2|zeta| */
    bool band_upper_ok = false; /* max_log <= c9 F^2 log2 l + slack */
    bool distinct = false;
};

EscapeSequence escape_sequence(const ConjugacyData &c, const ExpandingPair &pair, int l,
                               const GadgetConstants &k = {});

/* form f on V_i: f(v) = f1 Re v + f2 Im v (f2 ignored for a real place) */
int near_line_count(const EscapeSequence &seq, bool complex_place, const Real &f1, const Real &f2);

struct IrrationalityResult {
    Real floor;
    Real actual;
};

/* q in Z^d; h is the height of the totally irreducible witness. */
IrrationalityResult irrationality_floor(const ConjugacyData &c, const std::vector<long> &q, int i,
                                        const Real &h);

struct IrrationalitySweep {
    long checked = 0;
    long violations = 0;
    Real min_actual;
    Real min_ratio; /* min actual / floor */
};
IrrationalitySweep irrationality_sweep(const ConjugacyData &c, int i, double radius, const Real &h);

} // namespace tor
