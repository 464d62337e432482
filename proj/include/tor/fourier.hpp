#pragma once

#include "tor/eigenact.hpp"
#include "tor/entropy.hpp"

#include <array>
#include <map>

namespace tor {

using Freq = std::vector<long>;

struct Character {
    Freq q;
    Real norm() const; /* |xi| = |q| */
    bool trivial() const;
};

/* e(beta) = exp(-2 pi i beta) */
Cx unit_phase(const Real &beta);

/* sum_j w_j e(xi(x_j)); on X, xi(x) = q . psi^{-1} x */
Cx fourier_coeff(const ConjugacyData &c, const FiniteMeasure &m, const Freq &q);
/* |hat(psi_* mu)(psi_* q) - hat mu(q)|, computed in both coordinate systems */
Real pushforward_gap(const ConjugacyData &c, const FiniteMeasure &mu, const Freq &q);

/* sum_{t<s} e(t beta) */
Cx geometric_sum(const Real &beta, long s);

/* Exact action of an integer matrix on dyadic torus points: x -> g x mod 1. */
Vec torus_action(const IMat &g, const Vec &x);

struct Gadgets {
    ExpandingPair pair;
    ProgressionData prog;
    EscapeSequence esc;
};

/* exponent vector of u^n a_t b_k, with 0 <= t < s and 1 <= k <= l */
Exps gadget_element(const Gadgets &g, long n, int t, int k);

/* (1/sl) sum_t sum_k pushforward of nu by u^n a_t b_k; output in the input's space */
FiniteMeasure average_measure(const ConjugacyData &c, const FiniteMeasure &nu, const Gadgets &g,
                              long n, int s, int l);

struct PlanConstants {
    double c3 = 1;  /* height exponent of the irrationality floor */
    double c8 = 1;  /* escape height c8 F^2 l */
    double c9 = 1;  /* escape band l^(c9 F^2) */
    double c10 = 3; /* delta range lower constant */
    double c16 = 1; /* entropy delta threshold */
    double c17 = 1; /* T setting and the R >= 2^(c17 F^2 (T-1)) M^(10d) bound */
};

struct PlanOptions {
    bool strict = false;
    PlanConstants k;
    GadgetConstants gadgets;
    double s_cap = 1099511627776.0; /* 2^40: larger settings are infeasible */
    int s_exec = 8;                 /* longest progression actually built */
    std::optional<Real> R;          /* defaults to delta R0 */
    std::optional<int> i;           /* 1-based place, defaults to 1 */
    std::optional<long> T;          /* overrides the T setting */
};

struct ParameterPlan {
    Real eps, alpha, delta;
    Real log_inv_eps, R0, F, M;
    int d = 0, i = 1, di = 1;
    long T_setting = 0; /* value of the T formula */
    long T = 0;
    Real R;
    long l = 0;
    Real A;
    Real s_setting; /* value of the s formula */
    int s = 0;      /* progression length used */
    long n = 0;
    Real zeta_u; /* |zeta_u^i| */
    Real Delta;  /* |Delta| */
    Real xi_lhs; /* left side of the xi upper condition at the chosen n */
    PlanConstants k;
    Gadgets gadgets;
    /* range checks; strict mode throws when any fails */
    bool eps_ok = false;      /* log(1/eps) > max(M^(30d), 4) */
    bool delta_ok = false;    /* delta in [c10 F^2 / loglog(1/eps), alpha/10] */
    bool T_raised = false;    /* T setting below 1/delta, raised */
    bool T_ok = false;        /* 1/delta <= T <= delta R0 / 2 */
    bool s_clamped = false;   /* s setting above s_exec */
    bool n_bracket = false;   /* xi_lhs in (1/(4|zeta|), 1/4] */
    bool R_bound = false;     /* R >= 2^(c17 F^2 (T-1)) M^(10d) */
    std::vector<std::string> flags;
};

/* Throws InfeasiblePlan on budget overflow, or in strict mode on any failed range. */
ParameterPlan plan_parameters(const Real &eps, const Real &alpha, const Real &delta,
                              const ConjugacyData &c, const PlanOptions &o = {});

struct SweepRow {
    Freq q;
    Real coef2;
};

struct FrequencySweep {
    Real A;
    std::vector<SweepRow> rows;
    Real max_coef2;
    Freq argmax;
    bool sampled = false;
    double coverage = 1; /* rows / lattice points in the ball */
};

struct SweepOptions {
    double exact_limit = 1000;   /* radius above which the shell is sampled */
    double count_limit = 200000; /* ball size above which the shell is sampled */
    long samples = 20000;
    std::uint64_t seed = 1;
};

/* lattice points with 0 < |q| <= A, in lexicographic order */
std::vector<Freq> frequency_ball(int d, const Real &A);
FrequencySweep frequency_sweep(const ConjugacyData &c, const FiniteMeasure &m, const Real &A,
                               const SweepOptions &o = {});

struct BoundCertificate {
    std::array<Real, 5> L;      /* may be +inf */
    std::array<Real, 5> log2_L; /* base 2 logarithms, always finite */
    Real sum;
    Real measured; /* max |coef|^2 over 0 < |xi| <= A */
    bool xi_upper = false;
    bool holds = false; /* measured <= sum */
};

BoundCertificate bound_terms(const ParameterPlan &p, const ConjugacyData &c);
/* Fills the measured side; throws InvariantViolation if it fails while xi_upper holds. */
void certify(BoundCertificate &b, const FrequencySweep &sweep);

/* Trigonometric polynomial f(x) = sum_q f_q e(q . x). */
struct TrigPoly {
    int d = 0;
    std::map<Freq, Cx> coef;
};

Cx integrate(const FiniteMeasure &gamma, const TrigPoly &f); /* gamma on the torus */
Real evaluate(const TrigPoly &f, const Vec &x);               /* real part */
Real sobolev_norm(const TrigPoly &f);                         /* homogeneous, order (d+1)/2 */

struct SobolevConstant {
    int d = 0;
    long N = 0;     /* exact lattice sum over |q| <= N */
    Real K;         /* upper bound for || |q|^(-(d+1)/2) ||_l2 */
    Real tail;      /* upper bound for sup_A A^(1/2) || |q|^(-(d+1)/2) ||_l2(|q| > A) */
    Real c14;       /* max(K, tail) */
};
const SobolevConstant &sobolev_constant(int d);

struct SobolevGap {
    Real lhs, rhs;
    Real max_coef; /* max |hat gamma(q)| over 0 < |q| <= A */
    bool hypothesis = false; /* |gamma| <= 1 and max_coef <= C A^(-1/2) */
    bool holds = false;
};

/* Throws InvariantViolation if lhs > rhs while the hypothesis holds. */
SobolevGap sobolev_gap(const ConjugacyData &c, const FiniteMeasure &gamma, const TrigPoly &f,
                       const Real &A, const Real &C);

struct Bump {
    TrigPoly f;
    Real rho;
    Vec center;
    Real mass;       /* zero coefficient */
    Real norm;       /* homogeneous Sobolev norm */
    Real truncation; /* sup-norm bound for the dropped coefficients */
};

/* Tensor product of 1-d bumps exp(-1/(1-t^2)) with support in B(center, rho). */
Bump bump_function(const Vec &center, const Real &rho, int band_limit);

struct MuPrimeReport {
    ParameterPlan plan;
    ScaleDirection scale;
    NuData nu;
    FiniteMeasure mu_prime;  /* torus */
    FiniteMeasure mu_second; /* torus, same atoms */
    FrequencySweep sweep_nu, sweep_avg;
    BoundCertificate certificate;
    Real A;
    Real mass;
    bool mass_ok = false;      /* |mu'| >= alpha - 5 delta */
    bool dominated = false;    /* mu' <= mu'' atom-wise */
    bool decay = false;        /* averaged max < unaveraged max */
    Real mahler_radius;        /* max h of the elements used */
    Real radius_ratio;         /* mahler_radius / log2(1/eps) */
    size_t elements = 0;
};

struct MuPrimeOptions {
    PlanOptions plan;
    EntropyOptions entropy;
    SweepOptions sweep;
};

MuPrimeReport build_mu_prime(const FiniteMeasure &mu, const Real &eps, const Real &alpha,
                             const Real &delta, const ConjugacyData &c,
                             const MuPrimeOptions &o = {});

} // namespace tor
