#pragma once

#include <vector>

#include "bioctl/kernels.hpp"

namespace bioctl {

/// Parameters of the scalar comparison system z' = sigma - m y_p(t).
///
/// sigma is S_l for the local (linearised) problem or S for the global
/// upper bound.
struct ZParams {
    double sigma;
    double m;
    double mu;
    double T;
};

// ---------------------------------------------------------------------------
// Changes of variable x -> z
// ---------------------------------------------------------------------------

/// (m / g'(0)) ln(x / eil)
double z_from_x_local(double x, double eil, double m, double gp0);
/// Inverse of z_from_x_local.
double x_from_z_local(double z, double eil, double m, double gp0);
/// m * integral_eil^x ds / g(s), using the elementary antiderivative of 1/g.
double z_from_x_global(double x, double eil, double m, const FunctionalResponse& g);
/// Same quantity by adaptive Gauss-Kronrod quadrature (rel 1e-10).
double z_from_x_global_quadrature(double x, double eil, double m, const FunctionalResponse& g);

// ---------------------------------------------------------------------------
// Comparison system
// ---------------------------------------------------------------------------

/// Exact z(t) for z(t0) = z0, t >= t0.
double z_trajectory(const ZParams& p, double z0, double t0, double t);

/// Positive root of mu T / (exp(m T) - 1) = sigma / m: the largest period
/// for which z decreases after any invasion. +infinity when sigma <= 0.
/// Requires mu > sigma, m > 0.
double that_solve(double mu, double sigma, double m, double tol = 1e-13);

enum class WorstCaseKind { Resonant, Interior };

struct WorstCaseReport {
    WorstCaseKind kind;
    /// Resonant: number of periods; Interior: z vanishes at (k + 1) T.
    long k;
    double t0_star;
    double Pi_max;
    double T1;
    double deviation;
};

/// Invasion phase t0 in [0, T) that maximises the damage time.
/// Throws PreconditionError unless 0 < T < that_solve(...) and z0 > 0.
WorstCaseReport worst_t0(double z0, const ZParams& p);

/// First time z returns to 0 after an invasion z0 at t0, minus t0.
///
/// Valid for any period as long as mu > sigma; t0 may be any non-negative
/// time (phase is taken modulo T).
double pi_of_t0(double z0, const ZParams& p, double t0);

/// mu/(mu - sigma) ((1 - exp(-m t0*))/(1 - exp(-m T)) T - t0*), zero in the
/// resonant case.
double deviation_closed_form(double z0, const ZParams& p);

struct OptimalPeriods {
    double T1;
    double T_hat;
    /// Largest n with T1/n >= T_hat (0 if T1 itself is admissible).
    long n0;
    /// T1/n for n0 < n <= n_max.
    std::vector<double> periods;
};

OptimalPeriods optimal_periods(double z0, double mu, double sigma, double m, long n_max);

// ---------------------------------------------------------------------------
// Robustness
// ---------------------------------------------------------------------------

/// Phase maximising (1 - exp(-m t))/(1 - exp(-m T)) T - t over [0, T].
double worst_t0_hat(double T, double m);
/// Worst deviation of the max damage time from T1 over all invasion sizes,
/// before the mu/(mu - sigma) scale factor.
double robustness_H(double T, double m);
/// dH/dT.
double robustness_H_slope(double T, double m);

/// Compact uncertainty set for z0 and p = (sigma, m).
struct UncertaintyBox {
    double z0_lo;
    double z0_hi;
    double sigma_lo;
    double sigma_hi;
    double m_lo;
    double m_hi;

    bool parameters_fixed() const { return sigma_lo == sigma_hi && m_lo == m_hi; }
};

void validate_box(const UncertaintyBox& box, double mu);

struct EnvelopeOptions {
    /// Points per axis of the (sigma, m) grid; collapses to 1 on a
    /// degenerate axis.
    int p_grid = 33;
    /// z0 points when no closed form applies.
    int z0_grid = 1025;
};

struct EnvelopeLimits {
    /// Closed-form validity ceiling: min over p of min(T_hat, (z0_hi - z0_lo)/(2(mu - sigma))).
    double T_L;
    /// min over p of T_hat.
    double T_bar;
};

EnvelopeLimits envelope_limits(const UncertaintyBox& box, double mu, const EnvelopeOptions& opt = {});

struct EnvelopeBound {
    double bound;
    /// T < T_L, bound is max_p mu/(mu - sigma) H(T, m).
    bool closed_form;
    EnvelopeLimits limits;
};

/// Worst deviation max_{z0,p} (max_t0 Pi - T1) at release period T.
/// Throws PreconditionError for T >= T_bar.
EnvelopeBound robust_envelope(double T, const UncertaintyBox& box, double mu,
                              const EnvelopeOptions& opt = {});

}  // namespace bioctl
