#pragma once

#include <array>
#include <string>
#include <variant>

namespace bioctl {

// ---------------------------------------------------------------------------
// Pest growth laws f(x)
// ---------------------------------------------------------------------------

/// f(x) = r x
struct LinearGrowth {
    double r;
};

/// f(x) = r x (1 - x/K)
struct LogisticGrowth {
    double r;
    double K;
};

/// f(x) = r x (x/A - 1)(1 - x/K), strong Allee effect with threshold A < K.
struct AlleeGrowth {
    double r;
    double A;
    double K;
};

using GrowthLaw = std::variant<LinearGrowth, LogisticGrowth, AlleeGrowth>;

// ---------------------------------------------------------------------------
// Predator functional responses g(x)
// ---------------------------------------------------------------------------

/// g(x) = lambda x
struct HollingI {
    double lambda;
};

/// g(x) = lambda x / (1 + a x)
struct HollingII {
    double lambda;
    double a;
};

/// g(x) = lambda x / (1 + a x + b x^2), prey group defence.
struct HollingIV {
    double lambda;
    double a;
    double b;
};

using FunctionalResponse = std::variant<HollingI, HollingII, HollingIV>;

/// h(x) = e g_h(x). g_h is usually the kernel set's own functional response
/// but is stored separately so a config can decouple the two.
struct ProportionalNumerical {
    double e;
    FunctionalResponse response;
};

using NumericalResponse = ProportionalNumerical;

/// Vital rates of the continuous predator-prey flow
///   x' = f(x) - g(x) y,   y' = h(x) y - m y.
struct KernelSet {
    GrowthLaw growth;
    FunctionalResponse response;
    NumericalResponse numerical;
    double m;
};

struct Rates {
    double f;
    double g;
    double h;
};

struct DerivativesAtZero {
    double fp0;
    double gp0;
};

/// Supremum of m f(x)/g(x) and where it is attained (0 means the limit at
/// the origin).
struct RatioSupremum {
    double value;
    double argmax;
};

struct KernelReport {
    double fp0 = 0.0;
    double gp0 = 0.0;
    double S_l = 0.0;
    double S = 0.0;
    double s_argmax = 0.0;
    /// Clauses (i)..(iv) of the qualitative hypotheses on f, g, h.
    std::array<bool, 4> h1_ok{};
    /// Human-readable reason for every failing clause, empty when all pass.
    std::array<std::string, 4> h1_notes{};

    bool all_ok() const { return h1_ok[0] && h1_ok[1] && h1_ok[2] && h1_ok[3]; }
};

inline constexpr int kDefaultGridPoints = 4096;

double growth_rate(const GrowthLaw& law, double x);
double response_rate(const FunctionalResponse& g, double x);
double numerical_rate(const NumericalResponse& h, double x);

/// Throws DomainError if any rate constant is outside its admissible range.
void validate_parameters(const KernelSet& k);

/// Closed-form f(x), g(x), h(x). Throws DomainError for x < 0.
Rates eval_rates(const KernelSet& k, double x);

/// Analytic f'(0) and g'(0) for the supported variants.
DerivativesAtZero derivatives_at_zero(const KernelSet& k);

/// m f(x)/g(x), extended at x = 0 by its limit m f'(0)/g'(0).
double growth_response_ratio(const KernelSet& k, double x);

/// 100 K for laws with a carrying capacity, 1e4 otherwise.
double default_scan_ceiling(const KernelSet& k);

/// Maximum of m f(x)/g(x) over [0, x_max].
///
/// Uses the vertex formula when the variant pair admits one; otherwise a
/// log-spaced scan of grid_n points followed by golden-section refinement
/// of the best cell to relative tolerance tol. Throws UnboundedRatioError
/// when the ratio at x_max beats every interior point and is still rising.
RatioSupremum compute_S(const KernelSet& k, double x_max, double tol,
                        int grid_n = kDefaultGridPoints, bool allow_closed_form = true);

/// Checks the four qualitative clauses on a log grid and fills S, S_l.
/// Clause failures are reported, never thrown.
KernelReport validate_h1(const KernelSet& k, double x_max, int grid_n = kDefaultGridPoints);

std::string growth_name(const GrowthLaw& law);
std::string response_name(const FunctionalResponse& g);

}  // namespace bioctl
