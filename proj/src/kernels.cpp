#include "bioctl/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "bioctl/errors.hpp"

namespace bioctl {
namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw DomainError(std::string(what) + " must be a finite positive number");
    }
}

void validate_response(const FunctionalResponse& g) {
    std::visit(overloaded{
                   [](const HollingI& p) { require_positive(p.lambda, "HollingI.lambda"); },
                   [](const HollingII& p) {
                       require_positive(p.lambda, "HollingII.lambda");
                       if (!(p.a >= 0.0) || !std::isfinite(p.a)) {
                           throw DomainError("HollingII.a must be finite and >= 0");
                       }
                   },
                   [](const HollingIV& p) {
                       require_positive(p.lambda, "HollingIV.lambda");
                       if (!(p.a >= 0.0) || !std::isfinite(p.a)) {
                           throw DomainError("HollingIV.a must be finite and >= 0");
                       }
                       require_positive(p.b, "HollingIV.b");
                   },
               },
               g);
}

double response_slope_at_zero(const FunctionalResponse& g) {
    return std::visit([](const auto& p) { return p.lambda; }, g);
}

// Golden-section search for the maximum of fn on [lo, hi].
template <class Fn>
std::pair<double, double> golden_max(Fn&& fn, double lo, double hi, double tol) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo;
    double b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = fn(c);
    double fd = fn(d);
    for (int it = 0; it < 200 && (b - a) > tol * std::max(1.0, std::abs(c)); ++it) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = fn(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = fn(d);
        }
    }
    return fc >= fd ? std::pair{c, fc} : std::pair{d, fd};
}

std::vector<double> log_grid(double x_max, int n) {
    // n points from x_max * 1e-8 up to x_max, preceded by the origin.
    std::vector<double> xs;
    xs.reserve(static_cast<std::size_t>(n) + 1);
    xs.push_back(0.0);
    const double lo = std::log(x_max * 1e-8);
    const double hi = std::log(x_max);
    for (int i = 0; i < n; ++i) {
        xs.push_back(std::exp(lo + (hi - lo) * i / (n - 1)));
    }
    xs.back() = x_max;
    return xs;
}

}  // namespace

double growth_rate(const GrowthLaw& law, double x) {
    return std::visit(overloaded{
                          [x](const LinearGrowth& p) { return p.r * x; },
                          [x](const LogisticGrowth& p) { return p.r * x * (1.0 - x / p.K); },
                          [x](const AlleeGrowth& p) {
                              return p.r * x * (x / p.A - 1.0) * (1.0 - x / p.K);
                          },
                      },
                      law);
}

double response_rate(const FunctionalResponse& g, double x) {
    return std::visit(overloaded{
                          [x](const HollingI& p) { return p.lambda * x; },
                          [x](const HollingII& p) { return p.lambda * x / (1.0 + p.a * x); },
                          [x](const HollingIV& p) {
                              return p.lambda * x / (1.0 + p.a * x + p.b * x * x);
                          },
                      },
                      g);
}

double numerical_rate(const NumericalResponse& h, double x) {
    return h.e * response_rate(h.response, x);
}

void validate_parameters(const KernelSet& k) {
    std::visit(overloaded{
                   [](const LinearGrowth& p) { require_positive(p.r, "linear.r"); },
                   [](const LogisticGrowth& p) {
                       require_positive(p.r, "logistic.r");
                       require_positive(p.K, "logistic.K");
                   },
                   [](const AlleeGrowth& p) {
                       require_positive(p.r, "allee.r");
                       require_positive(p.K, "allee.K");
                       require_positive(p.A, "allee.A");
                       if (!(p.A < p.K)) throw DomainError("allee.A must lie in (0, K)");
                   },
               },
               k.growth);
    validate_response(k.response);
    require_positive(k.numerical.e, "proportional.e");
    validate_response(k.numerical.response);
    require_positive(k.m, "m");
}

Rates eval_rates(const KernelSet& k, double x) {
    if (!(x >= 0.0)) throw DomainError("pest density must be >= 0");
    return {growth_rate(k.growth, x), response_rate(k.response, x),
            numerical_rate(k.numerical, x)};
}

DerivativesAtZero derivatives_at_zero(const KernelSet& k) {
    const double fp0 = std::visit(overloaded{
                                      [](const LinearGrowth& p) { return p.r; },
                                      [](const LogisticGrowth& p) { return p.r; },
                                      [](const AlleeGrowth& p) { return -p.r; },
                                  },
                                  k.growth);
    return {fp0, response_slope_at_zero(k.response)};
}

double growth_response_ratio(const KernelSet& k, double x) {
    if (x == 0.0) {
        const auto d = derivatives_at_zero(k);
        return k.m * d.fp0 / d.gp0;
    }
    // f/g with the common factor x cancelled analytically.
    const double f_over_x = std::visit(overloaded{
                                           [](const LinearGrowth& p) { return p.r; },
                                           [x](const LogisticGrowth& p) {
                                               return p.r * (1.0 - x / p.K);
                                           },
                                           [x](const AlleeGrowth& p) {
                                               return p.r * (x / p.A - 1.0) * (1.0 - x / p.K);
                                           },
                                       },
                                       k.growth);
    const double g_over_x = std::visit(overloaded{
                                           [](const HollingI& p) { return p.lambda; },
                                           [x](const HollingII& p) {
                                               return p.lambda / (1.0 + p.a * x);
                                           },
                                           [x](const HollingIV& p) {
                                               return p.lambda / (1.0 + p.a * x + p.b * x * x);
                                           },
                                       },
                                       k.response);
    return k.m * f_over_x / g_over_x;
}

double default_scan_ceiling(const KernelSet& k) {
    return std::visit(overloaded{
                          [](const LinearGrowth&) { return 1e4; },
                          [](const LogisticGrowth& p) { return 100.0 * p.K; },
                          [](const AlleeGrowth& p) { return 100.0 * p.K; },
                      },
                      k.growth);
}

RatioSupremum compute_S(const KernelSet& k, double x_max, double tol, int grid_n,
                        bool allow_closed_form) {
    if (!(x_max > 0.0)) throw DomainError("scan ceiling must be > 0");
    if (grid_n < 3) throw DomainError("scan needs at least 3 grid points");

    if (allow_closed_form) {
        const auto* logistic = std::get_if<LogisticGrowth>(&k.growth);
        const auto* linear = std::get_if<LinearGrowth>(&k.growth);
        if (logistic != nullptr) {
            // m r/lambda (1 - x/K)(1 + a x): vertex at (aK - 1)/(2a) when aK > 1.
            const double a = std::visit(overloaded{
                                            [](const HollingI&) { return 0.0; },
                                            [](const HollingII& p) { return p.a; },
                                            [](const HollingIV&) { return -1.0; },
                                        },
                                        k.response);
            if (a >= 0.0) {
                const double scale = k.m * logistic->r / response_slope_at_zero(k.response);
                if (a * logistic->K > 1.0) {
                    const double xs = std::min((a * logistic->K - 1.0) / (2.0 * a), x_max);
                    return {scale * (1.0 - xs / logistic->K) * (1.0 + a * xs), xs};
                }
                return {scale, 0.0};
            }
        } else if (linear != nullptr && std::holds_alternative<HollingI>(k.response)) {
            return {k.m * linear->r / std::get<HollingI>(k.response).lambda, 0.0};
        }
    }

    const auto xs = log_grid(x_max, grid_n);
    std::vector<double> ratio(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) ratio[i] = growth_response_ratio(k, xs[i]);

    const std::size_t last = xs.size() - 1;
    const double interior_max = *std::max_element(ratio.begin(), ratio.begin() + last);
    if (ratio[last] > interior_max && ratio[last] - ratio[last - 1] > 0.0) {
        std::ostringstream os;
        os << "m f(x)/g(x) is still increasing at x_max = " << x_max
           << "; the ratio appears unbounded";
        throw UnboundedRatioError(os.str(), x_max, ratio[last]);
    }

    const auto best = static_cast<std::size_t>(
        std::distance(ratio.begin(), std::max_element(ratio.begin(), ratio.end())));
    const double lo = xs[best == 0 ? 0 : best - 1];
    const double hi = xs[std::min(best + 1, last)];
    auto fn = [&k](double x) { return growth_response_ratio(k, x); };
    auto [x_ref, v_ref] = golden_max(fn, lo, hi, tol);
    if (v_ref >= ratio[best]) return {v_ref, x_ref};
    return {ratio[best], xs[best]};
}

KernelReport validate_h1(const KernelSet& k, double x_max, int grid_n) {
    if (grid_n < 100) throw PreconditionError("validate_h1 requires grid_n >= 100");
    validate_parameters(k);

    KernelReport rep;
    const auto d = derivatives_at_zero(k);
    rep.fp0 = d.fp0;
    rep.gp0 = d.gp0;
    rep.S_l = k.m * d.fp0 / d.gp0;

    const auto xs = log_grid(x_max, grid_n);
    const Rates at0 = eval_rates(k, 0.0);

    rep.h1_ok[0] = at0.f == 0.0;
    if (!rep.h1_ok[0]) rep.h1_notes[0] = "f(0) != 0";

    bool g_pos = true;
    bool h_pos = true;
    for (std::size_t i = 1; i < xs.size(); ++i) {
        const Rates r = eval_rates(k, xs[i]);
        g_pos = g_pos && r.g > 0.0;
        h_pos = h_pos && r.h > 0.0;
    }
    rep.h1_ok[1] = at0.g == 0.0 && d.gp0 > 0.0 && g_pos;
    if (!rep.h1_ok[1]) rep.h1_notes[1] = "g(0) != 0, g'(0) <= 0 or g not positive on x > 0";

    try {
        const auto sup = compute_S(k, x_max, 1e-12, grid_n);
        rep.S = sup.value;
        rep.s_argmax = sup.argmax;
        rep.h1_ok[2] = std::isfinite(sup.value);
    } catch (const UnboundedRatioError& e) {
        rep.S = std::numeric_limits<double>::infinity();
        rep.s_argmax = x_max;
        rep.h1_ok[2] = false;
        rep.h1_notes[2] = e.what();
    }

    rep.h1_ok[3] = at0.h == 0.0 && h_pos;
    if (!rep.h1_ok[3]) rep.h1_notes[3] = "h(0) != 0 or h not positive on x > 0";
    return rep;
}

std::string growth_name(const GrowthLaw& law) {
    return std::visit(overloaded{
                          [](const LinearGrowth&) { return std::string("linear"); },
                          [](const LogisticGrowth&) { return std::string("logistic"); },
                          [](const AlleeGrowth&) { return std::string("allee"); },
                      },
                      law);
}

std::string response_name(const FunctionalResponse& g) {
    return std::visit(overloaded{
                          [](const HollingI&) { return std::string("holling1"); },
                          [](const HollingII&) { return std::string("holling2"); },
                          [](const HollingIV&) { return std::string("holling4"); },
                      },
                      g);
}

}  // namespace bioctl
