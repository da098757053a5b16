#include "bioctl/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "bioctl/errors.hpp"
#include "bioctl/orbit.hpp"

namespace bioctl {
namespace {

void check_zparams(const ZParams& p) {
    if (!(p.m > 0.0) || !std::isfinite(p.m)) throw DomainError("mortality m must be > 0");
    if (!(p.T > 0.0) || !std::isfinite(p.T)) throw DomainError("release period T must be > 0");
    if (!(p.mu > p.sigma)) {
        throw PreconditionError("release rate mu must exceed sigma (stability condition)");
    }
}

double peak_of(const ZParams& p) { return p.mu * p.T / -std::expm1(-p.m * p.T); }

/// (1 - exp(-m t)) / (1 - exp(-m T))
double decay_fraction(double t, double T, double m) { return std::expm1(-m * t) / std::expm1(-m * T); }

/// z over one inter-release segment: z_a + sigma s - Y e^{-m phi}(1 - e^{-m s}).
struct Segment {
    double z_a;
    double sigma;
    double m;
    double y_a;  // predator level at the segment start
    double length;

    double at(double s) const { return z_a + sigma * s + y_a * std::expm1(-m * s); }

    /// Location of the minimum of the (convex) segment on [0, length].
    double argmin() const {
        if (sigma <= 0.0) return length;
        const double s = std::log(m * y_a / sigma) / m;
        return std::clamp(s, 0.0, length);
    }

    /// First root on [0, argmin()], where z is non-increasing. Requires
    /// at(argmin()) <= 0 < z_a.
    double first_root(double tol) const {
        double lo = 0.0;
        double hi = argmin();
        for (int it = 0; it < 200 && hi - lo > tol; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (at(mid) > 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        return 0.5 * (lo + hi);
    }
};

// (q - 1) for q = u/(1 - e^{-u}), computed without cancellation.
double q_minus_one(double u) {
    double num;
    if (u < 1e-3) {
        num = u * u * (0.5 + u * (-1.0 / 6 + u * (1.0 / 24 - u / 120.0)));
    } else {
        num = u + std::expm1(-u);
    }
    return num / -std::expm1(-u);
}

// d - ln(1 + d) without cancellation.
double d_minus_log1p(double d) {
    if (std::abs(d) < 1e-4) return d * d * (0.5 + d * (-1.0 / 3 + d * 0.25));
    return d - std::log1p(d);
}

std::vector<double> axis(double lo, double hi, int n) {
    if (lo == hi || n <= 1) return {lo};
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
    v.back() = hi;
    return v;
}

}  // namespace

double z_from_x_local(double x, double eil, double m, double gp0) {
    if (!(x > 0.0) || !(eil > 0.0)) throw DomainError("x and the injury level must be > 0");
    return m / gp0 * std::log(x / eil);
}

double x_from_z_local(double z, double eil, double m, double gp0) {
    if (!(eil > 0.0)) throw DomainError("injury level must be > 0");
    return eil * std::exp(z * gp0 / m);
}

double z_from_x_global(double x, double eil, double m, const FunctionalResponse& g) {
    if (!(x > 0.0) || !(eil > 0.0)) throw DomainError("x and the injury level must be > 0");
    // 1/g(s) = (1 + a s + b s^2)/(lambda s) for all supported responses.
    double lambda = 0.0;
    double a = 0.0;
    double b = 0.0;
    if (const auto* p = std::get_if<HollingI>(&g)) {
        lambda = p->lambda;
    } else if (const auto* p = std::get_if<HollingII>(&g)) {
        lambda = p->lambda;
        a = p->a;
    } else if (const auto* p = std::get_if<HollingIV>(&g)) {
        lambda = p->lambda;
        a = p->a;
        b = p->b;
    }
    const double integral =
        std::log(x / eil) + a * (x - eil) + 0.5 * b * (x - eil) * (x + eil);
    return m * integral / lambda;
}

double z_from_x_global_quadrature(double x, double eil, double m, const FunctionalResponse& g) {
    if (!(x > 0.0) || !(eil > 0.0)) throw DomainError("x and the injury level must be > 0");
    if (x == eil) return 0.0;
    auto inv_g = [&g](double s) { return 1.0 / response_rate(g, s); };
    // Integrate in log-space: ds/g(s) = s/g(s) d(ln s), smooth near 0.
    auto integrand = [&inv_g](double u) {
        const double s = std::exp(u);
        return s * inv_g(s);
    };
    double err = 0.0;
    const double val = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        integrand, std::log(eil), std::log(x), 20, 1e-10, &err);
    return m * val;
}

double z_trajectory(const ZParams& p, double z0, double t0, double t) {
    check_zparams(p);
    if (!(t >= t0)) throw DomainError("z_trajectory needs t >= t0");
    const PestFreeOrbit orbit({p.mu, p.T}, p.m);
    return z0 + p.sigma * (t - t0) - (orbit.cumulative_loss(t) - orbit.cumulative_loss(t0));
}

double that_solve(double mu, double sigma, double m, double tol) {
    if (!(m > 0.0)) throw DomainError("mortality m must be > 0");
    if (!(mu > sigma)) throw PreconditionError("release rate mu must exceed sigma");
    if (sigma <= 0.0) return std::numeric_limits<double>::infinity();

    const double target = sigma / m;
    auto residual = [&](double T) { return mu * T / std::expm1(m * T) - target; };

    double lo = 0.0;
    double hi = 1.0 / m;
    while (residual(hi) >= 0.0) {
        lo = hi;
        hi *= 2.0;
    }
    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        mid = 0.5 * (lo + hi);
        const double r = residual(mid);
        if (r > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) break;
    }
    if (std::abs(residual(mid)) >= tol && std::abs(residual(hi)) < std::abs(residual(mid))) mid = hi;
    return mid;
}

WorstCaseReport worst_t0(double z0, const ZParams& p) {
    check_zparams(p);
    if (!(z0 > 0.0)) throw DomainError("invasion level z0 must be > 0");
    const double T_hat = that_solve(p.mu, p.sigma, p.m);
    if (!(p.T < T_hat)) {
        std::ostringstream os;
        os << "release period T = " << p.T << " is not below the decrease threshold T_hat = " << T_hat;
        throw PreconditionError(os.str());
    }

    const double drop = (p.mu - p.sigma) * p.T;
    const double T1 = z0 / (p.mu - p.sigma);
    const double rho = z0 / drop;
    const double nearest = std::round(rho);
    if (nearest >= 1.0 && std::abs(rho - nearest) < 1e-12 * std::max(1.0, rho)) {
        const auto k = static_cast<long>(nearest);
        return {WorstCaseKind::Resonant, k, 0.0, nearest * p.T, T1, 0.0};
    }

    const double kk = std::ceil(rho) - 1.0;
    const double n1 = kk + 1.0;
    auto phi = [&](double t) {
        return z0 + p.sigma * (n1 * p.T - t) - n1 * p.mu * p.T +
               p.mu * p.T * decay_fraction(t, p.T, p.m);
    };
    double lo = 0.0;
    double hi = p.T;
    for (int it = 0; it < 200 && hi - lo > 1e-12 * p.T; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (phi(mid) > 0.0) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    const double t0s = 0.5 * (lo + hi);
    const double Pi = n1 * p.T - t0s;
    return {WorstCaseKind::Interior, static_cast<long>(kk), t0s, Pi, T1, Pi - T1};
}

double pi_of_t0(double z0, const ZParams& p, double t0) {
    check_zparams(p);
    if (!(z0 >= 0.0)) throw DomainError("invasion level z0 must be >= 0");
    if (!(t0 >= 0.0)) throw DomainError("invasion time t0 must be >= 0");
    if (z0 == 0.0) return 0.0;
    constexpr double kTol = 1e-12;

    const double Y = peak_of(p);
    const double phase = phase_post(t0, p.T);
    const Segment first{z0, p.sigma, p.m, Y * std::exp(-p.m * phase), p.T - phase};
    if (first.at(first.argmin()) <= 0.0) return first.first_root(kTol);

    // Whole periods from the first release on: each starts at the peak and
    // lowers the segment-start value by (mu - sigma) T.
    const double z_b = first.at(first.length);
    const double drop = (p.mu - p.sigma) * p.T;
    const Segment shape{0.0, p.sigma, p.m, Y, p.T};
    const double dip = shape.at(shape.argmin());
    double j = std::max(0.0, std::ceil((z_b + dip) / drop));
    while (j > 0.0 && z_b - (j - 1.0) * drop + dip <= 0.0) j -= 1.0;
    while (z_b - j * drop + dip > 0.0) j += 1.0;

    const Segment last{z_b - j * drop, p.sigma, p.m, Y, p.T};
    return first.length + j * p.T + last.first_root(kTol);
}

double deviation_closed_form(double z0, const ZParams& p) {
    const auto rep = worst_t0(z0, p);
    if (rep.kind == WorstCaseKind::Resonant) return 0.0;
    const double t = rep.t0_star;
    return p.mu / (p.mu - p.sigma) * (decay_fraction(t, p.T, p.m) * p.T - t);
}

OptimalPeriods optimal_periods(double z0, double mu, double sigma, double m, long n_max) {
    if (!(z0 > 0.0)) throw DomainError("invasion level z0 must be > 0");
    OptimalPeriods out{};
    out.T1 = z0 / (mu - sigma);
    out.T_hat = that_solve(mu, sigma, m);
    if (std::isinf(out.T_hat)) {
        out.n0 = 0;
    } else {
        auto n0 = static_cast<long>(std::floor(out.T1 / out.T_hat));
        while (out.T1 / static_cast<double>(n0 + 1) >= out.T_hat) ++n0;
        while (n0 > 0 && out.T1 / static_cast<double>(n0) < out.T_hat) --n0;
        out.n0 = n0;
    }
    for (long n = out.n0 + 1; n <= n_max; ++n) out.periods.push_back(out.T1 / static_cast<double>(n));
    return out;
}

double worst_t0_hat(double T, double m) {
    if (!(T > 0.0) || !(m > 0.0)) throw DomainError("T and m must be > 0");
    return std::log1p(q_minus_one(m * T)) / m;
}

double robustness_H(double T, double m) {
    if (!(T > 0.0) || !(m > 0.0)) throw DomainError("T and m must be > 0");
    return d_minus_log1p(q_minus_one(m * T)) / m;
}

double robustness_H_slope(double T, double m) {
    if (!(T > 0.0) || !(m > 0.0)) throw DomainError("T and m must be > 0");
    const double u = m * T;
    const double one_minus = -std::expm1(-u);
    const double num = u < 1e-3 ? u * u * (0.5 + u / 6.0) : std::expm1(u) - u;
    return std::exp(-u) * num / (one_minus * one_minus) * (1.0 - one_minus / u);
}

void validate_box(const UncertaintyBox& box, double mu) {
    if (!(box.z0_lo > 0.0) || !(box.z0_hi >= box.z0_lo)) {
        throw DomainError("uncertainty box needs 0 < z0_lo <= z0_hi");
    }
    if (!(box.sigma_hi >= box.sigma_lo)) throw DomainError("uncertainty box needs sigma_lo <= sigma_hi");
    if (!(box.m_lo > 0.0) || !(box.m_hi >= box.m_lo)) {
        throw DomainError("uncertainty box needs 0 < m_lo <= m_hi");
    }
    if (!(mu > box.sigma_hi)) {
        throw PreconditionError("release rate mu must exceed sigma everywhere in the box");
    }
}

EnvelopeLimits envelope_limits(const UncertaintyBox& box, double mu, const EnvelopeOptions& opt) {
    validate_box(box, mu);
    EnvelopeLimits lim{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    const double width = box.z0_hi - box.z0_lo;
    for (double sigma : axis(box.sigma_lo, box.sigma_hi, opt.p_grid)) {
        for (double m : axis(box.m_lo, box.m_hi, opt.p_grid)) {
            const double T_hat = that_solve(mu, sigma, m);
            lim.T_bar = std::min(lim.T_bar, T_hat);
            lim.T_L = std::min(lim.T_L, std::min(T_hat, width / (2.0 * (mu - sigma))));
        }
    }
    return lim;
}

EnvelopeBound robust_envelope(double T, const UncertaintyBox& box, double mu, const EnvelopeOptions& opt) {
    if (!(T > 0.0)) throw DomainError("release period T must be > 0");
    EnvelopeBound out{};
    out.limits = envelope_limits(box, mu, opt);
    if (!(T < out.limits.T_bar)) {
        std::ostringstream os;
        os << "release period T = " << T << " is not below min_p T_hat = " << out.limits.T_bar;
        throw PreconditionError(os.str());
    }
    const auto sigmas = axis(box.sigma_lo, box.sigma_hi, opt.p_grid);
    const auto ms = axis(box.m_lo, box.m_hi, opt.p_grid);
    double best = -std::numeric_limits<double>::infinity();
    if (T < out.limits.T_L) {
        out.closed_form = true;
        for (double sigma : sigmas) {
            for (double m : ms) best = std::max(best, mu / (mu - sigma) * robustness_H(T, m));
        }
    } else {
        out.closed_form = false;
        const auto z0s = axis(box.z0_lo, box.z0_hi, opt.z0_grid);
        for (double sigma : sigmas) {
            for (double m : ms) {
                for (double z0 : z0s) best = std::max(best, worst_t0(z0, {sigma, m, mu, T}).deviation);
            }
        }
    }
    out.bound = best;
    return out;
}

}  // namespace bioctl
