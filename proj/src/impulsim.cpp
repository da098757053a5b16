#include "bioctl/impulsim.hpp"

#include <cmath>
#include <sstream>

#include "bioctl/errors.hpp"
#include "dopri5.hpp"

namespace bioctl {
namespace {

using detail::DenseStep;
using detail::State2;

constexpr int kSamplesPerPeriod = 50;

struct RunOptions {
    std::optional<double> threshold;
    bool stop_at_first_down = false;
    bool record_samples = true;
};

struct RunResult {
    Trajectory trajectory;
    std::optional<double> first_down;
};

/// Smallest release instant n T strictly after t.
double next_release(double t, double T) {
    double n = std::floor(t / T) + 1.0;
    while (n * T <= t) n += 1.0;
    while ((n - 1.0) * T > t) n -= 1.0;
    return n * T;
}

double locate_crossing(const DenseStep& step, double lo, double hi, double threshold, double tol) {
    // Invariant: x(lo) - threshold and x(hi) - threshold have opposite signs
    // (hi side may be exactly zero).
    const double s_lo = step(lo)[0] - threshold;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        const double s_mid = step(mid)[0] - threshold;
        if ((s_mid > 0.0) == (s_lo > 0.0) && s_mid != 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return hi;
}

void check_state(State2& y, double t, double atol) {
    for (double& v : y) {
        if (!std::isfinite(v)) {
            std::ostringstream os;
            os << "non-finite state at t = " << t;
            throw IntegrationError(os.str());
        }
        if (v < 0.0) {
            if (v < -atol) {
                std::ostringstream os;
                os << "state left the non-negative orthant at t = " << t << " (value " << v << ")";
                throw IntegrationError(os.str());
            }
            v = 0.0;
        }
    }
}

RunResult run(const KernelSet& k, const ReleaseProgram& program, double x0, double y0, double t0,
              const ResolvedSimConfig& rc, const RunOptions& opt) {
    auto rhs = [&k](double, const State2& s) -> State2 {
        const double x = std::max(s[0], 0.0);
        const double f = growth_rate(k.growth, x);
        const double g = response_rate(k.response, x);
        const double h = numerical_rate(k.numerical, x);
        return {f - g * s[1], h * s[1] - k.m * s[1]};
    };
    detail::Dopri5 stepper(rhs, {rc.rtol, rc.atol, rc.max_step});

    RunResult out;
    Trajectory& tr = out.trajectory;
    if (opt.record_samples) tr.samples.push_back({t0, x0, y0, false});

    const double T = program.T;
    const double dt_sample = T / kSamplesPerPeriod;
    double t = t0;
    State2 y{x0, y0};

    while (t < rc.t_end) {
        const double release = next_release(t, T);
        const double seg_end = std::min(release, rc.t_end);
        const double seg_start = t;
        const double seg_len = seg_end - seg_start;
        const auto n_sub = static_cast<long>(std::max(1.0, std::ceil(seg_len / dt_sample - 1e-9)));
        long next_sample = 1;

        while (t < seg_end) {
            const double t_old = t;
            const State2 y_old = y;
            const DenseStep step = stepper.advance(t, y, seg_end);
            const State2 y_raw = y;
            check_state(y, t, rc.atol);
            if (y != y_raw) stepper.reset();

            if (opt.threshold) {
                const double thr = *opt.threshold;
                const double s_old = y_old[0] - thr;
                const double s_new = y[0] - thr;
                int dir = 0;
                if (s_old > 0.0 && s_new <= 0.0) dir = -1;
                if (s_old < 0.0 && s_new >= 0.0) dir = +1;
                if (dir != 0) {
                    const double tc = locate_crossing(step, t_old, t, thr, rc.crossing_tol);
                    tr.events.push_back({tc, dir});
                    if (dir < 0 && !out.first_down) {
                        out.first_down = tc;
                        if (opt.stop_at_first_down) return out;
                    }
                }
            }

            if (opt.record_samples) {
                while (next_sample < n_sub) {
                    const double ts = seg_start + seg_len * static_cast<double>(next_sample) / n_sub;
                    if (ts > t) break;
                    State2 ys = ts == t ? y : step(ts);
                    check_state(ys, ts, rc.atol);
                    tr.samples.push_back({ts, ys[0], ys[1], false});
                    ++next_sample;
                }
            }
        }

        if (seg_end == release && release < rc.t_end) {
            const double pre = y[1];
            y[1] = pre + program.release_size();
            tr.impulses.push_back({release, pre, y[1]});
            if (opt.record_samples) tr.samples.push_back({release, y[0], y[1], true});
            stepper.reset();
        }
    }
    if (opt.record_samples && tr.samples.back().t < t) tr.samples.push_back({t, y[0], y[1], false});
    return out;
}

void check_initial(double x0, double y0, double t0) {
    if (!(x0 >= 0.0) || !(y0 >= 0.0)) throw DomainError("initial densities must be >= 0");
    if (!(t0 >= 0.0)) throw DomainError("initial time must be >= 0");
}

}  // namespace

ResolvedSimConfig resolve(const SimConfig& cfg, const ReleaseProgram& program, double m, double t0) {
    if (!(cfg.rtol > 0.0 && cfg.rtol <= 1e-3)) throw DomainError("rtol must lie in (0, 1e-3]");
    if (!(cfg.atol > 0.0)) throw DomainError("atol must be > 0");
    if (!(cfg.crossing_tol > 0.0)) throw DomainError("crossing_tol must be > 0");
    ResolvedSimConfig rc{cfg.rtol, cfg.atol, cfg.max_step.value_or(program.T / 20.0),
                         cfg.t_end.value_or(t0 + 200.0 / m), cfg.crossing_tol};
    if (!(rc.max_step > 0.0)) throw DomainError("max_step must be > 0");
    if (!(rc.t_end > t0)) throw DomainError("t_end must exceed t0");
    return rc;
}

Trajectory simulate(const KernelSet& k, const ReleaseProgram& program, double x0, double y0,
                    double t0, const SimConfig& cfg, std::optional<double> x_threshold) {
    validate_parameters(k);
    validate_program(program);
    check_initial(x0, y0, t0);
    RunOptions opt;
    opt.threshold = x_threshold;
    return run(k, program, x0, y0, t0, resolve(cfg, program, k.m, t0), opt).trajectory;
}

double initial_predators(const YPolicy& policy, const PestFreeOrbit& orbit, double t0) {
    const double base = orbit.post_release(t0);
    if (policy.kind == YPolicy::Kind::OrbitPlus) {
        if (!(policy.delta >= 0.0)) throw DomainError("OrbitPlus delta must be >= 0");
        return base + policy.delta;
    }
    return base;
}

DamageTime damage_time_full(const KernelSet& k, const ReleaseProgram& program, double x0, double eil,
                            double t0, const YPolicy& policy, const SimConfig& cfg) {
    validate_parameters(k);
    validate_program(program);
    if (!(eil > 0.0)) throw DomainError("injury level must be > 0");
    if (!(x0 > eil)) throw PreconditionError("invasion level x0 must exceed the injury level");
    const PestFreeOrbit orbit(program, k.m);
    const double y0 = initial_predators(policy, orbit, t0);
    check_initial(x0, y0, t0);

    RunOptions opt;
    opt.threshold = eil;
    opt.stop_at_first_down = true;
    opt.record_samples = false;
    const auto rc = resolve(cfg, program, k.m, t0);
    const auto res = run(k, program, x0, y0, t0, rc, opt);
    if (!res.first_down) {
        std::ostringstream os;
        os << "pest never fell to the injury level before t_end = " << rc.t_end;
        throw HorizonExceededError(os.str(), rc.t_end);
    }
    return {*res.first_down - t0, *res.first_down};
}

}  // namespace bioctl
