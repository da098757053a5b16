#pragma once

#include <optional>
#include <vector>

#include "bioctl/kernels.hpp"
#include "bioctl/orbit.hpp"

namespace bioctl {

struct SimConfig {
    double rtol = 1e-8;
    double atol = 1e-10;
    /// Defaults to T/20 when unset.
    std::optional<double> max_step;
    /// Absolute end time. Defaults to t0 + 200/m when unset.
    std::optional<double> t_end;
    double crossing_tol = 1e-9;
};

/// SimConfig with the period/mortality dependent defaults filled in.
struct ResolvedSimConfig {
    double rtol;
    double atol;
    double max_step;
    double t_end;
    double crossing_tol;
};

ResolvedSimConfig resolve(const SimConfig& cfg, const ReleaseProgram& program, double m, double t0);

struct Sample {
    double t;
    double x;
    double y;
    /// The sample sits on a release instant and holds the post-release state.
    bool is_impulse;
};

struct ImpulseRecord {
    double t;
    double y_pre;
    double y_post;
};

struct Crossing {
    double t;
    /// -1 for a downward crossing of the threshold, +1 for upward.
    int direction;
};

struct Trajectory {
    std::vector<Sample> samples;
    std::vector<ImpulseRecord> impulses;
    std::vector<Crossing> events;
};

/// Integrates the impulsive predator-prey system from (x0, y0) at t0 to the
/// configured end time.
///
/// The flow is integrated with an adaptive Dormand-Prince 5(4) pair, one
/// smooth segment per inter-release interval; at every release instant
/// nT > t0 the jump y += mu T is applied exactly. Samples are emitted at
/// no fewer than 50 points per period. If `x_threshold` is given, every
/// crossing of x through it is localized to crossing_tol and recorded.
Trajectory simulate(const KernelSet& k, const ReleaseProgram& program, double x0, double y0,
                    double t0, const SimConfig& cfg,
                    std::optional<double> x_threshold = std::nullopt);

/// Initial predator level at the invasion time.
struct YPolicy {
    enum class Kind { AtOrbit, OrbitPlus } kind = Kind::AtOrbit;
    double delta = 0.0;

    static YPolicy at_orbit() { return {}; }
    static YPolicy orbit_plus(double d) { return {Kind::OrbitPlus, d}; }
};

double initial_predators(const YPolicy& policy, const PestFreeOrbit& orbit, double t0);

struct DamageTime {
    /// t_f - t0
    double pi;
    double t_f;
};

/// Time for the pest to fall back to the injury level `eil` after an
/// invasion x0 > eil at t0. Throws HorizonExceededError if x never drops to
/// eil before the configured end time.
DamageTime damage_time_full(const KernelSet& k, const ReleaseProgram& program, double x0, double eil,
                            double t0, const YPolicy& policy, const SimConfig& cfg);

}  // namespace bioctl
