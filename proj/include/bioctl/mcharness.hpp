#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bioctl/impulsim.hpp"
#include "bioctl/kernels.hpp"
#include "bioctl/planner.hpp"

namespace bioctl {

enum class Engine { ClosedForm, ZSim, FullNonlinear };

std::string to_string(Engine e);
/// "closed" | "zsim" | "full"; throws DomainError otherwise.
Engine parse_engine(const std::string& name);

/// What the FullNonlinear engine integrates. z0 is mapped back to x0 with
/// the inverse of the logarithmic (local) change of variable.
struct FullModel {
    KernelSet kernels;
    double eil;
    SimConfig sim;
};

struct McConfig {
    std::uint64_t n_trials = 200000;
    std::uint64_t seed = 0;
    /// (sigma, m) must be a single point.
    UncertaintyBox box{};
    double mu = 0.0;
    Engine engine = Engine::ClosedForm;
    /// 0 picks std::thread::hardware_concurrency().
    unsigned threads = 0;
    std::optional<FullModel> full;
};

struct TrialRecord {
    std::uint64_t trial_index;
    double T;
    double t0;
    double z0;
    /// Only set by the FullNonlinear engine.
    std::optional<double> x0;
    double Pi;
    double T1;
    double deviation;
    Engine engine;
    bool failed;
};

/// Counter-based generator: the stream of trial i depends only on
/// (seed, i). State is seeded with splitmix64(seed ^ splitmix64(i)) and
/// advanced by the splitmix64 increment.
class TrialStream {
public:
    TrialStream(std::uint64_t seed, std::uint64_t index);
    std::uint64_t next_u64();
    /// Uniform in [0, 1) with 53 random bits.
    double next_unit();
    /// Uniform in (0, 1).
    double next_open_unit();

private:
    std::uint64_t state_;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Upper end of the sampled period range for the configuration.
double mc_period_ceiling(const McConfig& cfg);

/// Evaluates a single trial. run_mc is exactly this function mapped over
/// 0..n_trials-1.
TrialRecord run_trial(const McConfig& cfg, double T_L, std::uint64_t index);

std::vector<TrialRecord> run_mc(const McConfig& cfg);

/// Pi computed by integrating the comparison system numerically (RK4,
/// segments split at release instants).
double pi_zsim(double z0, const ZParams& p, double t0);

struct EnvelopeBin {
    double T_lo;
    double T_hi;
    double T_mid;
    /// NaN when the bin is empty.
    double max_dev;
    double min_dev;
    std::uint64_t count;
};

/// Equal-width bins over (0, T_L). Failed trials are skipped.
std::vector<EnvelopeBin> bin_envelope(std::span<const TrialRecord> records, int n_bins, double T_L);

struct BinCoverage {
    EnvelopeBin bin;
    /// Theoretical worst deviation at the bin centre.
    double bound;
    /// max_dev / bound, NaN for empty bins.
    double coverage_ratio;
};

struct EnvelopeReport {
    std::uint64_t violations = 0;
    std::uint64_t checked = 0;
    std::vector<BinCoverage> bins;
};

/// Counts records whose deviation exceeds the worst-case bound at their own
/// period (slack 1e-9), and the per-bin coverage of that bound.
EnvelopeReport verify_envelope(std::span<const TrialRecord> records, const UncertaintyBox& box, double mu,
                               int n_bins);

}  // namespace bioctl
