#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "bioctl/impulsim.hpp"
#include "bioctl/kernels.hpp"
#include "bioctl/mcharness.hpp"
#include "bioctl/orbit.hpp"

namespace bioctl {

/// Which sigma the comparison system uses: S_l (local) or S (global bound).
enum class Comparison { Local, Global };

/// Uncertainty box as written in a config; sigma/m bounds default to the
/// scenario's own point value when omitted.
struct BoxSpec {
    double z0_lo;
    double z0_hi;
    std::optional<double> sigma_lo, sigma_hi, m_lo, m_hi;
};

struct McOverrides {
    std::optional<std::uint64_t> n_trials;
    std::optional<std::uint64_t> seed;
    std::optional<Engine> engine;
    std::optional<int> bins;
};

struct ScenarioConfig {
    KernelSet kernels;
    ReleaseProgram program;
    double eil;
    Comparison comparison = Comparison::Local;
    std::optional<BoxSpec> box;
    SimConfig sim;
    McOverrides mc;
};

/// Parses and schema-checks a scenario. Unknown keys are rejected. Throws
/// ConfigError; JSON syntax errors carry the line and column.
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::filesystem::path& path);

/// Concrete box for a scenario whose sigma is `sigma`.
UncertaintyBox resolve_box(const BoxSpec& spec, double sigma, double m);

}  // namespace bioctl
