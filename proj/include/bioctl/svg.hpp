#pragma once

#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "bioctl/mcharness.hpp"

namespace bioctl {

struct ScatterPlotSpec {
    double width = 800;
    double height = 500;
    /// Horizontal range is [0, T_max].
    double T_max = 1.0;
    const char* title = "Deviation of damage time from T1";
};

/// Scatter of (T, deviation) with the worst-case bound drawn as a polyline.
void write_deviation_svg(std::ostream& os, std::span<const TrialRecord> records,
                         const std::vector<std::pair<double, double>>& bound_curve,
                         const ScatterPlotSpec& spec);

}  // namespace bioctl
