#pragma once

#include <string>

#include "bioctl/kernels.hpp"

namespace bioctl {

/// Periodic release policy: mu T predators released every T time units.
struct ReleaseProgram {
    double mu;
    double T;

    double release_size() const { return mu * T; }
};

void validate_program(const ReleaseProgram& p);

/// The pest-free T-periodic solution (0, y_p(t)).
///
/// Between releases y_p decays as exp(-m s); at every multiple of T it jumps
/// from `floor()` to `peak()`. Evaluation at t = nT returns the pre-release
/// value; use `post_release` for the right limit.
class PestFreeOrbit {
public:
    PestFreeOrbit(ReleaseProgram program, double m);

    double mu() const { return program_.mu; }
    double T() const { return program_.T; }
    double m() const { return m_; }

    /// mu T / (1 - exp(-m T))
    double peak() const { return peak_; }
    /// mu T / (exp(m T) - 1)
    double floor() const { return floor_; }

    double operator()(double t) const;
    double post_release(double t) const;

    /// m * integral of y_p over [0, t], continuous in t.
    double cumulative_loss(double t) const;

private:
    ReleaseProgram program_;
    double m_;
    double peak_;
    double floor_;
};

/// Time since the most recent release, in (0, T]; exactly T at release
/// instants (pre-release convention).
double phase_pre(double t, double T);
/// Time since the most recent release, in [0, T).
double phase_post(double t, double T);

struct FloquetMultipliers {
    /// exp(T (f'(0) - g'(0) mu/m)), the pest-direction multiplier.
    double pest;
    /// exp(-m T)
    double predator;
};

FloquetMultipliers floquet_multiplier(double fp0, double gp0, double m, const ReleaseProgram& program);

enum class Stability { Unstable, LasOnly, Gas };

struct StabilityVerdict {
    Stability verdict;
    /// mu sits on S_l or S (relative 1e-12).
    bool boundary = false;
    std::string note;
};

/// Compares mu against S_l (local) and S (global). Throws PreconditionError
/// if the report has a failing clause.
StabilityVerdict stability_verdict(const KernelReport& report, const ReleaseProgram& program);

std::string to_string(Stability s);

}  // namespace bioctl
