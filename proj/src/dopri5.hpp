#pragma once

// Dormand-Prince 5(4) stepper with the standard 4th-order continuous
// extension. Two-dimensional state only; this is all the simulator needs.

#include <array>
#include <functional>

namespace bioctl::detail {

using State2 = std::array<double, 2>;
using Rhs2 = std::function<State2(double, const State2&)>;

/// Dense interpolant over one accepted step [t_begin, t_begin + h].
struct DenseStep {
    double t_begin = 0.0;
    double h = 0.0;
    std::array<State2, 5> coef{};

    double t_end() const { return t_begin + h; }
    State2 operator()(double t) const;
};

struct StepperTolerances {
    double rtol;
    double atol;
    double max_step;
};

class Dopri5 {
public:
    Dopri5(Rhs2 rhs, StepperTolerances tol);

    /// Advances (t, y) by one accepted step that does not pass t_limit.
    /// The step size carried between calls is adapted internally. Throws
    /// IntegrationError on step-size underflow.
    DenseStep advance(double& t, State2& y, double t_limit);

    /// Forget the FSAL stage, required after the state is modified
    /// externally (impulses).
    void reset() { have_k1_ = false; }

    double step_size() const { return h_; }

private:
    Rhs2 rhs_;
    StepperTolerances tol_;
    double h_ = 0.0;
    bool have_k1_ = false;
    State2 k1_{};
};

}  // namespace bioctl::detail
