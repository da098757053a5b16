#pragma once

#include <stdexcept>
#include <string>

namespace bioctl {

/// Argument outside the mathematical domain of an operation (negative density,
/// non-positive rate constant, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A documented precondition of an operation does not hold for otherwise
/// valid inputs (e.g. release period not below the decrease threshold).
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The ratio m f(x)/g(x) is still rising at the end of the scan; the
/// kernel set is suspected of an unbounded ratio.
class UnboundedRatioError : public std::runtime_error {
public:
    UnboundedRatioError(const std::string& what, double x_max, double ratio_at_max)
        : std::runtime_error(what), x_max_(x_max), ratio_at_max_(ratio_at_max) {}
    double x_max() const noexcept { return x_max_; }
    double ratio_at_max() const noexcept { return ratio_at_max_; }

private:
    double x_max_;
    double ratio_at_max_;
};

/// Step size underflow or a state leaving the non-negative orthant.
class IntegrationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// No threshold crossing occurred before the simulation horizon.
class HorizonExceededError : public std::runtime_error {
public:
    HorizonExceededError(const std::string& what, double t_end)
        : std::runtime_error(what), t_end_(t_end) {}
    double t_end() const noexcept { return t_end_; }

private:
    double t_end_;
};

/// Malformed or schema-violating scenario configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace bioctl
