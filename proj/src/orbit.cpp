#include "bioctl/orbit.hpp"

#include <cmath>

#include "bioctl/errors.hpp"

namespace bioctl {

void validate_program(const ReleaseProgram& p) {
    if (!(p.mu > 0.0) || !std::isfinite(p.mu)) throw DomainError("release rate mu must be > 0");
    if (!(p.T > 0.0) || !std::isfinite(p.T)) throw DomainError("release period T must be > 0");
}

PestFreeOrbit::PestFreeOrbit(ReleaseProgram program, double m) : program_(program), m_(m) {
    validate_program(program_);
    if (!(m > 0.0)) throw DomainError("mortality m must be > 0");
    const double size = program_.release_size();
    peak_ = size / -std::expm1(-m_ * program_.T);
    floor_ = size / std::expm1(m_ * program_.T);
}

double phase_post(double t, double T) {
    double s = std::fmod(t, T);
    if (s < 0.0) s += T;
    return s >= T ? 0.0 : s;
}

double phase_pre(double t, double T) {
    const double s = phase_post(t, T);
    return s == 0.0 ? T : s;
}

double PestFreeOrbit::operator()(double t) const {
    return peak_ * std::exp(-m_ * phase_pre(t, program_.T));
}

double PestFreeOrbit::post_release(double t) const {
    return peak_ * std::exp(-m_ * phase_post(t, program_.T));
}

double PestFreeOrbit::cumulative_loss(double t) const {
    const double n = std::floor(t / program_.T);
    const double s = t - n * program_.T;
    return n * program_.release_size() - peak_ * std::expm1(-m_ * s);
}

FloquetMultipliers floquet_multiplier(double fp0, double gp0, double m, const ReleaseProgram& program) {
    validate_program(program);
    if (!(m > 0.0)) throw DomainError("mortality m must be > 0");
    // integral of y_p over one period is mu T / m
    return {std::exp(program.T * (fp0 - gp0 * program.mu / m)), std::exp(-m * program.T)};
}

StabilityVerdict stability_verdict(const KernelReport& report, const ReleaseProgram& program) {
    validate_program(program);
    if (!report.all_ok()) {
        std::string why = "kernel set fails hypothesis clause(s):";
        for (int i = 0; i < 4; ++i) {
            if (!report.h1_ok[i]) why += " (" + std::string(i == 0 ? "i" : i == 1 ? "ii" : i == 2 ? "iii" : "iv") + ")";
        }
        throw PreconditionError(why);
    }
    auto near = [](double a, double b) {
        return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b));
    };
    const double mu = program.mu;
    StabilityVerdict v{};
    if (near(mu, report.S_l)) {
        v.verdict = Stability::Unstable;
        v.boundary = true;
        v.note = "mu equals the local threshold S_l: Floquet multiplier is 1";
    } else if (mu < report.S_l) {
        v.verdict = Stability::Unstable;
        v.note = "mu below the local threshold S_l";
    } else if (near(mu, report.S)) {
        v.verdict = Stability::LasOnly;
        v.boundary = true;
        v.note = "mu equals S: locally stable, global stability unknown";
    } else if (mu < report.S) {
        v.verdict = Stability::LasOnly;
        v.note = "locally stable, global stability unknown";
    } else {
        v.verdict = Stability::Gas;
        v.note = "globally asymptotically stable";
    }
    return v;
}

std::string to_string(Stability s) {
    switch (s) {
        case Stability::Unstable: return "Unstable";
        case Stability::LasOnly: return "LAS_only";
        case Stability::Gas: return "GAS";
    }
    return "?";
}

}  // namespace bioctl
