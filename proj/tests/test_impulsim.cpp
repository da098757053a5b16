#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "bioctl/errors.hpp"
#include "bioctl/impulsim.hpp"
#include "bioctl/planner.hpp"

using namespace bioctl;

namespace {

KernelSet reference() { return {LogisticGrowth{1.0, 10.0}, HollingII{1.0, 0.5}, ProportionalNumerical{1.0, HollingII{1.0, 0.5}}, 1.0}; }

double y_at_orbit(const ReleaseProgram& p, double m, double t0) {
    return initial_predators(YPolicy::at_orbit(), PestFreeOrbit(p, m), t0);
}

double max_x(const Trajectory& tr, double t_hi) {
    double best = 0.0;
    for (const auto& s : tr.samples) {
        if (s.t <= t_hi) best = std::max(best, s.x);
    }
    return best;
}

double x_at(const Trajectory& tr, double t) {
    const auto it = std::lower_bound(tr.samples.begin(), tr.samples.end(), t,
                                     [](const Sample& s, double v) { return s.t < v; });
    REQUIRE(it != tr.samples.end());
    return it->x;
}

}  // namespace

TEST_CASE("pest-free set is invariant and y approaches the orbit") {
    const auto k = reference();
    const ReleaseProgram prog{2.0, 0.5};
    const PestFreeOrbit orbit(prog, k.m);
    SimConfig cfg;
    cfg.t_end = 60.0;
    const auto tr = simulate(k, prog, 0.0, 7.0, 0.0, cfg);
    for (const auto& s : tr.samples) {
        CHECK(s.x == 0.0);
        if (s.t > 30.0) {
            const double yp = s.is_impulse ? orbit.post_release(s.t) : orbit(s.t);
            CHECK(std::abs(s.y - yp) < 1e-6);
        }
    }
}

TEST_CASE("trajectory invariants") {
    const auto k = reference();
    const ReleaseProgram prog{2.0, 0.5};
    SimConfig cfg;
    cfg.t_end = 20.0;
    const auto tr = simulate(k, prog, 5.0, y_at_orbit(prog, 1.0, 0.0), 0.0, cfg, 0.1);
    REQUIRE(tr.samples.size() > 2);
    for (std::size_t i = 1; i < tr.samples.size(); ++i) CHECK(tr.samples[i].t > tr.samples[i - 1].t);
    // releases strictly inside (t0, t_end)
    CHECK(tr.impulses.size() == 39);
    for (const auto& imp : tr.impulses) CHECK(imp.y_post - imp.y_pre == doctest::Approx(1.0).epsilon(1e-15));
    // at least 50 samples per period
    const long per_first = std::count_if(tr.samples.begin(), tr.samples.end(), [](const Sample& s) { return s.t <= 0.5; });
    CHECK(per_first >= 50);
    REQUIRE_FALSE(tr.events.empty());
    CHECK(tr.events.front().direction == -1);
}

TEST_CASE("GAS release rate drives the pest out") {
    const auto k = reference();
    const ReleaseProgram prog{2.0, 0.5};
    for (double x0 : {0.5, 2.0, 5.0}) {
        SimConfig cfg;
        cfg.t_end = 40.0;
        const auto tr = simulate(k, prog, x0, y_at_orbit(prog, 1.0, 0.0), 0.0, cfg);
        CHECK(tr.samples.back().x < 1e-6);

        SimConfig tight = cfg;
        tight.rtol = 1e-10;
        tight.atol = 1e-12;
        const auto tr2 = simulate(k, prog, x0, y_at_orbit(prog, 1.0, 0.0), 0.0, tight);
        CHECK(tr2.samples.back().x < 1e-6);
        CHECK(x_at(tr, 5.0) == doctest::Approx(x_at(tr2, 5.0)).epsilon(1e-5));
    }
}

TEST_CASE("rate below the local threshold lets the pest grow") {
    const auto k = reference();
    const ReleaseProgram prog{0.5, 0.5};
    for (double rtol : {1e-8, 1e-10}) {
        SimConfig cfg;
        cfg.t_end = 50.0;
        cfg.rtol = rtol;
        cfg.atol = rtol * 1e-2;
        const auto tr = simulate(k, prog, 0.01, y_at_orbit(prog, 1.0, 0.0), 0.0, cfg);
        CHECK(max_x(tr, 50.0) > 0.1);
    }
}

TEST_CASE("nonnegativity over random configurations") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const double a = 2.0 * u(rng);
        KernelSet k{LogisticGrowth{0.2 + 2 * u(rng), 1 + 20 * u(rng)}, HollingII{0.2 + 2 * u(rng), a},
                    ProportionalNumerical{0.1 + u(rng), HollingII{0.3 + u(rng), a}}, 0.2 + 2 * u(rng)};
        const ReleaseProgram prog{0.1 + 3 * u(rng), 0.1 + 1.5 * u(rng)};
        SimConfig cfg;
        cfg.t_end = 15.0;
        const auto tr = simulate(k, prog, 10 * u(rng), 5 * u(rng), 3 * u(rng), cfg);
        double lo = 0.0;
        for (const auto& s : tr.samples) lo = std::min({lo, s.x, s.y});
        CHECK(lo >= -cfg.atol);
    }
}

TEST_CASE("pest decreases monotonically below T hat of S") {
    const auto k = reference();
    const double T_hat = that_solve(2.0, 1.8, 1.0);
    const ReleaseProgram prog{2.0, 0.8 * T_hat};
    for (double t0 : {0.0, 0.3 * prog.T, 0.9 * prog.T}) {
        SimConfig cfg;
        cfg.t_end = t0 + 15.0;
        const auto tr = simulate(k, prog, 3.0, y_at_orbit(prog, 1.0, t0), t0, cfg);
        for (std::size_t i = 1; i < tr.samples.size(); ++i) CHECK(tr.samples[i].x <= tr.samples[i - 1].x + cfg.atol);
    }
}

TEST_CASE("damage time of the full model") {
    const auto k = reference();
    const ReleaseProgram prog{2.0, 0.5};
    SimConfig cfg;
    const double eil = 0.1;

    const auto near = damage_time_full(k, prog, eil * (1 + 1e-12), eil, 0.0, YPolicy::at_orbit(), cfg);
    CHECK(near.pi < 10 * cfg.crossing_tol);

    const auto d = damage_time_full(k, prog, 1.0, eil, 0.0, YPolicy::at_orbit(), cfg);
    const double z2 = z_from_x_global(1.0, eil, 1.0, HollingII{1.0, 0.5});
    CHECK(d.pi <= pi_of_t0(z2, {1.8, 1.0, 2.0, 0.5}, 0.0) + cfg.crossing_tol);
    CHECK(d.t_f == doctest::Approx(d.pi));

    SimConfig tight = cfg;
    tight.rtol = cfg.rtol / 2;
    tight.atol = cfg.atol / 2;
    const auto d2 = damage_time_full(k, prog, 1.0, eil, 0.0, YPolicy::at_orbit(), tight);
    CHECK(d2.pi == doctest::Approx(d.pi).epsilon(1e-6));

    // extra predators shorten the damage
    const auto more = damage_time_full(k, prog, 1.0, eil, 0.0, YPolicy::orbit_plus(1.0), cfg);
    CHECK(more.pi < d.pi);
}

TEST_CASE("comparison bound over random invasions") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto k = reference();
    for (int i = 0; i < 30; ++i) {
        const ReleaseProgram prog{1.9 + 1.5 * u(rng), 0.1 + 0.9 * u(rng)};
        const double eil = 0.05 + 0.2 * u(rng);
        const double x0 = eil * (1.5 + 20 * u(rng));
        const double t0 = 2 * u(rng);
        SimConfig cfg;
        cfg.t_end = t0 + 400.0;
        const auto d = damage_time_full(k, prog, x0, eil, t0, YPolicy::at_orbit(), cfg);
        const double z2 = z_from_x_global(x0, eil, 1.0, HollingII{1.0, 0.5});
        CHECK(d.pi <= pi_of_t0(z2, {1.8, 1.0, prog.mu, prog.T}, t0) + 1e-6);
    }
}

TEST_CASE("simulation errors") {
    const auto k = reference();
    const ReleaseProgram prog{2.0, 0.5};
    SimConfig cfg;
    CHECK_THROWS_AS(simulate(k, prog, -1.0, 1.0, 0.0, cfg), DomainError);
    CHECK_THROWS_AS(simulate(k, prog, 1.0, 1.0, -1.0, cfg), DomainError);
    SimConfig bad = cfg;
    bad.rtol = 0.1;
    CHECK_THROWS_AS(simulate(k, prog, 1.0, 1.0, 0.0, bad), DomainError);
    CHECK_THROWS_AS(damage_time_full(k, prog, 0.05, 0.1, 0.0, YPolicy::at_orbit(), cfg), PreconditionError);

    // below the local threshold no crossing happens before t_end
    SimConfig short_cfg;
    short_cfg.t_end = 20.0;
    CHECK_THROWS_AS(damage_time_full(k, {0.5, 0.5}, 1.0, 0.1, 0.0, YPolicy::at_orbit(), short_cfg),
                    HorizonExceededError);
}

TEST_CASE("resolved defaults") {
    const auto r = resolve(SimConfig{}, {2.0, 0.5}, 2.0, 1.0);
    CHECK(r.max_step == doctest::Approx(0.025));
    CHECK(r.t_end == doctest::Approx(101.0));
}
