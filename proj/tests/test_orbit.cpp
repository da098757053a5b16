#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "bioctl/errors.hpp"
#include "bioctl/kernels.hpp"
#include "bioctl/orbit.hpp"
#include "oracles.hpp"

using namespace bioctl;

TEST_CASE("orbit peak and floor") {
    const PestFreeOrbit o({2.0, 1.0}, 1.0);
    CHECK(o.peak() == doctest::Approx(3.16395).epsilon(1e-5));
    CHECK(o.peak() == doctest::Approx(oracle::orbit_peak_by_iteration(2.0, 1.0, 1.0)).epsilon(1e-13));
    CHECK(o.floor() == doctest::Approx(1.16395).epsilon(1e-5));
    CHECK(o.peak() - o.floor() == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(o.floor() == doctest::Approx(o.peak() * std::exp(-1.0)).epsilon(1e-14));
}

TEST_CASE("release convention at multiples of T") {
    const PestFreeOrbit o({2.0, 1.0}, 1.0);
    CHECK(o(1.0) == doctest::Approx(o.floor()));
    CHECK(o.post_release(1.0) == doctest::Approx(o.peak()));
    CHECK(o.post_release(0.0) == doctest::Approx(o.peak()));
    CHECK(o(3.0) - o.floor() == doctest::Approx(0.0));
    for (int n = 1; n < 6; ++n) {
        CHECK(o.post_release(n * 1.0) - o(n * 1.0) == doctest::Approx(2.0).epsilon(1e-14));
    }
}

TEST_CASE("orbit is periodic and decays between releases") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 50; ++i) {
        const double mu = 0.1 + 3 * u(rng);
        const double T = 0.05 + 2 * u(rng);
        const double m = 0.1 + 2 * u(rng);
        const PestFreeOrbit o({mu, T}, m);
        const double t = 20 * u(rng);
        CHECK(o(t + T) == doctest::Approx(o(t)).epsilon(1e-10));
        const double ph = std::fmod(t, T);
        if (ph > 1e-3 * T && ph < T * (1 - 1e-3)) {
            const double h = 1e-6 * T;
            const double d = (o(t + h) - o(t - h)) / (2 * h);
            CHECK(d == doctest::Approx(-m * o(t)).epsilon(1e-6));
        }
    }
}

TEST_CASE("release map converges to the peak") {
    const double mu = 2.0, T = 0.8, m = 1.0;
    const PestFreeOrbit o({mu, T}, m);
    for (double y0 : {0.0, 0.3 * o.peak(), 10 * o.peak()}) {
        double y = y0;
        int it = 0;
        while (std::abs(y - o.peak()) >= 1e-10 && it < 2000) {
            y = y * std::exp(-m * T) + mu * T;
            ++it;
        }
        CHECK(it < 2000);
    }
}

TEST_CASE("cumulative loss integrates m y_p") {
    const PestFreeOrbit o({2.0, 0.8}, 1.0);
    // over whole periods the loss is mu T per period
    CHECK(o.cumulative_loss(0.8 * 5) == doctest::Approx(2.0 * 0.8 * 5).epsilon(1e-12));
    const auto num = oracle::simpson([&](double t) { return o.post_release(t); }, 0.0, 0.3, 2000);
    CHECK(o.cumulative_loss(0.3) == doctest::Approx(num).epsilon(1e-10));
}

TEST_CASE("Floquet multiplier closed form") {
    auto f = floquet_multiplier(1.0, 1.0, 1.0, {2.0, 0.5});
    CHECK(f.pest == doctest::Approx(std::exp(-0.5)).epsilon(1e-14));
    CHECK(f.pest == doctest::Approx(0.60653).epsilon(1e-5));
    CHECK(f.predator == doctest::Approx(std::exp(-0.5)));
    CHECK(floquet_multiplier(1.0, 1.0, 1.0, {1.0, 2.3}).pest == doctest::Approx(1.0));
    CHECK(floquet_multiplier(1.0, 1.0, 1.0, {0.5, 1.0}).pest == doctest::Approx(1.64872).epsilon(1e-5));
}

TEST_CASE("Floquet multiplier matches integration of the linearised system") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 20; ++i) {
        const double fp0 = -1 + 3 * u(rng), gp0 = 0.2 + 2 * u(rng), m = 0.2 + 2 * u(rng);
        const double mu = 0.1 + 3 * u(rng), T = 0.1 + 1.5 * u(rng);
        const double closed = floquet_multiplier(fp0, gp0, m, {mu, T}).pest;
        const double rk = oracle::floquet_rk4(fp0, gp0, m, mu, T, 20000);
        CHECK(closed == doctest::Approx(rk).epsilon(1e-8));
    }
}

TEST_CASE("multiplier below one iff mu beats the local threshold") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        const double fp0 = 0.1 + 2 * u(rng), gp0 = 0.1 + 2 * u(rng), m = 0.1 + 2 * u(rng);
        const double mu = 0.01 + 5 * u(rng), T = 0.05 + 2 * u(rng);
        const bool below = floquet_multiplier(fp0, gp0, m, {mu, T}).pest < 1.0;
        CHECK(below == (mu > m * fp0 / gp0));
    }
}

TEST_CASE("stability verdicts") {
    KernelSet k{LogisticGrowth{1.0, 10.0}, HollingII{1.0, 0.5}, ProportionalNumerical{1.0, HollingII{1.0, 0.5}}, 1.0};
    const auto rep = validate_h1(k, default_scan_ceiling(k));
    CHECK(stability_verdict(rep, {2.0, 0.5}).verdict == Stability::Gas);
    CHECK(stability_verdict(rep, {1.4, 0.5}).verdict == Stability::LasOnly);
    CHECK_FALSE(stability_verdict(rep, {1.4, 0.5}).note.empty());
    CHECK(stability_verdict(rep, {0.5, 0.5}).verdict == Stability::Unstable);
    const auto edge = stability_verdict(rep, {1.0, 0.5});
    CHECK(edge.boundary);
    const auto edge_s = stability_verdict(rep, {1.8, 0.5});
    CHECK(edge_s.boundary);
    CHECK(edge_s.verdict == Stability::LasOnly);
    CHECK(to_string(Stability::Gas) == "GAS");
    CHECK(to_string(Stability::LasOnly) == "LAS_only");
    CHECK(to_string(Stability::Unstable) == "Unstable");

    KernelSet lin{LinearGrowth{1.0}, HollingII{1.0, 0.5}, ProportionalNumerical{1.0, HollingII{1.0, 0.5}}, 1.0};
    const auto bad = validate_h1(lin, default_scan_ceiling(lin));
    CHECK_THROWS_AS(stability_verdict(bad, {2.0, 0.5}), PreconditionError);
}

TEST_CASE("program validation") {
    CHECK_THROWS_AS(validate_program({0.0, 1.0}), DomainError);
    CHECK_THROWS_AS(validate_program({1.0, -1.0}), DomainError);
    CHECK_NOTHROW(validate_program({1.0, 1.0}));
}
