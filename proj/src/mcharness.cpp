#include "bioctl/mcharness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "bioctl/errors.hpp"
#include "bioctl/orbit.hpp"

namespace bioctl {
namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
constexpr int kZSimStepsPerPeriod = 16;

void check_config(const McConfig& cfg) {
    if (cfg.n_trials < 1) throw DomainError("n_trials must be >= 1");
    validate_box(cfg.box, cfg.mu);
    if (!cfg.box.parameters_fixed()) {
        throw PreconditionError("Monte Carlo runs need a single (sigma, m) point in the box");
    }
    if (cfg.engine == Engine::FullNonlinear && !cfg.full) {
        throw PreconditionError("the full engine needs a kernel set and injury level");
    }
}

}  // namespace

std::string to_string(Engine e) {
    switch (e) {
        case Engine::ClosedForm: return "closed";
        case Engine::ZSim: return "zsim";
        case Engine::FullNonlinear: return "full";
    }
    return "?";
}

Engine parse_engine(const std::string& name) {
    if (name == "closed") return Engine::ClosedForm;
    if (name == "zsim") return Engine::ZSim;
    if (name == "full") return Engine::FullNonlinear;
    throw DomainError("unknown engine '" + name + "' (expected closed, zsim or full)");
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += kGolden;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

TrialStream::TrialStream(std::uint64_t seed, std::uint64_t index)
    : state_(splitmix64(seed ^ splitmix64(index))) {}

std::uint64_t TrialStream::next_u64() {
    state_ += kGolden;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double TrialStream::next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double TrialStream::next_open_unit() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double pi_zsim(double z0, const ZParams& p, double t0) {
    if (!(p.mu > p.sigma)) throw PreconditionError("release rate mu must exceed sigma");
    if (z0 <= 0.0) return 0.0;
    const PestFreeOrbit orbit({p.mu, p.T}, p.m);
    const double h_nominal = p.T / kZSimStepsPerPeriod;

    double t = t0;
    double z = z0;
    double seg_y = orbit.post_release(t0);  // predator level at segment start
    double seg_t = t0;
    double seg_end = t0 + (p.T - phase_post(t0, p.T));

    auto rhs = [&](double tau) { return p.sigma - p.m * seg_y * std::exp(-p.m * (tau - seg_t)); };
    auto rk4 = [&](double ta, double za, double h) {
        // The right-hand side does not depend on z; RK4 reduces to Simpson.
        const double k1 = rhs(ta);
        const double k2 = rhs(ta + 0.5 * h);
        const double k4 = rhs(ta + h);
        return za + h / 6.0 * (k1 + 4.0 * k2 + k4);
    };

    for (;;) {
        while (t < seg_end) {
            const double h = std::min(h_nominal, seg_end - t);
            const double z_new = rk4(t, z, h);
            if (z_new <= 0.0) {
                double lo = 0.0;
                double hi = h;
                while (hi - lo > 1e-13 * std::max(1.0, t)) {
                    const double mid = 0.5 * (lo + hi);
                    if (rk4(t, z, mid) > 0.0) {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                return t + 0.5 * (lo + hi) - t0;
            }
            z = z_new;
            t = (h == seg_end - t) ? seg_end : t + h;
        }
        seg_t = seg_end;
        seg_y = orbit.peak();
        seg_end += p.T;
    }
}

double mc_period_ceiling(const McConfig& cfg) {
    validate_box(cfg.box, cfg.mu);
    return envelope_limits(cfg.box, cfg.mu).T_L;
}

TrialRecord run_trial(const McConfig& cfg, double T_L, std::uint64_t index) {
    TrialStream rng(cfg.seed, index);
    const double T = T_L * rng.next_open_unit();
    const double t0 = T * rng.next_unit();
    const double z0 = cfg.box.z0_lo + (cfg.box.z0_hi - cfg.box.z0_lo) * rng.next_unit();

    const ZParams p{cfg.box.sigma_lo, cfg.box.m_lo, cfg.mu, T};
    TrialRecord rec{index, T, t0, z0, std::nullopt, 0.0, z0 / (cfg.mu - p.sigma), 0.0, cfg.engine, false};
    switch (cfg.engine) {
        case Engine::ClosedForm: rec.Pi = pi_of_t0(z0, p, t0); break;
        case Engine::ZSim: rec.Pi = pi_zsim(z0, p, t0); break;
        case Engine::FullNonlinear: {
            const FullModel& fm = *cfg.full;
            const double gp0 = derivatives_at_zero(fm.kernels).gp0;
            rec.x0 = x_from_z_local(z0, fm.eil, fm.kernels.m, gp0);
            try {
                rec.Pi = damage_time_full(fm.kernels, {cfg.mu, T}, *rec.x0, fm.eil, t0, YPolicy::at_orbit(),
                                          fm.sim)
                             .pi;
            } catch (const HorizonExceededError&) {
                rec.failed = true;
            } catch (const IntegrationError&) {
                rec.failed = true;
            }
            break;
        }
    }
    if (rec.failed) {
        rec.Pi = std::numeric_limits<double>::quiet_NaN();
        rec.deviation = std::numeric_limits<double>::quiet_NaN();
    } else {
        rec.deviation = rec.Pi - rec.T1;
    }
    return rec;
}

std::vector<TrialRecord> run_mc(const McConfig& cfg) {
    check_config(cfg);
    const double T_L = mc_period_ceiling(cfg);
    const std::uint64_t n = cfg.n_trials;
    std::vector<TrialRecord> out(n);

    unsigned threads = cfg.threads != 0 ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, n));

    constexpr std::uint64_t kChunk = 512;
    std::atomic<std::uint64_t> cursor{0};
    std::exception_ptr failure;
    std::mutex failure_mu;
    auto worker = [&]() {
        try {
            for (;;) {
                const std::uint64_t begin = cursor.fetch_add(kChunk);
                if (begin >= n) return;
                const std::uint64_t end = std::min(n, begin + kChunk);
                for (std::uint64_t i = begin; i < end; ++i) out[i] = run_trial(cfg, T_L, i);
            }
        } catch (...) {
            std::lock_guard lock(failure_mu);
            if (!failure) failure = std::current_exception();
            cursor.store(n);
        }
    };

    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

std::vector<EnvelopeBin> bin_envelope(std::span<const TrialRecord> records, int n_bins, double T_L) {
    if (n_bins < 1) throw DomainError("n_bins must be >= 1");
    if (!(T_L > 0.0)) throw DomainError("period ceiling must be > 0");
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double width = T_L / n_bins;
    std::vector<EnvelopeBin> bins(static_cast<std::size_t>(n_bins));
    for (int i = 0; i < n_bins; ++i) {
        auto& b = bins[static_cast<std::size_t>(i)];
        b.T_lo = width * i;
        b.T_hi = i + 1 == n_bins ? T_L : width * (i + 1);
        b.T_mid = 0.5 * (b.T_lo + b.T_hi);
        b.max_dev = nan;
        b.min_dev = nan;
        b.count = 0;
    }
    for (const auto& r : records) {
        if (r.failed) continue;
        auto idx = static_cast<long>(std::floor(r.T / width));
        idx = std::clamp(idx, 0L, static_cast<long>(n_bins) - 1);
        auto& b = bins[static_cast<std::size_t>(idx)];
        if (b.count == 0) {
            b.max_dev = r.deviation;
            b.min_dev = r.deviation;
        } else {
            b.max_dev = std::max(b.max_dev, r.deviation);
            b.min_dev = std::min(b.min_dev, r.deviation);
        }
        ++b.count;
    }
    return bins;
}

EnvelopeReport verify_envelope(std::span<const TrialRecord> records, const UncertaintyBox& box, double mu,
                               int n_bins) {
    const auto limits = envelope_limits(box, mu);
    EnvelopeReport rep;
    for (const auto& r : records) {
        if (r.failed || !(r.T < limits.T_bar)) continue;
        ++rep.checked;
        if (r.deviation > robust_envelope(r.T, box, mu).bound + 1e-9) ++rep.violations;
    }
    for (const auto& b : bin_envelope(records, n_bins, limits.T_L)) {
        const double bound = robust_envelope(b.T_mid, box, mu).bound;
        const double ratio =
            b.count == 0 ? std::numeric_limits<double>::quiet_NaN() : b.max_dev / bound;
        rep.bins.push_back({b, bound, ratio});
    }
    return rep;
}

}  // namespace bioctl
