#include "bioctl/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "CLI11.hpp"
#include "bioctl/config.hpp"
#include "bioctl/csv.hpp"
#include "bioctl/errors.hpp"
#include "bioctl/impulsim.hpp"
#include "bioctl/kernels.hpp"
#include "bioctl/mcharness.hpp"
#include "bioctl/orbit.hpp"
#include "bioctl/planner.hpp"
#include "bioctl/svg.hpp"

namespace bioctl {
namespace {

namespace fs = std::filesystem;

constexpr int kSweepPoints = 400;
constexpr int kCurvePoints = 200;
constexpr std::uint64_t kPlotTrials = 20000;
constexpr int kDefaultBins = 50;

struct Flags {
    std::string config;
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    std::uint64_t trials = 0;
    int bins = 0;
    std::string engine;
    double t0 = 0.0;
    double x0 = 0.0;
    double z0 = 0.0;
    double period = 0.0;
    long n_max = 10;
    std::string records;

    CLI::Option* seed_opt = nullptr;
    CLI::Option* trials_opt = nullptr;
    CLI::Option* bins_opt = nullptr;
    CLI::Option* engine_opt = nullptr;
    CLI::Option* x0_opt = nullptr;
    CLI::Option* z0_opt = nullptr;
    CLI::Option* period_opt = nullptr;
    CLI::Option* records_opt = nullptr;
};

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void kv(std::ostream& out, const std::string& key, double v) { out << key << '=' << num(v) << '\n'; }
void kv(std::ostream& out, const std::string& key, const std::string& v) { out << key << '=' << v << '\n'; }

/// Everything the subcommands derive from a config file before doing work.
struct Scenario {
    ScenarioConfig cfg;
    KernelReport report;
    double sigma;
};

Scenario load_scenario(const Flags& f) {
    Scenario s{load_config(f.config), {}, 0.0};
    if (f.period_opt->count() > 0) s.cfg.program.T = f.period;
    validate_program(s.cfg.program);
    s.report = validate_h1(s.cfg.kernels, default_scan_ceiling(s.cfg.kernels));
    s.sigma = s.cfg.comparison == Comparison::Local ? s.report.S_l : s.report.S;
    return s;
}

UncertaintyBox scenario_box(const Scenario& s) {
    if (!s.cfg.box) throw ConfigError("this command needs a 'box' section in the config");
    return resolve_box(*s.cfg.box, s.sigma, s.cfg.kernels.m);
}

fs::path output_path(const Flags& f, const char* name) {
    fs::create_directories(f.out_dir);
    return fs::path(f.out_dir) / name;
}

std::ofstream open_out(const fs::path& p) {
    std::ofstream os(p, std::ios::binary | std::ios::trunc);
    if (!os) throw ConfigError("cannot write '" + p.string() + "'");
    return os;
}

unsigned threads_from_env() {
    const char* env = std::getenv("BIOCTL_THREADS");
    if (env == nullptr || *env == '\0') return 0;
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1) throw ConfigError("BIOCTL_THREADS must be a positive integer");
    return static_cast<unsigned>(v);
}

const char* const kClauseNames[4] = {"i", "ii", "iii", "iv"};

int cmd_validate(const Flags& f, std::ostream& out) {
    const auto cfg = load_config(f.config);
    const auto rep = validate_h1(cfg.kernels, default_scan_ceiling(cfg.kernels));
    kv(out, "growth", growth_name(cfg.kernels.growth));
    kv(out, "response", response_name(cfg.kernels.response));
    kv(out, "fp0", rep.fp0);
    kv(out, "gp0", rep.gp0);
    kv(out, "S_l", rep.S_l);
    kv(out, "S", rep.S);
    kv(out, "s_argmax", rep.s_argmax);
    for (int i = 0; i < 4; ++i) {
        kv(out, std::string("h1_") + kClauseNames[i], rep.h1_ok[i] ? "pass" : "fail");
    }
    for (int i = 0; i < 4; ++i) {
        if (!rep.h1_ok[i]) {
            kv(out, "failed_clause", kClauseNames[i]);
            kv(out, "reason", rep.h1_notes[i]);
        }
    }
    kv(out, "all_ok", rep.all_ok() ? "true" : "false");
    return rep.all_ok() ? kExitOk : kExitDomain;
}

int cmd_stability(const Flags& f, std::ostream& out) {
    const auto s = load_scenario(f);
    const auto& prog = s.cfg.program;
    const auto verdict = stability_verdict(s.report, prog);
    const auto mult = floquet_multiplier(s.report.fp0, s.report.gp0, s.cfg.kernels.m, prog);
    const PestFreeOrbit orbit(prog, s.cfg.kernels.m);
    kv(out, "verdict", to_string(verdict.verdict));
    kv(out, "mu", prog.mu);
    kv(out, "T", prog.T);
    kv(out, "S_l", s.report.S_l);
    kv(out, "S", s.report.S);
    kv(out, "boundary", verdict.boundary ? "true" : "false");
    kv(out, "floquet_pest", mult.pest);
    kv(out, "floquet_predator", mult.predator);
    kv(out, "orbit_peak", orbit.peak());
    kv(out, "orbit_floor", orbit.floor());
    kv(out, "note", verdict.note);
    return kExitOk;
}

int cmd_simulate(const Flags& f, std::ostream& out) {
    const auto s = load_scenario(f);
    if (f.x0_opt->count() == 0) throw ConfigError("simulate needs --x0");
    const PestFreeOrbit orbit(s.cfg.program, s.cfg.kernels.m);
    const auto tr = simulate(s.cfg.kernels, s.cfg.program, f.x0, initial_predators(YPolicy::at_orbit(), orbit, f.t0),
                             f.t0, s.cfg.sim, s.cfg.eil);
    const auto path = output_path(f, "trajectory.csv");
    auto os = open_out(path);
    write_trajectory_csv(os, tr);
    kv(out, "samples", static_cast<double>(tr.samples.size()));
    kv(out, "impulses", static_cast<double>(tr.impulses.size()));
    kv(out, "crossings", static_cast<double>(tr.events.size()));
    kv(out, "x_end", tr.samples.back().x);
    kv(out, "y_end", tr.samples.back().y);
    kv(out, "csv", path.string());
    return kExitOk;
}

int cmd_damage(const Flags& f, std::ostream& out) {
    const auto s = load_scenario(f);
    if (f.x0_opt->count() == 0) throw ConfigError("damage needs --x0");
    const auto& k = s.cfg.kernels;
    const auto& prog = s.cfg.program;
    const auto full = damage_time_full(k, prog, f.x0, s.cfg.eil, f.t0, YPolicy::at_orbit(), s.cfg.sim);
    kv(out, "Pi_full", full.pi);
    kv(out, "t_f", full.t_f);

    const double z1 = z_from_x_local(f.x0, s.cfg.eil, k.m, s.report.gp0);
    kv(out, "z1", z1);
    if (prog.mu > s.report.S_l) {
        kv(out, "Pi_z1", pi_of_t0(z1, {s.report.S_l, k.m, prog.mu, prog.T}, f.t0));
    } else {
        kv(out, "Pi_z1", "nan");
    }

    const double z2 = z_from_x_global(f.x0, s.cfg.eil, k.m, k.response);
    kv(out, "z2", z2);
    if (prog.mu > s.report.S) {
        const ZParams zp{s.report.S, k.m, prog.mu, prog.T};
        kv(out, "Pi_z2", pi_of_t0(z2, zp, f.t0));
        const double T_hat = that_solve(prog.mu, s.report.S, k.m);
        kv(out, "T_hat_global", T_hat);
        if (prog.T < T_hat) {
            kv(out, "Pi_z2_worst", worst_t0(z2, zp).Pi_max);
        } else {
            kv(out, "Pi_z2_worst", "nan");
        }
    } else {
        kv(out, "Pi_z2", "nan");
        kv(out, "note", "mu <= S: no global comparison bound");
    }
    return kExitOk;
}

double scenario_z0(const Flags& f, const Scenario& s) {
    if (f.z0_opt->count() > 0) return f.z0;
    if (f.x0_opt->count() > 0) {
        const auto& k = s.cfg.kernels;
        return s.cfg.comparison == Comparison::Local ? z_from_x_local(f.x0, s.cfg.eil, k.m, s.report.gp0)
                                                     : z_from_x_global(f.x0, s.cfg.eil, k.m, k.response);
    }
    throw ConfigError("this command needs --z0 or --x0");
}

int cmd_optimize(const Flags& f, std::ostream& out) {
    const auto s = load_scenario(f);
    const double z0 = scenario_z0(f, s);
    const double m = s.cfg.kernels.m;
    const double mu = s.cfg.program.mu;
    const auto opt = optimal_periods(z0, mu, s.sigma, m, f.n_max);
    kv(out, "z0", z0);
    kv(out, "sigma", s.sigma);
    kv(out, "T1", opt.T1);
    kv(out, "T_hat", opt.T_hat);
    kv(out, "n0", static_cast<double>(opt.n0));
    std::string list;
    for (double T : opt.periods) list += (list.empty() ? "" : " ") + num(T);
    kv(out, "periods", list);

    const double upper = std::isinf(opt.T_hat) ? 2.0 * opt.T1 : opt.T_hat;
    const auto path = output_path(f, "pi_sweep.csv");
    auto os = open_out(path);
    CsvWriter w(os, {"T", "Pi_max", "T1", "deviation"});
    for (int i = 1; i <= kSweepPoints; ++i) {
        const double T = upper * i / (kSweepPoints + 1);
        const auto rep = worst_t0(z0, {s.sigma, m, mu, T});
        w.row() << T << rep.Pi_max << rep.T1 << rep.deviation;
    }
    kv(out, "csv", path.string());
    return kExitOk;
}

int cmd_robustness(const Flags& f, std::ostream& out) {
    const auto s = load_scenario(f);
    const auto box = scenario_box(s);
    const double mu = s.cfg.program.mu;
    const auto lim = envelope_limits(box, mu);
    kv(out, "T_L", lim.T_L);
    kv(out, "T_bar", lim.T_bar);
    const double upper = std::isinf(lim.T_bar) ? 2.0 * std::max(lim.T_L, 1.0) : lim.T_bar;
    const auto path = output_path(f, "robustness.csv");
    auto os = open_out(path);
    CsvWriter w(os, {"T", "bound", "T_L_flag"});
    for (int i = 1; i <= kCurvePoints; ++i) {
        const double T = upper * i / (kCurvePoints + 1);
        const auto b = robust_envelope(T, box, mu);
        w.row() << T << b.bound << (b.closed_form ? 1 : 0);
    }
    if (f.period_opt->count() > 0) {
        const auto b = robust_envelope(f.period, box, mu);
        kv(out, "bound", b.bound);
        kv(out, "closed_form", b.closed_form ? "true" : "false");
    }
    kv(out, "csv", path.string());
    return kExitOk;
}

McConfig mc_config(const Flags& f, const Scenario& s, std::uint64_t default_trials) {
    McConfig mc;
    mc.box = scenario_box(s);
    mc.mu = s.cfg.program.mu;
    mc.n_trials = f.trials_opt->count() > 0 ? f.trials : s.cfg.mc.n_trials.value_or(default_trials);
    mc.seed = f.seed_opt->count() > 0 ? f.seed : s.cfg.mc.seed.value_or(0);
    mc.engine = f.engine_opt->count() > 0 ? parse_engine(f.engine) : s.cfg.mc.engine.value_or(Engine::ClosedForm);
    mc.threads = threads_from_env();
    mc.full = FullModel{s.cfg.kernels, s.cfg.eil, s.cfg.sim};
    return mc;
}

int cmd_montecarlo(const Flags& f, std::ostream& out) {
    const auto s = load_scenario(f);
    const auto mc = mc_config(f, s, 200000);
    const int bins = f.bins_opt->count() > 0 ? f.bins : s.cfg.mc.bins.value_or(kDefaultBins);
    const auto records = run_mc(mc);
    const auto rep = verify_envelope(records, mc.box, mc.mu, bins);

    const auto rec_path = output_path(f, "mc_records.csv");
    {
        auto os = open_out(rec_path);
        write_records_csv(os, records);
    }
    const auto env_path = output_path(f, "mc_envelope.csv");
    {
        auto os = open_out(env_path);
        write_envelope_csv(os, rep);
    }
    std::uint64_t failed = 0;
    for (const auto& r : records) failed += r.failed ? 1 : 0;
    kv(out, "trials", static_cast<double>(records.size()));
    kv(out, "engine", to_string(mc.engine));
    kv(out, "seed", std::to_string(mc.seed));
    kv(out, "T_L", mc_period_ceiling(mc));
    kv(out, "failed", static_cast<double>(failed));
    kv(out, "violations", static_cast<double>(rep.violations));
    kv(out, "records_csv", rec_path.string());
    kv(out, "envelope_csv", env_path.string());
    return kExitOk;
}

int cmd_plot(const Flags& f, std::ostream& out) {
    const auto s = load_scenario(f);
    const auto mc = mc_config(f, s, kPlotTrials);
    std::vector<TrialRecord> records;
    if (f.records_opt->count() > 0) {
        std::ifstream in(f.records, std::ios::binary);
        if (!in) throw ConfigError("cannot read records file '" + f.records + "'");
        records = read_records_csv(in);
    } else {
        records = run_mc(mc);
    }
    const double T_L = mc_period_ceiling(mc);
    std::vector<std::pair<double, double>> curve;
    for (int i = 1; i <= kCurvePoints; ++i) {
        const double T = T_L * i / (kCurvePoints + 1);
        curve.emplace_back(T, robust_envelope(T, mc.box, mc.mu).bound);
    }
    ScatterPlotSpec spec;
    spec.T_max = T_L;
    const auto path = output_path(f, "deviation.svg");
    auto os = open_out(path);
    write_deviation_svg(os, records, curve, spec);
    kv(out, "points", static_cast<double>(records.size()));
    kv(out, "svg", path.string());
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Impulsive biological control: stability, damage time and robust release periods", "bioctl"};
    app.require_subcommand(1);
    Flags f;

    auto add_common = [&f](CLI::App* sub) {
        sub->add_option("--config", f.config, "scenario JSON")->required()->check(CLI::ExistingFile);
        f.period_opt = sub->add_option("--period", f.period, "override the release period T");
    };

    auto* validate = app.add_subcommand("validate", "check the kernel hypotheses and print S, S_l");
    validate->add_option("--config", f.config, "scenario JSON")->required();
    auto* stability = app.add_subcommand("stability", "stability verdict of the pest-free orbit");
    auto* simulate_cmd = app.add_subcommand("simulate", "integrate the impulsive system, write trajectory.csv");
    auto* damage = app.add_subcommand("damage", "damage time of an invasion, full model and comparison bounds");
    auto* optimize = app.add_subcommand("optimize", "optimal release periods for an invasion size");
    auto* robustness = app.add_subcommand("robustness", "worst-case deviation curve over the uncertainty box");
    auto* montecarlo = app.add_subcommand("montecarlo", "random (T, t0, z0) trials and envelope check");
    auto* plot = app.add_subcommand("plot", "deviation-vs-T scatter with the bound overlay (SVG)");

    for (auto* sub : {stability, simulate_cmd, damage, optimize, robustness, montecarlo, plot}) {
        add_common(sub);
        sub->add_option("--out", f.out_dir, "output directory");
    }
    // Each subcommand owns its Option objects; remember the ones of the
    // subcommand that actually parsed.
    struct Opts {
        CLI::Option *period, *x0, *z0, *seed, *trials, *bins, *engine, *records;
    };
    std::vector<std::pair<CLI::App*, Opts>> per_sub;
    for (auto* sub : {stability, simulate_cmd, damage, optimize, robustness, montecarlo, plot}) {
        Opts o{};
        o.period = sub->get_option("--period");
        o.x0 = sub->add_option("--x0", f.x0, "invasion pest density");
        o.z0 = sub->add_option("--z0", f.z0, "invasion level in comparison coordinates");
        sub->add_option("--t0", f.t0, "invasion time");
        o.seed = sub->add_option("--seed", f.seed, "Monte Carlo seed");
        o.trials = sub->add_option("--trials", f.trials, "Monte Carlo trial count");
        o.bins = sub->add_option("--bins", f.bins, "envelope bins");
        o.engine = sub->add_option("--engine", f.engine, "closed | zsim | full")
                       ->check(CLI::IsMember({"closed", "zsim", "full"}));
        o.records = sub->add_option("--records", f.records, "records CSV to plot instead of running trials");
        sub->add_option("--nmax", f.n_max, "largest n for T1/n");
        per_sub.emplace_back(sub, o);
    }

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e, out, err);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    for (auto& [sub, o] : per_sub) {
        if (sub->parsed()) {
            f.period_opt = o.period;
            f.x0_opt = o.x0;
            f.z0_opt = o.z0;
            f.seed_opt = o.seed;
            f.trials_opt = o.trials;
            f.bins_opt = o.bins;
            f.engine_opt = o.engine;
            f.records_opt = o.records;
        }
    }

    try {
        if (validate->parsed()) return cmd_validate(f, out);
        if (stability->parsed()) return cmd_stability(f, out);
        if (simulate_cmd->parsed()) return cmd_simulate(f, out);
        if (damage->parsed()) return cmd_damage(f, out);
        if (optimize->parsed()) return cmd_optimize(f, out);
        if (robustness->parsed()) return cmd_robustness(f, out);
        if (montecarlo->parsed()) return cmd_montecarlo(f, out);
        if (plot->parsed()) return cmd_plot(f, out);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitDomain;
    }
    return kExitUsage;
}

}  // namespace bioctl
