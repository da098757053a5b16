#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "bioctl/cli.hpp"
#include "bioctl/config.hpp"
#include "bioctl/csv.hpp"
#include "bioctl/errors.hpp"
#include "bioctl/impulsim.hpp"
#include "bioctl/planner.hpp"

namespace fs = std::filesystem;
using namespace bioctl;

namespace {

const char* kReference = R"({
  "kernels": {
    "growth": {"type": "logistic", "r": 1.0, "K": 10.0},
    "response": {"type": "holling2", "lambda": 1.0, "a": 0.5},
    "numerical": {"type": "proportional", "e": 1.0},
    "m": 1.0
  },
  "program": {"mu": 2.0, "T": 0.8},
  "eil": 0.1,
  "box": {"z0_lo": 1.0, "z0_hi": 5.0}
})";

struct Run {
    int code;
    std::string out;
    std::string err;
    std::map<std::string, std::string> kv;
};

class Sandbox {
public:
    Sandbox() {
        dir_ = fs::temp_directory_path() / ("bioctl_cli_" + std::to_string(counter_++) + "_" +
                                            std::to_string(reinterpret_cast<std::uintptr_t>(this)));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    ~Sandbox() { fs::remove_all(dir_); }

    std::string write(const std::string& name, const std::string& text) const {
        const auto p = dir_ / name;
        std::ofstream(p, std::ios::binary) << text;
        return p.string();
    }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }

private:
    static inline int counter_ = 0;
    fs::path dir_;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "bioctl");
    std::ostringstream out, err;
    Run r{run_cli(args, out, err), out.str(), err.str(), {}};
    std::istringstream lines(r.out);
    std::string line;
    while (std::getline(lines, line)) {
        const auto eq = line.find('=');
        if (eq != std::string::npos) r.kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return r;
}

std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string str(const Run& r, const std::string& key) {
    const auto it = r.kv.find(key);
    return it == r.kv.end() ? "<missing>" : it->second;
}

double num(const Run& r, const std::string& key) {
    REQUIRE(r.kv.count(key) == 1);
    return std::stod(r.kv.at(key));
}

}  // namespace

TEST_CASE("validate") {
    Sandbox sb;
    const auto ok = run({"validate", "--config", sb.write("ref.json", kReference)});
    CHECK(ok.code == 0);
    CHECK(num(ok, "S") == doctest::Approx(1.8));
    CHECK(num(ok, "S_l") == doctest::Approx(1.0));

    std::string lin = kReference;
    lin.replace(lin.find(R"({"type": "logistic", "r": 1.0, "K": 10.0})"), 41, R"({"type": "linear", "r": 1.0})");
    const auto bad = run({"validate", "--config", sb.write("lin.json", lin)});
    CHECK(bad.code == 1);
    CHECK(str(bad, "h1_iii") == "fail");
    CHECK(str(bad, "failed_clause") == "iii");

    const auto trunc = run({"validate", "--config", sb.write("trunc.json", std::string(kReference).substr(0, 120))});
    CHECK(trunc.code == 2);
    CHECK(trunc.err.find("line") != std::string::npos);
    CHECK(trunc.err.find("column") != std::string::npos);

    const auto missing = run({"validate", "--config", sb.path("nope.json")});
    CHECK(missing.code == 2);
}

TEST_CASE("config schema") {
    CHECK_NOTHROW(parse_config(kReference));
    std::string extra = kReference;
    extra.insert(extra.rfind('}'), R"(, "colour": 3)");
    CHECK_THROWS_AS(parse_config(extra), ConfigError);

    std::string nested = kReference;
    nested.replace(nested.find(R"("K": 10.0)"), 9, R"("K": 10.0, "Q": 1)");
    CHECK_THROWS_AS(parse_config(nested), ConfigError);

    std::string neg = kReference;
    neg.replace(neg.find(R"("eil": 0.1)"), 10, R"("eil": -0.1)");
    CHECK_THROWS_AS(parse_config(neg), ConfigError);

    try {
        parse_config("{\n  \"kernels\": ,\n}");
        FAIL("expected a parse error");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }

    const auto cfg = parse_config(kReference);
    CHECK(cfg.comparison == Comparison::Local);
    REQUIRE(cfg.box.has_value());
    const auto box = resolve_box(*cfg.box, 1.0, 1.0);
    CHECK(box.sigma_lo == 1.0);
    CHECK(box.m_hi == 1.0);
}

TEST_CASE("stability") {
    Sandbox sb;
    const auto cfg = sb.write("ref.json", kReference);
    const auto r = run({"stability", "--config", cfg});
    CHECK(r.code == 0);
    CHECK(str(r, "verdict") == "GAS");
    CHECK(num(r, "floquet_pest") == doctest::Approx(std::exp(0.8 * (1.0 - 2.0))));
    const auto las = run({"stability", "--config", cfg, "--period", "0.5"});
    CHECK(str(las, "verdict") == "GAS");
}

TEST_CASE("optimize is a thin adapter") {
    Sandbox sb;
    const auto cfg = sb.write("ref.json", kReference);
    const auto r = run({"optimize", "--config", cfg, "--z0", "3", "--out", sb.path("o")});
    CHECK(r.code == 0);
    CHECK(num(r, "T1") == doctest::Approx(3.0));
    CHECK(num(r, "n0") == 2);
    CHECK(str(r, "periods").rfind("1 0.75 0.6", 0) == 0);
    const auto direct = optimal_periods(3.0, 2.0, 1.0, 1.0, 10);
    CHECK(num(r, "T_hat") == doctest::Approx(direct.T_hat).epsilon(1e-11));

    const auto csv = slurp(sb.path("o/pi_sweep.csv"));
    CHECK(csv.rfind("T,Pi_max,T1,deviation\n", 0) == 0);
    std::istringstream is(csv);
    std::string line;
    std::getline(is, line);
    std::getline(is, line);
    double T, Pi;
    char comma;
    std::istringstream row(line);
    row >> T >> comma >> Pi;
    CHECK(Pi == worst_t0(3.0, {1.0, 1.0, 2.0, T}).Pi_max);

    const auto from_x = run({"optimize", "--config", cfg, "--x0", "1", "--out", sb.path("o")});
    CHECK(num(from_x, "z0") == doctest::Approx(std::log(10.0)));
}

TEST_CASE("damage") {
    Sandbox sb;
    const auto cfg = sb.write("ref.json", kReference);
    const auto r = run({"damage", "--config", cfg, "--x0", "1", "--period", "0.5"});
    CHECK(r.code == 0);
    const auto direct = damage_time_full(parse_config(kReference).kernels, {2.0, 0.5}, 1.0, 0.1, 0.0,
                                         YPolicy::at_orbit(), SimConfig{});
    CHECK(num(r, "Pi_full") == doctest::Approx(direct.pi).epsilon(1e-11));
    CHECK(num(r, "z2") == doctest::Approx(2.752585).epsilon(1e-6));
    CHECK(num(r, "Pi_full") <= num(r, "Pi_z2"));

    CHECK(run({"damage", "--config", cfg}).code == 2);
    CHECK(run({"damage", "--config", cfg, "--x0", "0.05"}).code == 1);
}

TEST_CASE("simulate, robustness and plot outputs") {
    Sandbox sb;
    const auto cfg = sb.write("ref.json", kReference);
    CHECK(run({"simulate", "--config", cfg, "--x0", "2", "--out", sb.path("o")}).code == 0);
    const auto traj = slurp(sb.path("o/trajectory.csv"));
    CHECK(traj.rfind("t,x,y,is_impulse\n", 0) == 0);
    CHECK(traj.back() == '\n');

    const auto rb = run({"robustness", "--config", cfg, "--period", "0.8", "--out", sb.path("o")});
    CHECK(rb.code == 0);
    CHECK(num(rb, "bound") == doctest::Approx(2.0 * robustness_H(0.8, 1.0)).epsilon(1e-11));
    CHECK(slurp(sb.path("o/robustness.csv")).rfind("T,bound,T_L_flag\n", 0) == 0);

    CHECK(run({"plot", "--config", cfg, "--trials", "500", "--out", sb.path("o")}).code == 0);
    const auto svg = slurp(sb.path("o/deviation.svg"));
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("<polyline") != std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);
}

TEST_CASE("montecarlo determinism and CSV format") {
    Sandbox sb;
    const auto cfg = sb.write("ref.json", kReference);
    const std::vector<std::string> base = {"montecarlo", "--config", cfg, "--trials", "1000", "--seed", "42"};
    auto a = base;
    a.insert(a.end(), {"--out", sb.path("a")});
    auto b = base;
    b.insert(b.end(), {"--out", sb.path("b")});
    CHECK(run(a).code == 0);
    ::setenv("BIOCTL_THREADS", "3", 1);
    CHECK(run(b).code == 0);
    ::unsetenv("BIOCTL_THREADS");
    CHECK(slurp(sb.path("a/mc_records.csv")) == slurp(sb.path("b/mc_records.csv")));
    CHECK(slurp(sb.path("a/mc_envelope.csv")) == slurp(sb.path("b/mc_envelope.csv")));

    const auto rec = slurp(sb.path("a/mc_records.csv"));
    CHECK(rec.rfind("trial,T,t0,z0,Pi,T1,deviation,engine,failed\n", 0) == 0);
    CHECK(std::count(rec.begin(), rec.end(), '\n') == 1001);
    std::istringstream is(rec);
    const auto back = read_records_csv(is);
    REQUIRE(back.size() == 1000);
    CHECK(format_double(back[0].T).size() >= 15);
    CHECK(slurp(sb.path("a/mc_envelope.csv")).rfind("bin_mid,max_dev,min_dev,bound,count\n", 0) == 0);

    ::setenv("BIOCTL_THREADS", "zero", 1);
    CHECK(run(a).code == 2);
    ::unsetenv("BIOCTL_THREADS");
}

TEST_CASE("usage and domain errors") {
    Sandbox sb;
    const auto cfg = sb.write("ref.json", kReference);
    CHECK(run({}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({"montecarlo", "--config", cfg, "--engine", "euler"}).code == 2);
    CHECK(run({"--help"}).code == 0);

    std::string weak = kReference;
    weak.replace(weak.find(R"("mu": 2.0)"), 9, R"("mu": 0.5)");
    const auto wcfg = sb.write("weak.json", weak);
    const auto st = run({"stability", "--config", wcfg});
    CHECK(st.code == 0);
    CHECK(str(st, "verdict") == "Unstable");
    const auto opt = run({"optimize", "--config", wcfg, "--z0", "3", "--out", sb.path("o")});
    CHECK(opt.code == 1);
    CHECK_FALSE(opt.err.empty());
}

TEST_CASE("number formatting") {
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(std::nan("")) == "nan");
}
