#include "bioctl/config.hpp"

#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include "bioctl/errors.hpp"
#include "json.hpp"

namespace bioctl {
namespace {

using nlohmann::json;

void expect_object(const json& j, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
}

void reject_unknown(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& item : j.items()) {
        if (ok.count(item.key()) == 0) throw ConfigError("unknown key '" + item.key() + "' in " + where);
    }
}

double number(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) throw ConfigError(where + " is missing '" + key + "'");
    const auto& v = j.at(key);
    if (!v.is_number()) throw ConfigError(where + "." + key + " must be a number");
    return v.get<double>();
}

std::optional<double> opt_number(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) return std::nullopt;
    return number(j, key, where);
}

std::uint64_t unsigned_int(const json& j, const char* key, const std::string& where) {
    const auto& v = j.at(key);
    if (!v.is_number_unsigned()) throw ConfigError(where + "." + key + " must be a non-negative integer");
    return v.get<std::uint64_t>();
}

std::string type_tag(const json& j, const std::string& where) {
    expect_object(j, where);
    if (!j.contains("type") || !j.at("type").is_string()) {
        throw ConfigError(where + " needs a string 'type'");
    }
    return j.at("type").get<std::string>();
}

GrowthLaw parse_growth(const json& j) {
    const std::string w = "kernels.growth";
    const auto t = type_tag(j, w);
    if (t == "linear") {
        reject_unknown(j, w, {"type", "r"});
        return LinearGrowth{number(j, "r", w)};
    }
    if (t == "logistic") {
        reject_unknown(j, w, {"type", "r", "K"});
        return LogisticGrowth{number(j, "r", w), number(j, "K", w)};
    }
    if (t == "allee") {
        reject_unknown(j, w, {"type", "r", "A", "K"});
        return AlleeGrowth{number(j, "r", w), number(j, "A", w), number(j, "K", w)};
    }
    throw ConfigError(w + ".type '" + t + "' is not one of linear, logistic, allee");
}

FunctionalResponse parse_response(const json& j, const std::string& w) {
    const auto t = type_tag(j, w);
    if (t == "holling1") {
        reject_unknown(j, w, {"type", "lambda"});
        return HollingI{number(j, "lambda", w)};
    }
    if (t == "holling2") {
        reject_unknown(j, w, {"type", "lambda", "a"});
        return HollingII{number(j, "lambda", w), number(j, "a", w)};
    }
    if (t == "holling4") {
        reject_unknown(j, w, {"type", "lambda", "a", "b"});
        return HollingIV{number(j, "lambda", w), number(j, "a", w), number(j, "b", w)};
    }
    throw ConfigError(w + ".type '" + t + "' is not one of holling1, holling2, holling4");
}

KernelSet parse_kernels(const json& j) {
    expect_object(j, "kernels");
    reject_unknown(j, "kernels", {"growth", "response", "numerical", "m"});
    for (const char* key : {"growth", "response", "numerical"}) {
        if (!j.contains(key)) throw ConfigError(std::string("kernels is missing '") + key + "'");
    }
    KernelSet k{parse_growth(j.at("growth")), parse_response(j.at("response"), "kernels.response"),
                ProportionalNumerical{}, number(j, "m", "kernels")};

    const auto& nj = j.at("numerical");
    const std::string w = "kernels.numerical";
    const auto t = type_tag(nj, w);
    if (t != "proportional") throw ConfigError(w + ".type '" + t + "' is not 'proportional'");
    reject_unknown(nj, w, {"type", "e", "response"});
    k.numerical.e = number(nj, "e", w);
    k.numerical.response = nj.contains("response") ? parse_response(nj.at("response"), w + ".response")
                                                   : k.response;
    try {
        validate_parameters(k);
    } catch (const DomainError& e) {
        throw ConfigError(std::string("kernels: ") + e.what());
    }
    return k;
}

std::string position(const std::string& text, std::size_t byte) {
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

ScenarioConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("malformed JSON at " + position(text, e.byte) + ": " + e.what());
    }
    expect_object(j, "config");
    reject_unknown(j, "config", {"kernels", "program", "eil", "comparison", "box", "sim", "mc"});
    if (!j.contains("kernels")) throw ConfigError("config is missing 'kernels'");
    if (!j.contains("program")) throw ConfigError("config is missing 'program'");

    ScenarioConfig cfg{parse_kernels(j.at("kernels")), {}, number(j, "eil", "config"), Comparison::Local, {}, {}, {}};
    if (!(cfg.eil > 0.0)) throw ConfigError("config.eil must be > 0");

    const auto& pj = j.at("program");
    expect_object(pj, "program");
    reject_unknown(pj, "program", {"mu", "T"});
    cfg.program = {number(pj, "mu", "program"), number(pj, "T", "program")};
    if (!(cfg.program.mu > 0.0) || !(cfg.program.T > 0.0)) throw ConfigError("program.mu and program.T must be > 0");

    if (j.contains("comparison")) {
        const auto& c = j.at("comparison");
        if (c == "local") {
            cfg.comparison = Comparison::Local;
        } else if (c == "global") {
            cfg.comparison = Comparison::Global;
        } else {
            throw ConfigError("config.comparison must be \"local\" or \"global\"");
        }
    }

    if (j.contains("box")) {
        const auto& bj = j.at("box");
        expect_object(bj, "box");
        reject_unknown(bj, "box", {"z0_lo", "z0_hi", "sigma_lo", "sigma_hi", "m_lo", "m_hi"});
        BoxSpec b{number(bj, "z0_lo", "box"), number(bj, "z0_hi", "box"), opt_number(bj, "sigma_lo", "box"),
                  opt_number(bj, "sigma_hi", "box"), opt_number(bj, "m_lo", "box"), opt_number(bj, "m_hi", "box")};
        if (!(b.z0_lo > 0.0) || !(b.z0_hi >= b.z0_lo)) throw ConfigError("box needs 0 < z0_lo <= z0_hi");
        if (b.sigma_lo.has_value() != b.sigma_hi.has_value() || b.m_lo.has_value() != b.m_hi.has_value()) {
            throw ConfigError("box bounds must be given in lo/hi pairs");
        }
        cfg.box = b;
    }

    if (j.contains("sim")) {
        const auto& sj = j.at("sim");
        expect_object(sj, "sim");
        reject_unknown(sj, "sim", {"rtol", "atol", "max_step", "t_end", "crossing_tol"});
        if (auto v = opt_number(sj, "rtol", "sim")) cfg.sim.rtol = *v;
        if (auto v = opt_number(sj, "atol", "sim")) cfg.sim.atol = *v;
        if (auto v = opt_number(sj, "crossing_tol", "sim")) cfg.sim.crossing_tol = *v;
        cfg.sim.max_step = opt_number(sj, "max_step", "sim");
        cfg.sim.t_end = opt_number(sj, "t_end", "sim");
        if (!(cfg.sim.rtol > 0.0 && cfg.sim.rtol <= 1e-3) || !(cfg.sim.atol > 0.0) || !(cfg.sim.crossing_tol > 0.0)) {
            throw ConfigError("sim tolerances out of range (0 < rtol <= 1e-3, atol > 0, crossing_tol > 0)");
        }
    }

    if (j.contains("mc")) {
        const auto& mj = j.at("mc");
        expect_object(mj, "mc");
        reject_unknown(mj, "mc", {"n_trials", "seed", "engine", "bins"});
        if (mj.contains("n_trials")) cfg.mc.n_trials = unsigned_int(mj, "n_trials", "mc");
        if (mj.contains("seed")) cfg.mc.seed = unsigned_int(mj, "seed", "mc");
        if (mj.contains("bins")) cfg.mc.bins = static_cast<int>(unsigned_int(mj, "bins", "mc"));
        if (mj.contains("engine")) {
            if (!mj.at("engine").is_string()) throw ConfigError("mc.engine must be a string");
            try {
                cfg.mc.engine = parse_engine(mj.at("engine").get<std::string>());
            } catch (const DomainError& e) {
                throw ConfigError(std::string("mc: ") + e.what());
            }
        }
    }
    return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

UncertaintyBox resolve_box(const BoxSpec& spec, double sigma, double m) {
    return {spec.z0_lo,
            spec.z0_hi,
            spec.sigma_lo.value_or(sigma),
            spec.sigma_hi.value_or(sigma),
            spec.m_lo.value_or(m),
            spec.m_hi.value_or(m)};
}

}  // namespace bioctl
