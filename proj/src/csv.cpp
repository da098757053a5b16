#include "bioctl/csv.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "bioctl/errors.hpp"

namespace bioctl {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(std::ostream& os, std::initializer_list<const char*> header) : os_(os) {
    bool first = true;
    for (const char* h : header) {
        if (!first) os_ << ',';
        os_ << h;
        first = false;
    }
    os_ << '\n';
}

CsvWriter::Row::~Row() { os_ << '\n'; }

void CsvWriter::Row::sep() {
    if (!first_) os_ << ',';
    first_ = false;
}

CsvWriter::Row& CsvWriter::Row::operator<<(double v) {
    sep();
    os_ << format_double(v);
    return *this;
}

CsvWriter::Row& CsvWriter::Row::operator<<(std::int64_t v) {
    sep();
    os_ << v;
    return *this;
}

CsvWriter::Row& CsvWriter::Row::operator<<(std::uint64_t v) {
    sep();
    os_ << v;
    return *this;
}

CsvWriter::Row& CsvWriter::Row::operator<<(int v) {
    sep();
    os_ << v;
    return *this;
}

CsvWriter::Row& CsvWriter::Row::operator<<(const std::string& v) {
    sep();
    os_ << v;
    return *this;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& tr) {
    CsvWriter w(os, {"t", "x", "y", "is_impulse"});
    for (const auto& s : tr.samples) w.row() << s.t << s.x << s.y << (s.is_impulse ? 1 : 0);
}

void write_records_csv(std::ostream& os, std::span<const TrialRecord> records) {
    CsvWriter w(os, {"trial", "T", "t0", "z0", "Pi", "T1", "deviation", "engine", "failed"});
    for (const auto& r : records) {
        w.row() << r.trial_index << r.T << r.t0 << r.z0 << r.Pi << r.T1 << r.deviation
                << to_string(r.engine) << (r.failed ? 1 : 0);
    }
}

namespace {

double parse_number(const std::string& s) {
    if (s == "nan") return std::nan("");
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw ConfigError("bad number '" + s + "' in records CSV");
    return v;
}

}  // namespace

std::vector<TrialRecord> read_records_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line.rfind("trial,T,t0,z0,Pi,T1,deviation", 0) != 0) {
        throw ConfigError("records CSV lacks the expected header");
    }
    std::vector<TrialRecord> out;
    long lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) f.push_back(cell);
        if (f.size() != 9) {
            throw ConfigError("records CSV line " + std::to_string(lineno) + " has " +
                              std::to_string(f.size()) + " fields, expected 9");
        }
        try {
            TrialRecord r{};
            r.trial_index = std::stoull(f[0]);
            r.T = parse_number(f[1]);
            r.t0 = parse_number(f[2]);
            r.z0 = parse_number(f[3]);
            r.Pi = parse_number(f[4]);
            r.T1 = parse_number(f[5]);
            r.deviation = parse_number(f[6]);
            r.engine = parse_engine(f[7]);
            r.failed = f[8] == "1";
            out.push_back(r);
        } catch (const std::logic_error&) {
            throw ConfigError("records CSV line " + std::to_string(lineno) + " is malformed");
        }
    }
    return out;
}

void write_envelope_csv(std::ostream& os, const EnvelopeReport& rep) {
    CsvWriter w(os, {"bin_mid", "max_dev", "min_dev", "bound", "count"});
    for (const auto& b : rep.bins) {
        w.row() << b.bin.T_mid << b.bin.max_dev << b.bin.min_dev << b.bound << b.bin.count;
    }
}

}  // namespace bioctl
