#pragma once

#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "bioctl/impulsim.hpp"
#include "bioctl/mcharness.hpp"

namespace bioctl {

/// 17 significant digits, '.' separator, locale independent.
std::string format_double(double v);

/// Minimal CSV emitter: header on construction, one '\n'-terminated row per
/// call. Fields are not quoted; callers only pass numbers and identifiers.
class CsvWriter {
public:
    CsvWriter(std::ostream& os, std::initializer_list<const char*> header);

    class Row {
    public:
        explicit Row(std::ostream& os) : os_(os) {}
        Row(const Row&) = delete;
        Row& operator=(const Row&) = delete;
        ~Row();
        Row& operator<<(double v);
        Row& operator<<(std::int64_t v);
        Row& operator<<(std::uint64_t v);
        Row& operator<<(int v);
        Row& operator<<(const std::string& v);

    private:
        void sep();
        std::ostream& os_;
        bool first_ = true;
    };

    Row row() { return Row(os_); }

private:
    std::ostream& os_;
};

/// Columns: t, x, y, is_impulse
void write_trajectory_csv(std::ostream& os, const Trajectory& tr);

/// Columns: trial, T, t0, z0, Pi, T1, deviation, engine, failed
void write_records_csv(std::ostream& os, std::span<const TrialRecord> records);
std::vector<TrialRecord> read_records_csv(std::istream& is);

/// Columns: bin_mid, max_dev, min_dev, bound, count
void write_envelope_csv(std::ostream& os, const EnvelopeReport& rep);

}  // namespace bioctl
