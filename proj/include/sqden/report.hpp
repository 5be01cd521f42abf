#pragma once

#include "sqden/primes.hpp"
#include "sqden/search.hpp"

#include <iosfwd>
#include <string>

namespace sqden {

/// Data behind the cumulative-count figure: one row per approximation plus
/// endpoints at b = 1 and b = B, against both expectation curves.
struct FigurePoint {
    mpz_class b;
    std::uint64_t observed = 0;       // cumulative hit count at this b
    double curve_simple = 0;          // 1 + 2 ln b
    double curve_full = 0;            // 2c (gamma + ln b)
    bool operator==(const FigurePoint&) const = default;
};

struct FigureSeries {
    std::vector<FigurePoint> points;  // sorted by b, observed non-decreasing
    bool operator==(const FigureSeries&) const = default;
};

FigureSeries build_figure_series(const SearchReport& report, const SearchConfig& cfg);

enum class Format { Csv, Json };

/// Fixed-precision decimal rendering of an exact rational (deterministic).
std::string decimal_string(const mpq_class& value, int significant_digits = 12);

std::string to_json_string(const SearchReport& report);
std::string to_json_string(const FigureSeries& series);
std::string to_json_string(const ConjectureScan& scan);
SearchReport search_report_from_json(const std::string& text);
FigureSeries figure_series_from_json(const std::string& text);
ConjectureScan conjecture_scan_from_json(const std::string& text);

void emit_csv(const SearchReport& report, std::ostream& os);
void emit_csv(const FigureSeries& series, std::ostream& os);
void emit_csv(const ConjectureScan& scan, std::ostream& os);

/// Writes in the requested format to the path, or to standard output when the
/// path is empty. I/O failures are reported with the path in the message.
void emit(const SearchReport& report, Format format, const std::string& path);
void emit(const FigureSeries& series, Format format, const std::string& path);
void emit(const ConjectureScan& scan, Format format, const std::string& path);

}  // namespace sqden
