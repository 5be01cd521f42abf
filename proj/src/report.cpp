#include "sqden/report.hpp"

#include <json.hpp>
#include <mpfr.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace sqden {

namespace {

using nlohmann::json;

std::string z_str(const mpz_class& z) { return z.get_str(); }
mpz_class z_parse(const json& j) { return mpz_class(j.get<std::string>()); }

std::string q_str(const mpq_class& q) { return q.get_str(); }
mpq_class q_parse(const json& j) {
    mpq_class q(j.get<std::string>());
    q.canonicalize();
    return q;
}

const char* source_name(SourceKind k) {
    return k == SourceKind::Brute ? "brute" : "convergent";
}

json approximation_to_json(const Approximation& a) {
    json j{{"b", z_str(a.b)},       {"a", z_str(a.a)},
           {"alpha", z_str(a.alpha)}, {"source", source_name(a.source)},
           {"quality", q_str(a.quality)}, {"reduced", a.reduced}};
    if (a.source == SourceKind::Convergent) {
        j["conv_index"] = a.conv_index;
        j["P"] = z_str(a.P);
        j["Q"] = z_str(a.Q);
    }
    return j;
}

Approximation approximation_from_json(const json& j) {
    Approximation a;
    a.b = z_parse(j.at("b"));
    a.a = z_parse(j.at("a"));
    a.alpha = z_parse(j.at("alpha"));
    a.source = j.at("source") == "brute" ? SourceKind::Brute : SourceKind::Convergent;
    a.quality = q_parse(j.at("quality"));
    a.reduced = j.at("reduced").get<bool>();
    if (a.source == SourceKind::Convergent) {
        a.conv_index = j.at("conv_index").get<std::size_t>();
        a.P = z_parse(j.at("P"));
        a.Q = z_parse(j.at("Q"));
    }
    return a;
}

json stats_to_json(const ConvergentStats& s) {
    return json{{"index", s.index},
                {"P", z_str(s.P)},
                {"Q", z_str(s.Q)},
                {"alpha_bound", z_str(s.alpha_bound)},
                {"band_hi", z_str(s.band_hi)},
                {"congruences_solved", s.congruences_solved},
                {"roots_in_band", s.roots_in_band},
                {"hits", s.hits},
                {"processed", s.processed},
                {"truncation_seen", s.truncation_seen}};
}

ConvergentStats stats_from_json(const json& j) {
    ConvergentStats s;
    s.index = j.at("index").get<std::size_t>();
    s.P = z_parse(j.at("P"));
    s.Q = z_parse(j.at("Q"));
    s.alpha_bound = z_parse(j.at("alpha_bound"));
    s.band_hi = z_parse(j.at("band_hi"));
    s.congruences_solved = j.at("congruences_solved").get<std::uint64_t>();
    s.roots_in_band = j.at("roots_in_band").get<std::uint64_t>();
    s.hits = j.at("hits").get<std::uint64_t>();
    s.processed = j.at("processed").get<bool>();
    s.truncation_seen = j.at("truncation_seen").get<bool>();
    return s;
}

json report_to_json(const SearchReport& r) {
    json approx = json::array();
    for (const auto& a : r.approximations) approx.push_back(approximation_to_json(a));
    json stats = json::array();
    for (const auto& s : r.convergent_stats) stats.push_back(stats_to_json(s));
    json curve = json::array();
    for (const auto& p : r.expected_curve) {
        curve.push_back(json{{"b", z_str(p.b)}, {"expected", p.expected}});
    }
    return json{{"xi", r.xi},
                {"c", q_str(r.c)},
                {"max_b", z_str(r.max_b)},
                {"brute_cutoff", z_str(r.brute_cutoff)},
                {"approximations", approx},
                {"convergent_stats", stats},
                {"expected_curve", curve},
                {"coverage_limit", z_str(r.coverage_limit)},
                {"bands_cover_max_b", r.bands_cover_max_b},
                {"cf_terminated", r.cf_terminated},
                {"totals",
                 json{{"congruences", r.total_congruences},
                      {"brute_hits", r.brute_hits},
                      {"convergent_hits", r.convergent_hits}}}};
}

json figure_to_json(const FigureSeries& s) {
    json points = json::array();
    for (const auto& p : s.points) {
        points.push_back(json{{"b", z_str(p.b)},
                              {"observed", p.observed},
                              {"curve_simple", p.curve_simple},
                              {"curve_full", p.curve_full}});
    }
    return json{{"points", points}};
}

json prime_hit_to_json(const PrimeApproximation& h) {
    return json{{"Q", z_str(h.Q)},
                {"P", z_str(h.P)},
                {"alpha", z_str(h.alpha)},
                {"p", z_str(h.p)},
                {"a", z_str(h.a)},
                {"conv_index", h.conv_index},
                {"quality", q_str(h.quality)},
                {"alpha_over_lnQ", h.alpha_over_lnQ},
                {"progression_steps", h.progression_steps}};
}

PrimeApproximation prime_hit_from_json(const json& j) {
    PrimeApproximation h;
    h.Q = z_parse(j.at("Q"));
    h.P = z_parse(j.at("P"));
    h.alpha = z_parse(j.at("alpha"));
    h.p = z_parse(j.at("p"));
    h.a = z_parse(j.at("a"));
    h.conv_index = j.at("conv_index").get<std::size_t>();
    h.quality = q_parse(j.at("quality"));
    h.alpha_over_lnQ = j.at("alpha_over_lnQ").get<double>();
    h.progression_steps = j.at("progression_steps").get<std::uint64_t>();
    return h;
}

json scan_to_json(const ConjectureScan& s) {
    json hits = json::array();
    for (const auto& h : s.hits) hits.push_back(prime_hit_to_json(h));
    return json{{"hits", hits},
                {"summary",
                 json{{"convergents_scanned", s.summary.convergents_scanned},
                      {"hits", s.summary.hits},
                      {"max_alpha_over_lnQ", s.summary.max_alpha_over_lnQ},
                      {"mean_alpha_over_lnQ", s.summary.mean_alpha_over_lnQ},
                      {"max_quality", q_str(s.summary.max_quality)},
                      {"mean_quality", q_str(s.summary.mean_quality)}}}};
}

std::string double_str(double d) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", d);
    return buf;
}

template <typename T>
void emit_impl(const T& value, Format format, const std::string& path) {
    auto write = [&](std::ostream& os) {
        if (format == Format::Csv) {
            emit_csv(value, os);
        } else {
            os << to_json_string(value) << '\n';
        }
        if (!os) throw std::runtime_error("write failed: " + (path.empty() ? "<stdout>" : path));
    };
    if (path.empty()) {
        write(std::cout);
        return;
    }
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    write(os);
}

}  // namespace

FigureSeries build_figure_series(const SearchReport& report, const SearchConfig& cfg) {
    FigureSeries series;
    auto curve_simple = [](const mpz_class& b) {
        return 1.0 + 2.0 * std::log(b.get_d());
    };
    auto add_point = [&](const mpz_class& b, std::uint64_t observed) {
        series.points.push_back(
            {b, observed, curve_simple(b), expected_count_double(b, cfg.c)});
    };

    std::uint64_t count = 0;
    bool saw_first = false, saw_last = false;
    for (const auto& hit : report.approximations) {
        ++count;
        if (hit.b == 1) saw_first = true;
        if (hit.b == report.max_b) saw_last = true;
        // merge equal-b rows (dedup guarantees none, but stay defensive about
        // the endpoint overlaps)
        if (!series.points.empty() && series.points.back().b == hit.b) {
            series.points.back().observed = count;
        } else {
            add_point(hit.b, count);
        }
    }
    if (!saw_first) {
        FigurePoint first{mpz_class(1), 0, curve_simple(mpz_class(1)),
                          expected_count_double(mpz_class(1), cfg.c)};
        series.points.insert(series.points.begin(), first);
    }
    if (!saw_last && report.max_b != 1) add_point(report.max_b, count);
    return series;
}

std::string decimal_string(const mpq_class& value, int significant_digits) {
    mpfr_t v;
    mpfr_init2(v, 256);
    mpfr_set_q(v, value.get_mpq_t(), MPFR_RNDN);
    char* raw = nullptr;
    mpfr_asprintf(&raw, "%.*Rg", significant_digits, v);
    std::string out(raw);
    mpfr_free_str(raw);
    mpfr_clear(v);
    return out;
}

std::string to_json_string(const SearchReport& report) { return report_to_json(report).dump(2); }
std::string to_json_string(const FigureSeries& series) { return figure_to_json(series).dump(2); }
std::string to_json_string(const ConjectureScan& scan) { return scan_to_json(scan).dump(2); }

SearchReport search_report_from_json(const std::string& text) {
    json j = json::parse(text);
    SearchReport r;
    r.xi = j.at("xi").get<std::string>();
    r.c = q_parse(j.at("c"));
    r.max_b = z_parse(j.at("max_b"));
    r.brute_cutoff = z_parse(j.at("brute_cutoff"));
    for (const auto& a : j.at("approximations")) {
        r.approximations.push_back(approximation_from_json(a));
    }
    for (const auto& s : j.at("convergent_stats")) {
        r.convergent_stats.push_back(stats_from_json(s));
    }
    for (const auto& p : j.at("expected_curve")) {
        r.expected_curve.push_back({z_parse(p.at("b")), p.at("expected").get<double>()});
    }
    r.coverage_limit = z_parse(j.at("coverage_limit"));
    r.bands_cover_max_b = j.at("bands_cover_max_b").get<bool>();
    r.cf_terminated = j.at("cf_terminated").get<bool>();
    r.total_congruences = j.at("totals").at("congruences").get<std::uint64_t>();
    r.brute_hits = j.at("totals").at("brute_hits").get<std::uint64_t>();
    r.convergent_hits = j.at("totals").at("convergent_hits").get<std::uint64_t>();
    return r;
}

FigureSeries figure_series_from_json(const std::string& text) {
    json j = json::parse(text);
    FigureSeries s;
    for (const auto& p : j.at("points")) {
        s.points.push_back({z_parse(p.at("b")), p.at("observed").get<std::uint64_t>(),
                            p.at("curve_simple").get<double>(),
                            p.at("curve_full").get<double>()});
    }
    return s;
}

ConjectureScan conjecture_scan_from_json(const std::string& text) {
    json j = json::parse(text);
    ConjectureScan s;
    for (const auto& h : j.at("hits")) s.hits.push_back(prime_hit_from_json(h));
    const auto& sum = j.at("summary");
    s.summary.convergents_scanned = sum.at("convergents_scanned").get<std::size_t>();
    s.summary.hits = sum.at("hits").get<std::size_t>();
    s.summary.max_alpha_over_lnQ = sum.at("max_alpha_over_lnQ").get<double>();
    s.summary.mean_alpha_over_lnQ = sum.at("mean_alpha_over_lnQ").get<double>();
    s.summary.max_quality = q_parse(sum.at("max_quality"));
    s.summary.mean_quality = q_parse(sum.at("mean_quality"));
    return s;
}

void emit_csv(const SearchReport& report, std::ostream& os) {
    os << "b,a,alpha,source,Q,quality,reduced\n";
    for (const auto& a : report.approximations) {
        os << a.b.get_str() << ',' << a.a.get_str() << ',' << a.alpha.get_str() << ','
           << source_name(a.source) << ','
           << (a.source == SourceKind::Convergent ? a.Q.get_str() : std::string{}) << ','
           << decimal_string(a.quality) << ',' << (a.reduced ? "true" : "false") << '\n';
    }
}

void emit_csv(const FigureSeries& series, std::ostream& os) {
    os << "b,observed,curve_simple,curve_full\n";
    for (const auto& p : series.points) {
        os << p.b.get_str() << ',' << p.observed << ',' << double_str(p.curve_simple) << ','
           << double_str(p.curve_full) << '\n';
    }
}

void emit_csv(const ConjectureScan& scan, std::ostream& os) {
    os << "Q,P,alpha,p,a,quality,alpha_over_lnQ\n";
    for (const auto& h : scan.hits) {
        os << h.Q.get_str() << ',' << h.P.get_str() << ',' << h.alpha.get_str() << ','
           << h.p.get_str() << ',' << h.a.get_str() << ',' << decimal_string(h.quality) << ','
           << double_str(h.alpha_over_lnQ) << '\n';
    }
}

void emit(const SearchReport& report, Format format, const std::string& path) {
    emit_impl(report, format, path);
}
void emit(const FigureSeries& series, Format format, const std::string& path) {
    emit_impl(series, format, path);
}
void emit(const ConjectureScan& scan, Format format, const std::string& path) {
    emit_impl(scan, format, path);
}

}  // namespace sqden
