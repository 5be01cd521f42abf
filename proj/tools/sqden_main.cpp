#include "sqden/cf.hpp"
#include "sqden/modular.hpp"
#include "sqden/primes.hpp"
#include "sqden/realnum.hpp"
#include "sqden/report.hpp"
#include "sqden/search.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>
#include <string>

namespace {

using namespace sqden;

// Exact integer from "1000000", "1e6" or "3.4e18" style magnitudes.
mpz_class parse_magnitude(const std::string& text) {
    auto epos = text.find_first_of("eE");
    std::string mant = epos == std::string::npos ? text : text.substr(0, epos);
    long exp10 = epos == std::string::npos ? 0 : std::stol(text.substr(epos + 1));
    auto dot = mant.find('.');
    if (dot != std::string::npos) {
        exp10 -= static_cast<long>(mant.size() - dot - 1);
        mant.erase(dot, 1);
    }
    if (mant.empty() || mant.find_first_not_of("0123456789") != std::string::npos) {
        throw std::invalid_argument("malformed integer magnitude: " + text);
    }
    mpz_class value(mant);
    if (exp10 < 0) {
        mpz_class pow10;
        mpz_ui_pow_ui(pow10.get_mpz_t(), 10, static_cast<unsigned long>(-exp10));
        if (value % pow10 != 0) {
            throw std::invalid_argument("magnitude is not an integer: " + text);
        }
        value /= pow10;
    } else if (exp10 > 0) {
        mpz_class pow10;
        mpz_ui_pow_ui(pow10.get_mpz_t(), 10, static_cast<unsigned long>(exp10));
        value *= pow10;
    }
    return value;
}

// Exact rational from "1.0", "0.35" or "2/3".
mpq_class parse_rational(const std::string& text) {
    if (text.find('/') != std::string::npos) {
        mpq_class q(text);
        q.canonicalize();
        if (q.get_den() == 0) throw std::invalid_argument("zero denominator: " + text);
        return q;
    }
    RealSpec spec = RealSpec::decimal_literal(text);
    return spec.exact_value();
}

Format parse_format(const std::string& text) {
    if (text == "csv") return Format::Csv;
    if (text == "json") return Format::Json;
    throw std::invalid_argument("format must be csv or json");
}

int exit_code_for(const SearchReport& report) {
    for (const auto& s : report.convergent_stats) {
        if (!s.processed) return 2;  // factor budget ran out; results are partial
    }
    return 0;
}

SearchReport wrap_brute(const RealSpec& spec, std::vector<Approximation> hits,
                        const mpz_class& max_b, const mpq_class& c) {
    SearchReport report;
    report.xi = spec.describe();
    report.c = c;
    report.max_b = max_b;
    report.brute_cutoff = max_b;
    report.brute_hits = hits.size();
    report.coverage_limit = max_b;
    report.bands_cover_max_b = true;
    report.approximations = std::move(hits);
    report.expected_curve.push_back({mpz_class(1), expected_count_double(mpz_class(1), c)});
    if (max_b != 1) report.expected_curve.push_back({max_b, expected_count_double(max_b, c)});
    return report;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"search for rational approximations a/b^2 of a real"};
    app.require_subcommand(1);

    std::string xi_text, max_b_text = "1000000", c_text = "1";
    std::string alpha_exp_text = "0.35", b_exp_text = "0.75", cutoff_text = "1000";
    std::string format_text = "csv", out_path, figure_path;
    unsigned threads = 1;

    auto* search_cmd = app.add_subcommand("search", "hybrid convergent + brute force search");
    search_cmd->add_option("--xi", xi_text, "target real")->required();
    search_cmd->add_option("--max-b", max_b_text, "denominator base bound B");
    search_cmd->add_option("--c", c_text, "quality threshold");
    search_cmd->add_option("--alpha-exp", alpha_exp_text, "alpha scan exponent");
    search_cmd->add_option("--b-exp", b_exp_text, "band exponent");
    search_cmd->add_option("--brute-cutoff", cutoff_text, "brute force up to this b");
    search_cmd->add_option("--threads", threads, "worker threads");
    search_cmd->add_option("--format", format_text, "csv or json");
    search_cmd->add_option("--out", out_path, "output path (default stdout)");
    search_cmd->add_option("--figure-out", figure_path, "also write figure data here");

    auto* brute_cmd = app.add_subcommand("brute", "brute force oracle only");
    brute_cmd->add_option("--xi", xi_text, "target real")->required();
    brute_cmd->add_option("--max-b", max_b_text, "denominator base bound B");
    brute_cmd->add_option("--c", c_text, "quality threshold");
    brute_cmd->add_option("--threads", threads, "worker threads");
    brute_cmd->add_option("--format", format_text, "csv or json");
    brute_cmd->add_option("--out", out_path, "output path (default stdout)");

    std::string a_text, b_text;
    auto* verify_cmd = app.add_subcommand("verify", "verify a single pair (a, b)");
    verify_cmd->add_option("--xi", xi_text, "target real")->required();
    verify_cmd->add_option("--a", a_text, "numerator a")->required();
    verify_cmd->add_option("--b", b_text, "denominator base b")->required();
    verify_cmd->add_option("--c", c_text, "quality threshold");

    std::size_t terms = 10;
    auto* cf_cmd = app.add_subcommand("cf", "continued fraction expansion");
    cf_cmd->add_option("--xi", xi_text, "target real")->required();
    cf_cmd->add_option("--terms", terms, "number of partial quotients");

    std::string p_text, alpha_text, q_text;
    std::size_t cap = kDefaultRootCap;
    auto* solve_cmd = app.add_subcommand("solve", "solve P b^2 = alpha (mod Q)");
    solve_cmd->add_option("--p", p_text, "coefficient P")->required();
    solve_cmd->add_option("--alpha", alpha_text, "residue alpha")->required();
    solve_cmd->add_option("--q", q_text, "modulus Q")->required();
    solve_cmd->add_option("--cap", cap, "root count cap");

    std::size_t num_convergents = 20;
    std::string factor_text = "8";
    auto* primes_cmd = app.add_subcommand("primes", "prime denominator conjecture scan");
    primes_cmd->add_option("--xi", xi_text, "target real")->required();
    primes_cmd->add_option("--convergents", num_convergents, "convergents to scan");
    primes_cmd->add_option("--alpha-max-factor", factor_text, "alpha_max = ceil(factor * ln Q)");
    primes_cmd->add_option("--format", format_text, "csv or json");
    primes_cmd->add_option("--out", out_path, "output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (search_cmd->parsed()) {
            RealSpec spec = RealSpec::parse(xi_text);
            SearchConfig cfg;
            cfg.max_b = parse_magnitude(max_b_text);
            cfg.c = parse_rational(c_text);
            cfg.alpha_exponent = parse_rational(alpha_exp_text);
            cfg.b_exponent = parse_rational(b_exp_text);
            cfg.brute_cutoff = std::min(parse_magnitude(cutoff_text), cfg.max_b);
            cfg.threads = std::max(1u, threads);
            SearchReport report = full_search(spec, cfg);
            emit(report, parse_format(format_text), out_path);
            if (!figure_path.empty()) {
                emit(build_figure_series(report, cfg), parse_format(format_text), figure_path);
            }
            return exit_code_for(report);
        }
        if (brute_cmd->parsed()) {
            RealSpec spec = RealSpec::parse(xi_text);
            mpz_class max_b = parse_magnitude(max_b_text);
            mpq_class c = parse_rational(c_text);
            auto hits = brute_force_scan(spec, max_b, c, 16384, std::max(1u, threads));
            emit(wrap_brute(spec, std::move(hits), max_b, c), parse_format(format_text), out_path);
            return 0;
        }
        if (verify_cmd->parsed()) {
            RealSpec spec = RealSpec::parse(xi_text);
            VerifyResult r = verify_approximation(spec, mpz_class(a_text),
                                                  parse_magnitude(b_text), parse_rational(c_text));
            nlohmann::json j{{"accepted", r.accepted},
                             {"quality", r.quality.get_str()},
                             {"quality_decimal", decimal_string(r.quality)},
                             {"detail", r.detail}};
            std::cout << j.dump(2) << '\n';
            return 0;
        }
        if (cf_cmd->parsed()) {
            RealSpec spec = RealSpec::parse(xi_text);
            CertifiedReal xi(spec, 64, 1 << 20);
            PartialQuotients pq = partial_quotients(xi, std::max<std::size_t>(1, terms));
            nlohmann::json quot = nlohmann::json::array();
            for (const auto& t : pq.terms) quot.push_back(t.get_str());
            std::cout << nlohmann::json{{"quotients", quot}, {"terminated", pq.terminated}}.dump()
                      << '\n';
            for (const auto& conv : convergents(pq)) {
                nlohmann::json j{{"index", conv.index},
                                 {"P", conv.P.get_str()},
                                 {"Q", conv.Q.get_str()},
                                 {"residual_bound", conv.residual_bound.get_str()}};
                std::cout << j.dump() << '\n';
            }
            return 0;
        }
        if (solve_cmd->parsed()) {
            mpz_class Q = parse_magnitude(q_text);
            FactoredInteger qf = factorize(Q);
            if (!qf.complete) {
                std::cerr << "factorization budget exceeded for Q\n";
                return 2;
            }
            CongruenceRoots roots =
                solve_quadratic_congruence(mpz_class(p_text), mpz_class(alpha_text), qf, cap);
            nlohmann::json arr = nlohmann::json::array();
            for (const auto& r : roots.roots) arr.push_back(r.get_str());
            nlohmann::json j{{"modulus", roots.modulus.get_str()},
                             {"roots", arr},
                             {"count", roots.roots.size()},
                             {"truncated", roots.truncated}};
            std::cout << j.dump(2) << '\n';
            return 0;
        }
        if (primes_cmd->parsed()) {
            RealSpec spec = RealSpec::parse(xi_text);
            ConjectureScan scan =
                conjecture_scan(spec, std::max<std::size_t>(1, num_convergents),
                                parse_rational(factor_text));
            emit(scan, parse_format(format_text), out_path);
            return 0;
        }
    } catch (const PrecisionCeilingError& e) {
        std::cerr << "precision failure: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
