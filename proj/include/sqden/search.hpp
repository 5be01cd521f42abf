#pragma once

#include "sqden/cf.hpp"
#include "sqden/modular.hpp"
#include "sqden/realnum.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace sqden {

/// Tunables of the hybrid search. The exponents are exact rationals so the
/// per-convergent bounds ceil(Q^alpha_exponent) and ceil(Q^b_exponent) are
/// computed with integer roots, never floating point.
struct SearchConfig {
    mpq_class c = 1;                      // quality threshold
    mpq_class alpha_exponent{7, 20};      // scan |alpha| <= ceil(Q^0.35)
    mpq_class b_exponent{3, 4};           // keep roots b <= ceil(Q^0.75)
    mpz_class brute_cutoff = 1000;        // brute force covers b <= cutoff
    mpz_class max_b = 1000000;            // B
    std::size_t root_cap = kDefaultRootCap;
    long precision_ceiling_digits = 16384;
    std::uint64_t factor_budget = kDefaultFactorBudget;
    unsigned threads = 1;

    void validate() const;  // throws std::invalid_argument on bad invariants
    long initial_digits() const { return default_digits_for_bound(max_b); }
};

enum class SourceKind { Brute, Convergent };

/// One found pair (a, b) with certified quality |xi - a/b^2| * b^3 < c.
struct Approximation {
    mpz_class b;
    mpz_class a;
    mpz_class alpha = 0;  // 0 for brute-force finds
    SourceKind source = SourceKind::Brute;
    std::size_t conv_index = 0;  // meaningful when source == Convergent
    mpz_class P = 0, Q = 0;      // likewise
    mpq_class quality;           // certified upper bound
    bool reduced = true;         // gcd(a, b^2) == 1

    bool operator==(const Approximation&) const = default;
};

struct ConvergentStats {
    std::size_t index = 0;
    mpz_class P, Q;
    mpz_class alpha_bound;  // A = ceil(Q^alpha_exponent)
    mpz_class band_hi;      // min(ceil(Q^b_exponent), B)
    std::uint64_t congruences_solved = 0;
    std::uint64_t roots_in_band = 0;
    std::uint64_t hits = 0;
    bool processed = true;        // false when the factorization budget ran out
    bool truncation_seen = false; // a root set was capped inside the band

    bool operator==(const ConvergentStats&) const = default;
};

struct ExpectedPoint {
    mpz_class b;
    double expected;  // 2c (gamma + ln b)
    bool operator==(const ExpectedPoint&) const = default;
};

struct SearchReport {
    std::string xi;
    mpq_class c;
    mpz_class max_b;
    mpz_class brute_cutoff;
    std::vector<Approximation> approximations;  // sorted by b, deduplicated
    std::vector<ConvergentStats> convergent_stats;
    std::vector<ExpectedPoint> expected_curve;
    mpz_class coverage_limit = 0;  // bands certify completeness up to here
    bool bands_cover_max_b = false;
    bool cf_terminated = false;
    std::uint64_t total_congruences = 0;
    std::uint64_t brute_hits = 0;
    std::uint64_t convergent_hits = 0;

    bool operator==(const SearchReport&) const = default;
};

/// ceil(n^(num/den)) for positive n and exponent num/den > 0, exactly.
mpz_class ceil_pow(const mpz_class& n, const mpq_class& exponent);

/// The independent oracle: for b = 1..B take a = nearest integer to b^2 xi
/// (ties to even) and emit whenever the certified |b^2 xi - a| * b < c.
std::vector<Approximation> brute_force_scan(const RealSpec& spec, const mpz_class& max_b,
                                            const mpq_class& c,
                                            long precision_ceiling_digits = 16384,
                                            unsigned threads = 1);

/// The alpha-scan over one convergent: solves P b^2 = alpha (mod Q) for every
/// |alpha| <= ceil(Q^alpha_exponent), keeps roots in (brute_cutoff, band_hi],
/// and re-certifies every candidate against xi directly.
std::vector<Approximation> convergent_search(CertifiedReal& xi, const Convergent& conv,
                                             const SearchConfig& cfg, ConvergentStats* stats = nullptr);
std::vector<Approximation> convergent_search(const RealSpec& spec, const Convergent& conv,
                                             const SearchConfig& cfg);

/// Brute force below the cutoff, congruence search on every convergent whose
/// band is needed to cover (cutoff, B], merged and deduplicated by b.
SearchReport full_search(const RealSpec& spec, const SearchConfig& cfg);

struct VerifyResult {
    bool accepted = false;
    mpq_class quality;   // certified upper bound on |xi - a/b^2| b^3
    std::string detail;
};

/// The acceptance predicate |xi - a/b^2| < c/b^3, certified, escalating
/// precision until decidable.
VerifyResult verify_approximation(const RealSpec& spec, const mpz_class& a, const mpz_class& b,
                                  const mpq_class& c, long precision_ceiling_digits = 16384);

/// 2c (gamma + ln B) evaluated at working precision.
mpq_class expected_count(const mpz_class& max_b, const mpq_class& c);

/// Same curve as a double, for report emission.
double expected_count_double(const mpz_class& b, const mpq_class& c);

}  // namespace sqden
