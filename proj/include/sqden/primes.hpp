#pragma once

#include "sqden/cf.hpp"
#include "sqden/realnum.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sqden {

/// An approximation a/p with prime denominator, found from a convergent P/Q
/// through the linear congruence P x = alpha (mod Q).
struct PrimeApproximation {
    mpz_class p;
    mpz_class a;
    mpz_class alpha;
    std::size_t conv_index = 0;
    mpz_class P, Q;
    mpq_class quality;           // certified upper bound on |xi - a/p| p^2 / ln p
    double alpha_over_lnQ = 0;   // |alpha| / ln Q (0 when Q = 1)
    std::uint64_t progression_steps = 0;  // j in p = x + j Q; 0 means p solved directly

    bool operator==(const PrimeApproximation&) const = default;
};

/// Scans alpha = 0, +1, -1, +2, -2, ... up to |alpha| <= alpha_max. For each
/// alpha the residue x = alpha P^{-1} mod Q starts the progression x, x+Q,
/// x+2Q, ... which is searched for a prime while the value stays <= Q^2; the
/// first prime in this canonical order wins. Progressions whose members share
/// a factor with Q are decided directly (only the value equal to that factor
/// can be prime).
std::optional<PrimeApproximation> prime_denominator_search(CertifiedReal& xi,
                                                           const Convergent& conv,
                                                           const mpz_class& alpha_max);
std::optional<PrimeApproximation> prime_denominator_search(const RealSpec& spec,
                                                           const Convergent& conv,
                                                           const mpz_class& alpha_max);

struct ConjectureSummary {
    std::size_t convergents_scanned = 0;
    std::size_t hits = 0;
    double max_alpha_over_lnQ = 0;
    double mean_alpha_over_lnQ = 0;
    mpq_class max_quality;
    mpq_class mean_quality;

    bool operator==(const ConjectureSummary&) const = default;
};

struct ConjectureScan {
    std::vector<PrimeApproximation> hits;
    ConjectureSummary summary;

    bool operator==(const ConjectureScan&) const = default;
};

/// Runs prime_denominator_search over the first num_convergents convergents
/// of xi with alpha_max = ceil(alpha_max_factor * ln Q) per convergent.
ConjectureScan conjecture_scan(const RealSpec& spec, std::size_t num_convergents,
                               const mpq_class& alpha_max_factor = 8);

}  // namespace sqden
