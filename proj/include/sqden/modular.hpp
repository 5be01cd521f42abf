#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace sqden {

struct PrimePower {
    mpz_class p;
    unsigned e = 1;
    bool operator==(const PrimePower&) const = default;
};

/// Complete (or budget-limited partial) prime factorization of n.
struct FactoredInteger {
    mpz_class n = 1;
    std::vector<PrimePower> factors;  // primes strictly increasing
    bool complete = true;
    mpz_class remainder = 1;  // composite leftover when !complete

    mpz_class recompose() const;
};

/// Solution set of one congruence: sorted distinct residues in [0, modulus).
/// truncated is set only when a root-count cap was hit somewhere on the way;
/// the kept roots are then the smallest ones.
struct CongruenceRoots {
    mpz_class modulus = 1;
    std::vector<mpz_class> roots;
    bool truncated = false;

    bool contains(const mpz_class& r) const;
};

inline constexpr std::size_t kDefaultRootCap = std::size_t{1} << 16;
inline constexpr std::uint64_t kDefaultFactorBudget = 100'000'000;

/// Miller-Rabin: deterministic witness set below 3.3e14, 64 rounds with
/// deterministically derived bases above (error < 4^-64).
bool is_probable_prime(const mpz_class& n);

/// Trial division to 1e6, then Pollard rho with Brent cycle detection on the
/// cofactor, recursing on composites. Deterministic. When the iteration
/// budget runs out the unfinished composite lands in `remainder` and
/// complete=false.
FactoredInteger factorize(const mpz_class& n, std::uint64_t iteration_budget = kDefaultFactorBudget);

/// All roots of x^2 = c (mod p), p an odd prime, 0 <= c < p. Empty set for a
/// non-residue, {0} for c = 0, a Tonelli-Shanks pair otherwise.
CongruenceRoots sqrt_mod_prime(const mpz_class& c, const mpz_class& p);

/// All roots of x^2 = c (mod p^e): Hensel lifting for unit c, valuation
/// splitting when p | c, and the 0/2/4-root structure at p = 2.
CongruenceRoots roots_mod_prime_power(const mpz_class& c, const mpz_class& p, unsigned e,
                                      std::size_t cap = kDefaultRootCap);

/// Recombines per-prime-power root sets over pairwise coprime moduli. If the
/// product of counts exceeds cap, the cap-many smallest recombined roots are
/// returned with truncated = true.
CongruenceRoots crt_combine(const std::vector<CongruenceRoots>& parts,
                            std::size_t cap = kDefaultRootCap);

/// All b in [0, Q) with P b^2 = alpha (mod Q). Requires gcd(P, Q) = 1 and a
/// complete factorization. alpha may be negative; it is normalized mod Q.
CongruenceRoots solve_quadratic_congruence(const mpz_class& P, const mpz_class& alpha,
                                           const FactoredInteger& Qf,
                                           std::size_t cap = kDefaultRootCap);

struct LinearSolution {
    mpz_class x;        // canonical smallest solution
    mpz_class modulus;  // Q/gcd(P, Q): full solution set is x mod modulus
    bool operator==(const LinearSolution&) const = default;
};

/// P x = alpha (mod Q): the unique residue when gcd(P, Q) = 1, nullopt when
/// gcd(P, Q) does not divide alpha, else the smallest solution with the
/// reduced modulus.
std::optional<LinearSolution> solve_linear_congruence(const mpz_class& P, const mpz_class& alpha,
                                                      const mpz_class& Q);

}  // namespace sqden
