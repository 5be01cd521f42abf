#pragma once

#include "sqden/realnum.hpp"

#include <cstddef>
#include <vector>

namespace sqden {

/// One continued-fraction convergent P/Q of xi, with an exact rational upper
/// bound on |xi - P/Q| that is always valid (1/(Q_n Q_{n+1}) when the next
/// quotient is known, 1/Q_n^2 for the last one, 0 once the CF terminated).
struct Convergent {
    std::size_t index = 0;
    mpz_class P;
    mpz_class Q;
    mpq_class residual_bound;
};

struct PartialQuotients {
    std::vector<mpz_class> terms;
    bool terminated = false;  // xi is exactly rational and the CF is complete
    long digits_used = 0;
};

/// Certified partial quotients a0, a1, ... of xi. A term is emitted only when
/// the enclosure determines it uniquely; precision escalates (by doubling,
/// restarting the scan) whenever the interval straddles an integer. Rational
/// xi yields the canonical finite expansion with last quotient >= 2.
PartialQuotients partial_quotients(CertifiedReal& xi, std::size_t max_terms);

/// Convenience overload building its own escalating enclosure (ceiling 64x
/// the starting precision).
PartialQuotients partial_quotients(const RealSpec& spec, const PrecisionReal& real,
                                   std::size_t max_terms);

std::vector<Convergent> convergents(const std::vector<mpz_class>& quotients,
                                    bool terminated = false);
std::vector<Convergent> convergents(const PartialQuotients& pq);

}  // namespace sqden
