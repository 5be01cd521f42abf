#include "sqden/cf.hpp"

#include <optional>
#include <stdexcept>

namespace sqden {

namespace {

mpz_class floor_q(const mpq_class& q) {
    mpz_class f;
    mpz_fdiv_q(f.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return f;
}

// Canonical Euclidean expansion of an exact rational; last quotient ends >= 2
// automatically except for integers.
void euclid_terms(mpq_class x, std::size_t max_terms, std::vector<mpz_class>& out,
                  bool& terminated) {
    while (out.size() < max_terms) {
        mpz_class a = floor_q(x);
        out.push_back(a);
        mpq_class frac = x - mpq_class(a);
        if (frac == 0) {
            terminated = true;
            return;
        }
        x = 1 / frac;
    }
}

// One full certified scan at the current precision. Returns terms emitted, or
// nullopt at the index where the interval failed to pin the next quotient.
std::optional<PartialQuotients> scan_once(const PrecisionReal& real, std::size_t max_terms) {
    PartialQuotients out;
    out.digits_used = real.digits;
    mpq_class lo = real.lower();
    mpq_class hi = real.upper();
    while (out.terms.size() < max_terms) {
        if (lo == hi) {
            euclid_terms(lo, max_terms, out.terms, out.terminated);
            return out;
        }
        mpz_class flo = floor_q(lo);
        mpz_class fhi = floor_q(hi);
        if (flo != fhi) return std::nullopt;  // quotient not pinned down
        out.terms.push_back(flo);
        mpq_class tail_lo = lo - mpq_class(flo);
        mpq_class tail_hi = hi - mpq_class(flo);
        if (tail_lo == 0) return std::nullopt;  // tail touches zero, cannot invert
        lo = 1 / tail_hi;
        hi = 1 / tail_lo;
    }
    return out;
}

}  // namespace

PartialQuotients partial_quotients(CertifiedReal& xi, std::size_t max_terms) {
    if (max_terms < 1) throw std::invalid_argument("max_terms must be >= 1");
    while (true) {
        if (auto done = scan_once(xi.value(), max_terms)) {
            done->digits_used = xi.digits();
            return *done;
        }
        try {
            xi.escalate();
        } catch (const PrecisionCeilingError& e) {
            auto partial = scan_once(xi.value(), max_terms);
            std::size_t reached = 0;
            if (partial) reached = partial->terms.size();
            throw PrecisionCeilingError(
                e.digits_reached, "continued fraction stalled at term " + std::to_string(reached) +
                                      ": " + e.what());
        }
    }
}

PartialQuotients partial_quotients(const RealSpec& spec, const PrecisionReal& real,
                                   std::size_t max_terms) {
    CertifiedReal xi(spec, real.digits, real.digits * 64);
    return partial_quotients(xi, max_terms);
}

std::vector<Convergent> convergents(const std::vector<mpz_class>& quotients, bool terminated) {
    if (quotients.empty()) throw std::invalid_argument("empty quotient list");
    for (std::size_t i = 1; i < quotients.size(); ++i) {
        if (quotients[i] < 1) throw std::invalid_argument("partial quotients after the first must be >= 1");
    }
    std::vector<Convergent> out;
    out.reserve(quotients.size());
    mpz_class p_prev = 1, q_prev = 0;
    mpz_class p_cur = quotients[0], q_cur = 1;
    for (std::size_t n = 0;; ++n) {
        Convergent c;
        c.index = n;
        c.P = p_cur;
        c.Q = q_cur;
        bool last = (n + 1 == quotients.size());
        if (last) {
            c.residual_bound = terminated ? mpq_class(0) : mpq_class(1) / mpq_class(q_cur * q_cur);
        } else {
            mpz_class q_next = quotients[n + 1] * q_cur + q_prev;
            c.residual_bound = mpq_class(1) / mpq_class(q_cur * q_next);
        }
        out.push_back(c);
        if (last) break;
        mpz_class p_next = quotients[n + 1] * p_cur + p_prev;
        mpz_class q_next = quotients[n + 1] * q_cur + q_prev;
        p_prev = p_cur;
        q_prev = q_cur;
        p_cur = p_next;
        q_cur = q_next;
    }
    return out;
}

std::vector<Convergent> convergents(const PartialQuotients& pq) {
    return convergents(pq.terms, pq.terminated);
}

}  // namespace sqden
