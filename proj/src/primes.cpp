#include "sqden/primes.hpp"

#include "sqden/modular.hpp"

#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sqden {

namespace {

mpq_class mpq_from_mpfr_local(mpfr_srcptr x) {
    mpz_class mant;
    mpfr_exp_t e = mpfr_get_z_2exp(mant.get_mpz_t(), x);
    mpq_class q(mant);
    mpz_class shift = 1;
    if (e >= 0) {
        mpz_mul_2exp(shift.get_mpz_t(), shift.get_mpz_t(), static_cast<mp_bitcnt_t>(e));
        q *= mpq_class(shift);
    } else {
        mpz_mul_2exp(shift.get_mpz_t(), shift.get_mpz_t(), static_cast<mp_bitcnt_t>(-e));
        q /= mpq_class(shift);
    }
    q.canonicalize();
    return q;
}

// Exact rational lower bound on ln(n), n >= 2.
mpq_class log_lower_bound(const mpz_class& n) {
    mpfr_t v;
    mpfr_init2(v, 128);
    mpfr_set_z(v, n.get_mpz_t(), MPFR_RNDD);
    mpfr_log(v, v, MPFR_RNDD);
    mpq_class out = mpq_from_mpfr_local(v);
    mpfr_clear(v);
    return out;
}

double log_double(const mpz_class& n) {
    mpfr_t v;
    mpfr_init2(v, 64);
    mpfr_set_z(v, n.get_mpz_t(), MPFR_RNDN);
    mpfr_log(v, v, MPFR_RNDN);
    double d = mpfr_get_d(v, MPFR_RNDN);
    mpfr_clear(v);
    return d;
}

// Certified upper bound on |xi - a/p| p^2 / ln p.
mpq_class certified_prime_quality(CertifiedReal& xi, const mpz_class& a, const mpz_class& p) {
    mpq_class lnp_lo = log_lower_bound(p);
    mpq_class ratio(a, p);
    ratio.canonicalize();
    while (true) {
        const PrecisionReal& real = xi.value();
        mpq_class d_lo = real.lower() - ratio;
        mpq_class d_hi = real.upper() - ratio;
        mpq_class mag = std::max(abs(d_lo), abs(d_hi));
        mpq_class bound = mag * mpq_class(p * p) / lnp_lo;
        // Tighten once if the enclosure dominates the bound; one doubling is
        // plenty since the enclosure radius shrinks quadratically.
        if (real.exact() || d_lo * d_hi > 0 || mag == 0) return bound;
        xi.escalate();
    }
}

}  // namespace

std::optional<PrimeApproximation> prime_denominator_search(CertifiedReal& xi,
                                                           const Convergent& conv,
                                                           const mpz_class& alpha_max) {
    const mpz_class& P = conv.P;
    const mpz_class& Q = conv.Q;
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), P.get_mpz_t(), Q.get_mpz_t());
    if (g != 1) throw std::invalid_argument("prime_denominator_search requires gcd(P, Q) = 1");

    mpz_class q_squared = Q * Q;
    double lnQ = Q > 1 ? log_double(Q) : 0.0;

    for (mpz_class k = 0; k <= alpha_max; ++k) {
        for (int sign : {+1, -1}) {
            if (k == 0 && sign < 0) continue;
            mpz_class alpha = sign > 0 ? k : mpz_class(-k);

            mpz_class x = 0;
            if (Q > 1) {
                mpz_class am = alpha % Q;
                if (am < 0) am += Q;
                mpz_class pinv, pm = P % Q;
                if (pm < 0) pm += Q;
                mpz_invert(pinv.get_mpz_t(), pm.get_mpz_t(), Q.get_mpz_t());
                x = am * pinv % Q;
            }

            mpz_class found = 0;
            std::uint64_t steps = 0;
            mpz_class shared;
            mpz_gcd(shared.get_mpz_t(), x.get_mpz_t(), Q.get_mpz_t());
            if (x == 0 || shared > 1) {
                // Every progression member is divisible by the shared factor,
                // so the only possible prime is that factor itself.
                if (x > 1 && x == shared && is_probable_prime(x)) {
                    found = x;
                } else if (x == 0 && Q > 1 && Q <= q_squared && is_probable_prime(Q)) {
                    found = Q;
                    steps = 1;
                }
            } else {
                for (mpz_class cand = x; cand <= q_squared; cand += Q, ++steps) {
                    if (cand > 1 && is_probable_prime(cand)) {
                        found = cand;
                        break;
                    }
                }
            }
            if (found == 0) continue;

            PrimeApproximation hit;
            hit.p = found;
            hit.alpha = alpha;
            hit.a = (P * found - alpha) / Q;
            hit.conv_index = conv.index;
            hit.P = P;
            hit.Q = Q;
            hit.progression_steps = steps;
            hit.quality = certified_prime_quality(xi, hit.a, hit.p);
            hit.alpha_over_lnQ = (Q > 1 && lnQ > 0) ? std::abs(alpha.get_d()) / lnQ : 0.0;
            return hit;
        }
    }
    return std::nullopt;
}

std::optional<PrimeApproximation> prime_denominator_search(const RealSpec& spec,
                                                           const Convergent& conv,
                                                           const mpz_class& alpha_max) {
    mpz_class bound = std::max(conv.Q, mpz_class(1000));
    CertifiedReal xi(spec, default_digits_for_bound(bound), 16384);
    return prime_denominator_search(xi, conv, alpha_max);
}

ConjectureScan conjecture_scan(const RealSpec& spec, std::size_t num_convergents,
                               const mpq_class& alpha_max_factor) {
    if (num_convergents < 1) throw std::invalid_argument("num_convergents must be >= 1");
    if (alpha_max_factor <= 0) throw std::invalid_argument("alpha_max_factor must be positive");

    CertifiedReal xi(spec, 64, 1 << 20);
    PartialQuotients pq = partial_quotients(xi, num_convergents);
    std::vector<Convergent> convs = convergents(pq);

    ConjectureScan scan;
    scan.summary.convergents_scanned = convs.size();
    double ratio_sum = 0;
    mpq_class quality_sum = 0;
    for (const auto& conv : convs) {
        mpz_class alpha_max = 0;
        if (conv.Q > 1) {
            // ceil(alpha_max_factor * ln Q), rounded up from a certified bound
            mpfr_t v;
            mpfr_init2(v, 128);
            mpfr_set_z(v, conv.Q.get_mpz_t(), MPFR_RNDU);
            mpfr_log(v, v, MPFR_RNDU);
            mpfr_mul_q(v, v, alpha_max_factor.get_mpq_t(), MPFR_RNDU);
            mpfr_ceil(v, v);
            mpfr_get_z(alpha_max.get_mpz_t(), v, MPFR_RNDN);
            mpfr_clear(v);
        }
        auto hit = prime_denominator_search(xi, conv, alpha_max);
        if (!hit) continue;
        ++scan.summary.hits;
        ratio_sum += hit->alpha_over_lnQ;
        quality_sum += hit->quality;
        scan.summary.max_alpha_over_lnQ =
            std::max(scan.summary.max_alpha_over_lnQ, hit->alpha_over_lnQ);
        if (hit->quality > scan.summary.max_quality) scan.summary.max_quality = hit->quality;
        scan.hits.push_back(std::move(*hit));
    }
    if (scan.summary.hits > 0) {
        scan.summary.mean_alpha_over_lnQ = ratio_sum / scan.summary.hits;
        scan.summary.mean_quality = quality_sum / mpq_class(static_cast<unsigned long>(scan.summary.hits));
    }
    return scan;
}

}  // namespace sqden
