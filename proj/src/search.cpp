#include "sqden/search.hpp"

#include <mpfr.h>

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <thread>

namespace sqden {

namespace {

mpz_class floor_q(const mpq_class& q) {
    mpz_class f;
    mpz_fdiv_q(f.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return f;
}

// Nearest integer to an exact rational, ties to the even candidate.
mpz_class nearest_tie_even(const mpq_class& x) {
    mpq_class shifted = x + mpq_class(1, 2);
    mpz_class f = floor_q(shifted);
    if (shifted == mpq_class(f)) {
        // x was exactly halfway: f = x + 1/2, candidates f-1 and f.
        return mpz_divisible_2exp_p(f.get_mpz_t(), 1) ? f : f - 1;
    }
    return f;
}

// Result of one certification attempt at fixed precision.
enum class Attempt { Accept, Reject, Widen };

struct QualityBounds {
    mpq_class lower;
    mpq_class upper;
};

// Interval of |xi - a/b^2| * b^3 = |xi b^3 - a b| from the current enclosure.
QualityBounds quality_interval(const PrecisionReal& xi, const mpz_class& a, const mpz_class& b) {
    mpz_class b3 = b * b * b;
    mpq_class d_lo = xi.lower() * b3 - mpq_class(a * b);
    mpq_class d_hi = xi.upper() * b3 - mpq_class(a * b);
    if (d_lo >= 0) return {d_lo, d_hi};
    if (d_hi <= 0) return {-d_hi, -d_lo};
    return {mpq_class(0), std::max(mpq_class(-d_lo), d_hi)};
}

Attempt attempt_quality(const PrecisionReal& xi, const mpz_class& a, const mpz_class& b,
                        const mpq_class& c, mpq_class& bound_out) {
    QualityBounds q = quality_interval(xi, a, b);
    if (q.upper < c) {
        bound_out = q.upper;
        return Attempt::Accept;
    }
    if (q.lower >= c) {
        bound_out = q.lower;
        return Attempt::Reject;
    }
    return Attempt::Widen;
}

// Certified nearest integer to b^2 xi; nullopt when the enclosure straddles a
// rounding boundary (caller escalates). Exact enclosures break ties to even.
std::optional<mpz_class> try_nearest(const PrecisionReal& xi, const mpz_class& b) {
    mpz_class m = b * b;
    if (xi.exact()) return nearest_tie_even(mpq_class(m) * xi.center);
    mpq_class half(1, 2);
    mpz_class n_lo = floor_q(mpq_class(m) * xi.lower() + half);
    mpz_class n_hi = floor_q(mpq_class(m) * xi.upper() + half);
    if (n_lo != n_hi) return std::nullopt;
    return n_lo;
}

struct Certification {
    bool accepted = false;
    mpz_class a;
    mpq_class quality;  // upper bound when accepted, lower bound when rejected
    long digits = 0;
};

// Canonical certification ladder: start at initial_digits, double until the
// nearest integer and the quality comparison are both decidable. Starting
// fresh per candidate keeps reported bounds independent of scan order and
// thread count.
Certification certify_candidate(const RealSpec& spec, long initial_digits, long ceiling_digits,
                                const mpz_class& b, const mpq_class& c) {
    CertifiedReal xi(spec, initial_digits, ceiling_digits);
    while (true) {
        auto a = try_nearest(xi.value(), b);
        if (a) {
            mpq_class bound;
            switch (attempt_quality(xi.value(), *a, b, c, bound)) {
                case Attempt::Accept:
                    return {true, *a, bound, xi.digits()};
                case Attempt::Reject:
                    return {false, *a, bound, xi.digits()};
                case Attempt::Widen:
                    break;
            }
        }
        xi.escalate();
    }
}

void run_chunked(unsigned threads, std::uint64_t count,
                 const std::function<void(unsigned, std::uint64_t, std::uint64_t)>& body) {
    if (threads <= 1 || count < 2 * threads) {
        body(0, 0, count);
        return;
    }
    std::vector<std::thread> pool;
    std::uint64_t chunk = (count + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
        std::uint64_t begin = t * chunk;
        std::uint64_t end = std::min(count, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&body, t, begin, end] {
            body(t, begin, end);
            mpfr_free_cache();  // drop this thread's constant caches
        });
    }
    for (auto& th : pool) th.join();
}

// Fast scaled view of an enclosure: xi in [lo, hi] / 2^shift. The widening by
// one ulp at each endpoint keeps it a valid enclosure for any rational input.
struct ScaledEnclosure {
    mpz_class lo, hi;
    long shift;

    static ScaledEnclosure from(const PrecisionReal& real) {
        ScaledEnclosure s;
        s.shift = static_cast<long>(real.digits * 3.33) + 64;
        mpz_class scale = 1;
        mpz_mul_2exp(scale.get_mpz_t(), scale.get_mpz_t(), s.shift);
        mpq_class qlo = real.lower() * mpq_class(scale);
        mpq_class qhi = real.upper() * mpq_class(scale);
        s.lo = floor_q(qlo);
        mpz_class fhi = floor_q(qhi);
        s.hi = (mpq_class(fhi) == qhi) ? fhi : fhi + 1;
        return s;
    }
};

std::vector<Approximation> brute_scan_impl(const RealSpec& spec, const mpz_class& from,
                                           const mpz_class& to, const mpq_class& c,
                                           long initial_digits, long ceiling_digits,
                                           unsigned threads) {
    if (to < from) return {};
    if (!to.fits_ulong_p()) {
        throw std::invalid_argument("brute force range too large to enumerate");
    }
    std::uint64_t lo64 = mpz_get_ui(from.get_mpz_t());
    std::uint64_t hi64 = mpz_get_ui(to.get_mpz_t());
    std::uint64_t count = hi64 - lo64 + 1;

    unsigned lanes = std::max(1u, threads);
    std::vector<std::vector<Approximation>> found(lanes);

    bool exact = spec.is_exact();
    mpq_class xi_exact = exact ? make_real(spec, initial_digits).center : mpq_class(0);

    run_chunked(lanes, count, [&](unsigned tid, std::uint64_t begin, std::uint64_t end) {
        auto& mine = found[tid];
        if (exact) {
            for (std::uint64_t i = begin; i < end; ++i) {
                mpz_class b(static_cast<unsigned long>(lo64 + i));
                mpq_class t = mpq_class(b * b) * xi_exact;
                mpz_class a = nearest_tie_even(t);
                mpq_class delta = abs(t - mpq_class(a));
                mpq_class quality = delta * mpq_class(b);
                if (quality < c) {
                    Approximation hit;
                    hit.b = b;
                    hit.a = a;
                    hit.quality = quality;
                    hit.reduced = gcd(a, b) == 1;
                    mine.push_back(std::move(hit));
                }
            }
            return;
        }

        CertifiedReal xi(spec, initial_digits, ceiling_digits);
        ScaledEnclosure enc = ScaledEnclosure::from(xi.value());
        mpz_class half = 1, scale = 1;
        mpz_mul_2exp(half.get_mpz_t(), half.get_mpz_t(), enc.shift - 1);
        mpz_mul_2exp(scale.get_mpz_t(), scale.get_mpz_t(), enc.shift);

        mpz_class m, x_lo, x_hi, n_lo, n_hi, d_lo, d_hi, a_scaled, dmax, dmin;
        for (std::uint64_t i = begin; i < end; ++i) {
            unsigned long bu = static_cast<unsigned long>(lo64 + i);
            mpz_class b(bu);
            while (true) {
                mpz_ui_pow_ui(m.get_mpz_t(), bu, 2);
                x_lo = m * enc.lo;
                x_hi = m * enc.hi;
                mpz_fdiv_q_2exp(n_lo.get_mpz_t(), mpz_class(x_lo + half).get_mpz_t(), enc.shift);
                mpz_fdiv_q_2exp(n_hi.get_mpz_t(), mpz_class(x_hi + half).get_mpz_t(), enc.shift);
                bool decided = false;
                if (n_lo == n_hi) {
                    a_scaled = n_lo * scale;
                    d_lo = x_lo - a_scaled;
                    d_hi = x_hi - a_scaled;
                    if (d_lo >= 0) {
                        dmin = d_lo;
                        dmax = d_hi;
                    } else if (d_hi <= 0) {
                        dmin = -d_hi;
                        dmax = -d_lo;
                    } else {
                        dmin = 0;
                        dmax = std::max(mpz_class(-d_lo), d_hi);
                    }
                    // delta * b < c  <=>  dmax * b * den(c) < num(c) * 2^shift
                    mpz_class lhs_hi = dmax * b * c.get_den();
                    mpz_class rhs = c.get_num() * scale;
                    if (lhs_hi < rhs) {
                        Certification cert =
                            certify_candidate(spec, initial_digits, ceiling_digits, b, c);
                        Approximation hit;
                        hit.b = b;
                        hit.a = cert.a;
                        hit.quality = cert.quality;
                        hit.reduced = gcd(cert.a, b) == 1;
                        mine.push_back(std::move(hit));
                        decided = true;
                    } else if (dmin * b * c.get_den() >= rhs) {
                        decided = true;
                    }
                }
                if (decided) break;
                xi.escalate();
                enc = ScaledEnclosure::from(xi.value());
                half = 1;
                mpz_mul_2exp(half.get_mpz_t(), half.get_mpz_t(), enc.shift - 1);
                scale = 1;
                mpz_mul_2exp(scale.get_mpz_t(), scale.get_mpz_t(), enc.shift);
            }
        }
    });

    std::vector<Approximation> out;
    for (auto& part : found) {
        out.insert(out.end(), std::make_move_iterator(part.begin()),
                   std::make_move_iterator(part.end()));
    }
    return out;
}

}  // namespace

void SearchConfig::validate() const {
    if (c <= 0) throw std::invalid_argument("quality threshold c must be positive");
    if (alpha_exponent < mpq_class(1, 3) || alpha_exponent >= 1) {
        throw std::invalid_argument("alpha_exponent must lie in [1/3, 1)");
    }
    if (b_exponent < mpq_class(2, 3) || b_exponent >= 1) {
        throw std::invalid_argument("b_exponent must lie in [2/3, 1)");
    }
    if (max_b < 1) throw std::invalid_argument("max_b must be >= 1");
    if (brute_cutoff < 1 || brute_cutoff > max_b) {
        throw std::invalid_argument("brute_cutoff must lie in [1, max_b]");
    }
    if (root_cap < 1) throw std::invalid_argument("root_cap must be >= 1");
    if (threads < 1) throw std::invalid_argument("threads must be >= 1");
    if (precision_ceiling_digits < initial_digits()) {
        throw std::invalid_argument("precision ceiling below the initial working precision");
    }
}

mpz_class ceil_pow(const mpz_class& n, const mpq_class& exponent) {
    if (n < 1 || exponent <= 0) throw std::invalid_argument("ceil_pow needs n >= 1, exponent > 0");
    if (!exponent.get_num().fits_ulong_p() || !exponent.get_den().fits_ulong_p()) {
        throw std::invalid_argument("exponent too large");
    }
    unsigned long num = mpz_get_ui(exponent.get_num_mpz_t());
    unsigned long den = mpz_get_ui(exponent.get_den_mpz_t());
    mpz_class powed;
    mpz_pow_ui(powed.get_mpz_t(), n.get_mpz_t(), num);
    mpz_class root;
    int exact = mpz_root(root.get_mpz_t(), powed.get_mpz_t(), den);
    return exact ? root : root + 1;
}

std::vector<Approximation> brute_force_scan(const RealSpec& spec, const mpz_class& max_b,
                                            const mpq_class& c, long precision_ceiling_digits,
                                            unsigned threads) {
    if (max_b < 1) throw std::invalid_argument("max_b must be >= 1");
    if (c <= 0) throw std::invalid_argument("c must be positive");
    return brute_scan_impl(spec, 1, max_b, c, default_digits_for_bound(max_b),
                           precision_ceiling_digits, threads);
}

std::vector<Approximation> convergent_search(CertifiedReal& xi, const Convergent& conv,
                                             const SearchConfig& cfg, ConvergentStats* stats) {
    const mpz_class& P = conv.P;
    const mpz_class& Q = conv.Q;
    ConvergentStats local;
    local.index = conv.index;
    local.P = P;
    local.Q = Q;
    local.alpha_bound = ceil_pow(Q, cfg.alpha_exponent);
    local.band_hi = std::min(ceil_pow(Q, cfg.b_exponent), cfg.max_b);

    std::vector<Approximation> out;
    FactoredInteger qf = factorize(Q, cfg.factor_budget);
    if (!qf.complete) {
        local.processed = false;
        if (stats) *stats = local;
        return out;
    }

    if (!local.alpha_bound.fits_ulong_p() ||
        mpz_get_ui(local.alpha_bound.get_mpz_t()) > (std::uint64_t{1} << 62)) {
        throw std::invalid_argument("alpha scan range too large to enumerate");
    }
    unsigned long bound = mpz_get_ui(local.alpha_bound.get_mpz_t());
    std::uint64_t scan_count = 2 * static_cast<std::uint64_t>(bound) + 1;

    unsigned lanes = std::max(1u, cfg.threads);
    std::vector<std::vector<mpz_class>> band_roots(lanes);
    std::vector<std::uint64_t> solved(lanes, 0), in_band(lanes, 0);
    std::vector<char> truncation(lanes, 0);  // not vector<bool>: lanes write concurrently

    run_chunked(lanes, scan_count, [&](unsigned tid, std::uint64_t begin, std::uint64_t end) {
        for (std::uint64_t i = begin; i < end; ++i) {
            // index 0 -> alpha 0, then +1, -1, +2, -2, ...
            std::uint64_t k = (i + 1) / 2;
            mpz_class alpha(static_cast<unsigned long>(k));
            if (i != 0 && i % 2 == 0) alpha = -alpha;
            CongruenceRoots roots = solve_quadratic_congruence(P, alpha, qf, cfg.root_cap);
            ++solved[tid];
            auto it = std::upper_bound(roots.roots.begin(), roots.roots.end(), cfg.brute_cutoff);
            for (; it != roots.roots.end() && *it <= local.band_hi; ++it) {
                band_roots[tid].push_back(*it);
                ++in_band[tid];
            }
            if (roots.truncated &&
                (roots.roots.empty() || roots.roots.back() < local.band_hi)) {
                truncation[tid] = 1;  // capped roots may have fallen inside the band
            }
        }
    });

    std::set<mpz_class> candidates;
    for (unsigned t = 0; t < lanes; ++t) {
        local.congruences_solved += solved[t];
        local.roots_in_band += in_band[t];
        local.truncation_seen = local.truncation_seen || truncation[t] != 0;
        for (auto& b : band_roots[t]) candidates.insert(std::move(b));
    }

    for (const auto& b : candidates) {
        Certification cert =
            certify_candidate(xi.spec(), default_digits_for_bound(cfg.max_b), xi.ceiling(), b, cfg.c);
        if (!cert.accepted) continue;
        Approximation hit;
        hit.b = b;
        hit.a = cert.a;
        hit.alpha = P * b * b - cert.a * Q;
        hit.source = SourceKind::Convergent;
        hit.conv_index = conv.index;
        hit.P = P;
        hit.Q = Q;
        hit.quality = cert.quality;
        hit.reduced = gcd(cert.a, b) == 1;
        out.push_back(std::move(hit));
        ++local.hits;
    }
    if (stats) *stats = local;
    return out;
}

std::vector<Approximation> convergent_search(const RealSpec& spec, const Convergent& conv,
                                             const SearchConfig& cfg) {
    CertifiedReal xi(spec, cfg.initial_digits(), cfg.precision_ceiling_digits);
    return convergent_search(xi, conv, cfg, nullptr);
}

SearchReport full_search(const RealSpec& spec, const SearchConfig& cfg) {
    cfg.validate();
    SearchReport report;
    report.xi = spec.describe();
    report.c = cfg.c;
    report.max_b = cfg.max_b;
    report.brute_cutoff = cfg.brute_cutoff;

    CertifiedReal xi(spec, cfg.initial_digits(), cfg.precision_ceiling_digits);

    mpz_class brute_to = std::min(cfg.brute_cutoff, cfg.max_b);
    std::vector<Approximation> brute =
        brute_scan_impl(spec, 1, brute_to, cfg.c, cfg.initial_digits(),
                        cfg.precision_ceiling_digits, cfg.threads);

    // A hit at b is reachable through convergents with Q between roughly
    // b^{1/b_exponent} (band coverage) and b^{1/(1-alpha_exponent)} (where the
    // alpha window is widest), so convergents are processed until Q passes
    // max_b^{1/(1-alpha_exponent)} and the bands reach max_b.
    mpq_class stop_exponent =
        mpq_class(cfg.alpha_exponent.get_den(),
                  cfg.alpha_exponent.get_den() - cfg.alpha_exponent.get_num());
    mpz_class stop_q = ceil_pow(cfg.max_b, stop_exponent);

    // Grow the quotient list until the stop rule is satisfiable or the CF ends.
    std::vector<Convergent> convs;
    bool terminated = false;
    for (std::size_t want = 32;; want *= 2) {
        PartialQuotients pq = partial_quotients(xi, want);
        convs = convergents(pq);
        terminated = pq.terminated;
        bool deep_enough = false;
        mpz_class max_band = 0;
        for (const auto& cv : convs) {
            max_band = std::max(max_band, ceil_pow(cv.Q, cfg.b_exponent));
            if (cv.Q > stop_q && max_band >= cfg.max_b) {
                deep_enough = true;
                break;
            }
        }
        if (deep_enough || terminated) break;
    }
    report.cf_terminated = terminated;

    std::map<mpz_class, Approximation> merged;
    for (auto& hit : brute) merged.emplace(hit.b, std::move(hit));
    report.brute_hits = merged.size();

    mpz_class coverage = brute_to;
    for (const auto& conv : convs) {
        if (conv.Q > stop_q && coverage >= cfg.max_b) break;
        ConvergentStats stats;
        std::vector<Approximation> hits = convergent_search(xi, conv, cfg, &stats);
        report.total_congruences += stats.congruences_solved;
        for (auto& hit : hits) {
            auto [it, inserted] = merged.emplace(hit.b, std::move(hit));
            if (!inserted) continue;  // brute or an earlier convergent saw this b first
            ++report.convergent_hits;
        }
        if (stats.processed) coverage = std::max(coverage, stats.band_hi);
        report.convergent_stats.push_back(std::move(stats));
    }
    report.coverage_limit = coverage;
    report.bands_cover_max_b = coverage >= cfg.max_b;

    report.approximations.reserve(merged.size());
    for (auto& [b, hit] : merged) report.approximations.push_back(std::move(hit));

    report.expected_curve.push_back({mpz_class(1), expected_count_double(mpz_class(1), cfg.c)});
    for (const auto& hit : report.approximations) {
        if (hit.b != 1 && hit.b != cfg.max_b) {
            report.expected_curve.push_back({hit.b, expected_count_double(hit.b, cfg.c)});
        }
    }
    if (cfg.max_b != 1) {
        report.expected_curve.push_back({cfg.max_b, expected_count_double(cfg.max_b, cfg.c)});
    }
    return report;
}

VerifyResult verify_approximation(const RealSpec& spec, const mpz_class& a, const mpz_class& b,
                                  const mpq_class& c, long precision_ceiling_digits) {
    if (b < 1) throw std::invalid_argument("b must be >= 1");
    if (c <= 0) throw std::invalid_argument("c must be positive");
    long initial = default_digits_for_bound(b);
    CertifiedReal xi(spec, initial, std::max(precision_ceiling_digits, 2 * initial));
    while (true) {
        mpq_class bound;
        switch (attempt_quality(xi.value(), a, b, c, bound)) {
            case Attempt::Accept: {
                VerifyResult r;
                r.accepted = true;
                r.quality = bound;
                r.detail = "certified quality < c at " + std::to_string(xi.digits()) + " digits";
                return r;
            }
            case Attempt::Reject: {
                VerifyResult r;
                r.accepted = false;
                r.quality = bound;
                r.detail = "rejected: certified quality >= c (lower bound exceeds threshold)";
                return r;
            }
            case Attempt::Widen:
                xi.escalate();
        }
    }
}

mpq_class expected_count(const mpz_class& max_b, const mpq_class& c) {
    if (max_b < 1) throw std::invalid_argument("max_b must be >= 1");
    mpfr_t gamma, lnb, acc;
    mpfr_init2(gamma, 256);
    mpfr_init2(lnb, 256);
    mpfr_init2(acc, 256);
    mpfr_const_euler(gamma, MPFR_RNDN);
    mpfr_set_z(lnb, max_b.get_mpz_t(), MPFR_RNDN);
    mpfr_log(lnb, lnb, MPFR_RNDN);
    mpfr_add(acc, gamma, lnb, MPFR_RNDN);
    mpfr_mul_q(acc, acc, c.get_mpq_t(), MPFR_RNDN);
    mpfr_mul_2ui(acc, acc, 1, MPFR_RNDN);

    mpz_class mant;
    mpfr_exp_t e = mpfr_get_z_2exp(mant.get_mpz_t(), acc);
    mpfr_clear(gamma);
    mpfr_clear(lnb);
    mpfr_clear(acc);
    mpq_class out(mant);
    mpz_class shift = 1;
    if (e >= 0) {
        mpz_mul_2exp(shift.get_mpz_t(), shift.get_mpz_t(), static_cast<mp_bitcnt_t>(e));
        out *= mpq_class(shift);
    } else {
        mpz_mul_2exp(shift.get_mpz_t(), shift.get_mpz_t(), static_cast<mp_bitcnt_t>(-e));
        out /= mpq_class(shift);
    }
    out.canonicalize();
    return out;
}

double expected_count_double(const mpz_class& b, const mpq_class& c) {
    return mpq_class(expected_count(b, c)).get_d();
}

}  // namespace sqden
