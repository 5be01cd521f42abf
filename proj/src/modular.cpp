#include "sqden/modular.hpp"

#include <algorithm>
#include <mutex>
#include <queue>
#include <stdexcept>

namespace sqden {

namespace {

constexpr std::uint32_t kTrialDivisionBound = 1'000'000;

const std::vector<std::uint32_t>& small_primes() {
    static std::vector<std::uint32_t> primes;
    static std::once_flag once;
    std::call_once(once, [] {
        std::vector<bool> sieve(kTrialDivisionBound + 1, true);
        sieve[0] = sieve[1] = false;
        for (std::uint32_t i = 2; static_cast<std::uint64_t>(i) * i <= kTrialDivisionBound; ++i) {
            if (!sieve[i]) continue;
            for (std::uint32_t j = i * i; j <= kTrialDivisionBound; j += i) sieve[j] = false;
        }
        for (std::uint32_t i = 2; i <= kTrialDivisionBound; ++i) {
            if (sieve[i]) primes.push_back(i);
        }
    });
    return primes;
}

struct SplitMix64 {
    std::uint64_t state;
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
};

// One Miller-Rabin round; n odd, n > 3, base in [2, n-2].
bool miller_rabin_round(const mpz_class& n, const mpz_class& base, const mpz_class& d,
                        unsigned long s) {
    mpz_class x;
    mpz_powm(x.get_mpz_t(), base.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
    if (x == 1 || x == n - 1) return true;
    for (unsigned long i = 1; i < s; ++i) {
        x = x * x % n;
        if (x == n - 1) return true;
        if (x == 1) return false;
    }
    return false;
}

mpz_class pow_mpz(const mpz_class& base, unsigned long e) {
    mpz_class r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
    return r;
}

// Pollard rho with Brent cycle detection and batched gcds. Returns a
// nontrivial factor of odd composite n, or 0 once the budget is exhausted.
// The polynomial constant advances deterministically, so runs reproduce.
mpz_class rho_brent(const mpz_class& n, std::uint64_t& budget) {
    for (unsigned long c = 1;; ++c) {
        mpz_class y = 2, g = 1, q = 1, x, ys;
        std::uint64_t r = 1;
        const std::uint64_t batch = 128;
        while (g == 1) {
            x = y;
            for (std::uint64_t i = 0; i < r; ++i) {
                if (budget == 0) return 0;
                --budget;
                y = (y * y + c) % n;
            }
            std::uint64_t k = 0;
            while (k < r && g == 1) {
                ys = y;
                std::uint64_t steps = std::min(batch, r - k);
                for (std::uint64_t i = 0; i < steps; ++i) {
                    if (budget == 0) return 0;
                    --budget;
                    y = (y * y + c) % n;
                    q = q * abs(x - y) % n;
                }
                mpz_gcd(g.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
                k += steps;
            }
            r *= 2;
        }
        if (g == n) {
            // Batch overshot; replay one step at a time.
            g = 1;
            while (g == 1) {
                if (budget == 0) return 0;
                --budget;
                ys = (ys * ys + c) % n;
                mpz_gcd(g.get_mpz_t(), mpz_class(abs(x - ys)).get_mpz_t(), n.get_mpz_t());
            }
        }
        if (g != n) return g;
        // cycle degenerated for this c; try the next polynomial
    }
}

// Splits composite m (no factors below the trial division bound) into primes,
// appending them to out. Returns false (leaving m in remainder) on budget
// exhaustion.
void split_composite(const mpz_class& m, std::uint64_t& budget, std::vector<mpz_class>& out,
                     mpz_class& remainder) {
    if (m == 1) return;
    if (is_probable_prime(m)) {
        out.push_back(m);
        return;
    }
    // Perfect powers trip up rho's cycle structure less efficiently; peel
    // them directly.
    if (mpz_perfect_power_p(m.get_mpz_t())) {
        for (unsigned long k = 2;; ++k) {
            mpz_class root;
            if (mpz_root(root.get_mpz_t(), m.get_mpz_t(), k)) {
                std::vector<mpz_class> base;
                mpz_class before = remainder;
                split_composite(root, budget, base, remainder);
                if (remainder != before) {
                    // the root's factorization stalled: k copies of its leftover
                    mpz_class leftover = remainder / before;
                    for (unsigned long i = 1; i < k; ++i) remainder *= leftover;
                }
                for (unsigned long i = 0; i < k; ++i) out.insert(out.end(), base.begin(), base.end());
                return;
            }
        }
    }
    mpz_class d = rho_brent(m, budget);
    if (d == 0) {
        remainder *= m;
        return;
    }
    split_composite(d, budget, out, remainder);
    split_composite(m / d, budget, out, remainder);
}

void append_sorted_unique(std::vector<mpz_class>& roots) {
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
}

// Smallest-first enumeration of CRT combinations when the full product is too
// large to materialize: walk the arithmetic progressions of the sparsest part
// in ascending order, filtering on the remaining parts.
CongruenceRoots crt_progression_scan(const std::vector<const CongruenceRoots*>& parts,
                                     const mpz_class& modulus, std::size_t cap) {
    std::size_t base_idx = 0;
    mpq_class best_density(parts[0]->roots.size());
    best_density /= mpq_class(parts[0]->modulus);
    for (std::size_t i = 1; i < parts.size(); ++i) {
        mpq_class d(parts[i]->roots.size());
        d /= mpq_class(parts[i]->modulus);
        if (d < best_density) {
            best_density = d;
            base_idx = i;
        }
    }
    const CongruenceRoots& base = *parts[base_idx];

    using Entry = std::pair<mpz_class, std::size_t>;  // (candidate value, root index)
    auto cmp = [](const Entry& a, const Entry& b) { return a.first > b.first; };
    std::priority_queue<Entry, std::vector<Entry>, decltype(cmp)> heap(cmp);
    for (std::size_t i = 0; i < base.roots.size(); ++i) heap.emplace(base.roots[i], i);

    CongruenceRoots out;
    out.modulus = modulus;
    out.truncated = true;  // only reached once the cap is known to be exceeded
    constexpr std::uint64_t kScanLimit = std::uint64_t{1} << 26;
    std::uint64_t scanned = 0;
    while (!heap.empty() && out.roots.size() < cap && scanned < kScanLimit) {
        auto [value, idx] = heap.top();
        heap.pop();
        ++scanned;
        bool ok = true;
        for (std::size_t i = 0; i < parts.size() && ok; ++i) {
            if (i == base_idx) continue;
            mpz_class r = value % parts[i]->modulus;
            ok = parts[i]->contains(r);
        }
        if (ok) out.roots.push_back(value);
        mpz_class next = value + base.modulus;
        if (next < modulus) heap.emplace(next, idx);
    }
    return out;
}

}  // namespace

mpz_class FactoredInteger::recompose() const {
    mpz_class prod = complete ? 1 : remainder;
    for (const auto& [p, e] : factors) prod *= pow_mpz(p, e);
    return prod;
}

bool CongruenceRoots::contains(const mpz_class& r) const {
    return std::binary_search(roots.begin(), roots.end(), r);
}

bool is_probable_prime(const mpz_class& n) {
    if (n < 2) return false;
    for (unsigned long p : {2ul, 3ul, 5ul, 7ul, 11ul, 13ul, 17ul, 19ul, 23ul, 29ul, 31ul, 37ul}) {
        if (mpz_divisible_ui_p(n.get_mpz_t(), p)) return n == p;
    }
    mpz_class d = n - 1;
    unsigned long s = static_cast<unsigned long>(mpz_scan1(d.get_mpz_t(), 0));
    mpz_fdiv_q_2exp(d.get_mpz_t(), d.get_mpz_t(), s);

    // Jaeschke: the first seven primes witness every composite < 3.4e14.
    if (n < mpz_class("330000000000000")) {
        for (unsigned long b : {2ul, 3ul, 5ul, 7ul, 11ul, 13ul, 17ul}) {
            if (!miller_rabin_round(n, mpz_class(b), d, s)) return false;
        }
        return true;
    }

    SplitMix64 rng{0x5eed0fu ^ mpz_get_ui(n.get_mpz_t())};
    mpz_class span = n - 3;
    for (int round = 0; round < 64; ++round) {
        mpz_class raw = 0;
        for (int chunk = 0; chunk * 64 < static_cast<int>(mpz_sizeinbase(n.get_mpz_t(), 2)) + 64;
             ++chunk) {
            mpz_class piece(static_cast<unsigned long>(rng.next() >> 32));
            piece <<= 32;
            piece += static_cast<unsigned long>(rng.next() & 0xffffffffull);
            raw = (raw << 64) + piece;
        }
        mpz_class base = raw % span + 2;
        if (!miller_rabin_round(n, base, d, s)) return false;
    }
    return true;
}

FactoredInteger factorize(const mpz_class& n, std::uint64_t iteration_budget) {
    if (n < 1) throw std::invalid_argument("factorize requires n >= 1");
    FactoredInteger out;
    out.n = n;
    if (n == 1) return out;

    mpz_class m = n;
    std::vector<mpz_class> primes_found;
    for (std::uint32_t p : small_primes()) {
        if (mpz_class(p) * p > m) break;
        while (mpz_divisible_ui_p(m.get_mpz_t(), p)) {
            primes_found.emplace_back(p);
            mpz_divexact_ui(m.get_mpz_t(), m.get_mpz_t(), p);
        }
    }
    if (m > 1) {
        if (m <= mpz_class(kTrialDivisionBound) * kTrialDivisionBound) {
            primes_found.push_back(m);  // no factor below the bound, so prime
        } else {
            split_composite(m, iteration_budget, primes_found, out.remainder);
        }
    }

    std::sort(primes_found.begin(), primes_found.end());
    for (const auto& p : primes_found) {
        if (!out.factors.empty() && out.factors.back().p == p) {
            ++out.factors.back().e;
        } else {
            out.factors.push_back({p, 1});
        }
    }
    out.complete = (out.remainder == 1);
    return out;
}

CongruenceRoots sqrt_mod_prime(const mpz_class& c, const mpz_class& p) {
    CongruenceRoots out;
    out.modulus = p;
    if (c == 0) {
        out.roots = {mpz_class(0)};
        return out;
    }
    if (p == 2) {
        out.roots = {mpz_class(1)};
        return out;
    }
    if (mpz_legendre(c.get_mpz_t(), p.get_mpz_t()) != 1) return out;

    mpz_class r;
    if (p % 4 == 3) {
        mpz_class e = (p + 1) / 4;
        mpz_powm(r.get_mpz_t(), c.get_mpz_t(), e.get_mpz_t(), p.get_mpz_t());
    } else {
        // Tonelli-Shanks; the non-residue scan 2, 3, 4, ... is deterministic.
        mpz_class q = p - 1;
        unsigned long s = static_cast<unsigned long>(mpz_scan1(q.get_mpz_t(), 0));
        mpz_fdiv_q_2exp(q.get_mpz_t(), q.get_mpz_t(), s);
        mpz_class z = 2;
        while (mpz_legendre(z.get_mpz_t(), p.get_mpz_t()) != -1) ++z;
        mpz_class m(s), t, cc;
        mpz_powm(cc.get_mpz_t(), z.get_mpz_t(), q.get_mpz_t(), p.get_mpz_t());
        mpz_powm(t.get_mpz_t(), c.get_mpz_t(), q.get_mpz_t(), p.get_mpz_t());
        mpz_class e = (q + 1) / 2;
        mpz_powm(r.get_mpz_t(), c.get_mpz_t(), e.get_mpz_t(), p.get_mpz_t());
        while (t != 1) {
            mpz_class t2 = t;
            unsigned long i = 0;
            while (t2 != 1) {
                t2 = t2 * t2 % p;
                ++i;
            }
            mpz_class b = cc;
            for (unsigned long j = 0; j + i + 1 < mpz_get_ui(m.get_mpz_t()); ++j) b = b * b % p;
            m = i;
            cc = b * b % p;
            t = t * cc % p;
            r = r * b % p;
        }
    }
    mpz_class other = p - r;
    out.roots = r < other ? std::vector<mpz_class>{r, other} : std::vector<mpz_class>{other, r};
    return out;
}

CongruenceRoots roots_mod_prime_power(const mpz_class& c, const mpz_class& p, unsigned e,
                                      std::size_t cap) {
    if (e == 0) throw std::invalid_argument("prime power exponent must be >= 1");
    mpz_class pe = pow_mpz(p, e);
    if (c < 0 || c >= pe) throw std::invalid_argument("residue out of range");

    CongruenceRoots out;
    out.modulus = pe;

    if (c == 0) {
        // x^2 = 0 (mod p^e) iff p^ceil(e/2) | x.
        mpz_class step = pow_mpz(p, (e + 1) / 2);
        for (mpz_class x = 0; x < pe; x += step) {
            if (out.roots.size() >= cap) {
                out.truncated = true;
                return out;
            }
            out.roots.push_back(x);
        }
        return out;
    }

    unsigned v = 0;
    mpz_class unit = c;
    while (mpz_divisible_p(unit.get_mpz_t(), p.get_mpz_t())) {
        mpz_divexact(unit.get_mpz_t(), unit.get_mpz_t(), p.get_mpz_t());
        ++v;
    }
    if (v > 0) {
        if (v % 2 != 0) return out;  // odd valuation: no solutions
        unsigned k = v / 2;
        CongruenceRoots sub = roots_mod_prime_power(unit, p, e - v, cap);
        if (sub.roots.empty()) return out;
        // x = p^k u + t p^{e-k}; the t-major, u-minor order is ascending.
        mpz_class pk = pow_mpz(p, k);
        mpz_class stride = pow_mpz(p, e - k);
        for (mpz_class t = 0; t * stride < pe; ++t) {
            for (const auto& u : sub.roots) {
                if (out.roots.size() >= cap) {
                    out.truncated = true;
                    return out;
                }
                out.roots.push_back(pk * u + t * stride);
            }
        }
        out.truncated = sub.truncated;
        return out;
    }

    if (p == 2) {
        unsigned long cl = mpz_get_ui(mpz_class(c % 8).get_mpz_t());
        if (e == 1) {
            out.roots = {mpz_class(1)};
            return out;
        }
        if (e == 2) {
            if (c % 4 == 1) out.roots = {mpz_class(1), mpz_class(3)};
            return out;
        }
        if (cl % 8 != 1) return out;  // odd squares are 1 mod 8
        mpz_class r = 1;
        for (unsigned k = 3; k < e; ++k) {
            mpz_class mod_next = pow_mpz(p, k + 1);
            if ((r * r - c) % mod_next != 0) r += pow_mpz(p, k - 1);
        }
        mpz_class half = pe / 2;
        out.roots = {r, pe - r, (r + half) % pe, (pe - r + half) % pe};
        append_sorted_unique(out.roots);
        return out;
    }

    CongruenceRoots base = sqrt_mod_prime(c % p, p);
    if (base.roots.empty()) return out;
    // Hensel: lift r to r + t p^k with t = (c - r^2)/p^k * (2r)^{-1} mod p.
    mpz_class r = base.roots.front();
    mpz_class pk = p;
    for (unsigned k = 1; k < e; ++k) {
        mpz_class pk1 = pk * p;
        mpz_class defect = (c - r * r) / pk % p;
        if (defect < 0) defect += p;
        mpz_class inv2r;
        mpz_class two_r = 2 * r % p;
        mpz_invert(inv2r.get_mpz_t(), two_r.get_mpz_t(), p.get_mpz_t());
        r = (r + defect * inv2r % p * pk) % pk1;
        pk = pk1;
    }
    out.roots = {r, pe - r};
    append_sorted_unique(out.roots);
    return out;
}

CongruenceRoots crt_combine(const std::vector<CongruenceRoots>& parts, std::size_t cap) {
    if (cap == 0) throw std::invalid_argument("cap must be >= 1");
    CongruenceRoots out;
    out.modulus = 1;
    out.roots = {mpz_class(0)};
    if (parts.empty()) return out;

    mpz_class modulus = 1;
    bool any_truncated = false;
    bool any_empty = false;
    mpz_class total = 1;
    for (const auto& part : parts) {
        mpz_class g;
        mpz_gcd(g.get_mpz_t(), modulus.get_mpz_t(), part.modulus.get_mpz_t());
        if (g != 1) throw std::invalid_argument("crt_combine requires pairwise coprime moduli");
        modulus *= part.modulus;
        any_truncated = any_truncated || part.truncated;
        any_empty = any_empty || part.roots.empty();
        total *= static_cast<unsigned long>(part.roots.size());
    }
    out.modulus = modulus;
    if (any_empty) {
        out.roots.clear();
        return out;
    }

    constexpr unsigned long kEnumLimit = 1ul << 20;
    if (total > mpz_class(cap) && total > kEnumLimit) {
        std::vector<const CongruenceRoots*> ptrs;
        for (const auto& part : parts) ptrs.push_back(&part);
        return crt_progression_scan(ptrs, modulus, cap);
    }

    std::vector<mpz_class> acc{mpz_class(0)};
    mpz_class acc_mod = 1;
    for (const auto& part : parts) {
        mpz_class inv;
        mpz_class am = acc_mod % part.modulus;
        std::vector<mpz_class> next;
        next.reserve(acc.size() * part.roots.size());
        if (part.modulus == 1) continue;
        mpz_invert(inv.get_mpz_t(), am.get_mpz_t(), part.modulus.get_mpz_t());
        for (const auto& r0 : acc) {
            for (const auto& r : part.roots) {
                mpz_class delta = (r - r0) % part.modulus;
                if (delta < 0) delta += part.modulus;
                next.push_back(r0 + acc_mod * (delta * inv % part.modulus));
            }
        }
        acc = std::move(next);
        acc_mod *= part.modulus;
    }
    std::sort(acc.begin(), acc.end());
    if (acc.size() > cap) {
        acc.resize(cap);
        out.truncated = true;
    }
    out.truncated = out.truncated || any_truncated;
    out.roots = std::move(acc);
    return out;
}

CongruenceRoots solve_quadratic_congruence(const mpz_class& P, const mpz_class& alpha,
                                           const FactoredInteger& Qf, std::size_t cap) {
    if (!Qf.complete) throw std::invalid_argument("solve_quadratic_congruence needs a complete factorization");
    const mpz_class& Q = Qf.n;
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), P.get_mpz_t(), Q.get_mpz_t());
    if (g != 1) throw std::invalid_argument("solve_quadratic_congruence requires gcd(P, Q) = 1");

    CongruenceRoots out;
    out.modulus = Q;
    if (Q == 1) {
        out.roots = {mpz_class(0)};
        return out;
    }
    mpz_class a = alpha % Q;
    if (a < 0) a += Q;
    mpz_class pinv;
    mpz_class pm = P % Q;
    if (pm < 0) pm += Q;
    mpz_invert(pinv.get_mpz_t(), pm.get_mpz_t(), Q.get_mpz_t());
    mpz_class c = a * pinv % Q;

    std::vector<CongruenceRoots> parts;
    parts.reserve(Qf.factors.size());
    for (const auto& [p, e] : Qf.factors) {
        mpz_class pe = pow_mpz(p, e);
        parts.push_back(roots_mod_prime_power(c % pe, p, e, cap));
        if (parts.back().roots.empty()) {
            out.roots.clear();
            return out;
        }
    }
    return crt_combine(parts, cap);
}

std::optional<LinearSolution> solve_linear_congruence(const mpz_class& P, const mpz_class& alpha,
                                                      const mpz_class& Q) {
    if (Q < 1) throw std::invalid_argument("modulus must be >= 1");
    if (Q == 1) return LinearSolution{0, 1};
    mpz_class pm = P % Q;
    if (pm < 0) pm += Q;
    mpz_class am = alpha % Q;
    if (am < 0) am += Q;
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), pm.get_mpz_t(), Q.get_mpz_t());
    if (pm == 0) g = Q;
    if (am % g != 0) return std::nullopt;
    mpz_class q_red = Q / g;
    if (q_red == 1) return LinearSolution{0, 1};
    mpz_class p_red = pm / g, a_red = am / g;
    mpz_class inv;
    mpz_invert(inv.get_mpz_t(), p_red.get_mpz_t(), q_red.get_mpz_t());
    return LinearSolution{a_red * inv % q_red, q_red};
}

}  // namespace sqden
