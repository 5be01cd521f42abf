#include "sqden/realnum.hpp"

#include <mpfr.h>

#include <cctype>
#include <cmath>
#include <cstdlib>

namespace sqden {

namespace {

// Exact rational from an mpfr value (every finite mpfr value is m * 2^e).
mpq_class mpq_from_mpfr(mpfr_srcptr x) {
    if (mpfr_zero_p(x)) return mpq_class(0);
    mpz_class mant;
    mpfr_exp_t e = mpfr_get_z_2exp(mant.get_mpz_t(), x);
    mpq_class q(mant);
    if (e > 0) {
        mpz_class shift = 1;
        mpz_mul_2exp(shift.get_mpz_t(), shift.get_mpz_t(), static_cast<mp_bitcnt_t>(e));
        q *= shift;
    } else if (e < 0) {
        mpz_class shift = 1;
        mpz_mul_2exp(shift.get_mpz_t(), shift.get_mpz_t(), static_cast<mp_bitcnt_t>(-e));
        q /= mpq_class(shift);
    }
    q.canonicalize();
    return q;
}

mpfr_prec_t bits_for_digits(long digits) {
    return static_cast<mpfr_prec_t>(std::ceil(digits * 3.3219280948873626) + 32);
}

// Evaluates a named constant with the requested rounding direction.
void eval_constant(mpfr_ptr out, NamedConstant c, mpfr_rnd_t rnd) {
    switch (c) {
        case NamedConstant::Pi:
            mpfr_const_pi(out, rnd);
            break;
        case NamedConstant::E: {
            mpfr_t one;
            mpfr_init2(one, 8);
            mpfr_set_ui(one, 1, MPFR_RNDN);
            mpfr_exp(out, one, rnd);
            mpfr_clear(one);
            break;
        }
        case NamedConstant::Sqrt2:
            mpfr_sqrt_ui(out, 2, rnd);
            break;
        case NamedConstant::Golden:
            // (1 + sqrt 5) / 2; division by 2 and +1 are exact in binary.
            mpfr_sqrt_ui(out, 5, rnd);
            mpfr_add_ui(out, out, 1, rnd);
            mpfr_div_2ui(out, out, 1, rnd);
            break;
        case NamedConstant::EulerGamma:
            mpfr_const_euler(out, rnd);
            break;
    }
}

PrecisionReal enclosure_from_constant(NamedConstant c, long digits) {
    mpfr_prec_t prec = bits_for_digits(digits);
    mpfr_t lo, hi;
    mpfr_init2(lo, prec);
    mpfr_init2(hi, prec);
    eval_constant(lo, c, MPFR_RNDD);
    eval_constant(hi, c, MPFR_RNDU);
    mpq_class qlo = mpq_from_mpfr(lo);
    mpq_class qhi = mpq_from_mpfr(hi);
    mpfr_clear(lo);
    mpfr_clear(hi);
    PrecisionReal r;
    r.center = (qlo + qhi) / 2;
    r.radius = (qhi - qlo) / 2;
    r.digits = digits;
    return r;
}

mpq_class parse_decimal(const std::string& text) {
    std::string s = text;
    bool neg = false;
    std::size_t i = 0;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
        neg = (s[i] == '-');
        ++i;
    }
    std::string int_part, frac_part;
    bool saw_dot = false, saw_digit = false;
    for (; i < s.size(); ++i) {
        if (s[i] == '.') {
            if (saw_dot) throw std::invalid_argument("malformed decimal literal: " + text);
            saw_dot = true;
        } else if (std::isdigit(static_cast<unsigned char>(s[i]))) {
            saw_digit = true;
            (saw_dot ? frac_part : int_part) += s[i];
        } else {
            throw std::invalid_argument("malformed decimal literal: " + text);
        }
    }
    if (!saw_digit) throw std::invalid_argument("malformed decimal literal: " + text);
    mpz_class numerator(int_part.empty() ? "0" : int_part);
    for (char d : frac_part) {
        numerator = numerator * 10 + (d - '0');
    }
    mpz_class denominator = 1;
    mpz_ui_pow_ui(denominator.get_mpz_t(), 10, frac_part.size());
    mpq_class q(numerator, denominator);
    q.canonicalize();
    return neg ? mpq_class(-q) : q;
}

mpq_class eval_cf_terms(const std::vector<mpz_class>& terms) {
    // Finite CF denotes an exact rational; fold back to front.
    mpq_class value(terms.back());
    for (auto it = terms.rbegin() + 1; it != terms.rend(); ++it) {
        value = mpq_class(*it) + 1 / value;
    }
    return value;
}

}  // namespace

RealSpec RealSpec::named(NamedConstant c) {
    RealSpec s;
    s.kind = RealKind::NamedConstant;
    s.constant = c;
    return s;
}

RealSpec RealSpec::decimal_literal(const std::string& text) {
    RealSpec s;
    s.kind = RealKind::DecimalLiteral;
    s.decimal = text;
    parse_decimal(text);  // validate eagerly
    return s;
}

RealSpec RealSpec::rational(const mpz_class& num, const mpz_class& den) {
    if (den == 0) throw std::invalid_argument("rational spec with zero denominator");
    RealSpec s;
    s.kind = RealKind::Rational;
    s.num = den < 0 ? mpz_class(-num) : num;
    s.den = abs(den);
    return s;
}

RealSpec RealSpec::from_cf_terms(std::vector<mpz_class> terms) {
    if (terms.empty()) throw std::invalid_argument("empty cf-terms spec");
    for (std::size_t i = 1; i < terms.size(); ++i) {
        if (terms[i] < 1) throw std::invalid_argument("cf-terms after the first must be >= 1");
    }
    RealSpec s;
    s.kind = RealKind::CfTerms;
    s.cf_terms = std::move(terms);
    return s;
}

RealSpec RealSpec::parse(const std::string& text) {
    if (text == "pi") return named(NamedConstant::Pi);
    if (text == "e") return named(NamedConstant::E);
    if (text == "sqrt2") return named(NamedConstant::Sqrt2);
    if (text == "golden") return named(NamedConstant::Golden);
    if (text == "gamma") return named(NamedConstant::EulerGamma);
    if (auto slash = text.find('/'); slash != std::string::npos) {
        mpz_class num(text.substr(0, slash));
        mpz_class den(text.substr(slash + 1));
        return rational(num, den);
    }
    if (text.find(',') != std::string::npos) {
        std::vector<mpz_class> terms;
        std::size_t start = 0;
        while (start <= text.size()) {
            std::size_t comma = text.find(',', start);
            std::string item = text.substr(start, comma == std::string::npos ? std::string::npos
                                                                             : comma - start);
            if (item.empty()) throw std::invalid_argument("malformed cf-terms: " + text);
            terms.emplace_back(item);
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        return from_cf_terms(std::move(terms));
    }
    return decimal_literal(text);
}

mpq_class RealSpec::exact_value() const {
    switch (kind) {
        case RealKind::DecimalLiteral:
            return parse_decimal(decimal);
        case RealKind::Rational: {
            mpq_class q(num, den);
            q.canonicalize();
            return q;
        }
        case RealKind::CfTerms:
            return eval_cf_terms(cf_terms);
        case RealKind::NamedConstant:
            break;
    }
    throw std::logic_error("exact_value on a named constant");
}

std::string RealSpec::describe() const {
    switch (kind) {
        case RealKind::NamedConstant:
            switch (constant) {
                case NamedConstant::Pi: return "pi";
                case NamedConstant::E: return "e";
                case NamedConstant::Sqrt2: return "sqrt2";
                case NamedConstant::Golden: return "golden";
                case NamedConstant::EulerGamma: return "gamma";
            }
            break;
        case RealKind::DecimalLiteral:
            return decimal;
        case RealKind::Rational:
            return num.get_str() + "/" + den.get_str();
        case RealKind::CfTerms: {
            std::string s;
            for (std::size_t i = 0; i < cf_terms.size(); ++i) {
                if (i) s += ',';
                s += cf_terms[i].get_str();
            }
            return s;
        }
    }
    return "?";
}

PrecisionReal make_real(const RealSpec& spec, long digits) {
    if (digits < 10) throw std::invalid_argument("working precision must be at least 10 digits");
    if (spec.kind == RealKind::NamedConstant) {
        return enclosure_from_constant(spec.constant, digits);
    }
    PrecisionReal r;
    r.center = spec.exact_value();
    r.radius = 0;
    r.digits = digits;
    return r;
}

PrecisionReal refine(const RealSpec& spec, const PrecisionReal& real, long digits) {
    if (digits <= real.digits) {
        throw std::invalid_argument("refine requires a strictly higher precision");
    }
    return make_real(spec, digits);
}

Compare compare_interval(const mpq_class& lo, const mpq_class& hi, const mpq_class& threshold) {
    if (hi < threshold) return Compare::Below;
    if (lo > threshold) return Compare::Above;
    return Compare::Undecidable;
}

Compare certified_compare(const PrecisionReal& x, const mpq_class& threshold) {
    return compare_interval(x.lower(), x.upper(), threshold);
}

long default_digits_for_bound(const mpz_class& max_b) {
    std::size_t decimal_digits = mpz_sizeinbase(max_b.get_mpz_t(), 10);
    return static_cast<long>(3 * decimal_digits) + 30;
}

CertifiedReal::CertifiedReal(RealSpec spec, long initial_digits, long ceiling_digits)
    : spec_(std::move(spec)),
      current_(make_real(spec_, initial_digits)),
      ceiling_digits_(ceiling_digits) {}

void CertifiedReal::escalate() {
    long next = current_.digits * 2;
    if (next > ceiling_digits_) {
        throw PrecisionCeilingError(current_.digits,
                                    "precision ceiling of " + std::to_string(ceiling_digits_) +
                                        " digits exceeded");
    }
    current_ = refine(spec_, current_, next);
}

}  // namespace sqden
