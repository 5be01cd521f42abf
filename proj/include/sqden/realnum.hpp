#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>
#include <vector>

namespace sqden {

enum class RealKind { NamedConstant, DecimalLiteral, Rational, CfTerms };

enum class NamedConstant { Pi, E, Sqrt2, Golden, EulerGamma };

/// Definition of a target real xi: one of the five supported constants, an
/// exact decimal literal, an exact rational, or a finite list of continued
/// fraction terms (which denotes an exact rational).
struct RealSpec {
    RealKind kind = RealKind::Rational;
    NamedConstant constant = NamedConstant::Pi;
    std::string decimal;
    mpz_class num = 0, den = 1;          // raw rational payload
    std::vector<mpz_class> cf_terms;

    static RealSpec named(NamedConstant c);
    static RealSpec decimal_literal(const std::string& text);
    static RealSpec rational(const mpz_class& num, const mpz_class& den);
    static RealSpec from_cf_terms(std::vector<mpz_class> terms);

    /// Parses the CLI syntax: a constant name (pi, e, sqrt2, golden, gamma),
    /// "p/q", a comma-separated list of CF terms, or a decimal literal.
    static RealSpec parse(const std::string& text);

    /// True when xi is an exact rational (decimal, rational or cf-terms
    /// payload); named constants are the only inexact kind.
    bool is_exact() const { return kind != RealKind::NamedConstant; }

    /// Exact value for the rational kinds. Throws for named constants.
    mpq_class exact_value() const;

    std::string describe() const;
};

/// Certified enclosure of xi: the true value lies in
/// [center - radius, center + radius], both endpoints exact rationals.
struct PrecisionReal {
    mpq_class center;
    mpq_class radius;   // >= 0
    long digits = 0;    // working decimal precision used to build it

    mpq_class lower() const { return center - radius; }
    mpq_class upper() const { return center + radius; }
    bool exact() const { return radius == 0; }
};

struct PrecisionCeilingError : std::runtime_error {
    long digits_reached;
    explicit PrecisionCeilingError(long digits, const std::string& what)
        : std::runtime_error(what), digits_reached(digits) {}
};

/// Builds a certified enclosure of the spec's value at the given working
/// precision. Exact kinds yield radius 0; constants yield a directed-rounding
/// interval with radius well below 10^(-digits+2).
PrecisionReal make_real(const RealSpec& spec, long digits);

/// Re-evaluates at a higher precision. Both the old and the new interval
/// contain xi; nesting is not guaranteed.
PrecisionReal refine(const RealSpec& spec, const PrecisionReal& real, long digits);

enum class Compare { Below, Above, Undecidable };

/// Entire interval strictly below/above the threshold, else Undecidable.
Compare certified_compare(const PrecisionReal& x, const mpq_class& threshold);
Compare compare_interval(const mpq_class& lo, const mpq_class& hi, const mpq_class& threshold);

/// Default working precision for searches bounded by denominator base B:
/// ceil(3*log10(B)) + 30 guard digits, since the quality test divides by b^3.
long default_digits_for_bound(const mpz_class& max_b);

/// A spec plus its current enclosure, escalating by doubling the working
/// precision on demand up to a ceiling. Escalation is the only mutation;
/// copies are cheap and independent, so give each worker thread its own.
class CertifiedReal {
  public:
    CertifiedReal(RealSpec spec, long initial_digits, long ceiling_digits);

    const PrecisionReal& value() const { return current_; }
    const RealSpec& spec() const { return spec_; }
    long digits() const { return current_.digits; }
    long ceiling() const { return ceiling_digits_; }

    /// Doubles the working precision. Throws PrecisionCeilingError once the
    /// ceiling would be exceeded.
    void escalate();

  private:
    RealSpec spec_;
    PrecisionReal current_;
    long ceiling_digits_;
};

}  // namespace sqden
