#include "sqden/cf.hpp"

#include <doctest.h>

#include <algorithm>

using namespace sqden;

namespace {

// Independent CF oracle: plain floor/invert loop on an exact rational taken
// from the midpoint of a high-precision enclosure. Valid as long as the
// requested number of terms is far below the precision.
std::vector<mpz_class> naive_cf(const mpq_class& x0, std::size_t n) {
    std::vector<mpz_class> terms;
    mpq_class x = x0;
    for (std::size_t i = 0; i < n; ++i) {
        mpz_class f;
        mpz_fdiv_q(f.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
        terms.push_back(f);
        mpq_class frac = x - mpq_class(f);
        if (frac == 0) break;
        x = 1 / frac;
    }
    return terms;
}

PartialQuotients quotients_of(const RealSpec& spec, std::size_t terms) {
    CertifiedReal xi(spec, 32, 1 << 16);
    return partial_quotients(xi, terms);
}

}  // namespace

TEST_CASE("rational 22/7 terminates with the canonical expansion") {
    PartialQuotients pq = quotients_of(RealSpec::rational(22, 7), 10);
    CHECK(pq.terminated);
    REQUIRE(pq.terms.size() == 2);
    CHECK(pq.terms[0] == 3);
    CHECK(pq.terms[1] == 7);
}

TEST_CASE("canonical form avoids a trailing 1") {
    // 355/113 = [3; 7, 16], never [3; 7, 15, 1]
    PartialQuotients pq = quotients_of(RealSpec::rational(355, 113), 10);
    CHECK(pq.terminated);
    REQUIRE(pq.terms.size() == 3);
    CHECK(pq.terms[2] == 16);
}

TEST_CASE("pi's first five quotients match an independent computation") {
    PartialQuotients pq = quotients_of(RealSpec::named(NamedConstant::Pi), 5);
    std::vector<mpz_class> expected{3, 7, 15, 1, 292};
    CHECK(pq.terms == expected);
    CHECK_FALSE(pq.terminated);

    PrecisionReal fifty = make_real(RealSpec::named(NamedConstant::Pi), 50);
    auto oracle = naive_cf(fifty.center, 5);
    CHECK(pq.terms == oracle);
}

TEST_CASE("golden ratio is all ones") {
    PartialQuotients pq = quotients_of(RealSpec::named(NamedConstant::Golden), 6);
    REQUIRE(pq.terms.size() == 6);
    for (const auto& t : pq.terms) CHECK(t == 1);
}

TEST_CASE("quotients are independent of the starting precision") {
    for (long digits : {12L, 25L, 60L}) {
        CertifiedReal xi(RealSpec::named(NamedConstant::E), digits, 1 << 16);
        PartialQuotients pq = partial_quotients(xi, 12);
        std::vector<mpz_class> expected{2, 1, 2, 1, 1, 4, 1, 1, 6, 1, 1, 8};
        CHECK(pq.terms == expected);
    }
}

TEST_CASE("convergents of [3,7,15,1]") {
    auto convs = convergents({3, 7, 15, 1});
    REQUIRE(convs.size() == 4);
    CHECK(convs[0].P == 3);
    CHECK(convs[0].Q == 1);
    CHECK(convs[1].P == 22);
    CHECK(convs[1].Q == 7);
    CHECK(convs[2].P == 333);
    CHECK(convs[2].Q == 106);
    CHECK(convs[3].P == 355);
    CHECK(convs[3].Q == 113);

    // brute check: |pi - 355/113| < 1/113^2 via a tight enclosure
    PrecisionReal pi = make_real(RealSpec::named(NamedConstant::Pi), 30);
    mpq_class diff_lo = abs(pi.lower() - mpq_class(355, 113));
    mpq_class diff_hi = abs(pi.upper() - mpq_class(355, 113));
    CHECK(std::max(diff_lo, diff_hi) < mpq_class(1, 113 * 113));
}

TEST_CASE("fibonacci ratios from all-ones quotients") {
    auto convs = convergents({1, 1, 1});
    REQUIRE(convs.size() == 3);
    CHECK(convs[0].P == 1);
    CHECK(convs[0].Q == 1);
    CHECK(convs[1].P == 2);
    CHECK(convs[1].Q == 1);
    CHECK(convs[2].P == 3);
    CHECK(convs[2].Q == 2);
}

TEST_CASE("convergent invariants for pi") {
    PartialQuotients pq = quotients_of(RealSpec::named(NamedConstant::Pi), 25);
    auto convs = convergents(pq);
    REQUIRE(convs.size() == 25);
    PrecisionReal pi = make_real(RealSpec::named(NamedConstant::Pi), 80);

    for (std::size_t i = 0; i < convs.size(); ++i) {
        const auto& c = convs[i];
        CHECK(gcd(c.P, c.Q) == 1);
        if (i >= 2) CHECK(convs[i].Q > convs[i - 1].Q);
        // determinant identity
        if (i >= 1) {
            mpz_class det = convs[i].P * convs[i - 1].Q - convs[i - 1].P * convs[i].Q;
            CHECK(abs(det) == 1);
        }
        // residual bound is valid and within 1/Q^2
        mpq_class err_lo = pi.lower() - mpq_class(c.P, c.Q);
        mpq_class err_hi = pi.upper() - mpq_class(c.P, c.Q);
        mpq_class err_max = std::max(abs(err_lo), abs(err_hi));
        CHECK(err_max <= c.residual_bound);
        CHECK(c.residual_bound <= mpq_class(1) / mpq_class(c.Q * c.Q));
        // |xi Q - P| < 1/Q, certified
        mpq_class s_lo = pi.lower() * c.Q - mpq_class(c.P);
        mpq_class s_hi = pi.upper() * c.Q - mpq_class(c.P);
        CHECK(std::max(abs(s_lo), abs(s_hi)) < mpq_class(1) / mpq_class(c.Q));
    }
}

TEST_CASE("signs of xi - P/Q alternate") {
    PartialQuotients pq = quotients_of(RealSpec::named(NamedConstant::Sqrt2), 15);
    auto convs = convergents(pq);
    PrecisionReal s2 = make_real(RealSpec::named(NamedConstant::Sqrt2), 60);
    int last_sign = 0;
    for (const auto& c : convs) {
        mpq_class lo = s2.lower() - mpq_class(c.P, c.Q);
        mpq_class hi = s2.upper() - mpq_class(c.P, c.Q);
        REQUIRE(lo * hi > 0);  // certified sign
        int sign = lo > 0 ? 1 : -1;
        if (last_sign != 0) CHECK(sign == -last_sign);
        last_sign = sign;
    }
}

TEST_CASE("terminated rational expansion ends with residual zero") {
    PartialQuotients pq = quotients_of(RealSpec::rational(355, 113), 10);
    auto convs = convergents(pq);
    CHECK(convs.back().residual_bound == 0);
    CHECK(convs.back().P == 355);
    CHECK(convs.back().Q == 113);
}

TEST_CASE("the spec-plus-enclosure overload auto-escalates") {
    RealSpec pi = RealSpec::named(NamedConstant::Pi);
    PrecisionReal coarse = make_real(pi, 12);
    PartialQuotients pq = partial_quotients(pi, coarse, 20);
    REQUIRE(pq.terms.size() == 20);
    CHECK(pq.digits_used > 12);  // 20 terms cannot be certified from 12 digits
    std::vector<mpz_class> head{3, 7, 15, 1, 292};
    CHECK(std::equal(head.begin(), head.end(), pq.terms.begin()));
}

TEST_CASE("argument validation") {
    CertifiedReal xi(RealSpec::named(NamedConstant::Pi), 16, 1 << 16);
    CHECK_THROWS_AS(partial_quotients(xi, 0), std::invalid_argument);
    CHECK_THROWS_AS(convergents(std::vector<mpz_class>{}), std::invalid_argument);
    CHECK_THROWS_AS(convergents({3, 0, 2}), std::invalid_argument);
}

TEST_CASE("precision ceiling reports the stalled index") {
    CertifiedReal xi(RealSpec::named(NamedConstant::Pi), 10, 20);
    CHECK_THROWS_AS(partial_quotients(xi, 500), PrecisionCeilingError);
}
