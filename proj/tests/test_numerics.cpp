#include "doctest.h"
#include "fanclose/numerics.hpp"

#include <random>

using namespace fc;

namespace {
const mpfr_prec_t P = PrecisionContext{80}.bits();

Interval golden(mpfr_prec_t p) {
    return (Interval::of(1L, p) + sqrt(Interval::of(5L, p))) / Interval::of(2L, p);
}
}  // namespace

TEST_CASE("cf of the golden ratio is all ones") {
    auto cf = cf_expand(golden(P), 5);
    REQUIRE(cf.partial_quotients.size() == 5);
    for (auto& a : cf.partial_quotients) CHECK(a == 1);
}

TEST_CASE("cf of sqrt 2") {
    auto cf = cf_expand(sqrt(Interval::of(2L, P)), 4);
    std::vector<long> want{1, 2, 2, 2};
    for (std::size_t i = 0; i < 4; ++i) CHECK(cf.partial_quotients[i] == want[i]);
    CHECK(cf.convergents[3].first == 17);
    CHECK(cf.convergents[3].second == 12);
}

TEST_CASE("cf of a log ratio matches exhaustive best approximations") {
    Interval x = log(Interval::of(8L, P) + sqrt(Interval::of(65L, P))) /
                 log(Interval::of(2L, P) + sqrt(Interval::of(5L, P)));
    auto cf = cf_expand(x, 20);
    REQUIRE(cf.partial_quotients.size() == 20);
    std::vector<long> quotients{1, 1, 12, 34, 15, 1, 9, 1, 2, 2, 2, 1, 1, 1, 1, 11, 3, 9, 1, 6};
    for (std::size_t i = 0; i < 20; ++i) CHECK(cf.partial_quotients[i] == quotients[i]);
    // best approximations of the second kind over q <= 10^6 (scan at 400 digits)
    std::vector<std::pair<long, long>> best{{2, 1}, {25, 13}, {852, 443}, {12805, 6658}, {13657, 7101},
                                            {135718, 70567}, {149375, 77668}, {434468, 225903}, {1018311, 529474}};
    std::vector<std::pair<long, long>> got;
    for (std::size_t i = 1; i < cf.convergents.size(); ++i)
        if (cf.convergents[i].second <= 1000000)
            got.emplace_back(cf.convergents[i].first.get_si(), cf.convergents[i].second.get_si());
    CHECK(got == best);
}

TEST_CASE("convergent determinants are +-1 and q increases") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        mpq_class q(static_cast<long>(rng() % 1000000 + 1), static_cast<long>(rng() % 999 + 1));
        Interval x = sqrt(Interval::of(q, P)) + Interval::of(1L, P);
        auto cf = cf_expand(x, 30);
        for (std::size_t k = 1; k < cf.convergents.size(); ++k) {
            auto& [p1, q1] = cf.convergents[k];
            auto& [p0, q0] = cf.convergents[k - 1];
            mpz_class det = p1 * q0 - p0 * q1;
            CHECK(abs(det) == 1);
            // q_1 = a_1 q_0 may tie when a_1 = 1
            if (k >= 2) CHECK(q1 > q0);
            else CHECK(q1 >= q0);
        }
    }
}

TEST_CASE("cf stops cleanly on exact rationals") {
    auto cf = cf_expand(Interval::of(mpq_class(45, 32), P), 10);
    std::vector<long> want{1, 2, 2, 6};
    REQUIRE(cf.partial_quotients.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) CHECK(cf.partial_quotients[i] == want[i]);
    // 17/12 is not dyadic: its enclosure has width, so past the true end
    // the expansion must refuse rather than invent quotients
    CHECK_THROWS_AS(cf_expand(Interval::of(mpq_class(17, 12), P), 10), PrecisionExhausted);
}

TEST_CASE("cf refuses uncertified quotients") {
    Interval x = log(Interval::of(8L, 64) + sqrt(Interval::of(65L, 64))) / log(Interval::of(3L, 64));
    CHECK_THROWS_AS(cf_expand(x, 200), PrecisionExhausted);
}

TEST_CASE("more digits never change certified quotients") {
    auto make = [](mpfr_prec_t p) {
        return log(Interval::of(8L, p) + sqrt(Interval::of(65L, p))) / log(Interval::of(2L, p) + sqrt(Interval::of(5L, p)));
    };
    auto lo = cf_expand(make(PrecisionContext{50}.bits()), 40);
    auto hi = cf_expand(make(PrecisionContext{200}.bits()), 40);
    for (std::size_t i = 0; i < 40; ++i) CHECK(lo.partial_quotients[i] == hi.partial_quotients[i]);
}

TEST_CASE("nearest integer distance") {
    CHECK(nearest_int_distance(Interval::of(3L, P)).contains(mpq_class(0)));
    Interval h = nearest_int_distance(Interval::of(mpq_class(5, 2), P));
    CHECK(h.contains(mpq_class(1, 2)));
    CHECK(h.width() == 0.0);
    Interval d = nearest_int_distance(Interval::of(1000000L, P) * sqrt(Interval::of(2L, P)));
    // 400-digit reference value
    Interval ref = Interval::parse("0.437626904951198311275790301921430328124623052", P);
    Interval slack = Interval::parse("1e-41", P);
    CHECK((ref - slack).le(d));
    CHECK(d.le(ref + slack));
    CHECK_THROWS_AS(nearest_int_distance(Interval::hull(Interval::of(0L, P), Interval::of(1L, P))), PrecisionExhausted);
}

TEST_CASE("interval containment of exact rational arithmetic") {
    std::mt19937_64 rng(11);
    auto rq = [&] {
        long n = static_cast<long>(rng() % 2000001) - 1000000;
        long d = static_cast<long>(rng() % 9999 + 1);
        return mpq_class(n, d);
    };
    for (int i = 0; i < 2000; ++i) {
        mpq_class a = rq(), b = rq(), c = rq();
        if (c == 0) c = 1;
        mpfr_prec_t p = 30 + static_cast<mpfr_prec_t>(rng() % 200);
        Interval A = Interval::of(a, p), B = Interval::of(b, p), C = Interval::of(c, p);
        mpq_class exact = (a * b - c) / c + a;
        exact.canonicalize();
        CHECK(((A * B - C) / C + A).contains(exact));
        CHECK(sqr(A - B).contains(mpq_class((a - b) * (a - b))));
    }
}

TEST_CASE("transcendental enclosures are consistent") {
    Interval two = Interval::of(2L, P);
    CHECK(exp(log(two)).contains(mpq_class(2)));
    CHECK(sqr(sqrt(two)).contains(mpq_class(2)));
    CHECK(pow(two, Interval::of(10L, P)).contains(mpq_class(1024)));
    CHECK_THROWS_AS(Interval::of(1L, P) / Interval::hull(Interval::of(-1L, P), Interval::of(1L, P)), PrecisionExhausted);
}

TEST_CASE("integer square roots") {
    mpz_class r;
    CHECK(is_square(mpz_class("152415787532388367501905199875019052100"), &r));
    CHECK(r == mpz_class("12345678901234567890"));
    CHECK_FALSE(is_square(mpz_class("152415787532388367501905199875019052101")));
    CHECK(isqrt(mpz_class(99)) == 9);
}

TEST_CASE("FANCLOSE_DIGITS sets the bound default") {
    setenv("FANCLOSE_DIGITS", "120", 1);
    CHECK(PrecisionContext::bounds().digits == 120);
    CHECK(PrecisionContext::reduction().digits == 173);
    setenv("FANCLOSE_DIGITS", "250", 1);
    CHECK(PrecisionContext::reduction().digits == 250);
    unsetenv("FANCLOSE_DIGITS");
    CHECK(PrecisionContext::bounds().digits == 80);
}
