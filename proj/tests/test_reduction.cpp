#include <doctest.h>

#include "fanclose/reduction.hpp"

using namespace fc;

namespace {

const PrecisionContext C173{173};
const mpfr_prec_t P = C173.bits();

Interval I(long v, mpfr_prec_t p = P) { return Interval::of(v, p); }

ReductionProblem synthetic(const mpz_class& M, mpfr_prec_t p = P) {
    return {sqrt(I(2, p)), sqrt(I(3, p)) / I(7, p), M, I(1000, p), I(3, p)};
}

}  // namespace

TEST_CASE("synthetic problem matches the mpmath oracle") {
    // tests/oracles/reduction_oracle.py: (49, 165326326037771920630, 2)
    auto o = reduce_once(synthetic(mpz_class("10000000000000000000")), C173);
    CHECK(o.new_bound == 49);
    CHECK(o.q_used == mpz_class("165326326037771920630"));
    CHECK(o.passes == 2);  // first q > 6M has eps < 0
    CHECK(o.epsilon.pos());
    CHECK_FALSE(o.homogeneous);
}

TEST_CASE("contraction: new bound never exceeds M") {
    for (long M : {1L, 2L, 3L, 10L, 100L, 1000L, 1000000L}) {
        try {
            auto o = reduce_once(synthetic(M), C173);
            CHECK(o.new_bound <= M);
            CHECK(o.passes >= 1);
        } catch (const NoConvergentWorks&) {
            CHECK(M < 100);  // only tiny M may run out of convergents
        }
    }
    auto r = reduce_to_fixpoint(synthetic(2), 1, C173);
    CHECK(r.final_bound <= 2);
    CHECK(r.trail.size() <= 1);
}

TEST_CASE("preconditions") {
    CHECK_THROWS_AS(reduce_once(synthetic(10), PrecisionContext{100}), DomainViolation);
    CHECK_THROWS_AS(reduce_once(synthetic(0), C173), DomainViolation);
    CHECK_THROWS_AS(reduce_to_fixpoint(synthetic(10), 0, C173), DomainViolation);
    CHECK_THROWS_AS(reduction_problem(5, 5, P), DomainViolation);
}

TEST_CASE("planted solutions are never excluded") {
    // mu = l0 - m0 kappa + A B^{-m0} / 2 puts (m0, l0) inside the decay inequality.
    const long primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29};
    std::size_t checked = 0;
    for (long pr : primes)
        for (long m0 : {3L, 7L, 12L, 20L, 33L}) {
            Interval kappa = sqrt(I(pr)) + I(1) / I(3);
            if (pr == 2 || pr == 3 || pr == 5 || pr == 7) kappa = kappa + I(pr);
            Interval A = I(1000), B = I(3);
            // l0 = round(m0 kappa)
            Interval mk = I(m0) * kappa;
            mpz_class l0 = floor_certified(mk + Interval::of(mpq_class(1, 2), P));
            Interval mu = Interval::of(l0, P) - mk + A * pow(B, I(-m0)) / I(2);
            ReductionProblem p{kappa, mu, mpz_class(1000000), A, B};
            try {
                auto o = reduce_once(p, C173);
                CHECK_MESSAGE(o.new_bound >= m0, "prime " << pr << " m0 " << m0);
                auto f = reduce_to_fixpoint(p, 1, C173);
                CHECK(f.final_bound >= m0);
                ++checked;
            } catch (const NoConvergentWorks&) {
            }
        }
    CHECK(checked >= 40);
}

TEST_CASE("pairs from the sieve shape reduce like the oracle") {
    // tests/oracles/reduction_oracle.py pair trails
    struct Case {
        const char *r, *s, *M0;
        long final_bound;
    } cases[] = {{"3200001", "20480012800001", "15420150153633115", 1},
                 {"1000003", "1000000007", "10625654668383049", 0}};
    for (const auto& c : cases) {
        mpz_class r(c.r), s(c.s), m0(c.M0);
        mpz_class M = initial_m_bound(r, s, P);
        CHECK(M >= m0);
        CHECK(M - m0 <= 1);
        auto res = reduce_candidate(r, s, 173, 2000);
        CHECK(res.result.final_bound == c.final_bound);
        CHECK(res.resolved);
        CHECK(res.digits == 173);
    }
    CHECK(initial_m_bound(2, 3, P) >= 250);
}

TEST_CASE("results are identical at 173 and 200 digits") {
    for (const char* s : {"20480012800001", "1000000007", "123456789012345678901"}) {
        mpz_class r = 3200001;
        auto a = reduce_candidate(r, mpz_class(s), 173, 2000);
        auto b = reduce_candidate(r, mpz_class(s), 200, 2000);
        CHECK(a.result.initial == b.result.initial);
        CHECK(a.result.final_bound == b.result.final_bound);
        REQUIRE(a.result.trail.size() == b.result.trail.size());
        for (std::size_t i = 0; i < a.result.trail.size(); ++i) {
            CHECK(a.result.trail[i].new_bound == b.result.trail[i].new_bound);
            CHECK(a.result.trail[i].q_used == b.result.trail[i].q_used);
        }
    }
}
