#pragma once

#include <gmpxx.h>

#include <string>
#include <vector>

#include "fanclose/numerics.hpp"

namespace fc {

// 0 < |m kappa - l + mu| < A B^{-m} with 1 <= m <= M.
struct ReductionProblem {
    Interval kappa, mu;
    mpz_class M;
    Interval A, B;
};

struct ReductionOutcome {
    mpz_class new_bound;
    mpz_class q_used;
    Interval epsilon;
    int passes = 0;            // convergents tried
    bool homogeneous = false;  // settled by the |mu| < ||q_{K-1} kappa|| fallback
};

constexpr int kReductionRetries = 25;

// Largest m allowed by the Aleksentsev inequality for the pair, at least 250:
// m < 6.005171e11 log beta log(s sqrt b) log(2 m log alpha / (log beta)^2).
mpz_class initial_m_bound(const mpz_class& r, const mpz_class& s, mpfr_prec_t prec);

// Lambda_1 / (2 log beta): kappa = log alpha / log beta,
// mu = log beta_3 / (2 log beta), A = 4c / ((b-1) log beta), B = beta^4.
ReductionProblem reduction_problem(const mpz_class& r, const mpz_class& s, mpfr_prec_t prec);

// First convergent q > 6M with eps = ||q mu|| - M ||q kappa|| > 0 gives
// m <= log(A q / eps) / log B. Falls back to the homogeneous bound when
// |mu| < |q_{K-1} kappa - p_{K-1}|. Needs ctx.digits >= 173.
ReductionOutcome reduce_once(const ReductionProblem& p, const PrecisionContext& ctx);

struct FixpointResult {
    mpz_class initial, final_bound;
    std::vector<ReductionOutcome> trail;
};

// Repeats reduce_once with M <- new_bound until no decrease or bound <= floor.
// Failure of the first pass propagates; later failures end the iteration.
FixpointResult reduce_to_fixpoint(ReductionProblem p, const mpz_class& floor, const PrecisionContext& ctx);

struct CandidateReduction {
    mpz_class r, s;
    FixpointResult result;
    unsigned digits = 0;  // precision that produced the result
    bool resolved = false;  // final bound <= 6
};

// Builds the problem for (r, s) and reduces it, doubling the digits on
// PrecisionExhausted up to digits_max (then rethrows).
CandidateReduction reduce_candidate(const mpz_class& r, const mpz_class& s, unsigned digits, unsigned digits_max);

constexpr long kExclusionThreshold = 6;

}  // namespace fc
