#include "fanclose/reduction.hpp"

namespace fc {

namespace {

Interval I(long v, mpfr_prec_t p) { return Interval::of(v, p); }
Interval Z(const mpz_class& v, mpfr_prec_t p) { return Interval::of(v, p); }

void check_pair(const mpz_class& r, const mpz_class& s) {
    if (r < 1 || s <= r) throw DomainViolation("reduction needs 1 <= r < s");
}

}  // namespace

mpz_class initial_m_bound(const mpz_class& r, const mpz_class& s, mpfr_prec_t p) {
    check_pair(r, s);
    mpz_class b = r * r + 1, c = s * s + 1;
    Interval log_alpha = log(Z(s, p) + sqrt(Z(c, p)));
    Interval log_beta = log(Z(r, p) + sqrt(Z(b, p)));
    Interval K = Interval::parse("6.005171e11", p) * log_beta * log(Z(s, p) * sqrt(Z(b, p)));
    Interval C = I(2, p) * log_alpha / sqr(log_beta);
    // m - K log(C m) is increasing for m > K; any x >= K with K log(C x) <= x bounds m.
    auto rhs = [&](const Interval& x) { return K * log(C * x); };
    Interval x = sqr(K) * C;
    if (!rhs(x).le(x)) throw PrecisionExhausted("initial m bound: start point not above the fixed point");
    for (int it = 0; it < 200; ++it) {
        Interval y = rhs(x);
        Interval next(p);
        mpfr_set(next.lo().get(), y.hi().get(), MPFR_RNDU);
        mpfr_set(next.hi().get(), y.hi().get(), MPFR_RNDU);
        if (!next.le(x) || !K.le(next) || !rhs(next).le(next)) break;
        bool small = (x - next).lt(I(1, p));
        x = next;
        if (small) break;
    }
    mpz_class M = ceil_upper(x);
    return M < 250 ? mpz_class(250) : M;
}

ReductionProblem reduction_problem(const mpz_class& r, const mpz_class& s, mpfr_prec_t p) {
    check_pair(r, s);
    mpz_class b = r * r + 1, c = s * s + 1;
    Interval log_alpha = log(Z(s, p) + sqrt(Z(c, p)));
    Interval log_beta = log(Z(r, p) + sqrt(Z(b, p)));
    Interval log_beta3 = log(Z(s, p) * sqrt(Z(b, p)) / (Z(r, p) * sqrt(Z(c, p))));
    ReductionProblem out;
    out.kappa = log_alpha / log_beta;
    out.mu = log_beta3 / (I(2, p) * log_beta);
    out.M = initial_m_bound(r, s, p);
    // Lambda_1 < (8c/(b-1)) beta^{-4l} and l > m
    out.A = I(4, p) * Z(c, p) / (Z(b - 1, p) * log_beta);
    out.B = exp(I(4, p) * log_beta);
    return out;
}

ReductionOutcome reduce_once(const ReductionProblem& p, const PrecisionContext& ctx) {
    if (ctx.digits < 173) throw DomainViolation("reduction needs at least 173 digits");
    if (p.M < 1) throw DomainViolation("reduction needs M >= 1");
    const mpfr_prec_t prec = p.kappa.prec();
    const Interval M = Z(p.M, prec), logB = log(p.B);
    const mpz_class target = 6 * p.M;
    CfStream cf(p.kappa);
    while (cf.q() <= target)
        if (!cf.next()) throw DomainViolation("kappa is rational to working depth");
    ReductionOutcome out;
    // |m kappa - l| >= |q_{K-1} kappa - p_{K-1}| for 0 < m < q_K
    const Interval delta = abs(Z(cf.q_prev(), prec) * p.kappa - Z(cf.p_prev(), prec));
    for (int tries = 0; tries <= kReductionRetries; ++tries) {
        ++out.passes;
        const mpz_class q = cf.q();
        Interval eps = nearest_int_distance(Z(q, prec) * p.mu) - M * nearest_int_distance(Z(q, prec) * p.kappa);
        if (eps.pos()) {
            mpz_class nb = floor_certified(log(p.A * Z(q, prec) / eps) / logB);
            if (nb < 0) nb = 0;
            out.new_bound = nb < p.M ? nb : p.M;
            out.q_used = q;
            out.epsilon = eps;
            return out;
        }
        if (!eps.neg()) throw PrecisionExhausted("sign of epsilon undecided at q = " + q.get_str());
        if (!cf.next()) break;
    }
    const Interval gap = delta - abs(p.mu);
    if (gap.pos()) {
        mpz_class nb = floor_certified(log(p.A / gap) / logB);
        if (nb < 0) nb = 0;
        out.new_bound = nb < p.M ? nb : p.M;
        out.epsilon = gap;
        out.homogeneous = true;
        return out;
    }
    throw NoConvergentWorks("no convergent gave epsilon > 0 after " + std::to_string(out.passes) + " tries");
}

FixpointResult reduce_to_fixpoint(ReductionProblem p, const mpz_class& floor, const PrecisionContext& ctx) {
    if (floor < 1) throw DomainViolation("fixpoint floor must be >= 1");
    FixpointResult res;
    res.initial = p.M;
    res.final_bound = p.M;
    while (res.final_bound > floor) {
        ReductionOutcome o;
        try {
            o = reduce_once(p, ctx);
        } catch (const NoConvergentWorks&) {
            if (res.trail.empty()) throw;
            break;
        }
        res.trail.push_back(o);
        if (o.new_bound >= p.M) break;
        res.final_bound = o.new_bound;
        p.M = o.new_bound;
        if (p.M < 1) break;
    }
    return res;
}

CandidateReduction reduce_candidate(const mpz_class& r, const mpz_class& s, unsigned digits, unsigned digits_max) {
    CandidateReduction out;
    out.r = r;
    out.s = s;
    for (unsigned d = digits;; d *= 2) {
        if (d > digits_max) d = digits_max;
        PrecisionContext ctx{d};
        try {
            ReductionProblem p = reduction_problem(r, s, ctx.bits());
            out.result = reduce_to_fixpoint(p, 1, ctx);
            out.digits = d;
            out.resolved = out.result.final_bound <= kExclusionThreshold;
            return out;
        } catch (const PrecisionExhausted&) {
            if (d >= digits_max) throw;
        }
    }
}

}  // namespace fc
