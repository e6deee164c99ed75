#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>
#include <vector>

#include "fanclose/numerics.hpp"
#include "fanclose/triple.hpp"

namespace fc {

// Heights and B_j / A_j for Lambda1 = 2m log b1 - 2l log b2 + log b3 with
// b1 = s + sqrt c, b2 = r + sqrt b, b3 = s sqrt b / (r sqrt c).
struct LinearFormContext {
    mpz_class r, s, t, b, c;
    int rho = 1;
    Interval alpha, beta, beta3;
    Interval log_alpha, log_beta, log_beta3;
    Interval B1, B2, B3;  // Aleksentsev
    Interval A1, A2, A3;  // Matveev
    // Exact height of beta3: (1/2) log(s^2 b / gcd(r^2 c, s^2 b)).
    mpz_class h3_num;
    Interval h3;
};

LinearFormContext linear_form_context(const mpz_class& r, const mpz_class& s, mpfr_prec_t prec, int rho = 1);

// E of the Aleksentsev theorem for coefficients (2m, -2l, 1), clamped at 3.
Interval aleksentsev_E(const mpz_class& m, const mpz_class& l, const Interval& B1, const Interval& B2,
                       const Interval& B3);
// -5.3 n^{-n+1/2} (n+1)^{n+1} (n+8)^2 (n+5) 31.44^n D^2 log(3nD), n = 3, D = 4.
Interval aleksentsev_constant(mpfr_prec_t prec);
Interval aleksentsev_from(const Interval& E, const Interval& B1, const Interval& B2, const Interval& B3);
// Lower bound on log|Lambda1|; needs l >= 250.
Interval aleksentsev_bound(const LinearFormContext& ctx, const mpz_class& m, const mpz_class& l);

// Integer N with n <= N for every n >= 250 obeying the corollary's inequality.
// b and c may be real enclosures (the sweep feeds b = 10^x).
mpz_class upper_n_aleksentsev(const Interval& b, const Interval& c);
mpz_class upper_n_aleksentsev(const mpz_class& b, const mpz_class& c, mpfr_prec_t prec);
// Right-hand side of the corollary at n.
Interval aleksentsev_rhs(const Interval& b, const Interval& c, const Interval& n);

struct MatveevConstants {
    Interval E, E1, C3star, C3, C1, C2, T, C0, Omega, omega, W0, S;
    Interval A1, A2, A3, log_beta2;
};

// Constants for (b, c) and a trial n; W0 is taken equal to S (see README).
MatveevConstants matveev_constants(const Interval& b, const Interval& c, const Interval& Del, const Interval& n);
// 17472 C0 C1^3 C2 S e log(4b) log(4c)
Interval matveev_rhs(const MatveevConstants& k, const Interval& b, const Interval& c);
// Fixed point of n -> rhs(n) started at n_seed; checks the three side conditions.
mpz_class matveev_upper_n(const Interval& b, const Interval& c, const Interval& del, const Interval& Del,
                          const mpz_class& n_seed);

struct LowerN {
    Interval value;      // certified lower bound is value.lo()
    std::string method;  // winning proposition(s)
    bool fallback = false;
    struct Sub {
        std::string name;
        Interval value;
    };
    std::vector<Sub> subs;  // every bound that was evaluated, incl. pr3.8 cases
};

// Lower bound valid for every c in the enclosure c (and b in b). Regimes the
// box straddles are all evaluated and the weakest is kept. pr3.9 is used only
// when the other bounds already reach 1000, or when `fallback` is set.
LowerN lower_n(const Interval& b, const Interval& c, bool fallback = false);
// Exact variant: RegimeAmbiguous when c = b^3 or c = 4 b^2.
LowerN lower_n(const mpz_class& b, const mpz_class& c, mpfr_prec_t prec, bool fallback = false);

struct PhiCheck {
    mpz_class X, Y, phi, discriminant;
    bool positive = false;
};

PhiCheck phi_form_check(const mpz_class& f, const mpz_class& n, const mpz_class& m, int rho);

struct ABoundRecord {
    mpz_class b, c, A;
    Interval A_lower, A_upper;
    bool inside = false;  // generic (c-5)/(4b) + b < A < (c/b + 4b)/3.999
    struct Regime {
        std::string name;
        bool applies = false;
        bool holds = false;
    };
    std::vector<Regime> regimes;  // letarA a), b), c)
};

ABoundRecord a_bounds(const TripleParams& tp, mpfr_prec_t prec);

struct BoundRow {
    mpq_class mu_lo, mu_hi;
    std::string method;
    mpz_class n_upper;
    double n_lower = 0;
    double log10_b = 0, log10_c = 0;
    bool fallback = false;
    bool refined = false;
};

struct SweepOptions {
    int refine_passes = 1;
    bool fallback_n7 = true;
    double x_lo = 13, x_hi = 400;  // log10 b search range
    unsigned jobs = 1;
    mpfr_prec_t prec = 0;  // 0: bounds() default
};

std::vector<BoundRow> sweep(const mpq_class& theta_lo, const mpq_class& theta_hi, const mpq_class& step,
                            const SweepOptions& opt = {});

struct SweepRowSummary {
    std::string row;
    mpq_class mu_lo, mu_hi;
    double log10_b = 0;
    double published_log10_b = 0;
};

// Aggregates per-subinterval maxima into the five published rows.
std::vector<SweepRowSummary> aggregate_rows(const std::vector<BoundRow>& rows);

// s/(2r) + r/(2s)
Interval f_upper_from_master(const mpz_class& r, const mpz_class& s, mpfr_prec_t prec);

// log(s + sqrt c)/log(r + sqrt b) < log c/log b, certified.
bool lecomp_holds(const mpz_class& r, const mpz_class& s, mpfr_prec_t prec);

// v_m and w_n of the Pell system for the triple {1, b, c}.
mpz_class v_seq(const TripleParams& tp, long m);
mpz_class w_seq(const TripleParams& tp, long n, int rho);

// For m = n (mod 2): s (-1)^m (v_m - w_n)/c and -(2(bn^2 - m^2) + rho A n),
// both reduced mod c. Equal for all such m, n; on a solution v_m = w_n the
// left side is 0, which is the congruence on A.
std::pair<mpz_class, mpz_class> conga_sides(const TripleParams& tp, long m, long n, int rho);

}  // namespace fc
