#pragma once

#include <gmpxx.h>

#include <map>
#include <string>
#include <vector>

#include "fanclose/numerics.hpp"

namespace fc {

// F_level = main + sum_k L^k R_k with 0 < L < 1 and -env_k < R_k < 0
// (level 1 allows R_1 = -env_1: the envelope is attained).
struct ExpansionSpec {
    int level = 0;
    mpq_class main_term;
    std::vector<mpq_class> envelopes;  // env_k for L^k, k = 1..level
};

ExpansionSpec expansion_spec(int level, const mpz_class& r, const mpz_class& s);

// The same expansion computed from f = rs(u/2 - u^2/8 + L u^3/16), u = r^-2 + s^-2,
// pushed through F_{i+1} = 2 f F_i - F_{i-1}: coefficients of L^0..L^level.
std::vector<mpq_class> expansion_polynomial(int level, const mpz_class& r, const mpz_class& s);

// [main - sum env_k, main]; needs r >= 2, s > 31 r, level in 1..4.
Interval estimate_F(int level, const mpz_class& r, const mpz_class& s, mpfr_prec_t prec);

// One theta sub-window of a prsec case with its caps on b (decimal literals,
// empty when not supplied) and the claimed bounds.
struct PrsecWindow {
    mpq_class theta_lo, theta_hi;
    std::string b_cap_upper, b_cap_lower;
    std::string provenance;
    mpq_class claim_upper, claim_lower;  // F < claim_upper, F > claim_lower
};

struct PrsecCase {
    char name = 'a';
    int level = 1;
    mpq_class bound;  // |F_level| < bound
    std::vector<PrsecWindow> windows;
};

using PrsecCaps = std::map<char, PrsecCase>;

// Caps as published with the theta windows.
PrsecCaps default_prsec_caps();

struct PrsecWindowResult {
    PrsecWindow window;
    double upper_exponent = 0, lower_exponent = 0;  // r^e in the chains
    Interval upper, lower;                          // certified values of the chains
    bool upper_ok = false, lower_ok = false;
    std::string upper_chain, lower_chain;
};

struct PrsecVerdict {
    char name = 'a';
    int level = 1;
    mpq_class bound;
    std::vector<PrsecWindowResult> windows;
    bool certified = false;  // every window within +-bound and its own claims
    // Empty intersection of [lower, upper] with F_level < -10^7 on every window.
    bool contradicts_cofpo = false;
};

PrsecVerdict prsec_bound(char which, const PrsecCaps& caps, mpfr_prec_t prec);

struct ThetaGap {
    mpz_class b, c;
    Interval gap;  // theta - log c / log b
    bool lower_ok = false, upper_ok = false;
};

// b = r^2 + 1, c = ceil(r^{2 theta}) + 1; certifies 0 < gap < 1/r^2.
ThetaGap theta_gap(const mpz_class& r, const mpq_class& theta, mpfr_prec_t prec);

}  // namespace fc
