#pragma once

#include <gmpxx.h>

#include <string>
#include <utility>
#include <vector>

#include "fanclose/pell.hpp"

namespace fc {

struct GcdFamilyPoint {
    mpz_class f;
    long k = 0;
    mpz_class r, s, b, c, t;
};

// r = f U_k, s = f U_{k+1} with U_0 = 0, U_1 = 1, U_{j+1} = 2f U_j - U_{j-1}.
GcdFamilyPoint gcd_family(const mpz_class& f, long k);

struct GeneralFamilyPoint {
    mpz_class f, f1, f2;
    FundamentalClass cls;
    long k = 0;
    mpz_class u, v, r, s, b, c;
    // s^2 > 3.999 f^2 r^2; reported, not enforced (small points violate it).
    bool wide_ratio = false;
};

GeneralFamilyPoint general_family(const mpz_class& f1, const mpz_class& f2, const FundamentalClass& cls, long k);

// Product of the prime factors of f that are 1 mod 4, with multiplicity.
mpz_class f1_part(const mpz_class& f);

// Every (r, s) with 1 <= r < s <= s_cap on the master equation for this f,
// produced from the class orbits.
std::vector<std::pair<mpz_class, mpz_class>> family_points(const mpz_class& f, const mpz_class& s_cap);

enum class Prop { pr34, pr35, pr37, pr38, pr39 };
Prop parse_prop(const std::string& s);
std::string prop_name(Prop p);
// The k values a proposition speaks about.
std::vector<long> prop_ks(Prop p);

struct CongruenceRow {
    std::string seq;  // v, w, u or U
    long index = 0;
    int rho = 0;
    mpz_class recurrence, closed;  // both reduced into [0, modulus)
    bool displayed = true;         // false: closed form derived here, not displayed
    bool match = false;
};

struct CongruenceReport {
    Prop prop;
    mpz_class f, modulus;
    long k = 0;
    std::vector<CongruenceRow> rows;
    std::size_t mismatches = 0;
};

CongruenceReport congruence_profile(const GcdFamilyPoint& p, Prop prop, long max_index = 12);

struct ExclusionVerdict {
    mpz_class f;
    long k = 0;
    bool excluded = false;
    std::string verdict;
    std::vector<std::string> trace;
    std::string prop;          // congruence proposition used
    mpz_class n_lower;         // displayed lower bound on n
    bool n_strict = false;     // n > n_lower rather than n >= n_lower
    long long min_n_computed = -1;  // smallest positive n solving the congruence, small f only
    bool bound_confirmed = false;
};

// n < 10^19 is the prior upper bound the congruence bound is played against.
ExclusionVerdict family_exclusion(const mpz_class& f, long k);

// Delta = (k+1) m - k l of the alternative two-logarithm argument.
mpz_class delta_identity(long k, const mpz_class& m, const mpz_class& l);

}  // namespace fc
