#pragma once

#include <gmpxx.h>

#include <string>
#include <vector>

namespace fc {

struct TripleParams {
    mpz_class r, s, t, f, b, c, A, F;

    // Re-checks every defining identity; throws InvariantBroken naming the first failure.
    void check() const;
};

// Throws NotATriple if (r^2+1)(s^2+1) - 1 is not a square.
TripleParams build_triple(const mpz_class& r, const mpz_class& s);
bool is_triple(const mpz_class& r, const mpz_class& s);

// r^2 + s^2 == 2frs + f^2
bool master_equation(const mpz_class& r, const mpz_class& s, const mpz_class& f);

struct FClassification {
    int sign = 0;  // sign of F
    bool s_eq_2rf = false, f_eq_r = false, s_eq_2r2 = false, s_eq_2f2 = false;
    bool f_gt_r = false, f_lt_r = false;
    bool s_gt_2rf = false, s_gt_2r2 = false, s_lt_2f2 = false;
    bool c_lt_4b2 = false;
    bool gap_ok = false;        // f>r => f > 2rF >= 2r ; f<r => 0 > F > -2fr
    bool chains_ok = false;     // the three five-way equivalence chains
    bool le4d_applies = false;  // only for F != 0
    bool le4d_ok = false;       // f<r <=> c<4b^2
    bool consistent = false;
};

FClassification classify_F(const TripleParams& tp);

// F[-1..N] and P[-1..N] stored with offset 1: F[i] is at index i+1.
struct FSequence {
    mpz_class f;
    std::vector<mpz_class> F, P;

    const mpz_class& Fi(long i) const { return F.at(static_cast<std::size_t>(i + 1)); }
    const mpz_class& Pi(long i) const { return P.at(static_cast<std::size_t>(i + 1)); }
    long N() const { return static_cast<long>(F.size()) - 2; }
};

constexpr long kMaxFSequence = 16;

// Builds the sequences and verifies their identities (throws InvariantBroken).
FSequence f_sequence(const TripleParams& tp, long N, long max_N = kMaxFSequence);

// P_{-1..N} for a given f, no triple needed.
std::vector<mpz_class> p_sequence(const mpz_class& f, long N);

}  // namespace fc
