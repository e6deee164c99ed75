#pragma once

#include <gmpxx.h>
#include <mpfr.h>

#include <string>
#include <utility>
#include <vector>

#include "fanclose/errors.hpp"

namespace fc {

enum class Rounding { Down, Up, Nearest };

struct PrecisionContext {
    unsigned digits = 80;
    Rounding rounding = Rounding::Nearest;

    // A few guard bits on top of the decimal request.
    mpfr_prec_t bits() const;

    // 80 digits unless FANCLOSE_DIGITS says otherwise.
    static PrecisionContext bounds();
    // Never below 173 digits.
    static PrecisionContext reduction();
};

mpfr_rnd_t to_mpfr(Rounding r);

// RAII holder for one mpfr_t.
class Real {
public:
    explicit Real(mpfr_prec_t prec);
    Real(const Real& o);
    Real(Real&& o) noexcept;
    Real& operator=(const Real& o);
    Real& operator=(Real&& o) noexcept;
    ~Real();

    mpfr_ptr get() { return v_; }
    mpfr_srcptr get() const { return v_; }
    mpfr_prec_t prec() const { return mpfr_get_prec(v_); }
    double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
    std::string str(int digits, mpfr_rnd_t rnd = MPFR_RNDN) const;

private:
    mpfr_t v_;
    bool live_ = true;
};

// Closed interval [lo, hi] with outward-rounded arithmetic.
class Interval {
public:
    Interval() : Interval(mpfr_prec_t(64)) {}  // [0, 0]
    explicit Interval(mpfr_prec_t prec);
    Interval(const Real& lo, const Real& hi);

    static Interval of(long v, mpfr_prec_t prec);
    static Interval of(const mpz_class& v, mpfr_prec_t prec);
    static Interval of(const mpq_class& v, mpfr_prec_t prec);
    // Decimal literal such as "1.5002e11", enclosed outward.
    static Interval parse(const std::string& decimal, mpfr_prec_t prec);
    static Interval hull(const Interval& a, const Interval& b);

    const Real& lo() const { return lo_; }
    const Real& hi() const { return hi_; }
    Real& lo() { return lo_; }
    Real& hi() { return hi_; }
    mpfr_prec_t prec() const { return lo_.prec(); }

    bool contains(const mpq_class& q) const;
    bool contains(const mpz_class& z) const { return contains(mpq_class(z)); }
    bool contains(const Interval& o) const;
    bool overlaps(const Interval& o) const;

    bool pos() const;  // certainly > 0
    bool neg() const;  // certainly < 0
    bool lt(const Interval& o) const;  // certainly this < o
    bool le(const Interval& o) const;  // certainly this <= o

    double mid() const;
    double width() const;
    // log10 of a positive interval's midpoint, as a double.
    double log10_mid() const;
    std::string str(int digits = 20) const;

    Interval operator-() const;
    friend Interval operator+(const Interval& a, const Interval& b);
    friend Interval operator-(const Interval& a, const Interval& b);
    friend Interval operator*(const Interval& a, const Interval& b);
    friend Interval operator/(const Interval& a, const Interval& b);

private:
    Real lo_, hi_;
};

Interval sqr(const Interval& x);
Interval abs(const Interval& x);
Interval sqrt(const Interval& x);
Interval exp(const Interval& x);
Interval log(const Interval& x);
Interval pow(const Interval& base, const Interval& expo);
Interval min(const Interval& a, const Interval& b);
Interval max(const Interval& a, const Interval& b);
Interval euler_e(mpfr_prec_t prec);

// floor(x), certified; throws PrecisionExhausted if the endpoints disagree.
mpz_class floor_certified(const Interval& x);
// Smallest integer certainly >= every point of x.
mpz_class ceil_upper(const Interval& x);
// Outward rational enclosure helpers.
mpq_class lower_rational(const Interval& x);
mpq_class upper_rational(const Interval& x);

struct ContinuedFraction {
    std::vector<mpz_class> partial_quotients;
    std::vector<std::pair<mpz_class, mpz_class>> convergents;  // (p, q)
};

// First `depth` partial quotients of x > 0. Stops early only when x is an
// exactly represented rational.
ContinuedFraction cf_expand(const Interval& x, std::size_t depth);

// Incremental form used by the reduction: pulls one quotient at a time.
class CfStream {
public:
    explicit CfStream(const Interval& x);
    // Returns false when the expansion terminated (x rational).
    bool next();
    const mpz_class& a() const { return a_; }
    const mpz_class& p() const { return p1_; }
    const mpz_class& q() const { return q1_; }
    const mpz_class& p_prev() const { return p0_; }
    const mpz_class& q_prev() const { return q0_; }
    std::size_t index() const { return n_; }

private:
    Interval x_;
    bool exact_ = false;  // point input: expand the rational exactly
    mpq_class xq_;
    mpz_class a_, p0_, q0_, p1_, q1_;
    std::size_t n_ = 0;
    bool done_ = false;
};

// ||x||, the distance to the nearest integer.
Interval nearest_int_distance(const Interval& x);

mpz_class isqrt(const mpz_class& n);
bool is_square(const mpz_class& n, mpz_class* root = nullptr);

std::string to_string(const mpz_class& z);
std::string to_string(const mpq_class& q);

}  // namespace fc
