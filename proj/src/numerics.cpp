#include "fanclose/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <memory>

namespace fc {

mpfr_prec_t PrecisionContext::bits() const {
    return static_cast<mpfr_prec_t>(std::ceil(digits * 3.321928094887362)) + 24;
}

static unsigned env_digits(unsigned fallback) {
    const char* e = std::getenv("FANCLOSE_DIGITS");
    if (!e || !*e) return fallback;
    char* end = nullptr;
    unsigned long v = std::strtoul(e, &end, 10);
    if (*end != '\0' || v < 10) throw UsageError(std::string("bad FANCLOSE_DIGITS: ") + e);
    return static_cast<unsigned>(v);
}

PrecisionContext PrecisionContext::bounds() { return {env_digits(80), Rounding::Nearest}; }

PrecisionContext PrecisionContext::reduction() {
    return {std::max(173u, env_digits(173)), Rounding::Nearest};
}

mpfr_rnd_t to_mpfr(Rounding r) {
    switch (r) {
        case Rounding::Down: return MPFR_RNDD;
        case Rounding::Up: return MPFR_RNDU;
        default: return MPFR_RNDN;
    }
}

// ---- Real

Real::Real(mpfr_prec_t prec) {
    mpfr_init2(v_, prec);
    mpfr_set_zero(v_, 1);
}

Real::Real(const Real& o) {
    mpfr_init2(v_, o.prec());
    mpfr_set(v_, o.v_, MPFR_RNDN);
}

Real::Real(Real&& o) noexcept {
    mpfr_init2(v_, o.prec());
    mpfr_swap(v_, o.v_);
}

Real& Real::operator=(const Real& o) {
    if (this != &o) {
        mpfr_set_prec(v_, o.prec());
        mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    return *this;
}

Real& Real::operator=(Real&& o) noexcept {
    if (this != &o) mpfr_swap(v_, o.v_);
    return *this;
}

Real::~Real() { mpfr_clear(v_); }

std::string Real::str(int digits, mpfr_rnd_t rnd) const {
    char* buf = nullptr;
    std::string fmt = "%." + std::to_string(digits) + "R*g";
    mpfr_asprintf(&buf, fmt.c_str(), rnd, v_);
    std::string out = buf ? buf : "";
    mpfr_free_str(buf);
    return out;
}

// ---- Interval

Interval::Interval(mpfr_prec_t prec) : lo_(prec), hi_(prec) {}

Interval::Interval(const Real& lo, const Real& hi) : lo_(lo), hi_(hi) {}

Interval Interval::of(long v, mpfr_prec_t prec) {
    Interval r(prec);
    mpfr_set_si(r.lo_.get(), v, MPFR_RNDD);
    mpfr_set_si(r.hi_.get(), v, MPFR_RNDU);
    return r;
}

Interval Interval::of(const mpz_class& v, mpfr_prec_t prec) {
    Interval r(prec);
    mpfr_set_z(r.lo_.get(), v.get_mpz_t(), MPFR_RNDD);
    mpfr_set_z(r.hi_.get(), v.get_mpz_t(), MPFR_RNDU);
    return r;
}

Interval Interval::of(const mpq_class& v, mpfr_prec_t prec) {
    Interval r(prec);
    mpfr_set_q(r.lo_.get(), v.get_mpq_t(), MPFR_RNDD);
    mpfr_set_q(r.hi_.get(), v.get_mpq_t(), MPFR_RNDU);
    return r;
}

Interval Interval::parse(const std::string& decimal, mpfr_prec_t prec) {
    Interval r(prec);
    if (mpfr_set_str(r.lo_.get(), decimal.c_str(), 10, MPFR_RNDD) != 0 ||
        mpfr_set_str(r.hi_.get(), decimal.c_str(), 10, MPFR_RNDU) != 0)
        throw UsageError("not a decimal literal: " + decimal);
    return r;
}

Interval Interval::hull(const Interval& a, const Interval& b) {
    Interval r(std::max(a.prec(), b.prec()));
    mpfr_min(r.lo_.get(), a.lo_.get(), b.lo_.get(), MPFR_RNDD);
    mpfr_max(r.hi_.get(), a.hi_.get(), b.hi_.get(), MPFR_RNDU);
    return r;
}

bool Interval::contains(const mpq_class& q) const {
    return mpfr_cmp_q(lo_.get(), q.get_mpq_t()) <= 0 && mpfr_cmp_q(hi_.get(), q.get_mpq_t()) >= 0;
}

bool Interval::contains(const Interval& o) const {
    return mpfr_lessequal_p(lo_.get(), o.lo_.get()) && mpfr_greaterequal_p(hi_.get(), o.hi_.get());
}

bool Interval::overlaps(const Interval& o) const {
    return mpfr_lessequal_p(lo_.get(), o.hi_.get()) && mpfr_lessequal_p(o.lo_.get(), hi_.get());
}

bool Interval::pos() const { return mpfr_sgn(lo_.get()) > 0; }
bool Interval::neg() const { return mpfr_sgn(hi_.get()) < 0; }
bool Interval::lt(const Interval& o) const { return mpfr_less_p(hi_.get(), o.lo_.get()); }
bool Interval::le(const Interval& o) const { return mpfr_lessequal_p(hi_.get(), o.lo_.get()); }

double Interval::mid() const { return 0.5 * (lo_.to_double() + hi_.to_double()); }

double Interval::width() const {
    Real w(prec());
    mpfr_sub(w.get(), hi_.get(), lo_.get(), MPFR_RNDU);
    return w.to_double();
}

double Interval::log10_mid() const {
    Real m(prec());
    mpfr_add(m.get(), lo_.get(), hi_.get(), MPFR_RNDN);
    mpfr_div_2ui(m.get(), m.get(), 1, MPFR_RNDN);
    mpfr_log10(m.get(), m.get(), MPFR_RNDN);
    return m.to_double();
}

std::string Interval::str(int digits) const {
    return "[" + lo_.str(digits, MPFR_RNDD) + ", " + hi_.str(digits, MPFR_RNDU) + "]";
}

Interval Interval::operator-() const {
    Interval r(prec());
    mpfr_neg(r.lo_.get(), hi_.get(), MPFR_RNDD);
    mpfr_neg(r.hi_.get(), lo_.get(), MPFR_RNDU);
    return r;
}

Interval operator+(const Interval& a, const Interval& b) {
    Interval r(std::max(a.prec(), b.prec()));
    mpfr_add(r.lo_.get(), a.lo_.get(), b.lo_.get(), MPFR_RNDD);
    mpfr_add(r.hi_.get(), a.hi_.get(), b.hi_.get(), MPFR_RNDU);
    return r;
}

Interval operator-(const Interval& a, const Interval& b) {
    Interval r(std::max(a.prec(), b.prec()));
    mpfr_sub(r.lo_.get(), a.lo_.get(), b.hi_.get(), MPFR_RNDD);
    mpfr_sub(r.hi_.get(), a.hi_.get(), b.lo_.get(), MPFR_RNDU);
    return r;
}

Interval operator*(const Interval& a, const Interval& b) {
    mpfr_prec_t p = std::max(a.prec(), b.prec());
    Interval r(p);
    if (mpfr_sgn(a.lo_.get()) >= 0 && mpfr_sgn(b.lo_.get()) >= 0) {
        mpfr_mul(r.lo_.get(), a.lo_.get(), b.lo_.get(), MPFR_RNDD);
        mpfr_mul(r.hi_.get(), a.hi_.get(), b.hi_.get(), MPFR_RNDU);
        return r;
    }
    mpfr_srcptr av[2] = {a.lo_.get(), a.hi_.get()};
    mpfr_srcptr bv[2] = {b.lo_.get(), b.hi_.get()};
    Real t(p);
    bool first = true;
    for (auto x : av)
        for (auto y : bv) {
            mpfr_mul(t.get(), x, y, MPFR_RNDD);
            if (first || mpfr_less_p(t.get(), r.lo_.get())) mpfr_set(r.lo_.get(), t.get(), MPFR_RNDD);
            mpfr_mul(t.get(), x, y, MPFR_RNDU);
            if (first || mpfr_greater_p(t.get(), r.hi_.get())) mpfr_set(r.hi_.get(), t.get(), MPFR_RNDU);
            first = false;
        }
    return r;
}

Interval operator/(const Interval& a, const Interval& b) {
    if (!b.pos() && !b.neg()) throw PrecisionExhausted("divisor interval contains zero");
    mpfr_prec_t p = std::max(a.prec(), b.prec());
    Interval r(p);
    mpfr_srcptr av[2] = {a.lo_.get(), a.hi_.get()};
    mpfr_srcptr bv[2] = {b.lo_.get(), b.hi_.get()};
    Real t(p);
    bool first = true;
    for (auto x : av)
        for (auto y : bv) {
            mpfr_div(t.get(), x, y, MPFR_RNDD);
            if (first || mpfr_less_p(t.get(), r.lo_.get())) mpfr_set(r.lo_.get(), t.get(), MPFR_RNDD);
            mpfr_div(t.get(), x, y, MPFR_RNDU);
            if (first || mpfr_greater_p(t.get(), r.hi_.get())) mpfr_set(r.hi_.get(), t.get(), MPFR_RNDU);
            first = false;
        }
    return r;
}

Interval sqr(const Interval& x) {
    Interval a = abs(x);
    Interval r(x.prec());
    mpfr_sqr(r.lo().get(), a.lo().get(), MPFR_RNDD);
    mpfr_sqr(r.hi().get(), a.hi().get(), MPFR_RNDU);
    return r;
}

Interval abs(const Interval& x) {
    if (mpfr_sgn(x.lo().get()) >= 0) return x;
    if (mpfr_sgn(x.hi().get()) <= 0) return -x;
    Interval r(x.prec());
    mpfr_set_zero(r.lo().get(), 1);
    mpfr_neg(r.hi().get(), x.lo().get(), MPFR_RNDU);
    mpfr_max(r.hi().get(), r.hi().get(), x.hi().get(), MPFR_RNDU);
    return r;
}

Interval sqrt(const Interval& x) {
    if (mpfr_sgn(x.hi().get()) < 0) throw DomainViolation("sqrt of negative interval");
    Interval r(x.prec());
    if (mpfr_sgn(x.lo().get()) <= 0)
        mpfr_set_zero(r.lo().get(), 1);
    else
        mpfr_sqrt(r.lo().get(), x.lo().get(), MPFR_RNDD);
    mpfr_sqrt(r.hi().get(), x.hi().get(), MPFR_RNDU);
    return r;
}

Interval exp(const Interval& x) {
    Interval r(x.prec());
    mpfr_exp(r.lo().get(), x.lo().get(), MPFR_RNDD);
    mpfr_exp(r.hi().get(), x.hi().get(), MPFR_RNDU);
    return r;
}

Interval log(const Interval& x) {
    if (!x.pos()) throw PrecisionExhausted("log of interval not certainly positive");
    Interval r(x.prec());
    mpfr_log(r.lo().get(), x.lo().get(), MPFR_RNDD);
    mpfr_log(r.hi().get(), x.hi().get(), MPFR_RNDU);
    return r;
}

Interval pow(const Interval& base, const Interval& expo) { return exp(expo * log(base)); }

Interval min(const Interval& a, const Interval& b) {
    Interval r(std::max(a.prec(), b.prec()));
    mpfr_min(r.lo().get(), a.lo().get(), b.lo().get(), MPFR_RNDD);
    mpfr_min(r.hi().get(), a.hi().get(), b.hi().get(), MPFR_RNDU);
    return r;
}

Interval max(const Interval& a, const Interval& b) {
    Interval r(std::max(a.prec(), b.prec()));
    mpfr_max(r.lo().get(), a.lo().get(), b.lo().get(), MPFR_RNDD);
    mpfr_max(r.hi().get(), a.hi().get(), b.hi().get(), MPFR_RNDU);
    return r;
}

Interval euler_e(mpfr_prec_t prec) { return exp(Interval::of(1L, prec)); }

mpz_class floor_certified(const Interval& x) {
    mpz_class a, b;
    mpfr_get_z(a.get_mpz_t(), x.lo().get(), MPFR_RNDD);
    mpfr_get_z(b.get_mpz_t(), x.hi().get(), MPFR_RNDD);
    if (a != b) throw PrecisionExhausted("floor not determined by " + x.str(12));
    return a;
}

mpz_class ceil_upper(const Interval& x) {
    mpz_class a;
    mpfr_get_z(a.get_mpz_t(), x.hi().get(), MPFR_RNDU);
    return a;
}

mpq_class lower_rational(const Interval& x) {
    mpq_class q;
    mpfr_get_q(q.get_mpq_t(), x.lo().get());
    return q;
}

mpq_class upper_rational(const Interval& x) {
    mpq_class q;
    mpfr_get_q(q.get_mpq_t(), x.hi().get());
    return q;
}

// ---- continued fractions

CfStream::CfStream(const Interval& x) : x_(x), p0_(0), q0_(1), p1_(1), q1_(0) {
    if (!x.pos()) throw DomainViolation("cf_expand needs x > 0");
    if (mpfr_equal_p(x.lo().get(), x.hi().get())) {
        exact_ = true;
        xq_ = lower_rational(x);
    }
}

bool CfStream::next() {
    if (done_) return false;
    if (exact_) {
        mpz_fdiv_q(a_.get_mpz_t(), xq_.get_num_mpz_t(), xq_.get_den_mpz_t());
        mpz_class p = a_ * p1_ + p0_, q = a_ * q1_ + q0_;
        p0_ = p1_;
        q0_ = q1_;
        p1_ = p;
        q1_ = q;
        ++n_;
        mpq_class frac = xq_ - a_;
        if (frac == 0)
            done_ = true;
        else
            xq_ = 1 / frac;
        return true;
    }
    a_ = floor_certified(x_);
    mpz_class p = a_ * p1_ + p0_, q = a_ * q1_ + q0_;
    p0_ = p1_;
    q0_ = q1_;
    p1_ = p;
    q1_ = q;
    ++n_;
    Interval frac = x_ - Interval::of(a_, x_.prec());
    if (mpfr_zero_p(frac.lo().get()) && mpfr_zero_p(frac.hi().get())) {
        done_ = true;
    } else {
        if (!frac.pos()) throw PrecisionExhausted("fractional part not separated from zero");
        x_ = Interval::of(1L, x_.prec()) / frac;
    }
    return true;
}

ContinuedFraction cf_expand(const Interval& x, std::size_t depth) {
    ContinuedFraction cf;
    CfStream s(x);
    while (cf.partial_quotients.size() < depth && s.next()) {
        cf.partial_quotients.push_back(s.a());
        cf.convergents.emplace_back(s.p(), s.q());
    }
    return cf;
}

Interval nearest_int_distance(const Interval& x) {
    if (x.width() >= 0.25) throw PrecisionExhausted("interval too wide for nearest integer");
    mpz_class k;
    mpfr_get_z(k.get_mpz_t(), x.lo().get(), MPFR_RNDD);
    Interval best = abs(x - Interval::of(k, x.prec()));
    for (int j = 1; j <= 2; ++j) best = min(best, abs(x - Interval::of(mpz_class(k + j), x.prec())));
    return best;
}

mpz_class isqrt(const mpz_class& n) {
    if (n < 0) throw DomainViolation("isqrt of negative");
    mpz_class r;
    mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
    return r;
}

bool is_square(const mpz_class& n, mpz_class* root) {
    if (n < 0) return false;
    if (!mpz_perfect_square_p(n.get_mpz_t())) return false;
    if (root) *root = isqrt(n);
    return true;
}

std::string to_string(const mpz_class& z) { return z.get_str(); }
std::string to_string(const mpq_class& q) { return q.get_str(); }

}  // namespace fc
