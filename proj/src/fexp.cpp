#include "fanclose/fexp.hpp"

#include <array>

namespace fc {

namespace {

mpq_class qpow(const mpq_class& x, unsigned e) {
    mpq_class r = 1;
    for (unsigned i = 0; i < e; ++i) r *= x;
    return r;
}

mpq_class main_term(int level, const mpq_class& r, const mpq_class& s) {
    auto R = [&](unsigned e) { return qpow(r, e); };
    auto S = [&](unsigned e) { return qpow(s, e); };
    switch (level) {
        case 1:
            return s / (4 * R(2)) - R(2) / s + 1 / (2 * s) + R(2) / (4 * S(3));
        case 2:
            return S(2) / (4 * R(3)) - R(3) / S(2) - S(2) / (16 * R(5)) + 1 / r - 1 / (4 * R(3)) +
                   5 * r / (4 * S(2)) - 3 / (8 * r * S(2)) + R(3) / (2 * S(4)) - r / (4 * S(4)) -
                   R(3) / (16 * S(6));
        case 3:
            return (16 * R(4) - 8 * R(2) + 1) * S(3) / (64 * R(8)) + (32 * R(4) - 22 * R(2) + 3) * s / (32 * R(6)) +
                   (128 * R(4) - 96 * R(2) + 15) / (64 * R(4) * s) +
                   (-16 * R(6) + 32 * R(4) - 26 * R(2) + 5) / (16 * R(2) * S(3)) +
                   (48 * R(4) - 56 * R(2) + 15) / (64 * S(5)) + (-6 * R(4) + 3 * R(2)) / (32 * S(7)) +
                   R(4) / (64 * S(9));
        case 4:
            return (64 * R(6) - 48 * R(4) + 12 * R(2) - 1) * S(4) / (256 * R(11)) +
                   (32 * R(6) - 36 * R(4) + 11 * R(2) - 1) * S(2) / (32 * R(9)) +
                   (128 * R(6) - 192 * R(4) + 69 * R(2) - 7) / (64 * R(7)) +
                   (96 * R(6) - 144 * R(4) + 60 * R(2) - 7) / (32 * R(5) * S(2)) +
                   (-128 * R(8) + 352 * R(6) - 504 * R(4) + 250 * R(2) - 35) / (128 * R(3) * S(4)) +
                   (32 * R(6) - 60 * R(4) + 39 * R(2) - 7) / (32 * r * S(6)) +
                   (-24 * R(5) + 27 * R(3) - 7 * r) / (64 * S(8)) + (2 * R(5) - R(3)) / (32 * S(10)) -
                   R(5) / (256 * S(12));
    }
    throw DomainViolation("expansion level must be 1..4");
}

std::vector<mpq_class> envelopes(int level, const mpq_class& r, const mpq_class& s) {
    auto R = [&](unsigned e) { return qpow(r, e); };
    auto S = [&](unsigned e) { return qpow(s, e); };
    switch (level) {
        case 1:
            return {s / (8 * R(4)) + 3 / (8 * R(2) * s) + 3 / (8 * S(3)) + R(2) / (8 * S(5))};
        case 2:
            return {S(2) / R(5), S(2) / R(9)};
        case 3:
            return {17 * S(3) / (128 * R(6)), 9 * S(3) / (256 * R(10)), S(3) / (256 * R(14))};
        case 4:
            return {17 * S(4) / (128 * R(7)), 25 * S(4) / (256 * R(11)), S(4) / (128 * R(15)),
                    S(4) / (2048 * R(19))};
    }
    throw DomainViolation("expansion level must be 1..4");
}

using Poly = std::vector<mpq_class>;

Poly mul(const Poly& a, const Poly& b) {
    Poly out(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
}

Poly sub(Poly a, const Poly& b) {
    if (a.size() < b.size()) a.resize(b.size(), 0);
    for (std::size_t i = 0; i < b.size(); ++i) a[i] -= b[i];
    return a;
}

Interval parse_cap(const std::string& s, mpfr_prec_t p) {
    if (s.rfind("10^", 0) == 0) return exp(Interval::parse(s.substr(3), p) * log(Interval::of(10L, p)));
    return Interval::parse(s, p);
}

// r^e for r < sqrt(cap), e >= 0 rational
Interval r_power(const std::string& cap, const mpq_class& e, mpfr_prec_t p, const char* what) {
    if (e == 0) return Interval::of(1L, p);
    if (cap.empty()) throw CapMissing(std::string("prsec window needs a cap on b for the ") + what + " chain");
    Interval rcap = sqrt(parse_cap(cap, p));
    return pow(rcap, Interval::of(e, p));
}

}  // namespace

ExpansionSpec expansion_spec(int level, const mpz_class& r, const mpz_class& s) {
    return {level, main_term(level, r, s), envelopes(level, r, s)};
}

std::vector<mpq_class> expansion_polynomial(int level, const mpz_class& r, const mpz_class& s) {
    if (level < 1 || level > 4) throw DomainViolation("expansion level must be 1..4");
    mpq_class R(r), S(s);
    mpq_class u = 1 / (R * R) + 1 / (S * S);
    Poly f{R * S * (u / 2 - u * u / 8), R * S * u * u * u / 16};
    Poly prev{-S}, cur{-R};
    for (int i = 0; i < level; ++i) {
        Poly two_f{2 * f[0], 2 * f[1]};
        Poly next = sub(mul(two_f, cur), prev);
        prev = cur;
        cur = next;
    }
    for (auto& c : cur) c.canonicalize();
    return cur;
}

Interval estimate_F(int level, const mpz_class& r, const mpz_class& s, mpfr_prec_t prec) {
    if (level < 1 || level > 4) throw DomainViolation("expansion level must be 1..4");
    if (r < 2) throw DomainViolation("estimate_F needs r >= 2");
    if (s <= 31 * r) throw DomainViolation("estimate_F needs s > 31 r");
    ExpansionSpec e = expansion_spec(level, r, s);
    mpq_class lo = e.main_term;
    for (const auto& v : e.envelopes) lo -= v;
    Interval out(prec);
    mpfr_set_q(out.lo().get(), lo.get_mpq_t(), MPFR_RNDD);
    mpfr_set_q(out.hi().get(), e.main_term.get_mpq_t(), MPFR_RNDU);
    return out;
}

PrsecCaps default_prsec_caps() {
    PrsecCaps caps;
    const char* sweep = "upper bound on b from the theta sweep";
    caps['a'] = {'a', 1, 7000000,
                 {{mpq_class(41, 25), mpq_class(41, 20), "1e50", "1e38",
                   std::string(sweep) + ": b < 10^50 on 1.64 <= theta < 2.05, b < 10^38 on 1.639 < theta < 2.05", 5,
                   -7000000}}};
    caps['b'] = {'b', 2, 3000000,
                 {{mpq_class(3, 2), mpq_class(41, 25), "10^49.3", "10^49.3",
                   std::string(sweep) + ": b < 10^49.3 on 1.499 < theta < 1.64", 3000000, -1},
                  {mpq_class(7, 5), mpq_class(3, 2), "", "10^62.5",
                   std::string(sweep) + ": b < 10^62.5 on 1.40 <= theta < 1.50", 1, -2000000}}};
    caps['c'] = {'c', 3, 6000000,
                 {{mpq_class(13, 10), mpq_class(7, 5), "6.26e73", "6.26e73",
                   std::string(sweep) + ": b < 6.26e73 for theta >= 1.299", 6000000, -5000}}};
    caps['d'] = {'d', 4, 2000000,
                 {{mpq_class(123, 100), mpq_class(13, 10), "1e69", "1e69",
                   std::string(sweep) + ": b < 10^69 on 1.23 <= theta < 1.30", 2000000, -600}}};
    return caps;
}

PrsecVerdict prsec_bound(char which, const PrsecCaps& caps, mpfr_prec_t p) {
    auto it = caps.find(which);
    if (it == caps.end()) throw CapMissing(std::string("no prsec case ") + which + " configured");
    const PrsecCase& pc = it->second;
    if (pc.windows.empty()) throw CapMissing(std::string("prsec case ") + which + " has no windows");
    PrsecVerdict v;
    v.name = pc.name;
    v.level = pc.level;
    v.bound = pc.bound;
    v.certified = true;
    v.contradicts_cofpo = true;
    const int i = pc.level;
    Interval bound = Interval::of(pc.bound, p), cofpo = Interval::of(-10000000L, p);
    for (const auto& w : pc.windows) {
        PrsecWindowResult res;
        res.window = w;
        // F_i < s^i / (4 r^{i+1}) = r^{i theta - i - 1}/4 and F_i > -r^{i+1}/s^i = -r^{i+1 - i theta}
        mpq_class eu = i * w.theta_hi - i - 1, el = i + 1 - i * w.theta_lo;
        if (eu < 0) eu = 0;
        if (el < 0) el = 0;
        res.upper_exponent = eu.get_d();
        res.lower_exponent = el.get_d();
        res.upper = Interval::of(mpq_class(1, 4), p) * r_power(w.b_cap_upper, eu, p, "upper");
        res.lower = -r_power(w.b_cap_lower, el, p, "lower");
        res.upper_chain = "F_" + std::to_string(i) + " < 0.25 r^" + eu.get_str() + (eu == 0 ? "" : ", r^2 < " + w.b_cap_upper);
        res.lower_chain = "F_" + std::to_string(i) + " > -r^" + el.get_str() + (el == 0 ? "" : ", r^2 < " + w.b_cap_lower);
        // chains are strict, so F < upper <= claim and F > lower >= claim
        res.upper_ok = res.upper.le(Interval::of(w.claim_upper, p)) && res.upper.le(bound);
        res.lower_ok = Interval::of(w.claim_lower, p).le(res.lower) && (-bound).le(res.lower);
        v.certified = v.certified && res.upper_ok && res.lower_ok;
        // [lower, upper] against F_i < -10^7: disjoint iff lower > -10^7
        v.contradicts_cofpo = v.contradicts_cofpo && cofpo.le(res.lower);
        v.windows.push_back(res);
    }
    return v;
}

ThetaGap theta_gap(const mpz_class& r, const mpq_class& theta, mpfr_prec_t p) {
    if (r < 2) throw DomainViolation("theta_gap needs r >= 2");
    if (!(theta > mpq_class(6, 5) && theta < mpq_class(41, 20))) throw DomainViolation("theta_gap needs 1.2 < theta < 2.05");
    ThetaGap g;
    g.b = r * r + 1;
    // x = ceil(r^{2 theta}): smallest x with x^q >= r^{2p}
    const mpz_class& num = theta.get_num();
    const mpz_class& den = theta.get_den();
    mpz_class target;
    mpz_pow_ui(target.get_mpz_t(), r.get_mpz_t(), 2 * num.get_ui());
    mpz_class x;
    mpz_root(x.get_mpz_t(), target.get_mpz_t(), den.get_ui());
    mpz_class xq;
    mpz_pow_ui(xq.get_mpz_t(), x.get_mpz_t(), den.get_ui());
    if (xq < target) ++x;
    g.c = x + 1;
    Interval eta = log(Interval::of(g.c, p)) / log(Interval::of(g.b, p));
    g.gap = Interval::of(theta, p) - eta;
    g.lower_ok = g.gap.pos();
    g.upper_ok = g.gap.lt(Interval::of(mpq_class(1, r * r), p));
    return g;
}

}  // namespace fc
