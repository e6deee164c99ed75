#include "fanclose/family.hpp"

#include <algorithm>
#include <set>

#include "fanclose/errors.hpp"
#include "fanclose/numerics.hpp"
#include "fanclose/triple.hpp"

namespace fc {

GcdFamilyPoint gcd_family(const mpz_class& f, long k) {
    if (f < 2 || k < 1) throw DomainViolation("gcd_family needs f >= 2, k >= 1");
    mpz_class u0 = 0, u1 = 1;
    for (long i = 0; i < k; ++i) {
        mpz_class u2 = 2 * f * u1 - u0;
        u0 = u1;
        u1 = u2;
    }
    GcdFamilyPoint p;
    p.f = f;
    p.k = k;
    p.r = f * u0;
    p.s = f * u1;
    p.b = p.r * p.r + 1;
    p.c = p.s * p.s + 1;
    p.t = p.r * p.s + f;
    if (p.b * p.c - 1 != p.t * p.t) throw InvariantBroken("gcd family point off the triple condition");
    return p;
}

GeneralFamilyPoint general_family(const mpz_class& f1, const mpz_class& f2, const FundamentalClass& cls, long k) {
    const mpz_class f = f1 * f2;
    if (cls.f != f || cls.f1 != f1) throw DomainViolation("class does not belong to f = f1 f2");
    const mpz_class e = f * f - 1;
    if (cls.w0 * cls.w0 - e * cls.u0 * cls.u0 != f1 * f1) throw NonIntegerPoint("class is not a solution");
    if (k < (cls.zeta < 0 ? 1 : 0)) throw DomainViolation("k below the class offset");

    mpz_class W = cls.w0, u = cls.zeta * cls.u0;
    for (long i = 0; i < k; ++i) {
        mpz_class W2 = W * f + e * u;
        mpz_class u2 = W + u * f;
        W = W2;
        u = u2;
    }
    if (u < 0 || W <= 0) throw NonIntegerPoint("orbit point left the positive quadrant");

    GeneralFamilyPoint p;
    p.f = f;
    p.f1 = f1;
    p.f2 = f2;
    p.cls = cls;
    p.k = k;
    p.u = u;
    p.v = W + f * u;
    p.r = f2 * p.u;
    p.s = f2 * p.v;
    p.b = p.r * p.r + 1;
    p.c = p.s * p.s + 1;
    if (!master_equation(p.r, p.s, f)) throw InvariantBroken("family point off the master equation");
    p.wide_ratio = 1000 * p.s * p.s > 3999 * f * f * p.r * p.r;
    return p;
}

mpz_class f1_part(const mpz_class& f) {
    mpz_class n = abs(f), out = 1;
    for (mpz_class p = 2; p * p <= n; ++p) {
        while (n % p == 0) {
            if (p % 4 == 1) out *= p;
            n /= p;
        }
    }
    if (n > 1 && n % 4 == 1) out *= n;
    return out;
}

std::vector<std::pair<mpz_class, mpz_class>> family_points(const mpz_class& f, const mpz_class& s_cap) {
    const mpz_class f1 = f1_part(f), f2 = f / f1;
    std::set<std::pair<mpz_class, mpz_class>> out;
    for (const auto& cls : frattini_classes(f, f1)) {
        for (long k = cls.zeta < 0 ? 1 : 0;; ++k) {
            GeneralFamilyPoint p = general_family(f1, f2, cls, k);
            if (p.s > s_cap) break;
            if (p.r >= 1 && p.r < p.s) out.emplace(p.r, p.s);
        }
    }
    return {out.begin(), out.end()};
}

Prop parse_prop(const std::string& s) {
    if (s == "pr34") return Prop::pr34;
    if (s == "pr35") return Prop::pr35;
    if (s == "pr37") return Prop::pr37;
    if (s == "pr38") return Prop::pr38;
    if (s == "pr39") return Prop::pr39;
    throw UsageError("unknown check " + s);
}

std::string prop_name(Prop p) {
    switch (p) {
        case Prop::pr34: return "pr34";
        case Prop::pr35: return "pr35";
        case Prop::pr37: return "pr37";
        case Prop::pr38: return "pr38";
        default: return "pr39";
    }
}

std::vector<long> prop_ks(Prop p) {
    switch (p) {
        case Prop::pr34: return {1};
        case Prop::pr35: return {2};
        case Prop::pr37: return {3};
        case Prop::pr38: return {4};
        default: return {5, 6};
    }
}

namespace {

mpz_class modp(const mpz_class& x, const mpz_class& m) {
    mpz_class r = x % m;
    if (r < 0) r += m;
    return r;
}

mpz_class binom(const mpz_class& n, unsigned long k) {
    if (n < 0) throw DomainViolation("binomial of negative");
    mpz_class out;
    mpz_bin_ui(out.get_mpz_t(), n.get_mpz_t(), k);
    return out;
}

mpz_class integral(const mpq_class& q) {
    mpq_class c = q;
    c.canonicalize();
    if (c.get_den() != 1) throw InvariantBroken("closed form is not integral: " + c.get_str());
    return c.get_num();
}

// U_m(1 + delta) truncated after delta^2; exact modulo any M with M | delta^3.
mpz_class cheb_u(long m, const mpz_class& delta) {
    if (m == -2) return -1;
    if (m == -1) return 0;
    mpz_class out = 0, dj = 1, two = 1;
    for (unsigned long j = 0; j <= 2; ++j) {
        out += two * binom(mpz_class(m + 1 + static_cast<long>(j)), 2 * j + 1) * dj;
        dj *= delta;
        two *= 2;
    }
    return out;
}

struct Seq {
    mpz_class x0, x1, step;
};

// x_n for x_{n+2} = step x_{n+1} - x_n through the delta expansion.
mpz_class derived_closed(const Seq& q, long n) {
    mpz_class delta = (q.step - 2) / 2;
    return q.x1 * cheb_u(n - 1, delta) - q.x0 * cheb_u(n - 2, delta);
}

std::vector<mpz_class> run_mod(const Seq& q, const mpz_class& M, long count) {
    std::vector<mpz_class> out{modp(q.x0, M), modp(q.x1, M)};
    while (static_cast<long>(out.size()) < count) out.push_back(modp(q.step * out.back() - out[out.size() - 2], M));
    out.resize(static_cast<std::size_t>(count));
    return out;
}

Seq seq_v(const GcdFamilyPoint& p) { return {p.s, (2 * p.c - 1) * p.s, 4 * p.c - 2}; }
Seq seq_w(const GcdFamilyPoint& p, int rho) {
    return {p.s, (2 * p.b * p.c - 1) * p.s + 2 * rho * p.r * p.t * p.c, 4 * p.b * p.c - 2};
}
Seq seq_u(const GcdFamilyPoint& p) { return {p.r, (2 * p.b - 1) * p.r, 4 * p.b - 2}; }
Seq seq_U(const GcdFamilyPoint& p, int rho) {
    return {rho * p.r, (2 * p.b * p.c - 1) * rho * p.r + 2 * p.b * p.s * p.t, 4 * p.b * p.c - 2};
}

// Displayed closed forms; returns false when the proposition shows none for this sequence.
bool displayed_closed(Prop prop, const std::string& seq, const GcdFamilyPoint& p, long n, int rho, mpz_class& out) {
    const mpz_class& f = p.f;
    const mpz_class f2 = f * f, f4 = f2 * f2, r = p.r;
    const mpz_class N = n, N3 = N * N * N;
    switch (prop) {
        case Prop::pr34:
            if (seq == "v") out = 2 * f2;
            else out = integral(2 * (rho * N + 1) * f2 + (mpq_class(4 * N3 + 8 * N, 3) * rho + 4 * N * N) * f4);
            return true;
        case Prop::pr37:
            if (seq == "v") out = -4 * f2 + 8 * f4;
            else out = integral(-(2 * rho * N + 4) * f2 + (mpq_class(4 * N - 4 * N3, 3) * rho - 8 * N * N + 8) * f4);
            return true;
        case Prop::pr35:
            if (seq == "u") out = r;
            else out = integral((N * N * r * r + r) * rho + mpq_class(10 * N - N3, 3) * r * r - N * r);
            return true;
        case Prop::pr38:
            if (seq == "u") return false;
            out = integral(((8 - 8 * N * N) * f4 - 4 * f2) * rho + mpq_class(4 * N3 - 100 * N, 3) * f4 + 2 * N * f2);
            return true;
        default:
            return false;
    }
}

}  // namespace

CongruenceReport congruence_profile(const GcdFamilyPoint& p, Prop prop, long max_index) {
    auto ks = prop_ks(prop);
    if (std::find(ks.begin(), ks.end(), p.k) == ks.end())
        throw DomainViolation(prop_name(prop) + " does not cover k = " + std::to_string(p.k));
    CongruenceReport rep;
    rep.prop = prop;
    rep.f = p.f;
    rep.k = p.k;
    const mpz_class f6 = p.f * p.f * p.f * p.f * p.f * p.f;
    rep.modulus = prop == Prop::pr35 ? mpz_class(p.r * p.r * p.r) : mpz_class(8 * f6);
    const mpz_class& M = rep.modulus;
    const bool odd = p.k % 2 == 1;

    for (int rho : {1, -1}) {
        std::vector<std::pair<std::string, Seq>> seqs;
        if (odd)
            seqs = {{"v", seq_v(p)}, {"w", seq_w(p, rho)}};
        else
            seqs = {{"u", seq_u(p)}, {"U", seq_U(p, rho)}};
        for (auto& [name, q] : seqs) {
            auto rec = run_mod(q, M, max_index + 1);
            for (long n = 0; n <= max_index; ++n) {
                CongruenceRow row;
                row.seq = name;
                row.index = n;
                row.rho = rho;
                row.recurrence = rec[static_cast<std::size_t>(n)];
                mpz_class cf;
                if (displayed_closed(prop, name, p, n, rho, cf)) {
                    row.displayed = true;
                } else {
                    row.displayed = false;
                    cf = derived_closed(q, n);
                }
                row.closed = modp(cf, M);
                row.match = row.closed == row.recurrence;
                if (!row.match) ++rep.mismatches;
                rep.rows.push_back(row);
            }
        }
    }
    return rep;
}

namespace {

// Sign of a + b sqrt(e) for nonsquare e > 0.
int sign_quadratic(const mpz_class& a, const mpz_class& b, const mpz_class& e) {
    int sa = sgn(a), sb = sgn(b);
    if (sa >= 0 && sb >= 0) return (sa || sb) ? 1 : 0;
    if (sa <= 0 && sb <= 0) return -1;
    int cmp = ::cmp(a * a, b * b * e);
    return sa > 0 ? (cmp > 0 ? 1 : -1) : (cmp > 0 ? -1 : 1);
}

// c >= b^(num/den) exactly.
bool at_least_power(const mpz_class& c, const mpz_class& b, unsigned long num, unsigned long den) {
    mpz_class lhs, rhs;
    mpz_pow_ui(lhs.get_mpz_t(), c.get_mpz_t(), den);
    mpz_pow_ui(rhs.get_mpz_t(), b.get_mpz_t(), num);
    return lhs >= rhs;
}

}  // namespace

ExclusionVerdict family_exclusion(const mpz_class& f, long k) {
    ExclusionVerdict v;
    v.f = f;
    v.k = k;
    if (k == 0) {
        v.excluded = true;
        v.verdict = "k = 0 gives r = 0, b = 1: impossible";
        v.trace.push_back("r = f U_0 = 0");
        return v;
    }
    if (k < 0 || k > 6) throw DomainViolation("family_exclusion handles 0 <= k <= 6");
    if (f < 2) throw DomainViolation("family_exclusion needs f >= 2");

    GcdFamilyPoint p = gcd_family(f, k);
    const mpz_class e = f * f - 1;
    // gamma^j = P_j + Q_j sqrt(e)
    std::vector<mpz_class> P{1}, Q{0};
    for (long j = 1; j <= 2 * k + 2; ++j) {
        P.push_back(P.back() * f + e * Q.back());
        Q.push_back(P[P.size() - 2] + Q.back() * f);
    }
    auto trace = [&](const std::string& s) { v.trace.push_back(s); };
    trace("b = " + p.b.get_str() + ", c = " + p.c.get_str());
    bool c_lt_bg2 = sign_quadratic(p.b * P[2] - p.c, p.b * Q[2], e) > 0;
    trace(std::string("c < b gamma^2: ") + (c_lt_bg2 ? "holds" : "FAILS"));
    if (k >= 2) {
        bool lower = sign_quadratic(2 * p.c + p.b - 2 * p.b * P[2], -2 * p.b * Q[2], e) > 0;
        trace(std::string("gamma^2 - 1/2 < c/b: ") + (lower ? "holds" : "FAILS"));
    }
    bool g_lt_b = sign_quadratic(p.b - P[static_cast<std::size_t>(2 * k - 1)], -Q[static_cast<std::size_t>(2 * k - 1)], e) > 0;
    trace(std::string("gamma^(2k-1) < b: ") + (g_lt_b ? "holds" : "FAILS"));
    trace(std::string("b > 10^13: ") + (p.b > mpz_class("10000000000000") ? "yes" : "no"));

    struct Band {
        unsigned long num, den;
        const char* name;
    };
    const Band bands[] = {{3, 1, "b^3"}, {2, 1, "b^2"}, {3, 2, "b^1.5"}, {7, 5, "b^1.4"},
                          {13, 10, "b^1.3"}, {6, 5, "b^1.2"}, {29, 25, "b^1.16"}};
    std::string band = "below b^1.16";
    for (std::size_t i = 0; i < std::size(bands); ++i) {
        if (at_least_power(p.c, p.b, bands[i].num, bands[i].den)) {
            band = i == 0 ? std::string("c >= b^3") : std::string(bands[i].name) + " <= c < " + bands[i - 1].name;
            break;
        }
    }
    trace("regime: " + band);

    Prop prop = k == 1 ? Prop::pr34 : k == 2 ? Prop::pr35 : k == 3 ? Prop::pr37 : k == 4 ? Prop::pr38 : Prop::pr39;
    v.prop = prop_name(prop);
    const bool odd = k % 2 == 1;
    const mpz_class f4 = f * f * f * f;
    v.n_lower = odd ? mpz_class(4 * f4) : mpz_class(3 * f4);
    v.n_strict = !odd;

    CongruenceReport rep = congruence_profile(p, prop);
    trace(v.prop + " congruence profile: " + std::to_string(rep.rows.size() - rep.mismatches) + "/" +
          std::to_string(rep.rows.size()) + " rows agree mod " + rep.modulus.get_str());
    trace(std::string("congruence bound: n ") + (odd ? ">= 4f^4 = " : "> 3f^4 = ") + v.n_lower.get_str());

    // Smallest positive n solving the congruence, by direct search when small.
    if (v.n_lower <= 2000000) {
        const mpz_class& M = rep.modulus;
        std::set<mpz_class> left;
        for (auto& x : run_mod(odd ? seq_v(p) : seq_u(p), M, 64)) left.insert(x);
        long long best = -1;
        const long long limit = v.n_lower.get_si() + 1;
        for (int rho : {1, -1}) {
            Seq q = odd ? seq_w(p, rho) : seq_U(p, rho);
            mpz_class a = modp(q.x0, M), b = modp(q.x1, M);
            for (long long n = 1; n <= limit; ++n) {
                if (left.count(b)) {
                    if (best < 0 || n < best) best = n;
                    break;
                }
                mpz_class c = modp(q.step * b - a, M);
                a = b;
                b = c;
            }
        }
        v.min_n_computed = best;
        v.bound_confirmed = best < 0 || (v.n_strict ? mpz_class(std::to_string(best)) > v.n_lower : mpz_class(std::to_string(best)) >= v.n_lower);
        trace("smallest positive n found: " + (best < 0 ? std::string("none up to the bound") : std::to_string(best)));
    }

    const mpz_class n_upper("10000000000000000000");
    if (rep.mismatches > 0) {
        v.verdict = "congruence profile mismatch";
    } else if (v.n_lower > n_upper) {
        v.excluded = true;
        v.verdict = std::string("n ") + (odd ? ">= 4f^4" : "> 3f^4") + " = " + v.n_lower.get_str() +
                    " contradicts n < 10^19";
    } else {
        v.verdict = "bound n " + std::string(odd ? ">= " : "> ") + v.n_lower.get_str() + " does not contradict n < 10^19";
    }
    return v;
}

mpz_class delta_identity(long k, const mpz_class& m, const mpz_class& l) { return (k + 1) * m - k * l; }

}  // namespace fc
