#include "fanclose/bounds.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <thread>

namespace fc {

namespace {

Interval I(long v, mpfr_prec_t p) { return Interval::of(v, p); }
Interval Q(const mpq_class& q, mpfr_prec_t p) { return Interval::of(q, p); }
Interval Z(const mpz_class& z, mpfr_prec_t p) { return Interval::of(z, p); }
Interval D(const char* lit, mpfr_prec_t p) { return Interval::parse(lit, p); }

bool ge(const Interval& a, const Interval& b) { return b.le(a); }

mpz_class zpow(const mpz_class& b, unsigned long e) {
    mpz_class r;
    mpz_pow_ui(r.get_mpz_t(), b.get_mpz_t(), e);
    return r;
}

}  // namespace

// ---- linear form

LinearFormContext linear_form_context(const mpz_class& r, const mpz_class& s, mpfr_prec_t p, int rho) {
    if (!(r >= 1 && s > r)) throw DomainViolation("linear form needs s > r >= 1");
    LinearFormContext k;
    k.r = r;
    k.s = s;
    k.b = r * r + 1;
    k.c = s * s + 1;
    // proxy pairs are allowed; t is then only the integer part
    k.t = isqrt(k.b * k.c - 1);
    k.rho = rho;
    Interval sb = sqrt(Z(k.b, p)), sc = sqrt(Z(k.c, p));
    k.alpha = Z(s, p) + sc;
    k.beta = Z(r, p) + sb;
    k.beta3 = Z(s, p) * sb / (Z(r, p) * sc);
    k.log_alpha = log(k.alpha);
    k.log_beta = log(k.beta);
    k.log_beta3 = log(k.beta3);
    Interval lsb = log(Z(s, p) * sb);
    k.B1 = I(2, p) * k.log_alpha;
    k.B2 = I(2, p) * k.log_beta;
    k.B3 = I(4, p) * lsb;
    k.A1 = k.log_alpha / I(2, p);
    k.A2 = k.log_beta / I(2, p);
    k.A3 = lsb;
    mpz_class u = r * r * k.c, v = s * s * k.b, g;
    mpz_gcd(g.get_mpz_t(), u.get_mpz_t(), v.get_mpz_t());
    k.h3_num = v / g;
    k.h3 = log(Z(k.h3_num, p)) / I(2, p);
    return k;
}

Interval aleksentsev_E(const mpz_class& m, const mpz_class& l, const Interval& B1, const Interval& B2,
                       const Interval& B3) {
    mpfr_prec_t p = B1.prec();
    Interval bs[3] = {Z(2 * m, p), Z(2 * l, p), I(1, p)};
    const Interval* Bs[3] = {&B1, &B2, &B3};
    Interval E = I(3, p);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) E = max(E, bs[i] / *Bs[j] + bs[j] / *Bs[i]);
    return E;
}

Interval aleksentsev_constant(mpfr_prec_t p) {
    // n = 3, D = 4
    Interval n = I(3, p);
    Interval k = -D("5.3", p) * pow(n, Q(mpq_class(-5, 2), p)) * I(256, p) * I(121, p) * I(8, p);
    Interval c = D("31.44", p);
    return k * c * c * c * I(16, p) * log(I(36, p));
}

Interval aleksentsev_from(const Interval& E, const Interval& B1, const Interval& B2, const Interval& B3) {
    return aleksentsev_constant(B1.prec()) * log(E) * B1 * B2 * B3;
}

Interval aleksentsev_bound(const LinearFormContext& ctx, const mpz_class& m, const mpz_class& l) {
    if (l < 250) throw PreconditionTooSmall("aleksentsev_bound needs l >= 250");
    return aleksentsev_from(aleksentsev_E(m, l, ctx.B1, ctx.B2, ctx.B3), ctx.B1, ctx.B2, ctx.B3);
}

Interval aleksentsev_rhs(const Interval& b, const Interval& c, const Interval& n) {
    mpfr_prec_t p = b.prec();
    Interval l4b = log(I(4, p) * b), l4c = log(I(4, p) * c);
    Interval inner = I(4, p) * n * log(b * c) / (log(b) * l4b);
    return D("1.5002e11", p) * l4b * l4c * log(inner);
}

// Smallest integer N >= n0 with g(N) <= N, where g is increasing, concave and
// has slope < 1 beyond `slope_ok`; then no n > N has n < g(n).
template <class G>
static mpz_class certified_fixed_point(G g, mpz_class n, const Interval& slope_bound, mpfr_prec_t p) {
    for (int it = 0; it < 400; ++it) {
        mpz_class next = ceil_upper(g(Z(n, p)));
        if (next <= n) {
            if (slope_bound.le(Z(n, p))) return n;
            n = ceil_upper(slope_bound) + 1;
            continue;
        }
        // damp the climb: g grows logarithmically so a few steps suffice
        n = next;
    }
    throw InvariantBroken("fixed point iteration did not settle");
}

mpz_class upper_n_aleksentsev(const Interval& b, const Interval& c) {
    mpfr_prec_t p = b.prec();
    Interval slope = D("1.5002e11", p) * log(I(4, p) * b) * log(I(4, p) * c);
    auto g = [&](const Interval& n) { return aleksentsev_rhs(b, c, n); };
    // Iterate from below first: the chain increases to the fixed point.
    mpz_class n = 250;
    for (int it = 0; it < 200; ++it) {
        mpz_class next = ceil_upper(g(Z(n, p)));
        if (next <= n) break;
        n = next;
    }
    n = certified_fixed_point(g, n, slope, p);
    return std::max(n, mpz_class(250));
}

mpz_class upper_n_aleksentsev(const mpz_class& b, const mpz_class& c, mpfr_prec_t prec) {
    return upper_n_aleksentsev(Z(b, prec), Z(c, prec));
}

// ---- Matveev

MatveevConstants matveev_constants(const Interval& b, const Interval& c, const Interval& Del, const Interval& n) {
    mpfr_prec_t p = b.prec();
    MatveevConstants k;
    Interval e = euler_e(p), one = I(1, p), two = I(2, p);
    Interval r = sqrt(b - one), s = sqrt(c - one);
    Interval beta2 = r + sqrt(b), alpha = s + sqrt(c);
    k.log_beta2 = log(beta2);
    k.A1 = log(alpha) / two;
    k.A2 = k.log_beta2 / two;
    k.A3 = log(s * sqrt(b));
    k.E = Q(mpq_class(mpz_class("4000000000000001"), mpz_class("12000000000000000")), p);
    k.E1 = D("0.033653", p);
    k.C3star = Q(mpq_class(14, 5), p);
    k.C3 = I(3, p);
    Interval l2 = I(3, p) * log(two) + two;
    k.C1 = (one + exp(I(-6, p)) / I(148, p)) * l2 * I(4, p) / (I(3, p) * k.C3);
    k.C2 = I(16, p) * (I(6, p) + I(5, p) / l2) * exp(I(6, p)) / (sqrt(I(3, p)) * k.C3);
    k.Omega = k.A1 * k.A2 * k.A3;
    Interval dc = I(4, p) * k.C1 / e;
    k.omega = k.Omega * dc * dc * dc * k.C3 * exp(k.C3) * k.E * e / two;
    k.T = I(96, p) * k.E * e * k.C1 * k.C1 * k.C2 * k.A1 * k.A2;
    Interval lT = log(k.T), llT = log(lT), lllT = log(llT);
    k.C0 = lT + llT + lllT + two * log(lllT);
    Interval inner = (Del + one) * (one / (two * k.C0 * k.C2 * k.omega) + one / (I(6, p) * k.C1 * k.A3)) * n +
                     one / (I(6, p) * k.C1 * k.log_beta2);
    k.S = one + log(one + inner * (one + k.log_beta2));
    k.W0 = k.S;
    return k;
}

Interval matveev_rhs(const MatveevConstants& k, const Interval& b, const Interval& c) {
    mpfr_prec_t p = b.prec();
    return I(17472, p) * k.C0 * k.C1 * k.C1 * k.C1 * k.C2 * k.S * euler_e(p) * log(I(4, p) * b) *
           log(I(4, p) * c);
}

static void matveev_side_conditions(const MatveevConstants& k) {
    mpfr_prec_t p = k.C0.prec();
    Interval e = euler_e(p), two = I(2, p);
    if (!ge(k.C3star * exp(k.C3star) * k.E * e / two, e * e * e))
        throw SideConditionFailed("C3* exp(C3*) E e/2 >= e^3");
    Interval mn = min(k.C0, k.W0);
    Interval amax = max(max(k.A1, k.A2), k.A3);
    if (!ge(two * k.omega * mn, k.C3)) throw SideConditionFailed("2 omega min{C0,W0} >= C3");
    if (!ge(k.omega * mn, two * k.C1 * k.C3 * amax))
        throw SideConditionFailed("omega min{C0,W0} >= 2 C1 C3 max{A1,A2,A3}");
    Interval c4 = I(4, p) * k.C1;
    if (!ge(I(3, p) * c4 * c4 * I(4, p) * k.C0 * k.Omega, k.C3 * amax))
        throw SideConditionFailed("3 (4C1)^2 4 C0 Omega >= C3 max{A1,A2,A3}");
    Interval inner = max(max(k.C0 * k.omega / (I(4, p) * k.C1 * k.A3), k.C0), two * k.E1 * k.C3 / k.C1);
    if (!ge(k.C0, two * k.C3) || !ge(k.C0, log(I(4, p) * k.C2 * inner)))
        throw SideConditionFailed("C0 >= max{2C3, log(4C2 max{...})}");
    if (!ge(k.W0, two * k.C3)) throw SideConditionFailed("W0 >= 2C3");
}

mpz_class matveev_upper_n(const Interval& b, const Interval& c, const Interval& del, const Interval& Del,
                          const mpz_class& n_seed) {
    mpfr_prec_t p = b.prec();
    if (!(D("1.16", p).lt(del) && del.lt(Del) && Del.lt(D("4.1", p))))
        throw DomainViolation("matveev_upper_n needs 1.16 < del < Del < 4.1");
    Interval mu = log(c) / log(b);
    if (mu.lt(del) || Del.lt(mu)) throw DomainViolation("c outside b^del..b^Del");
    auto g = [&](const Interval& n) { return matveev_rhs(matveev_constants(b, c, Del, n), b, c); };
    // slope of g is below its coefficient of S divided by n
    Interval coef = matveev_rhs(matveev_constants(b, c, Del, I(1, p)), b, c) /
                    matveev_constants(b, c, Del, I(1, p)).S;
    mpz_class n = std::max(n_seed, mpz_class(1));
    // from above the iteration decreases monotonically to the fixed point
    for (int it = 0; it < 200; ++it) {
        mpz_class next = ceil_upper(g(Z(n, p)));
        if (next >= n) break;
        n = next;
    }
    n = certified_fixed_point(g, n, coef, p);
    matveev_side_conditions(matveev_constants(b, c, Del, Z(n, p)));
    return n;
}

// ---- lower bounds on n

namespace {

// Which side(s) of a threshold c may lie on.
struct Tri {
    bool below = true;  // c < threshold possible (or c <= for closed sides)
    bool above = true;  // c >= threshold possible
};

Tri tri_box(const Interval& c, const Interval& thr) { return {!thr.le(c), !c.lt(thr)}; }

Tri tri_exact(int cmp) { return {cmp < 0, cmp >= 0}; }

struct Facts {
    Tri b3, b2x4, k7, b25, e50;
    // pr3.9 bands: index 0..3 for [1.16,1.22),[1.22,1.27),[1.27,1.32),[1.32,1.40)
    bool band[4] = {false, false, false, false};
    bool band_outside = true;
};

const char* kBandLo[5] = {"1.16", "1.22", "1.27", "1.32", "1.40"};
const long kBandNum[5] = {116, 122, 127, 132, 140};
const char* kBandK[4] = {"12.850", "15.387", "15.830", "15.927"};

void bands_from_mu(Facts& f, const mpq_class& lo, const mpq_class& hi, bool hi_open) {
    f.band_outside = lo < mpq_class(116, 100) || (hi_open ? hi > mpq_class(140, 100) : hi >= mpq_class(140, 100));
    for (int i = 0; i < 4; ++i) {
        mpq_class a(kBandNum[i], 100), z(kBandNum[i + 1], 100);
        bool overlap = hi_open ? (hi > a && lo < z) : (hi >= a && lo < z);
        f.band[i] = overlap;
    }
}

void bands_from_box(Facts& f, const Interval& mu) {
    mpfr_prec_t p = mu.prec();
    f.band_outside = !D(kBandLo[0], p).le(mu) || !mu.lt(D(kBandLo[4], p));
    for (int i = 0; i < 4; ++i) f.band[i] = !mu.lt(D(kBandLo[i], p)) && !D(kBandLo[i + 1], p).le(mu);
}

struct Acc {
    Interval v;
    std::string name;
};

Acc best_of(const std::vector<Acc>& xs) {
    Acc best = xs.front();
    for (const auto& x : xs)
        if (mpfr_greater_p(x.v.lo().get(), best.v.lo().get())) best = x;
    return best;
}

LowerN lower_core(const Interval& b, const Interval& c, const Facts& f, bool fallback) {
    mpfr_prec_t p = b.prec();
    LowerN out{I(0, p), "", false, {}};
    Interval cb = c / b, half = Q(mpq_class(1, 2), p), eighth = Q(mpq_class(1, 8), p);
    std::vector<Acc> regimes;

    if (f.b3.above) {  // c > b^3
        Interval v = min(b, eighth * sqrt(cb));
        out.subs.push_back({"prmarg", v});
        regimes.push_back({v, "prmarg"});
    }
    auto pr38 = [&]() {
        Interval a = half * sqrt(cb);
        Interval bp = half * sqrt(I(2, p) * cb);
        out.subs.push_back({"pr3.8a rho=+1", a});
        out.subs.push_back({"pr3.8b rho=-1 j>0", bp});
        Interval v = min(a, bp);
        if (f.k7.above) {
            // j = 0 forces c > 7164532 b^2
            std::vector<Interval> cases;
            if (f.b25.above && f.e50.above) {
                Interval x = pow(c, Q(mpq_class(2, 11), p));
                out.subs.push_back({"pr3.8b rho=-1 j=0 c>=max(b^2.5,1e50)", x});
                cases.push_back(x);
            }
            if (f.b25.below) {
                Interval x = D("0.214", p) * pow(cb, Q(mpq_class(1, 3), p));
                out.subs.push_back({"pr3.8b rho=-1 j=0 c<b^2.5", x});
                cases.push_back(x);
            }
            if (f.b25.above && f.e50.below) {
                out.subs.push_back({"pr3.8b rho=-1 j=0 uncovered", I(0, p)});
                cases.push_back(I(0, p));
            }
            for (const auto& x : cases) v = min(v, x);
        }
        out.subs.push_back({"pr3.8", v});
        return v;
    };
    if (f.b3.below && f.b2x4.above) {  // 4b^2 < c < b^3
        Interval v2 = eighth * c / (b * b);
        out.subs.push_back({"prmarg2", v2});
        std::vector<Acc> xs{{v2, "prmarg2"}, {pr38(), "pr3.8"}};
        regimes.push_back(best_of(xs));
    }
    if (f.b2x4.below) {  // c < 4b^2
        Interval v1 = D("0.707", p) * sqrt(cb);
        out.subs.push_back({"pr3.1", v1});
        std::vector<Acc> xs{{v1, "pr3.1"}, {pr38(), "pr3.8"}};
        Acc base = best_of(xs);
        bool any = false;
        Interval K = I(0, p);
        for (int i = 0; i < 4; ++i)
            if (f.band[i]) {
                K = any ? min(K, D(kBandK[i], p)) : D(kBandK[i], p);
                any = true;
            }
        if (any && !f.band_outside) {
            Interval v9 = sqrt(sqrt(K * b * b / c));
            out.subs.push_back({"pr3.9", v9});
            bool guard = mpfr_cmp_si(base.v.lo().get(), 1000) >= 0;
            if (guard || fallback) {
                if (!guard) out.fallback = true;
                xs.push_back({v9, "pr3.9"});
                base = best_of(xs);
            }
        }
        regimes.push_back(base);
    }
    if (regimes.empty()) throw InvariantBroken("no regime possible");
    Acc worst = regimes.front();
    for (const auto& r : regimes)
        if (mpfr_less_p(r.v.lo().get(), worst.v.lo().get())) worst = r;
    out.value = worst.v;
    out.method = worst.name;
    if (regimes.size() > 1) out.method += "*";  // box straddles a regime boundary
    return out;
}

}  // namespace

LowerN lower_n(const Interval& b, const Interval& c, bool fallback) {
    mpfr_prec_t p = b.prec();
    Facts f;
    f.b3 = tri_box(c, b * b * b);
    f.b2x4 = tri_box(c, I(4, p) * b * b);
    f.k7 = tri_box(c, I(7164532, p) * b * b);
    f.b25 = tri_box(c, b * b * sqrt(b));
    f.e50 = tri_box(c, pow(I(10, p), I(50, p)));
    // strict c > b^3 and c > 4b^2 on the "above" side; the box test is conservative
    bands_from_box(f, log(c) / log(b));
    return lower_core(b, c, f, fallback);
}

LowerN lower_n(const mpz_class& b, const mpz_class& c, mpfr_prec_t prec, bool fallback) {
    mpz_class b3 = b * b * b, b2x4 = 4 * b * b;
    if (c == b3 || c == b2x4) throw RegimeAmbiguous("c sits on a regime boundary (b^3 or 4b^2)");
    Facts f;
    f.b3 = {c < b3, c > b3};
    f.b2x4 = {c < b2x4, c > b2x4};
    f.k7 = {c <= 7164532 * b * b, c > 7164532 * b * b};
    f.b25 = tri_exact(cmp(c * c, zpow(b, 5)));
    f.e50 = tri_exact(cmp(c, zpow(10, 50)));
    // c >= b^{k/100}  <=>  c^100 >= b^k
    mpz_class c100 = zpow(c, 100);
    int idx = -1;
    for (int i = 0; i < 4; ++i)
        if (c100 >= zpow(b, kBandNum[i]) && c100 < zpow(b, kBandNum[i + 1])) idx = i;
    f.band_outside = idx < 0;
    if (idx >= 0) f.band[idx] = true;
    return lower_core(Z(b, prec), Z(c, prec), f, fallback);
}

// ---- Phi, A bounds, small helpers

PhiCheck phi_form_check(const mpz_class& f, const mpz_class& n, const mpz_class& m, int rho) {
    if (n <= 0) throw DomainViolation("phi_form_check needs n > 0");
    if (rho != 1 && rho != -1) throw DomainViolation("rho must be +1 or -1");
    mpz_class e = f * f - 1, Dl = f * f;
    PhiCheck pc;
    pc.X = 2 * n * n + rho * n;
    pc.Y = 2 * m * m - rho * Dl * n;
    mpz_class a = e * e + 2 * e + 5;
    pc.phi = a * pc.X * pc.X + 2 * (e - 1) * pc.X * pc.Y + pc.Y * pc.Y;
    pc.discriminant = (e - 1) * (e - 1) - a;
    if (pc.discriminant != -4 * f * f) throw InvariantBroken("Phi discriminant is not -4f^2");
    pc.positive = pc.phi > 0;
    return pc;
}

ABoundRecord a_bounds(const TripleParams& tp, mpfr_prec_t prec) {
    ABoundRecord rec{tp.b, tp.c, tp.A, I(0, prec), I(0, prec), false, {}};
    const mpz_class &b = tp.b, &c = tp.c, &A = tp.A;
    mpq_class lo = mpq_class(c - 5, 4 * b) + b;
    mpq_class hi = (mpq_class(c, b) + 4 * b) / mpq_class(3999, 1000);
    lo.canonicalize();
    hi.canonicalize();
    rec.A_lower = Q(lo, prec);
    rec.A_upper = Q(hi, prec);
    rec.inside = lo < A && A < hi;
    // The refined bounds lean on b > 10^13; below that they are vacuous.
    bool big = b > zpow(10, 13);
    mpz_class b3 = b * b * b;
    mpq_class ra = (mpq_class(c, 4 * b) + b) * (1 + mpq_class(1, b));
    rec.regimes.push_back({"letarA a) c<b^3", big && c < b3, A < ra});
    rec.regimes.push_back({"letarA b) c<4b^2", big && c < 4 * b * b, A < 2 * b});
    rec.regimes.push_back({"letarA c) c>b^3", big && c > b3, A < mpq_class(10000 * c, 39999 * b)});
    return rec;
}

Interval f_upper_from_master(const mpz_class& r, const mpz_class& s, mpfr_prec_t prec) {
    if (!(r >= 1 && s > r)) throw DomainViolation("f_upper_from_master needs s > r >= 1");
    return Q(mpq_class(s, 2 * r) + mpq_class(r, 2 * s), prec);
}

bool lecomp_holds(const mpz_class& r, const mpz_class& s, mpfr_prec_t p) {
    mpz_class b = r * r + 1, c = s * s + 1;
    Interval lhs = log(Z(s, p) + sqrt(Z(c, p))) / log(Z(r, p) + sqrt(Z(b, p)));
    Interval rhs = log(Z(c, p)) / log(Z(b, p));
    return lhs.lt(rhs);
}

mpz_class v_seq(const TripleParams& tp, long m) {
    if (m < 0) throw DomainViolation("v index must be >= 0");
    mpz_class a = tp.s, b = (2 * tp.c - 1) * tp.s;
    if (m == 0) return a;
    for (long i = 1; i < m; ++i) {
        mpz_class nx = (4 * tp.c - 2) * b - a;
        a = b;
        b = nx;
    }
    return b;
}

mpz_class w_seq(const TripleParams& tp, long n, int rho) {
    if (n < 0) throw DomainViolation("w index must be >= 0");
    mpz_class a = tp.s, b = (2 * tp.b * tp.c - 1) * tp.s + 2 * rho * tp.r * tp.t * tp.c;
    if (n == 0) return a;
    for (long i = 1; i < n; ++i) {
        mpz_class nx = (4 * tp.b * tp.c - 2) * b - a;
        a = b;
        b = nx;
    }
    return b;
}

std::pair<mpz_class, mpz_class> conga_sides(const TripleParams& tp, long m, long n, int rho) {
    if ((m - n) % 2 != 0) throw DomainViolation("conga_sides needs m = n (mod 2)");
    const mpz_class& c = tp.c;
    mpz_class d = v_seq(tp, m) - w_seq(tp, n, rho);
    if (d % c != 0) throw InvariantBroken("v_m - w_n not divisible by c");
    mpz_class lhs = tp.s * (d / c) * (m % 2 ? -1 : 1);
    mpz_class rhs = -(2 * (tp.b * n * n - mpz_class(m) * m) + rho * tp.A * n);
    auto red = [&](mpz_class x) {
        x %= c;
        if (x < 0) x += c;
        return x;
    };
    return {red(lhs), red(rhs)};
}

// ---- sweep

namespace {

struct RowEval {
    bool feasible = false;
    LowerN lower;
    mpz_class upper;
    bool refined = false;
};

Interval ten_pow(double x, mpfr_prec_t p) {
    mpq_class q(x);
    return exp(Q(q, p) * log(I(10, p)));
}

RowEval evaluate(double x, const mpq_class& mu_lo, const mpq_class& mu_hi, bool fallback, bool refine,
                 mpfr_prec_t p) {
    Interval b = ten_pow(x, p);
    Interval lb = log(b);
    Interval c_lo = exp(Q(mu_lo, p) * lb), c_hi = exp(Q(mu_hi, p) * lb);
    Interval c = Interval::hull(c_lo, c_hi);
    Facts f;
    f.b2x4 = tri_box(c, I(4, p) * b * b);
    f.k7 = tri_box(c, I(7164532, p) * b * b);
    f.b25 = {mu_lo < mpq_class(5, 2), mu_hi > mpq_class(5, 2)};
    f.e50 = tri_box(c, pow(I(10, p), I(50, p)));
    f.b3 = {mu_lo < 3, mu_hi > 3};
    bands_from_mu(f, mu_lo, mu_hi, true);
    RowEval ev{false, lower_core(b, c, f, fallback), 0, false};
    ev.upper = upper_n_aleksentsev(b, c_hi);
    if (refine) {
        try {
            mpz_class m = matveev_upper_n(b, c_hi, Q(mu_lo, p), Q(mu_hi, p), ev.upper);
            if (m < ev.upper) {
                ev.upper = m;
                ev.refined = true;
            }
        } catch (const DomainViolation&) {
        } catch (const SideConditionFailed&) {
        }
    }
    ev.feasible = mpfr_cmp_z(ev.lower.value.lo().get(), ev.upper.get_mpz_t()) <= 0;
    return ev;
}

// Between regime switches the lower bound grows like a power of b and the
// upper bound like log^2 b, so feasibility is a down-set on each piece. The
// switches (c against 7164532 b^2, 4 b^2 and 10^50) split the log10 b axis;
// they join a coarse grid so no feasible piece is skipped.
constexpr double kScanStep = 8;

std::vector<double> scan_grid(const mpq_class& mu_lo, const mpq_class& mu_hi, double x_lo, double x_hi) {
    std::vector<double> g{x_lo, x_hi};
    for (double x = x_hi - kScanStep; x > x_lo; x -= kScanStep) g.push_back(x);
    auto add = [&](double k, double gamma) {
        if (gamma <= 0) return;
        const double x = k / gamma;
        if (x > x_lo && x < x_hi) g.push_back(x);
    };
    for (const mpq_class& mu : {mu_lo, mu_hi}) {
        const double m = mu.get_d();
        add(std::log10(7164532.0), m - 2);
        add(std::log10(4.0), m - 2);
        add(50, m);
    }
    std::sort(g.begin(), g.end(), std::greater<>());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    return g;
}

BoundRow sweep_one(const mpq_class& mu_lo, const mpq_class& mu_hi, const SweepOptions& opt, mpfr_prec_t p) {
    BoundRow row;
    row.mu_lo = mu_lo;
    row.mu_hi = mu_hi;
    double best = opt.x_lo;
    RowEval at{};
    bool refine = false;
    // pass 0 uses the Aleksentsev corollary; each refine pass adds Matveev.
    // A refined upper bound is never larger, so later passes search below.
    double top = opt.x_hi;
    for (int pass = 0; pass <= opt.refine_passes; ++pass) {
        refine = pass > 0;
        auto feas = [&](double x) { return evaluate(x, mu_lo, mu_hi, opt.fallback_n7, refine, p).feasible; };
        // walk the grid down from the top, then bisect the segment that crosses
        const std::vector<double> grid = scan_grid(mu_lo, mu_hi, opt.x_lo, top);
        best = opt.x_lo;
        if (feas(grid.front())) {
            best = grid.front();
        } else {
            for (std::size_t k = 1; k < grid.size(); ++k) {
                if (!feas(grid[k])) continue;
                double lo = grid[k], hi = grid[k - 1];
                while (hi - lo > 1e-6) {
                    double mid = 0.5 * (lo + hi);
                    if (feas(mid))
                        lo = mid;
                    else
                        hi = mid;
                }
                best = hi;
                break;
            }
        }
        at = evaluate(best, mu_lo, mu_hi, opt.fallback_n7, refine, p);
        top = best;
        if (pass > 0 && !at.refined) break;
    }
    row.log10_b = best;
    row.log10_c = best * mu_hi.get_d();
    row.n_upper = at.upper;
    row.n_lower = at.lower.value.lo().to_double();
    row.method = at.lower.method;
    row.fallback = at.lower.fallback;
    row.refined = at.refined;
    return row;
}

}  // namespace

std::vector<BoundRow> sweep(const mpq_class& theta_lo, const mpq_class& theta_hi, const mpq_class& step,
                            const SweepOptions& opt) {
    if (theta_lo < mpq_class(116, 100) || theta_hi > mpq_class(41, 10) || theta_lo > theta_hi)
        throw DomainViolation("sweep needs 1.16 <= theta_lo <= theta_hi <= 4.1");
    if (step <= 0) throw DomainViolation("sweep step must be positive");
    std::vector<std::pair<mpq_class, mpq_class>> cells;
    for (mpq_class mu = theta_lo; mu < theta_hi; mu += step) cells.emplace_back(mu, std::min(mpq_class(mu + step), theta_hi));
    mpfr_prec_t p = opt.prec ? opt.prec : PrecisionContext::bounds().bits();
    std::vector<BoundRow> rows(cells.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i; (i = next++) < cells.size();) rows[i] = sweep_one(cells[i].first, cells[i].second, opt, p);
    };
    unsigned jobs = std::max(1u, opt.jobs);
    std::vector<std::thread> pool;
    for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    return rows;
}

std::vector<SweepRowSummary> aggregate_rows(const std::vector<BoundRow>& rows) {
    struct Def {
        const char* name;
        mpq_class lo, hi;
        double published;
    };
    const Def defs[] = {
        {"i", mpq_class(2), mpq_class(293, 100), std::log10(6.89e32)},
        {"ii", mpq_class(3, 2), mpq_class(2), std::log10(1.26e49)},
        {"iii", mpq_class(14, 10), mpq_class(3, 2), std::log10(2.07e62)},
        {"iv", mpq_class(13, 10), mpq_class(14, 10), std::log10(6.26e73)},
        {"v", mpq_class(1233, 1000), mpq_class(13, 10), 69.0},
    };
    std::vector<SweepRowSummary> out;
    for (const auto& d : defs) {
        SweepRowSummary s{d.name, d.lo, d.hi, -std::numeric_limits<double>::infinity(), d.published};
        bool any = false;
        for (const auto& r : rows)
            if (r.mu_hi > d.lo && r.mu_lo < d.hi) {
                s.log10_b = std::max(s.log10_b, r.log10_b);
                any = true;
            }
        if (any) out.push_back(s);
    }
    return out;
}

}  // namespace fc
