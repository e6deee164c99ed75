#include "fanclose/triple.hpp"

#include "fanclose/errors.hpp"
#include "fanclose/numerics.hpp"

namespace fc {

static void need(bool ok, const char* what) {
    if (!ok) throw InvariantBroken(what);
}

void TripleParams::check() const {
    need(b == r * r + 1 && c == s * s + 1, "b = r^2+1, c = s^2+1");
    need(1 < b && b < c, "1 < b < c");
    need(b * c - 1 == t * t, "bc - 1 = t^2");
    need(t == r * s + f && f >= 1, "t = rs + f, f >= 1");
    need(master_equation(r, s, f), "r^2 + s^2 = 2frs + f^2");
    need(A == (2 * b - 1) * c - 2 * r * s * t && A == f * f + b, "A = (2b-1)c - 2rst = f^2 + b");
    need(F == s - 2 * r * f && s * F == f * f - r * r, "F = s - 2rf, sF = f^2 - r^2");
}

bool master_equation(const mpz_class& r, const mpz_class& s, const mpz_class& f) {
    return r * r + s * s == 2 * f * r * s + f * f;
}

TripleParams build_triple(const mpz_class& r, const mpz_class& s) {
    if (r < 1 || s <= r) throw DomainViolation("need 1 <= r < s");
    TripleParams tp;
    tp.r = r;
    tp.s = s;
    tp.b = r * r + 1;
    tp.c = s * s + 1;
    if (!is_square(tp.b * tp.c - 1, &tp.t))
        throw NotATriple("(" + r.get_str() + "^2+1)(" + s.get_str() + "^2+1)-1 is not a square");
    tp.f = tp.t - r * s;
    tp.A = (2 * tp.b - 1) * tp.c - 2 * r * s * tp.t;
    tp.F = s - 2 * r * tp.f;
    tp.check();
    return tp;
}

bool is_triple(const mpz_class& r, const mpz_class& s) {
    return r >= 1 && s > r && is_square((r * r + 1) * (s * s + 1) - 1);
}

FClassification classify_F(const TripleParams& tp) {
    const mpz_class &r = tp.r, &s = tp.s, &f = tp.f, &F = tp.F;
    FClassification k;
    k.sign = sgn(F);
    k.s_eq_2rf = s == 2 * r * f;
    k.f_eq_r = f == r;
    k.s_eq_2r2 = s == 2 * r * r;
    k.s_eq_2f2 = s == 2 * f * f;
    k.f_gt_r = f > r;
    k.f_lt_r = f < r;
    k.s_gt_2rf = s > 2 * r * f;
    k.s_gt_2r2 = s > 2 * r * r;
    k.s_lt_2f2 = s < 2 * f * f;
    k.c_lt_4b2 = tp.c < 4 * tp.b * tp.b;

    bool a = k.sign == 0;
    bool chain_a = a == k.s_eq_2rf && a == k.f_eq_r && a == k.s_eq_2r2 && a == k.s_eq_2f2;
    bool p = k.sign > 0;
    bool chain_b = p == k.s_gt_2rf && p == k.f_gt_r && p == k.s_gt_2r2 && p == k.s_lt_2f2;
    bool n = k.sign < 0;
    bool chain_c = n == (s < 2 * r * f) && n == k.f_lt_r && n == (s < 2 * r * r) && n == (s > 2 * f * f);
    k.chains_ok = chain_a && chain_b && chain_c;

    if (k.f_gt_r)
        k.gap_ok = f > 2 * r * F && 2 * r * F >= 2 * r;
    else if (k.f_lt_r)
        k.gap_ok = 0 > F && F > -2 * f * r;
    else
        k.gap_ok = true;

    k.le4d_applies = k.sign != 0;
    k.le4d_ok = k.f_lt_r == k.c_lt_4b2;
    k.consistent = k.chains_ok && k.gap_ok && (!k.le4d_applies || k.le4d_ok);
    return k;
}

std::vector<mpz_class> p_sequence(const mpz_class& f, long N) {
    std::vector<mpz_class> P{0, 1};
    for (long i = 0; i < N; ++i) P.push_back(2 * f * P.back() - P[P.size() - 2]);
    return P;
}

FSequence f_sequence(const TripleParams& tp, long N, long max_N) {
    if (N < 0 || N > max_N) throw DomainViolation("f_sequence length out of range");
    FSequence q;
    q.f = tp.f;
    q.F = {-tp.s, -tp.r};
    for (long i = 0; i < N; ++i) q.F.push_back(2 * tp.f * q.F.back() - q.F[q.F.size() - 2]);
    q.P = p_sequence(tp.f, N);

    const mpz_class f2 = tp.f * tp.f;
    for (long i = -1; i < N; ++i) {
        const mpz_class &a = q.Fi(i), &b = q.Fi(i + 1);
        need(a * a - 2 * tp.f * a * b + b * b == f2, "F_i^2 - 2fF_iF_{i+1} + F_{i+1}^2 = f^2");
    }
    for (long i = 0; i <= N; ++i)
        need(q.Fi(i) == q.Pi(i - 1) * tp.s - q.Pi(i) * tp.r, "F_i = P_{i-1}s - P_i r");
    for (long i = 1; i <= N; ++i)
        need(q.Pi(i - 1) * q.Pi(i - 1) - q.Pi(i - 2) * q.Pi(i) == 1, "P_{i-1}^2 - P_{i-2}P_i = 1");
    for (long i = 0; i < N; ++i)
        need(q.Fi(i) * q.Fi(i) - q.Fi(i - 1) * q.Fi(i + 1) == f2, "F_i^2 = F_{i-1}F_{i+1} + f^2");
    for (long i = 1; i <= N; ++i)
        if (q.Fi(i) == 0) need(tp.r == q.Pi(i - 1) * tp.f && tp.s == q.Pi(i) * tp.f, "F_i = 0 => r = P_{i-1}f, s = P_i f");
    return q;
}

}  // namespace fc
