#include <doctest.h>

#include <cmath>

#include "fanclose/bounds.hpp"
#include "fanclose/family.hpp"
#include "oracles.hpp"

using namespace fc;

namespace {

const mpfr_prec_t P = PrecisionContext{80}.bits();

mpz_class pow10(unsigned long e) {
    mpz_class r;
    mpz_ui_pow_ui(r.get_mpz_t(), 10, e);
    return r;
}

// Largest n with n < rhs(n), by bisection in long double.
long double aleks_oracle(long double b, long double c) {
    auto rhs = [&](long double n) {
        return 1.5002e11L * std::log(4 * b) * std::log(4 * c) *
               std::log(4 * n * std::log(b * c) / (std::log(b) * std::log(4 * b)));
    };
    long double lo = 250, hi = 1e30L;
    for (int i = 0; i < 300; ++i) {
        long double mid = std::sqrt(lo * hi);
        if (hi - lo < 0.5L) break;
        if (mid < rhs(mid))
            lo = mid;
        else
            hi = mid;
        if (hi / lo < 1 + 1e-17L) {
            for (int j = 0; j < 200 && hi - lo > 0.5L; ++j) {
                long double m2 = 0.5L * (lo + hi);
                if (m2 < rhs(m2))
                    lo = m2;
                else
                    hi = m2;
            }
            break;
        }
    }
    return hi;
}

// Straightforward second transcription of the Matveev chain.
long double matveev_oracle(long double b, long double c, long double Del, long double n0) {
    const long double e = std::exp(1.0L);
    long double r = std::sqrt(b - 1), s = std::sqrt(c - 1);
    long double A1 = std::log(s + std::sqrt(c)) / 2, lb2 = std::log(r + std::sqrt(b)), A2 = lb2 / 2;
    long double A3 = std::log(s * std::sqrt(b));
    long double E = (4 + 1e-15L) / 12, C3 = 3;
    long double C1 = (1 + std::exp(-6.0L) / 148) * (3 * std::log(2.0L) + 2) * 4 / (3 * C3);
    long double C2 = 16 * (6 + 5 / (3 * std::log(2.0L) + 2)) * std::exp(6.0L) / (std::sqrt(3.0L) * C3);
    long double om = A1 * A2 * A3 * std::pow(4 * C1 / e, 3) * C3 * std::exp(C3) * E * e / 2;
    long double T = 96 * E * e * C1 * C1 * C2 * A1 * A2;
    long double C0 = std::log(T) + std::log(std::log(T)) + std::log(std::log(std::log(T))) +
                     2 * std::log(std::log(std::log(std::log(T))));
    auto rhs = [&](long double n) {
        long double S =
            1 + std::log(1 + ((Del + 1) * (1 / (2 * C0 * C2 * om) + 1 / (6 * C1 * A3)) * n + 1 / (6 * C1 * lb2)) *
                                 (1 + lb2));
        return 17472 * C0 * C1 * C1 * C1 * C2 * S * e * std::log(4 * b) * std::log(4 * c);
    };
    long double n = n0;
    for (int i = 0; i < 500; ++i) n = rhs(n);
    return n;
}

}  // namespace

TEST_CASE("aleksentsev constant agrees at doubled precision") {
    Interval a = aleksentsev_constant(P), b = aleksentsev_constant(2 * P);
    CHECK(a.contains(b));
    CHECK(a.neg());
    double direct = -5.3 * std::pow(3.0, -2.5) * 256 * 121 * 8 * std::pow(31.44, 3) * 16 * std::log(36.0);
    CHECK(std::abs(a.mid() / direct - 1) < 1e-12);
}

TEST_CASE("aleksentsev bound on a proxy pair: sign, monotone in l, precision stable") {
    // b = r^2+1 ~ 10^13, c = s^2+1 ~ 10^26
    mpz_class r = 3162278, s = pow10(13);
    auto ctx = linear_form_context(r, s, P);
    auto ctx2 = linear_form_context(r, s, 2 * P);
    mpz_class m = 1000000000, l = pow10(10);
    Interval v = aleksentsev_bound(ctx, m, l);
    CHECK(v.neg());
    CHECK(v.contains(aleksentsev_bound(ctx2, m, l)));
    Interval w = aleksentsev_bound(ctx, m, 2 * l);
    CHECK(w.lt(v));
    // E = 2l/log beta in this range
    Interval E = aleksentsev_E(m, l, ctx.B1, ctx.B2, ctx.B3);
    CHECK(E.overlaps(Interval::of(mpz_class(2 * l), P) / ctx.log_beta));
    CHECK_THROWS_AS(aleksentsev_bound(ctx, m, 249), PreconditionTooSmall);
}

TEST_CASE("aleksentsev E clamps at 3 and the bound scales with B3") {
    Interval big = Interval::of(1000L, P);
    Interval E = aleksentsev_E(1, 250, big, big, big);
    CHECK(E.contains(mpz_class(3)));
    CHECK(E.width() == 0);
    Interval x = aleksentsev_from(E, big, big, big);
    Interval y = aleksentsev_from(E, big, big, big + big);
    CHECK((y / x).contains(mpz_class(2)));
    CHECK((y / x).width() < 1e-60);
}

TEST_CASE("heights of the linear form") {
    auto k = linear_form_context(1, 12, P);
    // B3 = 4 log(s sqrt b) dominates D h(beta3) = 2 log(s^2 b / gcd)
    CHECK(k.h3_num <= k.s * k.s * k.b);
    CHECK_FALSE(k.B3.lt(Interval::of(4L, P) * k.h3));
    CHECK(k.B1.overlaps(Interval::of(4L, P) * k.A1));
    CHECK(k.beta3.pos());
    CHECK(Interval::of(1L, P).lt(k.beta3));
    CHECK_THROWS_AS(linear_form_context(5, 5, P), DomainViolation);
}

TEST_CASE("upper_n_aleksentsev matches a bisection oracle") {
    mpz_class b = pow10(13), c = pow10(26);
    mpz_class N = upper_n_aleksentsev(b, c, P);
    long double o = aleks_oracle(1e13L, 1e26L);
    CHECK(std::abs(N.get_d() - (double)o) <= 2.0);
    // the returned N satisfies the displayed inequality with slack < 1
    Interval rhs = aleksentsev_rhs(Interval::of(b, P), Interval::of(c, P), Interval::of(N, P));
    CHECK(rhs.le(Interval::of(N, P)));
    Interval rhs1 = aleksentsev_rhs(Interval::of(b, P), Interval::of(c, P), Interval::of(mpz_class(N - 1), P));
    CHECK(Interval::of(mpz_class(N - 2), P).lt(rhs1));
}

TEST_CASE("upper_n_aleksentsev is monotone on a grid and below 10^19 on the prior region") {
    mpz_class prev_row = 0;
    for (unsigned eb = 13; eb <= 60; eb += 7) {
        mpz_class prev = 0;
        for (unsigned ec = eb + 1; ec <= 148; ec += 9) {
            mpz_class N = upper_n_aleksentsev(pow10(eb), pow10(ec), P);
            CHECK(N >= prev);
            prev = N;
        }
        mpz_class N0 = upper_n_aleksentsev(pow10(eb), pow10(148), P);
        CHECK(N0 >= prev_row);
        prev_row = N0;
    }
    // corners: c at the cap, b at the cap's lowest admissible exponent
    struct Corner {
        double lo_exp;
        unsigned cap;
    };
    for (auto k : {Corner{5, 100}, Corner{4, 82}, Corner{3.5, 66}, Corner{3, 57}, Corner{2, 111}, Corner{1.5, 109},
                   Corner{1.4, 128}, Corner{1.3, 148}, Corner{1.2, 133}, Corner{1.16, 107}}) {
        unsigned eb = static_cast<unsigned>(std::ceil(k.cap / k.lo_exp));
        CHECK(upper_n_aleksentsev(pow10(eb), pow10(k.cap), P) < pow10(19));
    }
}

TEST_CASE("matveev constants and the fixed point") {
    Interval b = Interval::of(pow10(30), P), c = Interval::of(pow10(60), P);
    Interval n = Interval::of(pow10(15), P);
    auto k = matveev_constants(b, c, Interval::parse("2.1", P), n);
    CHECK(k.E.contains(mpq_class(mpz_class("4000000000000001"), mpz_class("12000000000000000"))));
    CHECK(k.E.width() < 1e-70);
    CHECK(k.C3.contains(mpz_class(3)));
    CHECK(k.C3star.contains(mpq_class(14, 5)));
    CHECK(k.E1.contains(mpq_class(33653, 1000000)));
    // C0 >= log(C0 T)
    CHECK(log(k.C0 * k.T).le(k.C0));

    mpz_class seed = upper_n_aleksentsev(b, c);
    mpz_class N = matveev_upper_n(b, c, Interval::parse("1.9", P), Interval::parse("2.1", P), seed);
    long double o = matveev_oracle(1e30L, 1e60L, 2.1L, seed.get_d());
    CHECK(std::abs(N.get_d() / (double)o - 1) < 1e-6);
    CHECK(N < seed);

    CHECK_THROWS_AS(matveev_upper_n(b, c, Interval::parse("1.1", P), Interval::parse("2.1", P), seed),
                    DomainViolation);
    // c = b^2 is outside b^2.5..b^3
    CHECK_THROWS_AS(matveev_upper_n(b, c, Interval::parse("2.5", P), Interval::parse("3", P), seed), DomainViolation);
}

TEST_CASE("matveev and aleksentsev bounds are monotone in c") {
    Interval b = Interval::of(pow10(40), P);
    mpz_class prevA = 0, prevM = 0;
    for (unsigned ec = 60; ec <= 80; ec += 4) {
        Interval c = Interval::of(pow10(ec), P);
        mpz_class A = upper_n_aleksentsev(b, c);
        mpz_class M = matveev_upper_n(b, c, Interval::parse("1.4", P), Interval::parse("2.1", P), A);
        CHECK(A >= prevA);
        CHECK(M >= prevM);
        prevA = A;
        prevM = M;
    }
}

TEST_CASE("lower_n examples") {
    SUBCASE("c > b^3 uses prmarg") {
        auto L = lower_n(pow10(13), pow10(40), P);
        CHECK(L.method == "prmarg");
        CHECK(std::abs(L.value.mid() / (0.125 * std::sqrt(1e27)) - 1) < 1e-12);
        CHECK(L.value.mid() > 3.95e12);
    }
    SUBCASE("4b^2 < c < b^3 reports prmarg2 and the pr3.8 cases") {
        auto L = lower_n(pow10(13), pow10(28), P);
        bool saw = false;
        for (auto& s : L.subs)
            if (s.name == "prmarg2") {
                saw = true;
                CHECK(std::abs(s.value.mid() - 12.5) < 1e-9);
            }
        CHECK(saw);
        // pr3.8 a) 0.5 sqrt(c/b) beats prmarg2 here
        CHECK(L.method == "pr3.8");
        CHECK(std::abs(L.value.mid() / (0.5 * std::sqrt(1e15)) - 1) < 1e-12);
    }
    SUBCASE("c = b^1.35 uses pr3.9 case i") {
        // b = 10^20, c = 10^27 = b^1.35
        auto L = lower_n(pow10(20), pow10(27), P);
        double want = std::pow(15.927 * 1e40 / 1e27, 0.25);
        bool saw = false;
        for (auto& s : L.subs)
            if (s.name == "pr3.9") {
                saw = true;
                CHECK(std::abs(s.value.mid() / want - 1) < 1e-9);
            }
        CHECK(saw);
        CHECK(L.value.mid() >= want * (1 - 1e-12));
    }
    SUBCASE("regime boundaries are refused") {
        mpz_class b = pow10(13);
        CHECK_THROWS_AS(lower_n(b, b * b * b, P), RegimeAmbiguous);
        CHECK_THROWS_AS(lower_n(b, 4 * b * b, P), RegimeAmbiguous);
    }
    SUBCASE("pr3.8 j = 0 branches") {
        mpz_class b = pow10(30);
        // c = 10^80 >= max(b^2.5, 10^50)
        auto L = lower_n(b, pow10(80), P);
        bool saw = false;
        for (auto& s : L.subs) saw = saw || s.name == "pr3.8b rho=-1 j=0 c>=max(b^2.5,1e50)";
        CHECK(saw);
        // c = 10^70 < b^2.5 and > 7164532 b^2
        auto L2 = lower_n(b, pow10(70), P);
        saw = false;
        for (auto& s : L2.subs) saw = saw || s.name == "pr3.8b rho=-1 j=0 c<b^2.5";
        CHECK(saw);
    }
    SUBCASE("box and exact variants agree on interior points") {
        mpz_class b = pow10(25), c = pow10(58);
        auto a = lower_n(b, c, P);
        auto x = lower_n(Interval::of(b, P), Interval::of(c, P));
        CHECK(a.method == x.method);
        CHECK(a.value.overlaps(x.value));
    }
}

TEST_CASE("phi form: discriminant identity and positivity") {
    for (long f = 2; f <= 100; ++f) {
        auto pc = phi_form_check(f, 1, 1, 1);
        CHECK(pc.discriminant == -4 * f * f);
        for (long n = 1; n <= 6; ++n)
            for (long m = 0; m <= 8; ++m)
                for (int rho : {1, -1}) CHECK(phi_form_check(f, n, m, rho).positive);
    }
    auto pc = phi_form_check(2, 1, 1, 1);
    CHECK(pc.X == 3);
    CHECK(pc.Y == -2);
    CHECK(pc.phi == 160);
    CHECK_THROWS_AS(phi_form_check(2, 0, 1, 1), DomainViolation);
}

TEST_CASE("A bounds: vacuous for small b, strict inside for large family triples") {
    std::size_t small = 0, small_inside = 0;
    for (const auto& t : oracle::triple_scan(2000)) {
        auto tp = build_triple(t.r, t.s);
        auto rec = a_bounds(tp, P);
        ++small;
        small_inside += rec.inside;
        for (auto& g : rec.regimes) CHECK_FALSE(g.applies);
        CHECK(tp.A == tp.f * tp.f + tp.b);
    }
    MESSAGE("small triples: " << small << ", inside the generic bound: " << small_inside);
    std::size_t big = 0, applied = 0;
    for (long f = 2; f <= 40; ++f)
        for (const auto& [r, s] : family_points(f, pow10(30))) {
            auto tp = build_triple(r, s);
            if (tp.b <= pow10(13)) continue;
            auto rec = a_bounds(tp, P);
            ++big;
            CHECK(rec.inside);
            for (auto& g : rec.regimes)
                if (g.applies) {
                    ++applied;
                    CHECK_MESSAGE(g.holds, g.name << " at r=" << r << " s=" << s);
                }
        }
    CHECK(big > 100);
    CHECK(applied > 100);
}

TEST_CASE("f_upper_from_master") {
    Interval u = f_upper_from_master(1, 12, P);
    CHECK(u.contains(mpq_class(145, 24)));
    CHECK(Interval::of(5L, P).lt(u));
    CHECK(f_upper_from_master(2, 8, P).contains(mpq_class(17, 8)));
    for (const auto& t : oracle::triple_scan(3000)) {
        auto tp = build_triple(t.r, t.s);
        Interval v = f_upper_from_master(tp.r, tp.s, P);
        CHECK(Interval::of(tp.f, P).le(v));
        CHECK(Interval::of(mpq_class(tp.s, 2 * tp.r), P).lt(v));
    }
    CHECK_THROWS_AS(f_upper_from_master(3, 3, P), DomainViolation);
}

TEST_CASE("lecomp over generated triples") {
    std::size_t n = 0;
    for (const auto& t : oracle::triple_scan(3000)) {
        CHECK(lecomp_holds(t.r, t.s, P));
        ++n;
    }
    for (long f = 2; f <= 60 && n < 1000; ++f)
        for (const auto& [r, s] : family_points(f, pow10(40))) {
            CHECK(lecomp_holds(r, s, P));
            ++n;
        }
    CHECK(n >= 1000);
}

TEST_CASE("congruence on A from the Pell system") {
    // Direct search: the only common value of v and w below the cap is z = s.
    for (const auto& t : oracle::triple_scan(60)) {
        auto tp = build_triple(t.r, t.s);
        for (int rho : {1, -1}) {
            for (long m = 0; m <= 12; ++m)
                for (long n = m % 2; n <= 12; n += 2) {
                    auto [l, r] = conga_sides(tp, m, n, rho);
                    CHECK(l == r);
                    if (v_seq(tp, m) == w_seq(tp, n, rho)) {
                        CHECK(l == 0);
                        CHECK(m == 0);
                        CHECK(n == 0);
                    }
                }
        }
    }
    auto tp = build_triple(1, 12);
    CHECK(v_seq(tp, 1) == (2 * tp.c - 1) * tp.s);
    CHECK_THROWS_AS(conga_sides(tp, 1, 2, 1), DomainViolation);
}

TEST_CASE("sweep: degenerate and single-cell behaviour") {
    CHECK(sweep(mpq_class(2), mpq_class(2), mpq_class(1, 100)).empty());
    SweepOptions opt;
    auto rows = sweep(mpq_class(205, 100), mpq_class(206, 100), mpq_class(1, 100), opt);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].mu_hi - rows[0].mu_lo == mpq_class(1, 100));
    CHECK(rows[0].log10_b > 13);
    CHECK(rows[0].log10_b < 400);
    // the refined row never exceeds the unrefined one
    SweepOptions raw;
    raw.refine_passes = 0;
    auto rows0 = sweep(mpq_class(205, 100), mpq_class(206, 100), mpq_class(1, 100), raw);
    CHECK(rows[0].log10_b <= rows0[0].log10_b + 1e-9);
    CHECK_THROWS_AS(sweep(mpq_class(1), mpq_class(2), mpq_class(1, 100)), DomainViolation);
    auto agg = aggregate_rows(rows);
    REQUIRE(agg.size() == 1);
    CHECK(agg[0].row == "i");
}

TEST_CASE("sweep finds the largest feasible b even when the feasible set is split") {
    // For mu just above 2.13, c > 7164532 b^2 lets j = 0 in and weakens the
    // lower bound, which reopens a window of feasible b above a gap.
    for (long k = 213; k <= 218; ++k) {
        const mpq_class lo(k, 100), hi(k + 1, 100);
        auto row = sweep(lo, hi, mpq_class(1, 100)).at(0);
        double top_feasible = 0;
        for (double x = 13; x <= 100; x += 0.25) {
            Interval b = exp(Interval::of(mpq_class(x), P) * log(Interval::of(10L, P)));
            Interval c_lo = exp(Interval::of(lo, P) * log(b)), c_hi = exp(Interval::of(hi, P) * log(b));
            mpz_class up = upper_n_aleksentsev(b, c_hi);
            try {
                up = std::min(up, matveev_upper_n(b, c_hi, Interval::of(lo, P), Interval::of(hi, P), up));
            } catch (const Error&) {
            }
            auto low = lower_n(b, Interval::hull(c_lo, c_hi));
            if (mpfr_cmp_z(low.value.lo().get(), up.get_mpz_t()) <= 0) top_feasible = x;
        }
        CHECK_MESSAGE(top_feasible <= row.log10_b + 1e-6, "mu " << k << "/100: feasible at " << top_feasible
                                                               << " above reported " << row.log10_b);
        if (k >= 214) CHECK(row.log10_b > 40);  // 2.13 has its threshold past the crossing
    }
}
