#include "fanclose/pell.hpp"

#include <algorithm>
#include <set>

#include "fanclose/errors.hpp"
#include "fanclose/numerics.hpp"

namespace fc {

PellUnit fundamental_unit(const mpz_class& D) {
    if (D < 2 || is_square(D)) throw InvalidD("D must be a nonsquare >= 2, got " + D.get_str());
    const mpz_class a0 = isqrt(D);
    mpz_class m = 0, d = 1, a = a0;
    mpz_class p0 = 1, q0 = 0, p1 = a0, q1 = 1;
    while (p1 * p1 - D * q1 * q1 != 1) {
        m = d * a - m;
        d = (D - m * m) / d;
        a = (a0 + m) / d;
        mpz_class p2 = a * p1 + p0, q2 = a * q1 + q0;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
    }
    return {D, p1, q1};
}

bool FundamentalClass::in_box() const {
    if (w0 * w0 - e() * u0 * u0 != f1 * f1) return false;
    if (u0 < 0 || w0 < f1) return false;
    if (2 * w0 * w0 > f1 * f1 * (f + 1)) return false;
    return 2 * (f + 1) * u0 * u0 <= f1 * f1;
}

std::vector<FundamentalClass> frattini_classes(const mpz_class& f, const mpz_class& f1) {
    std::vector<FundamentalClass> out;
    if (f < 2 || f1 < 1) return out;
    const mpz_class e = f * f - 1;
    for (mpz_class u0 = 0; 2 * (f + 1) * u0 * u0 <= f1 * f1; ++u0) {
        mpz_class w0;
        if (!is_square(f1 * f1 + e * u0 * u0, &w0)) continue;
        FundamentalClass c{f, f1, w0, u0, 1};
        if (!c.in_box()) continue;
        out.push_back(c);
        if (u0 > 0) {
            c.zeta = -1;
            out.push_back(c);
        }
    }
    return out;
}

PellOrbit::PellOrbit(const PellUnit& unit, mpz_class x0, mpz_class y0, unsigned k_start, mpz_class cap)
    : unit_(unit), x_(std::move(x0)), y_(std::move(y0)), cap_(std::move(cap)), k_(0) {
    while (k_ < k_start) {
        mpz_class x = x_ * unit_.x1 + unit_.D * y_ * unit_.y1;
        mpz_class y = x_ * unit_.y1 + y_ * unit_.x1;
        x_ = x;
        y_ = y;
        ++k_;
    }
}

PellOrbit PellOrbit::of_class(const FundamentalClass& cls, const PellUnit& unit, const mpz_class& cap) {
    return PellOrbit(unit, cls.w0, cls.zeta * cls.u0, cls.zeta < 0 ? 1u : 0u, cap);
}

std::optional<PellPoint> PellOrbit::next() {
    mpz_class ax = abs(x_);
    if (ax > cap_) return std::nullopt;
    PellPoint p{ax, abs(y_)};
    mpz_class x = x_ * unit_.x1 + unit_.D * y_ * unit_.y1;
    mpz_class y = x_ * unit_.y1 + y_ * unit_.x1;
    x_ = x;
    y_ = y;
    ++k_;
    return p;
}

std::vector<PellPoint> orbit_points(PellOrbit orbit) {
    std::vector<PellPoint> out;
    while (auto p = orbit.next()) out.push_back(*p);
    return out;
}

std::vector<PellPoint> base_solutions_eqDD(const mpz_class& F) {
    const mpz_class a = abs(F);
    if (a < 2) throw DomainViolation("base solutions need |F| >= 2");
    const mpz_class D = a * a + 1, N = a * a;
    std::vector<PellPoint> out;
    out.push_back({a * a - a + 1, a - 1});
    for (mpz_class y0 = 1; y0 < a - 1; ++y0) {
        mpz_class x0;
        if (is_square(N + D * y0 * y0, &x0)) out.push_back({x0, y0});
    }
    return out;
}

std::vector<PellPoint> sieve_equation_points(const mpz_class& F, const mpz_class& x_cap) {
    const mpz_class a = abs(F);
    PellUnit unit{a * a + 1, 2 * a * a + 1, 2 * a};
    std::vector<PellPoint> bases = base_solutions_eqDD(F);
    bases.push_back({a, 0});
    std::set<PellPoint> seen;
    for (const auto& b : bases) {
        for (auto& p : orbit_points(PellOrbit(unit, b.x, b.y, 0, x_cap))) seen.insert(p);
        if (b.y > 0)
            for (auto& p : orbit_points(PellOrbit(unit, b.x, -b.y, 1, x_cap))) seen.insert(p);
    }
    return {seen.begin(), seen.end()};
}

}  // namespace fc
