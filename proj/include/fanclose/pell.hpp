#pragma once

#include <gmpxx.h>

#include <optional>
#include <vector>

namespace fc {

struct PellUnit {
    mpz_class D, x1, y1;
};

// Minimal positive solution of x^2 - D y^2 = 1 via the periodic expansion of sqrt(D).
PellUnit fundamental_unit(const mpz_class& D);

struct FundamentalClass {
    mpz_class f, f1, w0, u0;
    int zeta = 1;

    mpz_class e() const { return f * f - 1; }
    bool in_box() const;
};

// Solutions of W^2 - (f^2-1) U^2 = f1^2 inside the reduced box.
std::vector<FundamentalClass> frattini_classes(const mpz_class& f, const mpz_class& f1);

struct PellPoint {
    mpz_class x, y;
    bool operator<(const PellPoint& o) const { return y != o.y ? y < o.y : x < o.x; }
    bool operator==(const PellPoint& o) const { return x == o.x && y == o.y; }
};

// base * unit^k for k = k_start, k_start+1, ...; emitted with |coordinates|.
class PellOrbit {
public:
    PellOrbit(const PellUnit& unit, mpz_class x0, mpz_class y0, unsigned k_start, mpz_class cap);
    static PellOrbit of_class(const FundamentalClass& cls, const PellUnit& unit, const mpz_class& cap);

    std::optional<PellPoint> next();
    unsigned k() const { return k_; }

private:
    PellUnit unit_;
    mpz_class x_, y_, cap_;
    unsigned k_;
};

std::vector<PellPoint> orbit_points(PellOrbit orbit);

// x^2 - (F^2+1) y^2 = F^2: the obvious solution (taken for |F|) and every
// exceptional one with 0 < y0 < |F|-1.
std::vector<PellPoint> base_solutions_eqDD(const mpz_class& F);

// Every solution of the sieve equation with x <= x_cap: orbits of the base
// solutions above plus the trivial (|F|, 0), both conjugate branches, sorted
// and deduplicated.
std::vector<PellPoint> sieve_equation_points(const mpz_class& F, const mpz_class& x_cap);

}  // namespace fc
