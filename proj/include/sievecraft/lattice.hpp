#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "sievecraft/poly.hpp"

namespace sievecraft::lattice {

using i64 = std::int64_t;
using u64 = std::uint64_t;

struct Point {
    i64 x = 0;
    i64 y = 0;
    bool operator==(const Point&) const = default;
};

// Finite-index subgroup of Z^2 with basis (d1, 0), (s, d2), 0 <= s < d1.
class Lattice2 {
public:
    Lattice2() = default;  // Z^2
    Lattice2(i64 d1, i64 s, i64 d2);

    // Hermite normal form of the subgroup generated by `gens`; throws DomainError for infinite index.
    static Lattice2 from_generators(const std::vector<Point>& gens);

    i64 d1() const { return d1_; }
    i64 s() const { return s_; }
    i64 d2() const { return d2_; }
    i64 index() const { return d1_ * d2_; }
    bool contains(i64 x, i64 y) const;
    // Not of the form l * L' with l > 1.
    bool is_primitive() const;

    bool operator==(const Lattice2&) const = default;

private:
    i64 d1_ = 1, s_ = 0, d2_ = 1;
};

enum class Axis {
    XEqRY,  // x = r y (mod m)
    YEqRX,  // y = r x (mod m)
};

Lattice2 from_congruence(i64 r, i64 m, Axis axis = Axis::XEqRY);

// Connected component of the plane minus lines through the origin: the half-open cone
// swept counterclockwise from ray `from` (included) to ray `to` (excluded), of angle in
// (0, pi]. A default-constructed sector is the whole plane.
class Sector {
public:
    Sector() = default;
    Sector(Point from, Point to);

    static Sector whole_plane() { return Sector(); }
    // Component of the plane minus the given lines that contains `inside` (not on any line).
    static Sector component(const std::vector<Point>& line_directions, Point inside);

    bool is_whole_plane() const { return whole_; }
    Point from() const { return from_; }
    Point to() const { return to_; }
    bool contains(i64 x, i64 y) const;
    // Area of the sector intersected with [-N, N]^2.
    double box_area(double N) const;

private:
    bool whole_ = true;
    Point from_{}, to_{};
};

// #{(x, y) in [-N, N]^2 within S and L : gcd(x, y) = 1}
u64 count_coprime(const Lattice2& L, i64 N, const Sector& S = Sector());

// Area(S within [-N, N]^2) / [Z^2 : L] * 6 / pi^2. L must be primitive.
double penult_estimate(const Lattice2& L, i64 N, const Sector& S = Sector());

// Same area term with the local factor at each p dividing the index replaced by the density of
// points of L outside p Z^2, 1 - 1/p, in place of 1 - 1/p^2. L must be primitive.
double coprime_estimate(const Lattice2& L, i64 N, const Sector& S = Sector());

// Minimum of max(|x|, |y|) over nonzero points of L.
i64 min_maxnorm(const Lattice2& L);

struct SolutionLattice {
    Lattice2 lattice;
    Axis axis;
    BigInt root;  // r in x = r y, or r' in y = r' x
};

// Lattices x = r y (mod p^n) for roots r of F(r, 1), then y = r' x (mod p^n) for roots r'
// of F(1, r') with p | r'. Their coprime parts partition the coprime pairs with p^n | F(x, y).
std::vector<SolutionLattice> solution_lattices(const BinForm& F, u64 p, unsigned n);

}  // namespace sievecraft::lattice
