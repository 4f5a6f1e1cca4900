#pragma once

#include <cstdint>
#include <vector>

#include "sievecraft/poly.hpp"

// Dense polynomials over F_p for a 64-bit prime p, low degree first.
namespace sievecraft::fp {

using u64 = std::uint64_t;
using Poly = std::vector<u64>;

Poly reduce(const IntPoly& p, u64 prime);
int degree(const Poly& f);  // -1 for the zero polynomial

Poly mul_mod(const Poly& a, const Poly& b, const Poly& modulus, u64 p);
Poly rem(const Poly& a, const Poly& b, u64 p);
Poly quot(const Poly& a, const Poly& b, u64 p);
Poly gcd(Poly a, Poly b, u64 p);  // monic
Poly derivative(const Poly& f, u64 p);
Poly monic(const Poly& f, u64 p);
// base^e mod modulus
Poly pow_mod(const Poly& base, u64 e, const Poly& modulus, u64 p);

u64 eval(const Poly& f, u64 x, u64 p);

// Distinct roots in [0, p), ascending. The zero polynomial is rejected.
std::vector<u64> roots(const Poly& f, u64 p);

// Degrees of the irreducible factors of a square-free polynomial of degree >= 1,
// ascending, with multiplicity.
std::vector<unsigned> factor_degrees(const Poly& f, u64 p);

// Degrees of the distinct irreducible factors of any nonzero polynomial.
std::vector<unsigned> distinct_factor_degrees(const Poly& f, u64 p);

}  // namespace sievecraft::fp
