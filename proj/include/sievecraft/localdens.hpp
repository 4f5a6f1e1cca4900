#pragma once

#include <cstdint>
#include <vector>

#include "sievecraft/poly.hpp"

namespace sievecraft::localdens {

using u64 = std::uint64_t;

inline constexpr unsigned kDefaultMaxExponent = 24;

// #{x mod p^k : p^k | P(x)} by lifting roots mod p. P must be square-free.
BigInt count_roots_mod_pk(const IntPoly& P, u64 p, unsigned k);

// #{x mod p^k : x = residue mod p^e, p^k | P(x)} for 1 <= e <= k.
BigInt count_roots_in_class(const IntPoly& P, u64 p, unsigned k, const BigInt& residue, unsigned e);

// Explicit roots mod p^k, ascending. Throws ResourceError when more than `cap` roots exist.
std::vector<BigInt> roots_mod_pk(const IntPoly& P, u64 p, unsigned k, std::size_t cap = 1u << 20);

// Root-count bound max(p^v deg P, p^(3v)) with v = v_p(Disc P).
BigInt root_count_bound(const IntPoly& P, u64 p);

struct LocalDensityTable {
    IntPoly poly;
    u64 prime;
    std::vector<BigInt> counts;  // counts[m] = #{x mod p^m : p^m | P(x)}, counts[0] = 1
};

LocalDensityTable local_density_table(const IntPoly& P, u64 p, unsigned max_exponent = kDefaultMaxExponent);

// #{(x, y) mod p^2 : p^2 | F(x, y)}
BigInt ell_form(const BinForm& F, u64 p);

// Same count restricted to pairs with p not dividing both coordinates.
BigInt coprime_count_form(const BinForm& F, u64 p);

// Haar measure of {x in Z_p : v_p(P(x)) = j}.
Rational valuation_measure(const IntPoly& P, u64 p, unsigned j);

// Haar measure of {x in Z_p : x = residue mod p, v_p(P(x)) = j}.
Rational valuation_measure_in_class(const IntPoly& P, u64 p, unsigned j, u64 residue);

// Haar measure of {x in Z_p : x = residue mod p^e, p^j | P(x)}.
Rational divisibility_measure_in_class(const IntPoly& P, u64 p, unsigned j, const BigInt& residue, unsigned e);

BigInt prime_power(u64 p, unsigned k);

// Variants without the square-free and primality checks, for callers that already
// validated their input once and loop over many primes.
BigInt count_roots_trusted(const IntPoly& P, u64 p, unsigned k);
BigInt count_in_class_trusted(const IntPoly& P, u64 p, unsigned k, const BigInt& residue, unsigned e);
std::vector<BigInt> roots_mod_pk_trusted(const IntPoly& P, u64 p, unsigned k, std::size_t cap = 1u << 20);

}  // namespace sievecraft::localdens
