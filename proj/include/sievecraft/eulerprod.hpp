#pragma once

#include <cstdint>
#include <vector>

#include "sievecraft/poly.hpp"

namespace sievecraft::eulerprod {

using u64 = std::uint64_t;

struct LocalFactor {
    u64 prime;
    BigInt count;  // l(p^m) for polynomials, l_2(p^2) for forms
};

// Interval for an infinite Euler product: the exact product over p <= B times a
// rigorous lower bound for the tail over p > B.
struct EulerEstimate {
    u64 bound = 0;        // B
    unsigned power = 2;   // m; forms always use m = 2 over pairs mod p^2
    Rational truncated;   // prod over p <= B, exact
    Rational tail_lower;  // lower bound for prod over p > B
    double lower = 0.0;   // truncated * tail_lower, rounded down
    double upper = 0.0;   // truncated, rounded up
    bool zero_density = false;  // some local factor vanishes
    u64 obstruction_prime = 0;  // a prime with vanishing factor, when zero_density is set
    // B does not exceed the product of |Disc| and the content, so some tail primes
    // need not satisfy the generic bound; those found by factoring are included exactly.
    bool widened = false;
    std::vector<LocalFactor> factors;  // one entry per p <= B, ascending

    double midpoint() const { return 0.5 * (lower + upper); }
};

EulerEstimate density_univ(const IntPoly& P, u64 B, unsigned m = 2);

// Factors (1 - l_2(p^2)/p^4), or with `coprime_pairs` the count of pairs with
// p^2 | F or p dividing both coordinates.
EulerEstimate density_form(const BinForm& F, u64 B, bool coprime_pairs = false);

// Upper bound for sum_{p > B} p^(-m), from n = +-1 mod 6 and an integral comparison.
Rational prime_tail_bound(u64 B, unsigned m);

}  // namespace sievecraft::eulerprod
