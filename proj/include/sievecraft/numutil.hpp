#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace sievecraft::numutil {

using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;

u64 mulmod(u64 a, u64 b, u64 m);
u64 powmod(u64 base, u64 exp, u64 m);
u64 invmod(u64 a, u64 m);  // a must be a unit mod m

// Deterministic Miller-Rabin for the full 64-bit range.
bool is_prime(u64 n);

u64 isqrt(u64 n);
u64 icbrt(u64 n);
bool is_perfect_square(u64 n, u64* root = nullptr);

// All primes <= n, ascending. n < 2^32.
std::vector<std::uint32_t> primes_up_to(u64 n);

struct PrimePower {
    u64 prime;
    unsigned exponent;
};

// Trial division runs until p^3 exceeds the remaining cofactor. A cofactor that is
// then neither 1, a prime, nor a prime square is a product of two distinct primes
// larger than the last trial divisor; it is kept unsplit in `opaque`.
struct Factorization {
    int sign = 1;
    std::vector<PrimePower> factors;  // strictly increasing primes
    u64 opaque = 1;

    bool has_opaque() const { return opaque != 1; }
    u64 abs_value() const;  // reconstructs |n| including the opaque part
    i64 value() const;
};

Factorization factorize(i64 n);
Factorization factorize_abs(u64 n);

unsigned valuation(i64 n, u64 p);
unsigned valuation_abs(u64 n, u64 p);

// sq(n) = prod over p^2 | n of p^(v_p(n) - 1).
u64 sq_kernel(i64 n);

// |n| = d * y^2 with d square-free.
struct SquareDecomposition {
    u64 d;
    u64 y;
};
SquareDecomposition squarefree_decomposition(i64 n);
SquareDecomposition squarefree_decomposition_abs(u64 n);

// Number of ordered k-tuples of positive integers with product |n|.
u64 tau_k(i64 n, unsigned k);

int mobius(i64 n);
unsigned omega(i64 n);
u64 rad(i64 n);
bool is_squarefree(u64 n);

// Bitmap of square-free integers in [0, N]; bit 0 is clear.
class SquarefreeTable {
public:
    explicit SquarefreeTable(u64 n);

    u64 limit() const { return limit_; }
    bool test(u64 i) const { return (bits_[i >> 6] >> (i & 63)) & 1u; }
    u64 count() const;  // number of square-free integers in [1, N]
    u64 count_upto(u64 m) const;

private:
    u64 limit_;
    std::vector<u64> bits_;
};

SquarefreeTable squarefree_table(u64 n);

}  // namespace sievecraft::numutil
