#include "sievecraft/numutil.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <new>

#include "sievecraft/errors.hpp"

namespace sievecraft::numutil {

u64 mulmod(u64 a, u64 b, u64 m) { return static_cast<u64>(static_cast<u128>(a) * b % m); }

u64 powmod(u64 base, u64 exp, u64 m) {
    if (m == 1) return 0;
    u64 result = 1;
    base %= m;
    while (exp) {
        if (exp & 1) result = mulmod(result, base, m);
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    return result;
}

u64 invmod(u64 a, u64 m) {
    __int128 t = 0, new_t = 1;
    __int128 r = m, new_r = a % m;
    while (new_r != 0) {
        __int128 q = r / new_r;
        std::swap(t, new_t);
        new_t -= q * t;
        std::swap(r, new_r);
        new_r -= q * r;
    }
    if (r != 1) throw DomainError("invmod: argument is not a unit");
    if (t < 0) t += m;
    return static_cast<u64>(t);
}

bool is_prime(u64 n) {
    if (n < 2) return false;
    for (u64 p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        if (n % p == 0) return n == p;
    }
    u64 d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    for (u64 a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        u64 x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int i = 1; i < s; ++i) {
            x = mulmod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

u64 isqrt(u64 n) {
    u64 r = static_cast<u64>(std::sqrt(static_cast<long double>(n)));
    while (r > 0 && static_cast<u128>(r) * r > n) --r;
    while (static_cast<u128>(r + 1) * (r + 1) <= n) ++r;
    return r;
}

u64 icbrt(u64 n) {
    u64 r = static_cast<u64>(std::cbrt(static_cast<long double>(n)));
    auto cube = [](u64 x) { return static_cast<u128>(x) * x * x; };
    while (r > 0 && cube(r) > n) --r;
    while (cube(r + 1) <= n) ++r;
    return r;
}

bool is_perfect_square(u64 n, u64* root) {
    u64 r = isqrt(n);
    if (root) *root = r;
    return r * r == n;
}

std::vector<std::uint32_t> primes_up_to(u64 n) {
    if (n >= (u64{1} << 32)) throw ResourceError("primes_up_to: bound exceeds 2^32");
    std::vector<std::uint32_t> out;
    if (n < 2) return out;
    out.push_back(2);
    // Odd-only segmented sieve: index i stands for 2i+1.
    const u64 root = isqrt(n);
    std::vector<std::uint32_t> base;
    {
        std::vector<bool> comp(root + 1, false);
        for (u64 i = 3; i <= root; i += 2) {
            if (comp[i]) continue;
            base.push_back(static_cast<std::uint32_t>(i));
            for (u64 j = i * i; j <= root; j += 2 * i) comp[j] = true;
        }
    }
    const u64 seg = u64{1} << 18;
    std::vector<unsigned char> mark(seg);
    for (u64 lo = 3; lo <= n; lo += 2 * seg) {
        const u64 hi = std::min(n, lo + 2 * seg - 1);  // odd numbers lo, lo+2, ..., <= hi
        const u64 count = (hi - lo) / 2 + 1;
        std::fill(mark.begin(), mark.begin() + count, 0);
        for (std::uint32_t p : base) {
            u64 pp = static_cast<u64>(p) * p;
            if (pp > hi) break;
            u64 start = std::max(pp, (lo + p - 1) / p * p);
            if ((start & 1) == 0) start += p;
            for (u64 j = start; j <= hi; j += 2 * static_cast<u64>(p)) mark[(j - lo) / 2] = 1;
        }
        for (u64 i = 0; i < count; ++i)
            if (!mark[i]) out.push_back(static_cast<std::uint32_t>(lo + 2 * i));
    }
    return out;
}

namespace {

// Covers trial division up to the cube root of 2^64.
const std::vector<std::uint32_t>& trial_primes() {
    static const std::vector<std::uint32_t> primes = primes_up_to(2642246);
    return primes;
}

}  // namespace

u64 Factorization::abs_value() const {
    u64 v = opaque;
    for (const auto& pe : factors)
        for (unsigned i = 0; i < pe.exponent; ++i) v *= pe.prime;
    return v;
}

i64 Factorization::value() const { return sign * static_cast<i64>(abs_value()); }

Factorization factorize_abs(u64 n) {
    if (n == 0) throw DomainError("factorize: zero has no factorization");
    Factorization f;
    const auto& primes = trial_primes();
    std::size_t i = 0;
    auto strip = [&](u64 p) {
        unsigned e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        if (e) f.factors.push_back({p, e});
    };
    for (; i < primes.size() && static_cast<u128>(primes[i]) * primes[i] * primes[i] <= n; ++i) strip(primes[i]);
    if (n == 1) return f;
    u64 r;
    if (is_prime(n)) {
        f.factors.push_back({n, 1});
        return f;
    }
    if (is_perfect_square(n, &r)) {
        f.factors.push_back({r, 2});
        return f;
    }
    // n = pq with p < q: keep dividing while the smaller factor is within reach.
    for (; i < primes.size() && static_cast<u64>(primes[i]) * primes[i] <= n; ++i) {
        if (n % primes[i] == 0) {
            strip(primes[i]);
            f.factors.push_back({n, 1});
            return f;
        }
    }
    f.opaque = n;
    return f;
}

Factorization factorize(i64 n) {
    if (n == 0) throw DomainError("factorize: zero has no factorization");
    Factorization f = factorize_abs(n < 0 ? static_cast<u64>(-(n + 1)) + 1 : static_cast<u64>(n));
    f.sign = n < 0 ? -1 : 1;
    return f;
}

namespace {

u64 abs_u(i64 n) { return n < 0 ? static_cast<u64>(-(n + 1)) + 1 : static_cast<u64>(n); }

void require_nonzero(i64 n, const char* what) {
    if (n == 0) throw DomainError(std::string(what) + ": argument must be nonzero");
}

void require_positive(i64 n, const char* what) {
    if (n <= 0) throw DomainError(std::string(what) + ": argument must be positive");
}

}  // namespace

unsigned valuation_abs(u64 n, u64 p) {
    if (n == 0) throw DomainError("valuation: n must be nonzero");
    if (!is_prime(p)) throw DomainError("valuation: p must be prime");
    unsigned j = 0;
    while (n % p == 0) {
        n /= p;
        ++j;
    }
    return j;
}

unsigned valuation(i64 n, u64 p) { return valuation_abs(abs_u(n), p); }

u64 sq_kernel(i64 n) {
    require_nonzero(n, "sq_kernel");
    u64 s = 1;
    for (const auto& pe : factorize(n).factors)
        for (unsigned i = 1; i < pe.exponent; ++i) s *= pe.prime;
    return s;
}

SquareDecomposition squarefree_decomposition_abs(u64 n) {
    if (n == 0) throw DomainError("squarefree_decomposition: argument must be nonzero");
    const Factorization f = factorize_abs(n);
    SquareDecomposition out{f.opaque, 1};
    for (const auto& pe : f.factors) {
        if (pe.exponent & 1) out.d *= pe.prime;
        for (unsigned i = 0; i < pe.exponent / 2; ++i) out.y *= pe.prime;
    }
    return out;
}

SquareDecomposition squarefree_decomposition(i64 n) {
    require_nonzero(n, "squarefree_decomposition");
    return squarefree_decomposition_abs(abs_u(n));
}

u64 tau_k(i64 n, unsigned k) {
    require_nonzero(n, "tau_k");
    if (k == 0) throw DomainError("tau_k: k must be positive");
    // tau_k(p^e) = C(e + k - 1, k - 1); an opaque pq contributes k^2.
    auto binom = [](u64 top, u64 choose) {
        u128 r = 1;
        for (u64 i = 1; i <= choose; ++i) {
            r = r * (top - choose + i) / i;
            if (r >> 64) throw ResourceError("tau_k: result exceeds 64 bits");
        }
        return static_cast<u64>(r);
    };
    const Factorization f = factorize(n);
    u128 total = 1;
    for (const auto& pe : f.factors) {
        total *= binom(pe.exponent + k - 1, pe.exponent);
        if (total >> 64) throw ResourceError("tau_k: result exceeds 64 bits");
    }
    if (f.has_opaque()) total *= static_cast<u128>(k) * k;
    if (total >> 64) throw ResourceError("tau_k: result exceeds 64 bits");
    return static_cast<u64>(total);
}

int mobius(i64 n) {
    require_positive(n, "mobius");
    const Factorization f = factorize(n);
    int mu = 1;
    for (const auto& pe : f.factors) {
        if (pe.exponent > 1) return 0;
        mu = -mu;
    }
    return mu;  // an opaque pq flips the sign twice
}

unsigned omega(i64 n) {
    require_positive(n, "omega");
    const Factorization f = factorize(n);
    return static_cast<unsigned>(f.factors.size()) + (f.has_opaque() ? 2u : 0u);
}

u64 rad(i64 n) {
    require_positive(n, "rad");
    const Factorization f = factorize(n);
    u64 r = f.opaque;
    for (const auto& pe : f.factors) r *= pe.prime;
    return r;
}

bool is_squarefree(u64 n) {
    if (n == 0) return false;
    for (const auto& pe : factorize_abs(n).factors)
        if (pe.exponent > 1) return false;
    return true;
}

SquarefreeTable::SquarefreeTable(u64 n) : limit_(n) {
    constexpr u64 kMaxBits = u64{1} << 36;
    if (n >= kMaxBits) throw ResourceError("squarefree_table: bound exceeds table capacity");
    try {
        bits_.assign(n / 64 + 1, ~u64{0});
    } catch (const std::bad_alloc&) {
        throw ResourceError("squarefree_table: allocation failed");
    }
    bits_[0] &= ~u64{1};
    if (const u64 tail = (n + 1) % 64) bits_.back() &= (u64{1} << tail) - 1;

    const auto primes = primes_up_to(isqrt(n));
    const u64 seg_bits = u64{1} << 21;
    for (u64 lo = 0; lo <= n; lo += seg_bits) {
        const u64 hi = std::min(n, lo + seg_bits - 1);
        for (std::uint32_t p32 : primes) {
            const u64 q = static_cast<u64>(p32) * p32;
            if (q > hi) break;
            for (u64 j = (lo + q - 1) / q * q; j <= hi; j += q) bits_[j >> 6] &= ~(u64{1} << (j & 63));
        }
    }
}

u64 SquarefreeTable::count() const {
    u64 c = 0;
    for (u64 w : bits_) c += static_cast<u64>(std::popcount(w));
    return c;
}

u64 SquarefreeTable::count_upto(u64 m) const {
    m = std::min(m, limit_);
    u64 c = 0;
    const u64 full = (m + 1) / 64;
    for (u64 i = 0; i < full; ++i) c += static_cast<u64>(std::popcount(bits_[i]));
    if (const u64 rem = (m + 1) % 64) c += static_cast<u64>(std::popcount(bits_[full] & ((u64{1} << rem) - 1)));
    return c;
}

SquarefreeTable squarefree_table(u64 n) {
    if (n == 0) throw DomainError("squarefree_table: N must be at least 1");
    return SquarefreeTable(n);
}

}  // namespace sievecraft::numutil
