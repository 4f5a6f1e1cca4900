#pragma once

// Brute-force oracles and corpus generators shared by the unit tests and the acceptance binary.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include "sievecraft/poly.hpp"

namespace oracle {

using u64 = std::uint64_t;
using i64 = std::int64_t;

class Rng {
public:
    explicit Rng(u64 seed) : gen_(seed) {}
    u64 below(u64 n) { return gen_() % n; }
    i64 range(i64 lo, i64 hi) { return lo + static_cast<i64>(below(static_cast<u64>(hi - lo + 1))); }

private:
    std::mt19937_64 gen_;
};

// Moebius function on [0, n] by a linear sieve.
inline std::vector<int> mobius_table(u64 n) {
    std::vector<int> mu(n + 1, 1), primes;
    std::vector<bool> composite(n + 1, false);
    mu[0] = 0;
    for (u64 i = 2; i <= n; ++i) {
        if (!composite[i]) {
            primes.push_back(static_cast<int>(i));
            mu[i] = -1;
        }
        for (int p : primes) {
            const u64 ip = i * static_cast<u64>(p);
            if (ip > n) break;
            composite[ip] = true;
            if (i % p == 0) {
                mu[ip] = 0;
                break;
            }
            mu[ip] = -mu[i];
        }
    }
    return mu;
}

// Trial division by every d with d^2 <= |v|.
inline bool squarefree_by_trial(u64 v) {
    if (v == 0) return false;
    for (u64 d = 2; d * d <= v; ++d) {
        if (v % (d * d) == 0) return false;
        if (v % d == 0) v /= d;
    }
    return true;
}

inline bool is_prime_naive(u64 n) {
    if (n < 2) return false;
    for (u64 d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

inline unsigned valuation(sievecraft::BigInt v, u64 p) {
    if (v == 0) return ~0u;
    unsigned k = 0;
    while (mpz_divisible_ui_p(v.get_mpz_t(), p)) {
        mpz_divexact_ui(v.get_mpz_t(), v.get_mpz_t(), p);
        ++k;
    }
    return k;
}

// Square-free primitive polynomial of degree in [1, max_degree], coefficients in [-bound, bound].
inline sievecraft::IntPoly random_squarefree_poly(Rng& rng, int max_degree, i64 bound) {
    for (;;) {
        const int deg = static_cast<int>(rng.range(1, max_degree));
        std::vector<sievecraft::BigInt> c;
        for (int i = 0; i <= deg; ++i) c.emplace_back(static_cast<long>(rng.range(-bound, bound)));
        if (c.back() == 0) continue;
        sievecraft::IntPoly P(c);
        if (sievecraft::content(P) != 1 || !sievecraft::is_squarefree_poly(P)) continue;
        return P;
    }
}

// Square-free form with coprime coefficients, degree in [1, max_degree].
inline sievecraft::BinForm random_squarefree_form(Rng& rng, int max_degree, i64 bound) {
    for (;;) {
        const int deg = static_cast<int>(rng.range(1, max_degree));
        std::vector<sievecraft::BigInt> c;
        for (int i = 0; i <= deg; ++i) c.emplace_back(static_cast<long>(rng.range(-bound, bound)));
        sievecraft::BinForm F(deg, c);
        if (sievecraft::form_content(F) != 1 || !sievecraft::is_squarefree_poly(F)) continue;
        return F;
    }
}

namespace detail {

// Four residue streams per vector; values stay below 2^31 since q < 2^30.
using Lanes = std::int32_t __attribute__((vector_size(16)));
inline constexpr unsigned kLanes = 4;
inline constexpr unsigned kStreams = 2 * kLanes;

template <int D>
u64 count_zeros_streams(Lanes (&a)[D + 1], Lanes (&b)[D + 1], std::int32_t m, u64 q) {
    const Lanes mod = Lanes{} + m;
    const Lanes top = mod - 1;
    u64 zeros = 0;
    u64 t = 0;
    const u64 steps = q / kStreams;
    while (t < steps) {
        Lanes hits{};
        const u64 stop = std::min<u64>(steps, t + (1u << 30));
        for (; t < stop; ++t) {
            hits -= (a[0] == 0) + (b[0] == 0);
            for (int i = 0; i < D; ++i) {
                const Lanes x = a[i] + a[i + 1];
                const Lanes y = b[i] + b[i + 1];
                a[i] = x - (mod & (x > top));
                b[i] = y - (mod & (y > top));
            }
        }
        for (unsigned s = 0; s < kLanes; ++s) zeros += static_cast<u64>(hits[s]);
    }
    for (unsigned s = 0; s < q % kStreams; ++s) zeros += (s < kLanes ? a[0][s] : b[0][s - kLanes]) == 0;
    return zeros;
}

template <int D>
u64 count_zeros_fixed(const sievecraft::IntPoly& P, u64 q) {
    Lanes a[D + 1], b[D + 1];
    for (unsigned s = 0; s < kStreams; ++s) {
        u64 v[D + 1];
        for (int i = 0; i <= D; ++i) {
            sievecraft::BigInt r;
            const sievecraft::BigInt val =
                sievecraft::eval(P, sievecraft::BigInt(static_cast<unsigned long>(s + kStreams * i)));
            mpz_fdiv_r_ui(r.get_mpz_t(), val.get_mpz_t(), q);
            v[i] = r.get_ui();
        }
        for (int level = 1; level <= D; ++level)
            for (int i = D; i >= level; --i) v[i] = (v[i] + q - v[i - 1]) % q;
        for (int i = 0; i <= D; ++i) (s < kLanes ? a[i][s] : b[i][s - kLanes]) = static_cast<std::int32_t>(v[i]);
    }
    return count_zeros_streams<D>(a, b, static_cast<std::int32_t>(q), q);
}

}  // namespace detail

// #{x mod q : P(x) = 0 mod q} for q < 2^30 and 1 <= deg P <= 6, walking the eight residue
// streams x = s mod 8 by finite differences.
inline u64 count_zeros_mod(const sievecraft::IntPoly& P, u64 q) {
    switch (P.degree()) {
        case 1: return detail::count_zeros_fixed<1>(P, q);
        case 2: return detail::count_zeros_fixed<2>(P, q);
        case 3: return detail::count_zeros_fixed<3>(P, q);
        case 4: return detail::count_zeros_fixed<4>(P, q);
        case 5: return detail::count_zeros_fixed<5>(P, q);
        case 6: return detail::count_zeros_fixed<6>(P, q);
        default: throw std::invalid_argument("count_zeros_mod: degree must be in [1, 6]");
    }
}

// counts[k] = #{x mod p^k : p^k | P(x)} for 1 <= k <= K, p^K <= limit, by evaluating P at every
// residue mod p^K with finite differences.
inline std::vector<u64> exhaustive_root_counts(const sievecraft::IntPoly& P, u64 p, u64 limit) {
    unsigned K = 0;
    u64 q = 1;
    while (q * p <= limit) {
        q *= p;
        ++K;
    }
    std::vector<u64> counts(K + 1, 0);
    if (K == 0) return counts;
    const int deg = P.degree();
    std::vector<u64> diff(deg + 1);
    for (int i = 0; i <= deg; ++i) {
        sievecraft::BigInt v = sievecraft::eval(P, sievecraft::BigInt(static_cast<long>(i)));
        sievecraft::BigInt r;
        mpz_fdiv_r_ui(r.get_mpz_t(), v.get_mpz_t(), q);
        diff[i] = r.get_ui();
    }
    for (int level = 1; level <= deg; ++level)
        for (int i = deg; i >= level; --i) diff[i] = (diff[i] + q - diff[i - 1]) % q;
    // diff[i] is now the i-th forward difference at x = 0.
    std::vector<u64> by_valuation(K + 1, 0);
    if (K == 1) {
        counts[1] = count_zeros_mod(P, q);
        return counts;
    }
    for (u64 x = 0; x < q; ++x) {
        u64 v = diff[0];
        if (v == 0) {
            ++by_valuation[K];
        } else if (v % p == 0) {
            unsigned j = 0;
            while (v % p == 0) {
                v /= p;
                ++j;
            }
            ++by_valuation[j];
        }
        for (int i = 0; i < deg; ++i) {
            diff[i] += diff[i + 1];
            if (diff[i] >= q) diff[i] -= q;
        }
    }
    u64 at_least = 0, lifts = 1;
    for (unsigned k = K; k >= 1; --k) {
        at_least += by_valuation[k];
        counts[k] = at_least / lifts;
        lifts *= p;
    }
    return counts;
}

}  // namespace oracle
