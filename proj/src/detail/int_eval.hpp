#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <thread>
#include <vector>

#include "sievecraft/errors.hpp"
#include "sievecraft/poly.hpp"

namespace sievecraft::detail {

using i64 = std::int64_t;
using u64 = std::uint64_t;
using i128 = __int128;

inline std::vector<i64> small_coeffs(const std::vector<BigInt>& coeffs, const char* what) {
    std::vector<i64> out;
    for (const BigInt& c : coeffs) {
        if (!mpz_fits_slong_p(c.get_mpz_t())) throw ResourceError(std::string(what) + ": coefficients exceed 64 bits");
        out.push_back(c.get_si());
    }
    return out;
}

inline i128 checked_mul(i128 a, i128 b, const char* what) {
    i128 r;
    if (__builtin_mul_overflow(a, b, &r)) throw ResourceError(std::string(what) + ": value overflow");
    return r;
}

inline i128 checked_add(i128 a, i128 b, const char* what) {
    i128 r;
    if (__builtin_add_overflow(a, b, &r)) throw ResourceError(std::string(what) + ": value overflow");
    return r;
}

inline u64 abs_to_u64(i128 v, const char* what) {
    const i128 a = v < 0 ? -v : v;
    if (a > static_cast<i128>(~u64{0})) throw ResourceError(std::string(what) + ": value exceeds 64 bits");
    return static_cast<u64>(a);
}

// Horner evaluation of sum c_i x^i.
inline i128 eval_univ(const std::vector<i64>& c, i64 x, const char* what) {
    i128 acc = 0;
    for (std::size_t i = c.size(); i-- > 0;) acc = checked_add(checked_mul(acc, x, what), c[i], what);
    return acc;
}

// sum a_i x^i z^(d-i)
inline i128 eval_form(const std::vector<i64>& a, i64 x, i64 z, const char* what) {
    i128 acc = 0;
    for (std::size_t i = a.size(); i-- > 0;) {
        acc = checked_mul(acc, x, what);
        i128 term = a[i];
        for (std::size_t j = 0; j < a.size() - 1 - i; ++j) term = checked_mul(term, z, what);
        acc = checked_add(acc, term, what);
    }
    return acc;
}

// Runs fn(lo, hi) on `workers` contiguous chunks of [0, n).
template <class Fn>
void parallel_chunks(u64 n, unsigned worker_limit, Fn&& fn) {
    const unsigned workers = static_cast<unsigned>(std::min<u64>(worker_limit, std::max<u64>(1, n / 4096)));
    if (workers <= 1) {
        fn(u64{0}, n);
        return;
    }
    std::vector<std::thread> threads;
    const u64 step = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        const u64 lo = std::min(n, w * step), hi = std::min(n, lo + step);
        threads.emplace_back([&fn, lo, hi] { fn(lo, hi); });
    }
    for (auto& t : threads) t.join();
}

}  // namespace sievecraft::detail
