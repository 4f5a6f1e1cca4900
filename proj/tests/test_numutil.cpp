#include <doctest.h>

#include <vector>

#include "oracles.hpp"
#include "sievecraft/errors.hpp"
#include "sievecraft/numutil.hpp"

using namespace sievecraft;
using namespace sievecraft::numutil;

namespace {

std::vector<u64> divisors(u64 n) {
    std::vector<u64> out;
    for (u64 d = 1; d <= n; ++d)
        if (n % d == 0) out.push_back(d);
    return out;
}

u64 tau_k_brute(u64 n, unsigned k) {
    if (k == 1) return 1;
    u64 total = 0;
    for (u64 d : divisors(n)) total += tau_k_brute(n / d, k - 1);
    return total;
}

}  // namespace

TEST_SUITE("numutil") {
    TEST_CASE("valuation examples and errors") {
        CHECK(valuation(12, 2) == 2);
        CHECK(valuation(12, 3) == 1);
        CHECK(valuation(1, 5) == 0);
        CHECK(valuation(-48, 2) == 4);
        CHECK_THROWS_AS(valuation(0, 2), DomainError);
        CHECK_THROWS_AS(valuation(12, 4), DomainError);
    }

    TEST_CASE("sq kernel examples") {
        CHECK(sq_kernel(12) == 2);
        CHECK(sq_kernel(8) == 4);
        CHECK(sq_kernel(1) == 1);
        CHECK(sq_kernel(-1) == 1);
        for (i64 n : {2, 3, 5, 6, 30, 210, 1155}) CHECK(sq_kernel(n) == 1);
        CHECK(sq_kernel(72) == 12);  // 2^3 3^2 -> 2^2 * 3
        CHECK_THROWS_AS(sq_kernel(0), DomainError);
    }

    TEST_CASE("tau_k examples") {
        CHECK(tau_k(12, 2) == 6);
        CHECK(tau_k(4, 3) == 6);
        for (i64 n : {1, 7, 12, 360}) CHECK(tau_k(n, 1) == 1);
    }

    TEST_CASE("mobius omega rad examples") {
        CHECK(mobius(1) == 1);
        CHECK(omega(12) == 2);
        CHECK(rad(12) == 6);
        CHECK(mobius(30) == -1);
        CHECK(mobius(12) == 0);
        CHECK_THROWS_AS(mobius(0), DomainError);
        CHECK_THROWS_AS(omega(-3), DomainError);
    }

    TEST_CASE("squarefree table examples") {
        const SquarefreeTable t = squarefree_table(10);
        for (u64 i : {1, 2, 3, 5, 6, 7, 10}) CHECK(t.test(i));
        for (u64 i : {0, 4, 8, 9}) CHECK_FALSE(t.test(i));
        CHECK(squarefree_table(1).test(1));
        CHECK(squarefree_table(100).count() == 61);
    }

    TEST_CASE("factorization reconstructs n for |n| <= 10^4") {
        for (i64 n = -10000; n <= 10000; ++n) {
            if (n == 0) continue;
            const Factorization f = factorize(n);
            CHECK_FALSE(f.has_opaque());
            i64 prod = f.sign;
            u64 last = 1;
            for (const PrimePower& pp : f.factors) {
                CHECK(pp.prime > last);
                CHECK(pp.exponent >= 1);
                CHECK(oracle::is_prime_naive(pp.prime));
                CHECK(valuation(n, pp.prime) == pp.exponent);
                for (unsigned e = 0; e < pp.exponent; ++e) prod *= static_cast<i64>(pp.prime);
                last = pp.prime;
            }
            REQUIRE(prod == n);
        }
    }

    TEST_CASE("semiprime cofactors split when the smaller prime is a trial divisor") {
        const Factorization g = factorize_abs(9999);
        CHECK_FALSE(g.has_opaque());
        CHECK(g.factors.size() == 3);
        const Factorization h = factorize_abs(1000003ull * 1000033ull);
        CHECK_FALSE(h.has_opaque());
        CHECK(h.factors.size() == 2);
    }

    TEST_CASE("opaque semiprime cofactor still reconstructs") {
        const u64 p = 3000017, q = 3000029;
        const Factorization f = factorize_abs(4 * p * q);
        CHECK(f.has_opaque());
        CHECK(f.opaque == p * q);
        CHECK(f.abs_value() == 4 * p * q);
        CHECK(sq_kernel(static_cast<i64>(4 * p * q)) == 2);
        CHECK(is_squarefree(p * q));
        CHECK(sq_kernel(static_cast<i64>(p * p * 3)) == p);
    }

    TEST_CASE("square-free decomposition reconstructs |n|") {
        for (i64 n = -3000; n <= 3000; ++n) {
            if (n == 0) continue;
            const SquareDecomposition s = squarefree_decomposition(n);
            CHECK(s.d * s.y * s.y == static_cast<u64>(n < 0 ? -n : n));
            CHECK(oracle::squarefree_by_trial(s.d));
        }
    }

    TEST_CASE("mobius omega tau_k agree with divisor enumeration for n <= 10^4") {
        const std::vector<int> mu = oracle::mobius_table(10000);
        for (u64 n = 1; n <= 10000; ++n) {
            REQUIRE(mobius(static_cast<i64>(n)) == mu[n]);
            unsigned w = 0;
            u64 r = 1;
            for (u64 d : divisors(n))
                if (d > 1 && oracle::is_prime_naive(d)) {
                    ++w;
                    r *= d;
                }
            REQUIRE(omega(static_cast<i64>(n)) == w);
            REQUIRE(rad(static_cast<i64>(n)) == r);
        }
        for (u64 n = 1; n <= 10000; n += (n < 200 ? 1 : 97))
            for (unsigned k = 1; k <= 4; ++k) REQUIRE(tau_k(static_cast<i64>(n), k) == tau_k_brute(n, k));
    }

    TEST_CASE("squarefree table agrees with mobius up to 10^6") {
        const u64 N = 1000000;
        const std::vector<int> mu = oracle::mobius_table(N);
        const SquarefreeTable t = squarefree_table(N);
        u64 count = 0;
        for (u64 i = 1; i <= N; ++i) {
            REQUIRE(t.test(i) == (mu[i] != 0));
            count += mu[i] != 0;
        }
        CHECK(t.count() == count);
        CHECK(count == 607926);
        CHECK(t.count_upto(100) == 61);
    }

    TEST_CASE("primality and roots") {
        for (u64 n = 0; n < 5000; ++n) REQUIRE(is_prime(n) == oracle::is_prime_naive(n));
        CHECK(is_prime(18446744073709551557ull));
        CHECK_FALSE(is_prime(3215031751ull));  // strong pseudoprime to bases 2, 3, 5, 7
        CHECK(isqrt(18446744073709551615ull) == 4294967295ull);
        CHECK(icbrt(1000000000000ull) == 10000);
        CHECK(icbrt(999999999999ull) == 9999);
        u64 root = 0;
        CHECK(is_perfect_square(1524157875019052100ull, &root));
        CHECK(root == 1234567890ull);
        CHECK(primes_up_to(100).size() == 25);
        CHECK(powmod(3, 1000000, 1000000007) == 64935414);
        CHECK(mulmod(invmod(17, 1000003), 17, 1000003) == 1);
    }
}
