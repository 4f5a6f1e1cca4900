#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "sievecraft/errors.hpp"
#include "sievecraft/eulerprod.hpp"
#include "sievecraft/localdens.hpp"
#include "sievecraft/numutil.hpp"

using namespace sievecraft;
using namespace sievecraft::eulerprod;

namespace {

const double kSixOverPiSq = 6.0 / (std::numbers::pi * std::numbers::pi);

// #{1 <= x <= N : P(x) square-free}, by trial division with primes up to sqrt(max |P(x)|).
double squarefree_fraction(const IntPoly& P, u64 N) {
    const std::vector<std::uint32_t> primes = numutil::primes_up_to(static_cast<u64>(std::sqrt(double(N) * N + 1)) + 2);
    u64 hits = 0;
    for (u64 x = 1; x <= N; ++x) {
        const BigInt v = abs(eval(P, BigInt(x)));
        u64 w = v.get_ui();
        bool sf = w != 0;
        for (std::uint32_t p : primes) {
            if (u64(p) * p > w) break;
            if (w % p == 0) {
                w /= p;
                if (w % p == 0) {
                    sf = false;
                    break;
                }
            }
        }
        hits += sf;
    }
    return double(hits) / double(N);
}

}  // namespace

TEST_SUITE("eulerprod") {
    TEST_CASE("square-free integers") {
        const EulerEstimate e = density_univ(parse_poly("x"), 10000);
        CHECK(e.lower <= kSixOverPiSq);
        CHECK(kSixOverPiSq <= e.upper);
        CHECK(e.upper - e.lower < 1e-3);
        // The printed value 0.6079... is the interval [0.6079, 0.6080).
        CHECK(e.lower < 0.6080);
        CHECK(0.6079 <= e.upper);
        CHECK_FALSE(e.zero_density);
        CHECK_FALSE(e.widened);
    }

    TEST_CASE("a single factor at B = 2") {
        const EulerEstimate e = density_univ(parse_poly("x"), 2);
        CHECK(e.truncated == Rational(3, 4));
        CHECK(e.upper == 0.75);
        CHECK(e.lower <= 0.75);
        CHECK(e.lower > 0.0);
        CHECK(e.lower <= kSixOverPiSq);
        REQUIRE(e.factors.size() == 1);
        CHECK(e.factors[0].prime == 2);
        CHECK(e.factors[0].count == 1);
    }

    TEST_CASE("x^2 + 1 against a direct count") {
        const EulerEstimate e = density_univ(parse_poly("x^2+1"), 1000);
        const double observed = squarefree_fraction(parse_poly("x^2+1"), 20000);
        CHECK(std::abs(observed - e.midpoint()) < 0.01 * e.midpoint());
    }

    TEST_CASE("local factors come from the root counts") {
        const IntPoly P = parse_poly("x^3-x+6");
        for (unsigned m : {2u, 3u}) {
            const EulerEstimate e = density_univ(P, 200, m);
            CHECK(e.power == m);
            Rational prod = 1;
            u64 last = 0;
            for (const LocalFactor& f : e.factors) {
                CHECK(f.prime > last);
                last = f.prime;
                CHECK(f.count == localdens::count_roots_mod_pk(P, f.prime, m));
                const BigInt pm = localdens::prime_power(f.prime, m);
                prod *= Rational(pm - f.count, pm);
            }
            CHECK(last == 199);
            prod.canonicalize();
            CHECK(prod == e.truncated);
        }
    }

    TEST_CASE("rational and floating truncated products agree") {
        oracle::Rng rng(81);
        for (int i = 0; i < 20; ++i) {
            const IntPoly P = oracle::random_squarefree_poly(rng, 4, 12);
            const EulerEstimate e = density_univ(P, 3000);
            double prod = 1.0;
            for (const LocalFactor& f : e.factors) {
                const double pm = double(f.prime) * double(f.prime);
                prod *= 1.0 - f.count.get_d() / pm;
            }
            if (e.zero_density) {
                CHECK(e.truncated == 0);
                continue;
            }
            CHECK(std::abs(prod - e.truncated.get_d()) <= 1e-12 * e.truncated.get_d());
            CHECK(e.lower <= e.upper);
            CHECK(e.lower > 0.0);
            CHECK(e.upper <= 1.0);
        }
    }

    TEST_CASE("increasing B nests the intervals") {
        for (const char* s : {"x", "x^2+1", "x^3+2", "2*x^2+3", "x^4+x+1"}) {
            const IntPoly P = parse_poly(s);
            EulerEstimate prev = density_univ(P, 400);
            REQUIRE_FALSE(prev.widened);
            for (u64 B : {1000, 3000, 10000, 30000}) {
                const EulerEstimate e = density_univ(P, B);
                CHECK(e.lower >= prev.lower);
                CHECK(e.upper <= prev.upper);
                prev = e;
            }
        }
    }

    TEST_CASE("a small B is flagged as widened and still contains the value") {
        const IntPoly P = parse_poly("x^3-x+107");
        const EulerEstimate small = density_univ(P, 50);
        CHECK(small.widened);
        const EulerEstimate big = density_univ(P, 20000);
        CHECK(small.lower <= big.lower);
        CHECK(big.upper <= small.upper);
    }

    TEST_CASE("forms") {
        const EulerEstimate x = density_form(parse_form("x"), 10000);
        CHECK(x.lower <= kSixOverPiSq);
        CHECK(kSixOverPiSq <= x.upper);
        for (const LocalFactor& f : x.factors) CHECK(f.count == BigInt(f.prime * f.prime));

        u64 pairs = 0;
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) pairs += (a * b) % 4 == 0;
        const EulerEstimate xz = density_form(parse_form("x*z"), 2);
        Rational expected = 1 - Rational(pairs, 16);
        expected.canonicalize();
        CHECK(xz.truncated == expected);
        CHECK(xz.truncated == Rational(1, 2));
    }

    TEST_CASE("local obstruction") {
        const EulerEstimate e = density_univ(parse_poly("4*x+4"), 100);
        CHECK(e.zero_density);
        CHECK(e.obstruction_prime == 2);
        CHECK(e.truncated == 0);
        CHECK(e.lower == 0.0);
        const EulerEstimate f = density_form(parse_form("4*x"), 30);
        CHECK(f.zero_density);
        CHECK(f.obstruction_prime == 2);
    }

    TEST_CASE("prime tail bound dominates the partial prime sum") {
        const std::vector<std::uint32_t> primes = numutil::primes_up_to(2000000);
        for (u64 B : {2, 3, 10, 100, 1000}) {
            for (unsigned m : {2u, 3u}) {
                double s = 0;
                for (std::uint32_t p : primes)
                    if (p > B) s += std::pow(double(p), -double(m));
                CHECK(s < prime_tail_bound(B, m).get_d());
            }
        }
    }

    TEST_CASE("errors") {
        CHECK_THROWS_AS(density_univ(parse_poly("x^2"), 100), DomainError);
        CHECK_THROWS_AS(density_univ(IntPoly{3}, 100), DomainError);
        CHECK_THROWS_AS(density_univ(parse_poly("x"), 1), DomainError);
        CHECK_THROWS_AS(density_form(parse_form("x^2*z"), 100), DomainError);
    }
}
