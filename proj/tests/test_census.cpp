#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <numeric>

#include "oracles.hpp"
#include "sievecraft/errors.hpp"
#include "sievecraft/census.hpp"
#include "sievecraft/numutil.hpp"

using namespace sievecraft;
using namespace sievecraft::census;

namespace {

// Free of m-th powers by trial division; zero is never power-free.
bool powerfree_by_trial(const BigInt& value, unsigned m) {
    BigInt v = abs(value);
    if (v == 0) return false;
    for (unsigned long d = 2;; ++d) {
        BigInt dm;
        mpz_pow_ui(dm.get_mpz_t(), BigInt(d).get_mpz_t(), m);
        if (dm > v) return true;
        if (mpz_divisible_p(v.get_mpz_t(), dm.get_mpz_t())) return false;
    }
}

u64 brute_univ(const IntPoly& P, u64 N, unsigned m) {
    u64 n = 0;
    for (u64 x = 1; x <= N; ++x) n += powerfree_by_trial(eval(P, BigInt(x)), m);
    return n;
}

u64 brute_form(const BinForm& F, i64 N, bool full_box, bool coprime, const lattice::Sector* S = nullptr) {
    u64 n = 0;
    const i64 lo = full_box ? -N : 1;
    for (i64 x = lo; x <= N; ++x)
        for (i64 z = lo; z <= N; ++z) {
            if (coprime && std::gcd(x, z) != 1) continue;
            if (S && !S->contains(x, z)) continue;
            n += powerfree_by_trial(eval_form(F, BigInt(x), BigInt(z)), 2);
        }
    return n;
}

// Largest p with p^2 | v, or 0.
u64 largest_square_prime(BigInt v) {
    v = abs(v);
    u64 best = 0;
    for (unsigned long p = 2; BigInt(p) * p <= v; ++p) {
        unsigned e = 0;
        while (mpz_divisible_ui_p(v.get_mpz_t(), p)) {
            mpz_divexact_ui(v.get_mpz_t(), v.get_mpz_t(), p);
            ++e;
        }
        if (e >= 2) best = p;
    }
    return best;
}

// x with P(x) = 0 or p^2 | P(x) for some prime p > threshold, by trial factorization.
u64 brute_delta_univ(const IntPoly& P, u64 N, u64 threshold) {
    u64 n = 0;
    for (u64 x = 1; x <= N; ++x) {
        const BigInt v = eval(P, BigInt(x));
        if (v == 0) {
            ++n;
            continue;
        }
        n += largest_square_prime(v) > threshold;
    }
    return n;
}

unsigned distinct_roots(const IntPoly& P, u64 p) {
    unsigned r = 0;
    for (u64 x = 0; x < p; ++x) r += mpz_divisible_ui_p(eval(P, BigInt(x)).get_mpz_t(), p) != 0;
    return r;
}

}  // namespace

TEST_SUITE("census") {
    TEST_CASE("power-free value examples") {
        CHECK(count_powerfree_values(parse_poly("x"), 100).observed == 61);
        CHECK(count_powerfree_values(parse_poly("x"), 100, 3).observed == 85);
        const IntPoly P = parse_poly("x^3+2");
        CHECK(count_powerfree_values(P, 50).observed == brute_univ(P, 50, 2));
        CHECK_THROWS_AS(count_powerfree_values(parse_poly("x^2"), 10), DomainError);
    }

    TEST_CASE("power-free values agree with trial division") {
        oracle::Rng rng(101);
        for (int i = 0; i < 20; ++i) {
            const IntPoly P = oracle::random_squarefree_poly(rng, 3, 9);
            for (unsigned m : {2u, 3u}) {
                const CensusReport r = count_powerfree_values(P, 300, m);
                REQUIRE(r.observed == brute_univ(P, 300, m));
                u64 zeros = 0;
                for (u64 x = 1; x <= 300; ++x) zeros += eval(P, BigInt(x)) == 0;
                REQUIRE(r.zero_values == zeros);
            }
        }
    }

    TEST_CASE("square-free integers match the table") {
        for (u64 N : {1, 10, 1000, 99999, 1000000}) {
            CHECK(count_powerfree_values(parse_poly("x"), N).observed == numutil::squarefree_table(N).count());
        }
    }

    TEST_CASE("report carries the main term") {
        const CensusReport r = count_powerfree_values(parse_poly("x"), 100000);
        CHECK(r.main_lo <= r.main_hi);
        CHECK(std::abs(r.discrepancy_rel()) < 0.01);
        CHECK(r.discrepancy() == doctest::Approx(double(r.observed) - r.main_mid()));
        CHECK(r.convention == "interval");
    }

    TEST_CASE("form census examples") {
        FormCensusOptions q;
        q.convention = BoxConvention::PositiveQuadrant;
        q.coprime = false;
        CHECK(count_squarefree_form(parse_form("x"), 30, q).observed == 570);
        q.coprime = true;
        CHECK(count_squarefree_form(parse_form("x"), 30, q).observed == brute_form(parse_form("x"), 30, false, true));
        const FormCensusOptions full;
        CHECK(count_squarefree_form(parse_form("x*z"), 10, full).observed ==
              brute_form(parse_form("x*z"), 10, true, true));
    }

    TEST_CASE("form census agrees with a pair scan") {
        oracle::Rng rng(102);
        for (int i = 0; i < 12; ++i) {
            const BinForm F = oracle::random_squarefree_form(rng, 4, 9);
            for (bool full : {false, true})
                for (bool coprime : {false, true}) {
                    FormCensusOptions o;
                    o.convention = full ? BoxConvention::FullBox : BoxConvention::PositiveQuadrant;
                    o.coprime = coprime;
                    REQUIRE(count_squarefree_form(F, 25, o).observed == brute_form(F, 25, full, coprime));
                }
        }
    }

    TEST_CASE("complementary half-planes split the full-box count") {
        const BinForm F = parse_form("x^3+2*z^3");
        FormCensusOptions upper, lower, all;
        upper.sector = lattice::Sector(lattice::Point{1, 0}, lattice::Point{-1, 0});
        lower.sector = lattice::Sector(lattice::Point{-1, 0}, lattice::Point{1, 0});
        const u64 a = count_squarefree_form(F, 40, upper).observed;
        const u64 b = count_squarefree_form(F, 40, lower).observed;
        CHECK(a + b == count_squarefree_form(F, 40, all).observed);
        CHECK(a == brute_form(F, 40, true, true, &*upper.sector));
    }

    TEST_CASE("delta of the identity is empty") {
        for (u64 N : {10, 100, 5000}) {
            CHECK(delta_census_univ(parse_poly("x"), N) == 0);
            CHECK(delta_census_form(parse_form("x"), N).count == 0);
        }
    }

    TEST_CASE("both delta methods agree with each other and with factoring") {
        oracle::Rng rng(103);
        std::vector<IntPoly> corpus = {parse_poly("x^3+2"), parse_poly("x^2+1")};
        while (corpus.size() < 20) corpus.push_back(oracle::random_squarefree_poly(rng, 3, 9));
        for (const IntPoly& P : corpus) {
            for (u64 N : {100, 700, 2000}) {
                const u64 a = delta_census_univ(P, N), b = delta_census_univ_by_primes(P, N);
                REQUIRE(a == b);
            }
            REQUIRE(delta_census_univ(P, 200) == brute_delta_univ(P, 200, numutil::isqrt(200)));
        }
    }

    TEST_CASE("form delta and its prime profile") {
        const BinForm F = parse_form("x^3+2*z^3");
        const FormDelta a = delta_census_form(F, 30), b = delta_census_form_scan(F, 30);
        CHECK(a.count == b.count);
        CHECK(a.profile == b.profile);
        std::map<u64, u64> profile;
        u64 count = 0;
        for (i64 x = -30; x <= 30; ++x)
            for (i64 z = -30; z <= 30; ++z) {
                if (std::gcd(x, z) != 1) continue;
                const BigInt v = abs(eval_form(F, BigInt(x), BigInt(z)));
                bool any = false;
                for (u64 p = 31; BigInt(p) * p <= v; ++p)
                    if (oracle::is_prime_naive(p) && mpz_divisible_ui_p(v.get_mpz_t(), p * p)) {
                        ++profile[p];
                        any = true;
                    }
                count += any;
            }
        CHECK(a.count == count);
        CHECK(a.profile == profile);
        CHECK(a.facil_bound == 36);
        for (const auto& [p, n] : a.profile) CHECK(n <= 36);
    }

    TEST_CASE("twist census") {
        const BinForm F = parse_form("x^3+2*z^3");
        const TwistTable t = twist_census(F, 20);
        CHECK(t.conserved());
        CHECK(t.S.at(3) >= 1);
        CHECK(t.S.at(10) >= 1);
        std::map<i64, u64> S;
        u64 zeros = 0, pairs = 0;
        for (i64 x = -20; x <= 20; ++x)
            for (i64 z = -20; z <= 20; ++z) {
                if (std::gcd(x, z) != 1) continue;
                ++pairs;
                const BigInt v = eval_form(F, BigInt(x), BigInt(z));
                if (v == 0) {
                    ++zeros;
                    continue;
                }
                // Signed square-free kernel by trial division.
                i64 w = v.get_si(), d = w < 0 ? -1 : 1;
                w = std::abs(w);
                for (i64 p = 2; p * p <= w; ++p)
                    while (w % p == 0) {
                        w /= p;
                        if (w % p == 0) w /= p;
                        else d *= p;
                    }
                ++S[d * w];
            }
        CHECK(t.S == S);
        CHECK(t.zero_pairs == zeros);
        CHECK(t.coprime_pairs == pairs);
        CHECK_THROWS_AS(twist_census(parse_form("x*z"), 10), DomainError);
    }

    TEST_CASE("twist decomposition inequality") {
        for (const char* s : {"x^3+2*z^3", "x^3-x*z^2+5*z^3", "x^4+3*z^4", "2*x^3+x^2*z-7*z^3"}) {
            const BinForm F = parse_form(s);
            for (u64 N : {10, 30}) {
                const TwistDecomposition d = twist_decomposition(F, N, 50);
                CHECK(d.delta == delta_census_form(F, N).count);
                CHECK(d.holds());
            }
        }
    }

    TEST_CASE("splitting types") {
        const IntPoly P = parse_poly("x^3-2");
        CHECK(splitting_type(P, 5) == std::vector<unsigned>{1, 2});
        CHECK(splitting_type(P, 7) == std::vector<unsigned>{3});
        CHECK(distinct_roots(P, 31) == 3);
        CHECK(splitting_type(P, 31) == std::vector<unsigned>{1, 1, 1});
        CHECK_THROWS_AS(splitting_type(P, 3), DomainError);
        for (const char* s : {"x^3-2", "x^3-x-1", "x^4+x+1", "x^3+x^2-2*x-1", "2*x^3+3*x+7"}) {
            const IntPoly Q = parse_poly(s);
            const BigInt bad = discriminant(Q) * Q.lead();
            for (std::uint32_t p : numutil::primes_up_to(200)) {
                if (mpz_divisible_ui_p(bad.get_mpz_t(), p)) continue;
                const std::vector<unsigned> t = splitting_type(Q, p);
                REQUIRE(std::accumulate(t.begin(), t.end(), 0u) == unsigned(Q.degree()));
                REQUIRE(std::count(t.begin(), t.end(), 1u) == distinct_roots(Q, p));
                REQUIRE(std::is_sorted(t.begin(), t.end()));
            }
        }
    }

    TEST_CASE("R(alpha, d)") {
        const IntPoly P = parse_poly("x^3-2");
        CHECK(r_alpha(P, 0.7, 1) == 1.0);
        CHECK(r_alpha(P, 1.0, 7) == 0.0);
        CHECK(r_alpha_sum(P, 1.0, 1).sum == 1.0);
        // Primes 2 and 3 are totally ramified: one prime above each. Elsewhere the number of
        // primes above p is 0, 2 or 3 for 0, 1 or 3 roots mod p.
        auto primes_above = [&](u64 p) -> int {
            if (p == 2 || p == 3) return 1;
            const unsigned r = distinct_roots(P, p);
            return r == 0 ? 0 : (r == 1 ? 2 : 3);
        };
        double expected = 0;
        for (u64 d = 1; d <= 100; ++d) {
            if (!oracle::squarefree_by_trial(d)) continue;
            double v = 1;
            for (u64 p = 2; p <= d; ++p)
                if (d % p == 0 && oracle::is_prime_naive(p)) {
                    const int k = primes_above(p);
                    v *= k == 0 ? 0.0 : std::exp2(k - 1.0);
                }
            expected += v;
            CHECK(r_alpha(P, 1.0, d) == v);
        }
        const RAlphaResult r = r_alpha_sum(P, 1.0, 100);
        CHECK(r.sum == expected);
        CHECK_FALSE(r.galois);
        REQUIRE(r.series.size() == 2);
        CHECK(r.series.back().X == 100);
        CHECK(r.series.back().sum == expected);
        CHECK(r_alpha_sum(parse_poly("x^3+x^2-2*x-1"), 1.0, 10).galois);
        CHECK_THROWS_AS(r_alpha_sum(parse_poly("x^3-1"), 1.0, 10), DomainError);
        CHECK_THROWS_AS(r_alpha_sum(P, 0.0, 10), DomainError);
    }

    TEST_CASE("counts do not depend on the worker count") {
        const IntPoly P = parse_poly("x^3+2");
        const BinForm F = parse_form("x^3+2*z^3");
        std::vector<u64> seen;
        for (const char* w : {"1", "3"}) {
            setenv("SIEVECRAFT_THREADS", w, 1);
            CHECK(worker_count() == unsigned(std::atoi(w)));
            seen.push_back(count_powerfree_values(P, 50000).observed);
            seen.push_back(count_squarefree_form(F, 60).observed);
            seen.push_back(delta_census_univ(P, 20000));
            seen.push_back(delta_census_form(F, 60).count);
        }
        unsetenv("SIEVECRAFT_THREADS");
        CHECK(std::equal(seen.begin(), seen.begin() + 4, seen.begin() + 4));
    }
}
