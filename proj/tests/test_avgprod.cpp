#include <doctest.h>

#include <cmath>
#include <numbers>
#include <numeric>

#include "oracles.hpp"
#include "sievecraft/avgprod.hpp"
#include "sievecraft/census.hpp"
#include "sievecraft/errors.hpp"
#include "sievecraft/eulerprod.hpp"
#include "sievecraft/localdens.hpp"
#include "sievecraft/numutil.hpp"

using namespace sievecraft;
using namespace sievecraft::avgprod;

namespace {

const double kSixOverPiSq = 6.0 / (std::numbers::pi * std::numbers::pi);

// A rule depending on both the residue and the valuation, with |u| <= 1.
CRational mixed_value(u64 t, unsigned j) {
    return CRational(Rational(static_cast<long>((t + j) % 3) - 1, 2), Rational(static_cast<long>(j % 2), 3));
}

LocalFactorFamily mixed_family() {
    LocalFactorFamily u;
    u.name = "mixed";
    u.rule = [](u64, u64 t, unsigned j) { return mixed_value(t, j); };
    return u;
}

// Mean of u over x mod p^K, with valuations >= K treated as K. Off by at most twice the mass
// of {v >= K} from the true integral.
Complex brute_integral(const IntPoly& P, const LocalFactorFamily& u, u64 p, unsigned K) {
    const u64 q = localdens::prime_power(p, K).get_ui();
    Complex sum = 0;
    for (u64 x = 0; x < q; ++x) {
        const BigInt v = eval(P, BigInt(x));
        unsigned j = v == 0 ? K : std::min(K, oracle::valuation(v, p));
        const auto it = u.overrides.find(p);
        if (it != u.overrides.end()) sum += it->second(p, x % p, j).to_complex();
        else sum += j >= 2 ? u.rule(p, x % p, j).to_complex() : Complex(1.0);
    }
    return sum / double(q);
}

Complex brute_integral_form(const BinForm& F, const LocalFactorFamily& u, u64 p, unsigned K,
                            const lattice::Lattice2& L) {
    const u64 q = localdens::prime_power(p, K).get_ui();
    Complex sum = 0;
    for (u64 x = 0; x < q; ++x)
        for (u64 y = 0; y < q; ++y) {
            if (x % p == 0 && y % p == 0) continue;
            if (!L.contains(i64(x), i64(y))) continue;
            const BigInt v = eval_form(F, BigInt(x), BigInt(y));
            const unsigned j = v == 0 ? K : std::min(K, oracle::valuation(v, p));
            const u64 t = y % p == 0 ? p : (x % p) * numutil::invmod(y % p, p) % p;
            sum += j >= 2 ? u.rule(p, t, j).to_complex() : Complex(1.0);
        }
    return sum / (double(q) * double(q));
}

double mass_at_least(const IntPoly& P, u64 p, unsigned K) {
    return localdens::count_roots_mod_pk(P, p, K).get_d() / localdens::prime_power(p, K).get_d();
}

}  // namespace

TEST_SUITE("avgprod") {
    TEST_CASE("constant family") {
        const IntPoly P = parse_poly("x^3+2");
        CHECK(local_integral(P, constant_family(), 7).value == CRational(1));
        const AverageReport r = empirical_average(P, constant_family(), 1000, 100);
        CHECK(r.empirical == Complex(1.0));
        CHECK(r.predicted == Complex(1.0));
        CHECK(r.within_slack());
        const AverageReport f = empirical_average_form(parse_form("x^3+2*z^3"), constant_family(), 30);
        CHECK(std::abs(f.empirical - 1.0) < 1e-15);
    }

    TEST_CASE("square-free indicator matches the Euler factors") {
        oracle::Rng rng(121);
        for (int i = 0; i < 10; ++i) {
            const IntPoly P = oracle::random_squarefree_poly(rng, 4, 12);
            for (std::uint32_t p : numutil::primes_up_to(50)) {
                const LocalIntegral li = local_integral(P, squarefree_indicator(), p);
                Rational expected = 1 - Rational(localdens::count_roots_mod_pk(P, p, 2), p * p);
                expected.canonicalize();
                REQUIRE(li.value == CRational(expected));
                REQUIRE(li.slack < Rational(1, 1000000));
            }
            const TruncatedProduct tp = truncated_product(P, squarefree_indicator(), 200);
            REQUIRE(tp.value == CRational(eulerprod::density_univ(P, 200).truncated));
        }
    }

    TEST_CASE("parity of the 2-adic valuation of x") {
        LocalFactorFamily u = constant_family();
        u.name = "parity at 2";
        u.overrides[2] = [](u64, u64, unsigned j) { return CRational(j % 2 == 0 ? 1 : -1); };
        const LocalIntegral li = local_integral(parse_poly("x"), u, 2);
        CHECK(li.value.im == 0);
        CHECK(abs(li.value.re - Rational(1, 3)) <= li.slack);
        CHECK(li.slack < Rational(1, 1000000));
        CHECK(li.value.re == Rational(2796203, 8388608));
    }

    TEST_CASE("local integrals agree with residue enumeration") {
        oracle::Rng rng(122);
        const LocalFactorFamily u = mixed_family();
        for (int i = 0; i < 12; ++i) {
            const IntPoly P = oracle::random_squarefree_poly(rng, 3, 9);
            for (u64 p : {2, 3, 5, 7}) {
                unsigned K = 1;
                while (localdens::prime_power(p, K + 1) <= 60000) ++K;
                const LocalIntegral li = local_integral(P, u, p);
                const double err = std::abs(li.value.to_complex() - brute_integral(P, u, p, K));
                REQUIRE(err <= 2 * mass_at_least(P, p, K) + li.slack.get_d() + 1e-12);
            }
        }
    }

    TEST_CASE("class integrals partition the full integral") {
        const IntPoly P = parse_poly("x^2+7");
        const LocalFactorFamily u = mixed_family();
        for (u64 p : {2, 3, 7}) {
            CRational total;
            for (u64 r = 0; r < p * p; ++r) total = total + local_integral_in_class(P, u, p, BigInt(r), 2).value;
            const CRational full = local_integral(P, u, p).value;
            CHECK(std::abs(total.to_complex() - full.to_complex()) < 1e-6);
        }
    }

    TEST_CASE("form local integrals agree with pair enumeration") {
        oracle::Rng rng(123);
        const LocalFactorFamily u = mixed_family();
        for (int i = 0; i < 8; ++i) {
            const BinForm F = oracle::random_squarefree_form(rng, 3, 6);
            for (u64 p : {2, 3, 5}) {
                unsigned K = 1;
                while (localdens::prime_power(p, K + 1) <= 130) ++K;
                const i64 q = localdens::prime_power(p, K).get_si();
                for (const lattice::Lattice2& L :
                     {lattice::Lattice2(), lattice::from_congruence(1, i64(p)), lattice::from_congruence(0, q)}) {
                    const LocalIntegral li = local_integral_form(F, u, p, L);
                    const Complex brute = brute_integral_form(F, u, p, K, L);
                    // Slack for the pairs with p^K | F, whose valuation the enumeration cannot resolve.
                    const double tol = 2.0 * 2 * F.degree() / double(q) + li.slack.get_d() + 1e-12;
                    REQUIRE(std::abs(li.value.to_complex() - brute) <= tol);
                }
                const LocalIntegral one = local_integral_form(F, constant_family(), p);
                REQUIRE(one.value == CRational(1 - Rational(1, p * p)));
            }
        }
    }

    TEST_CASE("square-free indicator average") {
        const u64 N = 100000;
        const AverageReport r = empirical_average(parse_poly("x"), squarefree_indicator(), N);
        CHECK(r.empirical.real() == double(numutil::squarefree_table(N).count()) / double(N));
        CHECK(std::abs(r.empirical.real() / r.predicted.real() - 1) < 0.01);
        CHECK(std::abs(r.predicted.real() - kSixOverPiSq) < 0.001);
        CHECK(r.within_slack());
    }

    TEST_CASE("parity family average") {
        const u64 N = 100000;
        const AverageReport r = empirical_average(parse_poly("x"), parity_family(), N);
        double direct = 0;
        for (u64 n = 1; n <= N; ++n) {
            int sign = 1;
            u64 m = n;
            for (u64 p = 2; p * p <= m; ++p) {
                unsigned j = 0;
                while (m % p == 0) {
                    m /= p;
                    ++j;
                }
                if (j >= 2 && j % 2) sign = -sign;
            }
            direct += sign;
        }
        CHECK(r.empirical.real() == doctest::Approx(direct / double(N)).epsilon(1e-12));
        CHECK(std::abs(r.empirical.real() / r.predicted.real() - 1) < 0.02);
    }

    TEST_CASE("the three-term inequality at small scale") {
        for (const char* s : {"x^2+1", "x^3+2", "2*x^2+x+5"}) {
            for (const LocalFactorFamily& u : {squarefree_indicator(), parity_family()}) {
                const IntPoly P = parse_poly(s);
                const AverageReport r = empirical_average(P, u, 20000, 300);
                CHECK(r.delta_count == census::delta_census_univ(P, 20000, 300));
                CHECK(r.within_slack());
            }
        }
    }

    TEST_CASE("override primes") {
        LocalFactorFamily u = squarefree_indicator();
        u.overrides[1009] = [](u64, u64, unsigned) { return CRational(1); };
        CHECK_THROWS_AS(empirical_average(parse_poly("x"), u, 100, 1000), DomainError);
        CHECK_THROWS_AS(local_integral(parse_poly("x^2"), u, 3), DomainError);
        CHECK_THROWS_AS(local_integral(parse_poly("x"), u, 4), DomainError);
    }

    TEST_CASE("multipliers") {
        const IntPoly P = parse_poly("x");
        const u64 N = 100000;
        const AverageReport plain = empirical_average(P, squarefree_indicator(), N);
        const AverageReport all = average_with_multiplier(P, squarefree_indicator(), progression_multiplier(0, 1), N);
        CHECK(all.empirical == plain.empirical);
        CHECK(all.predicted == plain.predicted);

        const AverageReport third = average_with_multiplier(P, squarefree_indicator(), progression_multiplier(1, 3), N);
        const numutil::SquarefreeTable t = numutil::squarefree_table(N);
        u64 hits = 0;
        for (u64 n = 1; n <= N; n += 3) hits += t.test(n);
        CHECK(third.empirical.real() == double(hits) / double(N));
        CHECK(std::abs(third.predicted.real() - kSixOverPiSq * 9.0 / 8.0 / 3.0) < 0.001);
        CHECK(std::abs(third.empirical.real() / third.predicted.real() - 1) < 0.01);
        CHECK_THROWS_AS(progression_multiplier(3, 3), DomainError);

        const std::vector<int> mu = oracle::mobius_table(N);
        const AverageReport m = average_with_multiplier(P, constant_family(), mobius_multiplier(), N);
        CHECK_FALSE(m.has_prediction);
        CHECK_FALSE(m.within_slack());
        CHECK(m.empirical.real() == doctest::Approx(std::accumulate(mu.begin(), mu.end(), 0.0) / double(N)));
    }

    TEST_CASE("form averages") {
        const BinForm F = parse_form("x*z");
        const u64 N = 200;
        const AverageReport r = empirical_average_form(F, squarefree_indicator(), N);
        const census::CensusReport c = census::count_squarefree_form(F, N);
        u64 pairs = 0;
        for (i64 x = -i64(N); x <= i64(N); ++x)
            for (i64 y = -i64(N); y <= i64(N); ++y) pairs += std::gcd(x, y) == 1;
        CHECK(r.domain_size == pairs);
        CHECK(r.empirical.real() == double(c.observed) / double(pairs));
        CHECK(r.empirical.real() == 45956.0 / 97856.0);

        FormAverageOptions o;
        o.lattice = lattice::Lattice2(4, 2, 2);
        CHECK(empirical_average_form(F, squarefree_indicator(), 30, o).empirical == Complex(0.0));
        o.lattice = lattice::Lattice2(7919, 0, 1);
        CHECK_THROWS_AS(empirical_average_form(F, squarefree_indicator(), 30, o), DomainError);

        FormAverageOptions thin;
        thin.sector = lattice::Sector(lattice::Point{100, 1}, lattice::Point{99, 1});
        CHECK_THROWS_AS(empirical_average_form(F, squarefree_indicator(), 10, thin), DomainError);
    }

    TEST_CASE("lattice multiplier counts the right pairs") {
        const BinForm F = parse_form("x^3+2*z^3");
        FormAverageOptions o;
        o.lattice = lattice::from_congruence(2, 5);
        const i64 N = 40;
        const AverageReport r = empirical_average_form(F, squarefree_indicator(), N, o);
        u64 pairs = 0, hits = 0;
        for (i64 x = -N; x <= N; ++x)
            for (i64 y = -N; y <= N; ++y) {
                if (std::gcd(x, y) != 1) continue;
                ++pairs;
                if (!o.lattice->contains(x, y)) continue;
                hits += oracle::squarefree_by_trial(
                    static_cast<u64>(std::abs(x * x * x + 2 * y * y * y)));
            }
        CHECK(r.domain_size == pairs);
        CHECK(r.empirical.real() == doctest::Approx(double(hits) / double(pairs)));
    }
}
