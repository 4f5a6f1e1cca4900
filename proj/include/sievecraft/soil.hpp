#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sievecraft/poly.hpp"

namespace sievecraft::soil {

using u64 = std::uint64_t;
using u128 = unsigned __int128;
using Complex = std::complex<double>;

// Sorted, duplicate-free list of label indices into SoilSpec::weights.
using Subset = std::vector<std::uint32_t>;

// Finite soil (P, A, r, f) with multiplicative weight h. Elements of A are 0..r.size()-1.
struct SoilSpec {
    std::vector<u64> weights;         // h({p}) >= 2 per label
    std::vector<std::string> labels;  // optional display names, empty or one per label
    std::vector<Subset> r;            // bad labels of each element
    std::function<Complex(std::size_t, const Subset&)> f;
};

// Throws ShapeError on malformed input.
void validate(const SoilSpec& soil);

// h(d), saturating at the largest u128.
u128 weight(const SoilSpec& soil, const Subset& d);

struct SieveBoundConstants {
    double X = 0.0;
    double C0 = 0.0, C1 = 0.0, C2 = 0.0, C3 = 0.0, C4 = 0.0;
    u64 M0 = 0;
    // g(d1, d2) for d2 within d1.
    std::function<Complex(const Subset&, const Subset&)> g;
    // When set, g(d, {}) is the product of these per-label values and g(d, d') = 0 for d' nonempty.
    std::optional<std::vector<Complex>> multiplicative_g;

    Complex g_value(const Subset& d1, const Subset& d2) const;
};

struct HypothesisCheck {
    bool ok = true;
    std::string failure;  // first violated condition
};

// Evaluator that caches f on every subset of every r(a) and its Moebius transform.
class SoilEvaluator {
public:
    explicit SoilEvaluator(SoilSpec soil);

    const SoilSpec& spec() const { return soil_; }

    Complex direct_sum() const;
    Complex A_sum(const Subset& d1, const Subset& d2) const;
    u64 S_count(const Subset& d) const;
    Complex truncated_estimate(u64 M) const;
    double ridd_bound(u64 M) const;
    double f_max() const { return f_max_; }

    // Sorted values of M at which truncated_estimate or ridd_bound may change; M = 1 included.
    std::vector<u64> critical_levels() const;

    HypothesisCheck check_hypotheses(const SieveBoundConstants& K) const;
    Complex yugo_main_term(const SieveBoundConstants& K) const;
    double yugo_bound(const SieveBoundConstants& K, u64 M) const;

private:
    struct Element {
        std::vector<u64> local_weights;  // weights of r(a) in r(a) order
        std::vector<unsigned> by_weight;  // local indices sorted by weight
        std::vector<Complex> f;           // f(a, subset) indexed by local mask
        std::vector<Complex> moebius;     // sum over d' within mask of mu(mask - d') f(a, d')
    };

    template <class Visit>
    void for_each_local(const Element& e, u128 limit, Visit&& visit) const;
    template <class Visit>
    void for_each_global(u128 limit, Visit&& visit) const;
    std::optional<u64> local_mask(std::size_t a, const Subset& d) const;

    SoilSpec soil_;
    std::vector<Element> elements_;
    std::vector<std::vector<std::uint32_t>> holders_;  // elements whose r contains each label
    std::vector<unsigned> label_order_;               // labels sorted by weight
    double f_max_ = 0.0;
};

Complex direct_sum(const SoilSpec& soil);
Complex A_sum(const SoilSpec& soil, const Subset& d1, const Subset& d2);
u64 S_count(const SoilSpec& soil, const Subset& d);
Complex truncated_estimate(const SoilSpec& soil, u64 M);
double ridd_bound(const SoilSpec& soil, u64 M);
double yugo_bound(const SoilSpec& soil, const SieveBoundConstants& K, u64 M);

// Soil on A = {1..N} with labels the primes p, p^m <= max |P(a)|, r(a) = {p : p^m | P(a)},
// h({p}) = p^m and f(a, d) = 1 exactly when d is empty. Element i stands for a = i + 1.
SoilSpec polynomial_soil(const IntPoly& P, u64 N, unsigned m = 2);

// Constants for polynomial_soil: X = N, g(d, {}) = l(h(d)), C1 = C2 = max_p l(p^m), C0 = C3 = 1.
SieveBoundConstants polynomial_soil_constants(const IntPoly& P, const SoilSpec& soil, u64 N, unsigned m = 2);

struct RandomSoilOptions {
    std::size_t max_elements = 500;
    unsigned max_labels = 6;
    u64 max_weight = 64;
};

// |A| uniform in [1, max_elements], |P| uniform in [1, max_labels], weights uniform in
// [2, max_weight], each label in r(a) with probability 1/2, and f(a, d) a multiple of (1 + i) / 8
// scaled into the closed unit disc. Deterministic in `seed`.
SoilSpec random_soil(u64 seed, const RandomSoilOptions& options = {});

// Constants under which (A1)/(A2) hold on the given soil with zero residuals: X = |A|,
// g(d1, d2) = h(d1) A_{d1,d2} / X, C0 = 1, C1 = C2 the least base covering every S_d, C3 = max |f|,
// C4 = max |g|, M0 = h(P). At most 12 labels.
SieveBoundConstants exact_constants(const SoilEvaluator& ev);

struct SieveCheckReport {
    u64 soils = 0;
    u64 levels = 0;                // (soil, M) pairs checked against ridd_bound
    u64 ridd_violations = 0;
    double worst_ridd_ratio = 0.0;  // largest |direct - truncated| / bound with bound > 0
    u64 yugo_soils = 0;             // soils whose constants passed check_hypotheses
    u64 yugo_levels = 0;
    u64 yugo_violations = 0;
    double worst_yugo_ratio = 0.0;
    std::vector<std::string> failures;  // the first few violations

    void merge(const SieveCheckReport& other);
};

// Checks |direct - truncated(M)| <= ridd_factor * ridd_bound(M) at every critical level, and the
// yugo_bound at every critical level up to M0 when K is given and passes check_hypotheses.
SieveCheckReport sieve_check(const SoilEvaluator& ev, const SieveBoundConstants* K, double ridd_factor = 1.0,
                             const std::string& tag = {});

struct PolynomialSoilCase {
    IntPoly P;
    u64 N;
};

// Square-free P of degree 1..3 with coefficients in [-9, 9] and no zero on [1, N], N in [50, 300].
PolynomialSoilCase random_polynomial_case(u64 seed);

// random_soil(seed + i) for i < random_soils with exact_constants, then random_polynomial_case(seed + i)
// for i < polynomial_soils with polynomial_soil_constants.
SieveCheckReport sieve_suite(u64 seed, unsigned random_soils, unsigned polynomial_soils, double ridd_factor = 1.0);

}  // namespace sievecraft::soil
