#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>

#include "sievecraft/lattice.hpp"
#include "sievecraft/poly.hpp"

namespace sievecraft::avgprod {

using u64 = std::uint64_t;
using i64 = std::int64_t;
using Complex = std::complex<double>;

inline constexpr unsigned kValuationCap = 24;

// Exact complex number with rational parts.
struct CRational {
    Rational re = 0;
    Rational im = 0;

    CRational() = default;
    CRational(Rational r) : re(std::move(r)) {}
    CRational(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}
    CRational(long r) : re(r) {}

    Complex to_complex() const { return {re.get_d(), im.get_d()}; }
    friend bool operator==(const CRational& a, const CRational& b) { return a.re == b.re && a.im == b.im; }
    friend CRational operator+(const CRational& a, const CRational& b) {
        return {Rational(a.re + b.re), Rational(a.im + b.im)};
    }
    friend CRational operator-(const CRational& a, const CRational& b) {
        return {Rational(a.re - b.re), Rational(a.im - b.im)};
    }
    friend CRational operator*(const CRational& a, const CRational& b) {
        return {Rational(a.re * b.re - a.im * b.im), Rational(a.re * b.im + a.im * b.re)};
    }
};

// Value of u_p at arguments with residue `t` and valuation j = v_p(value). For polynomials t is
// x mod p; for forms t is x / y mod p, with t = p standing for y = 0 mod p.
using Rule = std::function<CRational(u64 p, u64 t, unsigned j)>;

// A family (u_p) of local factors. The generic rule is consulted only where j >= 2, so
// u_p = 1 wherever p^2 does not divide the value. An override replaces u_p for one prime on
// every (t, j), j >= 0, and is exempt from that restriction. Rules must be thread-safe.
struct LocalFactorFamily {
    std::string name;
    Rule rule;
    std::map<u64, Rule> overrides;
    // Bound for |1 - u_{q_1}(x) ... u_{q_k}(x)| over any finite set of primes; at most 2.
    double max_deviation = 2.0;
    // Contribution of arguments where the value vanishes; unset makes such arguments an error.
    std::optional<Complex> zero_value;
};

LocalFactorFamily constant_family();
// u_p = 0 where p^2 divides the value.
LocalFactorFamily squarefree_indicator();
// u_p = (-1)^j where p^2 divides the value, j the valuation.
LocalFactorFamily parity_family();

struct LocalIntegral {
    CRational value;
    Rational slack = 0;  // bound for the error from treating valuations >= kValuationCap alike
};

// Integral of u_p over Z_p.
LocalIntegral local_integral(const IntPoly& P, const LocalFactorFamily& u, u64 p);
// Integral of u_p over {x = residue mod p^e}.
LocalIntegral local_integral_in_class(const IntPoly& P, const LocalFactorFamily& u, u64 p, const BigInt& residue,
                                      unsigned e);
// Integral of u_p over the pairs of L (x) Z_p with p not dividing both coordinates.
LocalIntegral local_integral_form(const BinForm& F, const LocalFactorFamily& u, u64 p,
                                  const lattice::Lattice2& L = lattice::Lattice2());

struct TruncatedProduct {
    u64 bound = 0;
    CRational value;    // product of local integrals over p <= bound
    Rational slack = 0;  // sum of the local slacks
};

TruncatedProduct truncated_product(const IntPoly& P, const LocalFactorFamily& u, u64 B);

enum class MultiplierKind { Progression, LatticeCoset, MobiusExperimental, Custom };

std::string to_string(MultiplierKind k);

struct Progression {
    u64 residue = 0;
    u64 modulus = 1;
};

struct MultiplierSpec {
    MultiplierKind kind = MultiplierKind::Custom;
    std::function<Complex(u64 n)> weight;  // |weight| <= 1
    std::optional<Progression> progression;  // required for the progression kind
};

MultiplierSpec progression_multiplier(u64 residue, u64 modulus);
MultiplierSpec mobius_multiplier();

struct AverageReport {
    std::string family;
    std::string multiplier;  // empty without a multiplier
    u64 N = 0;
    u64 B = 0;
    u64 domain_size = 0;   // N, or coprime pairs in the box and sector
    u64 zero_values = 0;
    Complex empirical;
    bool has_prediction = true;
    Complex predicted;     // product of local integrals over p <= B
    double truncation_slack = 0.0;
    double tail_slack = 0.0;   // bound for the effect of the primes p > B on the product
    u64 delta_count = 0;       // arguments with q^2 | value for a prime q > B
    double delta_term = 0.0;   // max_deviation * delta_count / domain_size
    double seconds = 0.0;

    double discrepancy() const { return std::abs(empirical - predicted); }
    double slack() const { return truncation_slack + tail_slack + delta_term; }
    bool within_slack() const { return has_prediction && discrepancy() <= slack(); }
    double predicted_lo() const { return predicted.real() - truncation_slack - tail_slack; }
    double predicted_hi() const { return predicted.real() + truncation_slack + tail_slack; }
};

// (1/N) sum_{n <= N} prod_p u_p(n) against the product of local integrals over p <= B.
// Override primes must not exceed B.
AverageReport empirical_average(const IntPoly& P, const LocalFactorFamily& u, u64 N, u64 B = 1000);

// (1/N) sum_{n <= N} s(n) prod_p u_p(n). The progression kind also gets the product of the
// integrals against the restricted measures; other kinds get no prediction.
AverageReport average_with_multiplier(const IntPoly& P, const LocalFactorFamily& u, const MultiplierSpec& s, u64 N,
                                      u64 B = 1000);

struct FormAverageOptions {
    lattice::Sector sector;
    // Multiplier: indicator of this lattice. The primes dividing its index must not exceed B.
    std::optional<lattice::Lattice2> lattice;
    u64 B = 1000;
};

// Average of [multiplier] prod_p u_p(x, y) over the coprime pairs in [-N, N]^2 within the sector,
// against prod_{p <= B} of the local integrals divided by 1 - p^-2. Throws DomainError when the
// domain is empty.
AverageReport empirical_average_form(const BinForm& F, const LocalFactorFamily& u, u64 N,
                                     const FormAverageOptions& options = {});

}  // namespace sievecraft::avgprod
