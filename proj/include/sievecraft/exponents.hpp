#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sievecraft/poly.hpp"

namespace sievecraft::exponents {

inline constexpr int kDegree = 6;

// Permutation of {0..5}; perm[i] is the image of i.
using Perm = std::array<std::uint8_t, kDegree>;

Perm identity_perm();
// Cycle notation on {1..6}, e.g. "(135)(246)"; "()" or "" is the identity.
Perm parse_cycles(std::string_view text);
std::string to_cycles(const Perm& p);
// (a * b)(i) = a(b(i))
Perm compose(const Perm& a, const Perm& b);
Perm inverse(const Perm& p);
int cycle_count(const Perm& p);
bool has_fixed_point(const Perm& p);

struct PermGroup {
    std::string name;
    std::vector<std::string> generators;  // cycle notation
    std::vector<Perm> elements;           // sorted

    std::size_t order() const { return elements.size(); }
    bool is_transitive() const;
    bool contains(const Perm& p) const;
};

PermGroup closure(const std::vector<Perm>& generators, std::string name = {});
PermGroup closure_from_cycles(const std::vector<std::string>& generators, std::string name = {});

// Exponent of the Kabatiansky-Levenshtein bound at angle theta (degrees), 0 < theta <= 90.
double kl_bound(double theta_degrees);
// kl_bound at 60 degrees in closed form.
double alpha_constant();

// coefficients[k] multiplies 2^(k alpha), k = 0..4.
struct DeltaFormula {
    std::array<Rational, 5> coefficients;
    double evaluate(double alpha) const;
};

// (1/|G|) * sum over elements with a fixed point of 2^(alpha (n - 2)), n the number of cycles.
DeltaFormula delta_formula(const PermGroup& G);
double delta_exponent(const PermGroup& G, double alpha);
double beta_sextic(const PermGroup& G);

double beta_cubic(bool discriminant_is_square, double alpha);
double beta_cubic(bool discriminant_is_square);
double taube_exponent(bool galois, double alpha);

struct QuinticExponents {
    double beta;      // root in (0, 2) of 2 b^2 - 15 b + 14
    double exponent;  // (5 - beta) / 2
    double residual;  // |2 beta^2 - 15 beta + 14|
};
QuinticExponents quintic_exponents();

struct CatalogEntry {
    PermGroup group;
    std::array<Rational, 5> expected;  // tabulated coefficient row
    double expected_delta;             // tabulated delta, truncated to 4 decimals
    double expected_beta;              // tabulated beta, truncated to 4 decimals
};

// The sixteen transitive groups of degree 6 in the order of the tables. Throws std::logic_error
// when any group fails its order, transitivity or coefficient-row check.
const std::vector<CatalogEntry>& catalog();

// First 4 decimals of v, as a double.
double truncate4(double v);

}  // namespace sievecraft::exponents
