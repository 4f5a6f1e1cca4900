#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace sievecraft {

using BigInt = mpz_class;
using Rational = mpq_class;

// Integer polynomial; coefficient i multiplies x^i. The zero polynomial has no coefficients.
class IntPoly {
public:
    IntPoly() = default;
    explicit IntPoly(std::vector<BigInt> coeffs);
    IntPoly(std::initializer_list<long> coeffs);

    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }
    const std::vector<BigInt>& coeffs() const { return c_; }
    BigInt coeff(int i) const { return (i >= 0 && i < static_cast<int>(c_.size())) ? c_[i] : BigInt(0); }
    const BigInt& lead() const { return c_.back(); }

    friend bool operator==(const IntPoly& a, const IntPoly& b) { return a.c_ == b.c_; }
    friend IntPoly operator+(const IntPoly& a, const IntPoly& b);
    friend IntPoly operator-(const IntPoly& a, const IntPoly& b);
    friend IntPoly operator*(const IntPoly& a, const IntPoly& b);
    friend IntPoly operator*(const BigInt& k, const IntPoly& a);

private:
    void trim();
    std::vector<BigInt> c_;
};

// Binary form f(x, z) = sum_i a_i x^i z^(d - i).
class BinForm {
public:
    BinForm(int degree, std::vector<BigInt> coeffs);
    BinForm(int degree, std::initializer_list<long> coeffs);

    int degree() const { return d_; }
    const std::vector<BigInt>& coeffs() const { return a_; }
    const BigInt& coeff(int i) const { return a_.at(i); }

    IntPoly at_z_one() const;  // f(x, 1)
    IntPoly at_x_one() const;  // f(1, z) as a polynomial in z

    friend bool operator==(const BinForm& a, const BinForm& b) { return a.d_ == b.d_ && a.a_ == b.a_; }

private:
    int d_;
    std::vector<BigInt> a_;
};

enum class PolyKind { univariate, form };

IntPoly parse_poly(std::string_view text);
BinForm parse_form(std::string_view text);
std::variant<IntPoly, BinForm> parse(std::string_view text, PolyKind kind);

std::string to_string(const IntPoly& p);
std::string to_string(const BinForm& f);

BigInt eval(const IntPoly& p, const BigInt& x);
BigInt eval_form(const BinForm& f, const BigInt& x, const BigInt& z);

IntPoly derivative(const IntPoly& p);
BigInt content(const IntPoly& p);        // nonnegative gcd of coefficients
IntPoly primitive_part(const IntPoly& p);  // sign normalised to a positive leading coefficient

// p = q * d exactly over the integers; returns false when d does not divide p.
bool exact_divide(const IntPoly& p, const IntPoly& d, IntPoly* q);

// Primitive gcd over the rationals with positive leading coefficient.
IntPoly gcd(const IntPoly& a, const IntPoly& b);

// Polynomial q(x) = p(x + shift).
IntPoly taylor_shift(const IntPoly& p, const BigInt& shift);

BigInt resultant(const IntPoly& a, const IntPoly& b);
// (-1)^(d(d-1)/2) Res(P, P') / lead(P).
BigInt discriminant(const IntPoly& p);
// Homogeneous discriminant, invariant under SL2(Z) changes of variable.
BigInt discriminant(const BinForm& f);
BigInt form_content(const BinForm& f);

bool is_squarefree_poly(const IntPoly& p);
bool is_squarefree_poly(const BinForm& f);

struct RationalFactorization {
    BigInt unit;  // signed content
    std::vector<std::pair<IntPoly, unsigned>> factors;  // primitive irreducibles, positive leads

    int deg_irr() const;
    IntPoly expand() const;
};

RationalFactorization factor_rational(const IntPoly& p);
bool is_irreducible(const IntPoly& p);

}  // namespace sievecraft
