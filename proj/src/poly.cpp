#include "sievecraft/poly.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

#include "sievecraft/errors.hpp"
#include "sievecraft/numutil.hpp"

namespace sievecraft {

// ---------------------------------------------------------------- IntPoly

IntPoly::IntPoly(std::vector<BigInt> coeffs) : c_(std::move(coeffs)) { trim(); }

IntPoly::IntPoly(std::initializer_list<long> coeffs) {
    for (long v : coeffs) c_.emplace_back(v);
    trim();
}

void IntPoly::trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

IntPoly operator+(const IntPoly& a, const IntPoly& b) {
    std::vector<BigInt> c(std::max(a.c_.size(), b.c_.size()));
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = a.coeff(static_cast<int>(i)) + b.coeff(static_cast<int>(i));
    return IntPoly(std::move(c));
}

IntPoly operator-(const IntPoly& a, const IntPoly& b) {
    std::vector<BigInt> c(std::max(a.c_.size(), b.c_.size()));
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = a.coeff(static_cast<int>(i)) - b.coeff(static_cast<int>(i));
    return IntPoly(std::move(c));
}

IntPoly operator*(const IntPoly& a, const IntPoly& b) {
    if (a.is_zero() || b.is_zero()) return IntPoly();
    std::vector<BigInt> c(a.c_.size() + b.c_.size() - 1);
    for (std::size_t i = 0; i < a.c_.size(); ++i)
        for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
    return IntPoly(std::move(c));
}

IntPoly operator*(const BigInt& k, const IntPoly& a) {
    std::vector<BigInt> c(a.c_);
    for (auto& v : c) v *= k;
    return IntPoly(std::move(c));
}

// ---------------------------------------------------------------- BinForm

BinForm::BinForm(int degree, std::vector<BigInt> coeffs) : d_(degree), a_(std::move(coeffs)) {
    if (d_ < 0 || static_cast<int>(a_.size()) != d_ + 1)
        throw DomainError("BinForm: need exactly degree + 1 coefficients");
    if (std::all_of(a_.begin(), a_.end(), [](const BigInt& v) { return v == 0; }))
        throw DomainError("BinForm: form is identically zero");
}

BinForm::BinForm(int degree, std::initializer_list<long> coeffs)
    : BinForm(degree, std::vector<BigInt>(coeffs.begin(), coeffs.end())) {}

IntPoly BinForm::at_z_one() const { return IntPoly(a_); }

IntPoly BinForm::at_x_one() const { return IntPoly(std::vector<BigInt>(a_.rbegin(), a_.rend())); }

// ---------------------------------------------------------------- parsing

namespace {

struct Monomials {
    std::map<std::pair<int, int>, BigInt> terms;  // (deg x, deg second variable) -> coefficient
    char second_var = 0;
};

class Parser {
public:
    Parser(std::string_view text, bool allow_second) : allow_second_(allow_second) {
        // Normalise the Unicode minus sign to ASCII while keeping byte positions meaningful.
        for (std::size_t i = 0; i < text.size(); ++i) {
            if (i + 2 < text.size() && static_cast<unsigned char>(text[i]) == 0xE2 &&
                static_cast<unsigned char>(text[i + 1]) == 0x88 && static_cast<unsigned char>(text[i + 2]) == 0x92) {
                s_ += '-';
                pos_map_.push_back(i);
                i += 2;
                continue;
            }
            s_ += text[i];
            pos_map_.push_back(i);
        }
        pos_map_.push_back(text.size());
    }

    Monomials run() {
        skip_ws();
        if (at_end()) fail("empty polynomial");
        bool first = true;
        while (!at_end()) {
            int sign = 1;
            if (peek() == '+' || peek() == '-') {
                sign = peek() == '-' ? -1 : 1;
                ++i_;
                skip_ws();
            } else if (!first) {
                fail("expected '+' or '-'");
            }
            term(sign);
            first = false;
            skip_ws();
        }
        return std::move(out_);
    }

private:
    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_map_[std::min(i_, s_.size())]); }

    bool at_end() const { return i_ >= s_.size(); }
    char peek() const { return at_end() ? '\0' : s_[i_]; }
    void skip_ws() {
        while (!at_end() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
    }

    BigInt number() {
        std::size_t start = i_;
        while (!at_end() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
        if (start == i_) fail("expected integer");
        return BigInt(s_.substr(start, i_ - start));
    }

    unsigned long exponent() {
        skip_ws();
        if (peek() != '^') return 1;
        ++i_;
        skip_ws();
        BigInt e = number();
        if (e > 64) fail("exponent too large");
        return e.get_ui();
    }

    void term(int sign) {
        BigInt coeff = sign;
        int ex = 0, ez = 0;
        bool any = false;
        while (true) {
            skip_ws();
            char c = peek();
            if (any) {
                if (c == '*') {
                    ++i_;
                    skip_ws();
                    c = peek();
                } else if (!(is_var(c) && !at_end())) {
                    break;
                }
            }
            if (std::isdigit(static_cast<unsigned char>(c))) {
                BigInt v = number();
                unsigned long e = exponent();
                BigInt p;
                mpz_pow_ui(p.get_mpz_t(), v.get_mpz_t(), e);
                coeff *= p;
            } else if (c == 'x') {
                ++i_;
                ex += static_cast<int>(exponent());
            } else if (c == 'y' || c == 'z') {
                if (!allow_second_) fail(std::string("unexpected variable '") + c + "'");
                if (out_.second_var && out_.second_var != c) fail("forms may use only one of 'y' and 'z'");
                out_.second_var = c;
                ++i_;
                ez += static_cast<int>(exponent());
            } else {
                fail(at_end() ? "unexpected end of input" : std::string("unexpected character '") + c + "'");
            }
            any = true;
        }
        out_.terms[{ex, ez}] += coeff;
    }

    bool is_var(char c) const { return c == 'x' || c == 'y' || c == 'z'; }

    std::string s_;
    std::vector<std::size_t> pos_map_;
    std::size_t i_ = 0;
    bool allow_second_;
    Monomials out_;
};

}  // namespace

IntPoly parse_poly(std::string_view text) {
    Monomials m = Parser(text, false).run();
    int deg = 0;
    for (const auto& [e, c] : m.terms) deg = std::max(deg, e.first);
    std::vector<BigInt> coeffs(deg + 1);
    for (const auto& [e, c] : m.terms) coeffs[e.first] += c;
    return IntPoly(std::move(coeffs));
}

BinForm parse_form(std::string_view text) {
    Monomials m = Parser(text, true).run();
    int deg = -1;
    for (const auto& [e, c] : m.terms) {
        if (c == 0) continue;
        const int total = e.first + e.second;
        if (deg >= 0 && total != deg) throw ShapeError("form is not homogeneous");
        deg = total;
    }
    if (deg < 0) throw DomainError("form is identically zero");
    std::vector<BigInt> coeffs(deg + 1);
    for (const auto& [e, c] : m.terms)
        if (c != 0) coeffs[e.first] += c;
    return BinForm(deg, std::move(coeffs));
}

std::variant<IntPoly, BinForm> parse(std::string_view text, PolyKind kind) {
    if (kind == PolyKind::univariate) return parse_poly(text);
    return parse_form(text);
}

namespace {

std::string power(const char* var, int e) {
    if (e == 0) return "";
    if (e == 1) return var;
    return std::string(var) + "^" + std::to_string(e);
}

void append_term(std::string& out, const BigInt& c, const std::string& mono) {
    if (c == 0) return;
    BigInt mag = abs(c);
    if (out.empty()) {
        if (c < 0) out += "-";
    } else {
        out += c < 0 ? " - " : " + ";
    }
    if (mono.empty()) out += mag.get_str();
    else if (mag == 1) out += mono;
    else out += mag.get_str() + "*" + mono;
}

}  // namespace

std::string to_string(const IntPoly& p) {
    if (p.is_zero()) return "0";
    std::string out;
    for (int i = p.degree(); i >= 0; --i) append_term(out, p.coeff(i), power("x", i));
    return out;
}

std::string to_string(const BinForm& f) {
    std::string out;
    const int d = f.degree();
    for (int i = d; i >= 0; --i) {
        std::string mono = power("x", i);
        const std::string zpart = power("z", d - i);
        if (!zpart.empty()) mono = mono.empty() ? zpart : mono + "*" + zpart;
        append_term(out, f.coeff(i), mono);
    }
    return out;
}

// ---------------------------------------------------------------- arithmetic

BigInt eval(const IntPoly& p, const BigInt& x) {
    BigInt acc = 0;
    for (int i = p.degree(); i >= 0; --i) acc = acc * x + p.coeff(i);
    return acc;
}

BigInt eval_form(const BinForm& f, const BigInt& x, const BigInt& z) {
    BigInt acc = 0;
    BigInt zpow = 1;
    // Horner in x with the z powers accumulated from the low end.
    std::vector<BigInt> zp(f.degree() + 1);
    for (int i = 0; i <= f.degree(); ++i) {
        zp[i] = zpow;
        zpow *= z;
    }
    for (int i = f.degree(); i >= 0; --i) acc = acc * x + f.coeff(i) * zp[f.degree() - i];
    return acc;
}

IntPoly derivative(const IntPoly& p) {
    if (p.degree() < 1) return IntPoly();
    std::vector<BigInt> c(p.degree());
    for (int i = 1; i <= p.degree(); ++i) c[i - 1] = p.coeff(i) * i;
    return IntPoly(std::move(c));
}

BigInt content(const IntPoly& p) {
    BigInt g = 0;
    for (const auto& c : p.coeffs()) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
    return g;
}

IntPoly primitive_part(const IntPoly& p) {
    if (p.is_zero()) return p;
    BigInt g = content(p);
    if (p.lead() < 0) g = -g;
    std::vector<BigInt> c(p.coeffs());
    for (auto& v : c) mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), g.get_mpz_t());
    return IntPoly(std::move(c));
}

bool exact_divide(const IntPoly& p, const IntPoly& d, IntPoly* q) {
    if (d.is_zero()) throw DomainError("exact_divide: division by zero polynomial");
    std::vector<BigInt> r(p.coeffs());
    const int dd = d.degree();
    if (p.degree() < dd) {
        if (!p.is_zero()) return false;
        if (q) *q = IntPoly();
        return true;
    }
    std::vector<BigInt> quot(p.degree() - dd + 1);
    for (int i = p.degree(); i >= dd; --i) {
        if (r[i] == 0) continue;
        if (!mpz_divisible_p(r[i].get_mpz_t(), d.lead().get_mpz_t())) return false;
        BigInt t = r[i] / d.lead();
        quot[i - dd] = t;
        for (int j = 0; j <= dd; ++j) r[i - dd + j] -= t * d.coeff(j);
    }
    for (int i = 0; i < dd; ++i)
        if (r[i] != 0) return false;
    if (q) *q = IntPoly(std::move(quot));
    return true;
}

namespace {

// lead(b)^(deg a - deg b + 1) * a mod b
IntPoly pseudo_remainder(const IntPoly& a, const IntPoly& b) {
    std::vector<BigInt> r(a.coeffs());
    const int db = b.degree();
    const BigInt& lb = b.lead();
    for (int i = a.degree(); i >= db; --i) {
        const BigInt t = r[i];
        for (auto& v : r) v *= lb;
        for (int j = 0; j <= db; ++j) r[i - db + j] -= t * b.coeff(j);
        r[i] = 0;
    }
    r.resize(db);
    return IntPoly(std::move(r));
}

}  // namespace

IntPoly gcd(const IntPoly& a0, const IntPoly& b0) {
    IntPoly a = primitive_part(a0), b = primitive_part(b0);
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    if (a.degree() < b.degree()) std::swap(a, b);
    while (!b.is_zero()) {
        IntPoly r = primitive_part(pseudo_remainder(a, b));
        a = std::move(b);
        b = std::move(r);
    }
    return primitive_part(a);
}

IntPoly taylor_shift(const IntPoly& p, const BigInt& shift) {
    std::vector<BigInt> c(p.coeffs());
    const int n = p.degree();
    for (int i = 0; i < n; ++i)
        for (int j = n - 1; j >= i; --j) c[j] += shift * c[j + 1];
    return IntPoly(std::move(c));
}

namespace {

BigInt bareiss_determinant(std::vector<std::vector<BigInt>> m) {
    const std::size_t n = m.size();
    if (n == 0) return 1;
    BigInt prev = 1;
    int sign = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (m[k][k] == 0) {
            std::size_t swap_row = k + 1;
            while (swap_row < n && m[swap_row][k] == 0) ++swap_row;
            if (swap_row == n) return 0;
            std::swap(m[k], m[swap_row]);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j < n; ++j) {
                m[i][j] = m[i][j] * m[k][k] - m[i][k] * m[k][j];
                mpz_divexact(m[i][j].get_mpz_t(), m[i][j].get_mpz_t(), prev.get_mpz_t());
            }
        }
        prev = m[k][k];
    }
    return sign * m[n - 1][n - 1];
}

}  // namespace

BigInt resultant(const IntPoly& a, const IntPoly& b) {
    if (a.is_zero() || b.is_zero()) return 0;
    const int m = a.degree(), n = b.degree();
    if (m == 0 || n == 0) {
        BigInt r;
        if (m == 0) mpz_pow_ui(r.get_mpz_t(), a.lead().get_mpz_t(), n);
        else mpz_pow_ui(r.get_mpz_t(), b.lead().get_mpz_t(), m);
        return r;
    }
    const int size = m + n;
    std::vector<std::vector<BigInt>> s(size, std::vector<BigInt>(size));
    for (int row = 0; row < n; ++row)
        for (int i = 0; i <= m; ++i) s[row][row + (m - i)] = a.coeff(i);
    for (int row = 0; row < m; ++row)
        for (int i = 0; i <= n; ++i) s[n + row][row + (n - i)] = b.coeff(i);
    return bareiss_determinant(std::move(s));
}

BigInt discriminant(const IntPoly& p) {
    if (p.degree() < 1) throw DomainError("discriminant: degree must be at least 1");
    const int d = p.degree();
    BigInt r = resultant(p, derivative(p));
    mpz_divexact(r.get_mpz_t(), r.get_mpz_t(), p.lead().get_mpz_t());
    if ((d * (d - 1) / 2) % 2) r = -r;
    return r;
}

BigInt form_content(const BinForm& f) { return content(f.at_z_one()); }

BigInt discriminant(const BinForm& f) {
    const int d = f.degree();
    if (d < 1) throw DomainError("discriminant: form degree must be at least 1");
    // Substitute z -> z + t x with F(1, t) != 0, so the x^d coefficient becomes nonzero.
    const IntPoly fz = f.at_x_one();
    long t = 0;
    for (long k = 0;; ++k) {
        t = (k % 2 == 0) ? k / 2 : -(k + 1) / 2;
        if (eval(fz, t) != 0) break;
    }
    IntPoly g;
    const IntPoly lin{1, t};  // 1 + t x
    for (int i = 0; i <= d; ++i) {
        IntPoly term{1};
        for (int j = 0; j < d - i; ++j) term = term * lin;
        std::vector<BigInt> shift(i + 1);
        shift[i] = f.coeff(i);
        g = g + IntPoly(std::move(shift)) * term;
    }
    return discriminant(g);
}

bool is_squarefree_poly(const IntPoly& p) {
    if (p.is_zero()) throw DomainError("is_squarefree_poly: zero polynomial");
    if (p.degree() == 0) return true;
    return gcd(p, derivative(p)).degree() == 0;
}

bool is_squarefree_poly(const BinForm& f) {
    return is_squarefree_poly(f.at_z_one()) && is_squarefree_poly(f.at_x_one());
}

// ---------------------------------------------------------------- factoring

int RationalFactorization::deg_irr() const {
    int d = 0;
    for (const auto& [f, m] : factors) d = std::max(d, f.degree());
    return d;
}

IntPoly RationalFactorization::expand() const {
    IntPoly out{1};
    for (const auto& [f, m] : factors)
        for (unsigned i = 0; i < m; ++i) out = out * f;
    return unit * out;
}

namespace {

constexpr int kMaxKroneckerDegree = 8;

std::vector<numutil::u64> divisors(numutil::u64 n) {
    std::vector<numutil::u64> out{1};
    const numutil::Factorization f = numutil::factorize_abs(n);
    auto extend = [&](numutil::u64 p, unsigned e) {
        const std::size_t base = out.size();
        numutil::u64 pk = 1;
        for (unsigned k = 1; k <= e; ++k) {
            pk *= p;
            for (std::size_t i = 0; i < base; ++i) out.push_back(out[i] * pk);
        }
    };
    for (const auto& pe : f.factors) extend(pe.prime, pe.exponent);
    if (f.has_opaque()) throw ResourceError("factor_rational: evaluation value has an unsplit semiprime part");
    std::sort(out.begin(), out.end());
    return out;
}

// Factor of degree s of the primitive square-free polynomial f, if one exists.
bool kronecker_find(const IntPoly& f, int s, IntPoly* found) {
    struct Point {
        long a;
        BigInt value;
        std::vector<numutil::u64> divs;
    };
    std::vector<Point> candidates;
    for (long k = 0; k <= 160 && static_cast<int>(candidates.size()) < 4 * (s + 1) + 8; ++k) {
        const long a = (k % 2 == 0) ? k / 2 : -(k + 1) / 2;
        const BigInt v = eval(f, a);
        if (v == 0) {
            if (s == 1) {
                *found = IntPoly{-a, 1};
                return true;
            }
            continue;
        }
        const BigInt mag = abs(v);
        if (mag.get_str().size() > 18) continue;
        const numutil::u64 m = std::stoull(mag.get_str());
        try {
            candidates.push_back({a, v, divisors(m)});
        } catch (const ResourceError&) {
        }
    }
    if (static_cast<int>(candidates.size()) < s + 1)
        throw ResourceError("factor_rational: not enough usable evaluation points");
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Point& x, const Point& y) { return x.divs.size() < y.divs.size(); });
    candidates.resize(s + 1);

    // Lagrange basis with a common denominator: g = (sum_i e_i (D / D_i) N_i) / D.
    const int n = s + 1;
    std::vector<std::vector<BigInt>> basis(n);
    BigInt common = 1;
    std::vector<BigInt> denom(n);
    for (int i = 0; i < n; ++i) {
        IntPoly num{1};
        BigInt d = 1;
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            num = num * IntPoly{-candidates[j].a, 1};
            d *= candidates[i].a - candidates[j].a;
        }
        denom[i] = d;
        basis[i] = num.coeffs();
        basis[i].resize(n);
        mpz_lcm(common.get_mpz_t(), common.get_mpz_t(), d.get_mpz_t());
    }
    for (int i = 0; i < n; ++i) {
        const BigInt scale = common / denom[i];
        for (auto& c : basis[i]) c *= scale;
    }

    const BigInt& lead = f.lead();
    std::vector<std::size_t> idx(n, 0);
    std::vector<int> sign(n, 1);
    std::vector<BigInt> acc(n);
    while (true) {
        for (auto& c : acc) c = 0;
        for (int i = 0; i < n; ++i) {
            const BigInt e = sign[i] * BigInt(std::to_string(candidates[i].divs[idx[i]]));
            for (int k = 0; k < n; ++k) acc[k] += e * basis[i][k];
        }
        bool integral = acc[s] != 0;
        for (int k = 0; integral && k < n; ++k) integral = mpz_divisible_p(acc[k].get_mpz_t(), common.get_mpz_t());
        if (integral) {
            for (auto& c : acc) mpz_divexact(c.get_mpz_t(), c.get_mpz_t(), common.get_mpz_t());
            if (mpz_divisible_p(lead.get_mpz_t(), acc[s].get_mpz_t())) {
                IntPoly g = primitive_part(IntPoly(acc));
                if (g.degree() == s && exact_divide(f, g, nullptr)) {
                    *found = g;
                    return true;
                }
            }
        }
        // Advance the mixed-radix counter; the first point keeps a positive sign.
        int pos = 0;
        while (pos < n) {
            if (pos > 0 && sign[pos] == 1) {
                sign[pos] = -1;
                break;
            }
            if (pos > 0) sign[pos] = 1;
            if (++idx[pos] < candidates[pos].divs.size()) break;
            idx[pos] = 0;
            ++pos;
        }
        if (pos == n) return false;
    }
}

}  // namespace

RationalFactorization factor_rational(const IntPoly& p) {
    if (p.degree() < 1) throw DomainError("factor_rational: degree must be at least 1");
    if (p.degree() > kMaxKroneckerDegree) throw UnsupportedError("factor_rational: degree above 8 is not supported");

    RationalFactorization out;
    out.unit = content(p);
    if (p.lead() < 0) out.unit = -out.unit;
    IntPoly q;
    exact_divide(p, IntPoly(std::vector<BigInt>{out.unit}), &q);

    IntPoly radical;
    exact_divide(q, gcd(q, derivative(q)), &radical);
    radical = primitive_part(radical);

    std::vector<IntPoly> irreducibles;
    std::vector<IntPoly> work{radical};
    while (!work.empty()) {
        IntPoly f = std::move(work.back());
        work.pop_back();
        if (f.degree() < 1) continue;
        IntPoly g;
        bool split = false;
        for (int s = 1; 2 * s <= f.degree() && !split; ++s) split = kronecker_find(f, s, &g);
        if (!split) {
            irreducibles.push_back(f);
            continue;
        }
        irreducibles.push_back(g);
        IntPoly rest;
        exact_divide(f, g, &rest);
        work.push_back(primitive_part(rest));
    }

    for (const auto& f : irreducibles) {
        unsigned mult = 0;
        IntPoly next;
        while (exact_divide(q, f, &next)) {
            q = next;
            ++mult;
        }
        out.factors.emplace_back(f, mult);
    }
    std::sort(out.factors.begin(), out.factors.end(), [](const auto& x, const auto& y) {
        if (x.first.degree() != y.first.degree()) return x.first.degree() < y.first.degree();
        return to_string(x.first) < to_string(y.first);
    });
    return out;
}

bool is_irreducible(const IntPoly& p) {
    const RationalFactorization f = factor_rational(p);
    return f.factors.size() == 1 && f.factors[0].second == 1;
}

}  // namespace sievecraft
