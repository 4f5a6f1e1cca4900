#include "sievecraft/fp.hpp"

#include <algorithm>

#include "sievecraft/errors.hpp"
#include "sievecraft/numutil.hpp"

namespace sievecraft::fp {

using numutil::invmod;
using numutil::mulmod;

namespace {

void trim(Poly& f) {
    while (!f.empty() && f.back() == 0) f.pop_back();
}

u64 addm(u64 a, u64 b, u64 p) {
    u64 s = a + b;
    return (s >= p || s < a) ? s - p : s;
}

u64 subm(u64 a, u64 b, u64 p) { return a >= b ? a - b : a + (p - b); }

}  // namespace

Poly reduce(const IntPoly& poly, u64 prime) {
    Poly out(poly.coeffs().size());
    const BigInt m(std::to_string(prime));
    for (std::size_t i = 0; i < out.size(); ++i) {
        BigInt r;
        mpz_fdiv_r(r.get_mpz_t(), poly.coeffs()[i].get_mpz_t(), m.get_mpz_t());
        out[i] = std::stoull(r.get_str());
    }
    trim(out);
    return out;
}

int degree(const Poly& f) { return static_cast<int>(f.size()) - 1; }

Poly monic(const Poly& f, u64 p) {
    if (f.empty()) return f;
    const u64 inv = invmod(f.back(), p);
    Poly out(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) out[i] = mulmod(f[i], inv, p);
    return out;
}

namespace {

// Returns quotient and leaves the remainder in `a`.
Poly divide_in_place(Poly& a, const Poly& b, u64 p) {
    if (b.empty()) throw DomainError("fp: division by zero polynomial");
    trim(a);
    const int db = degree(b);
    if (degree(a) < db) return {};
    Poly q(a.size() - b.size() + 1);
    const u64 inv = invmod(b.back(), p);
    for (int i = degree(a); i >= db; --i) {
        const u64 t = mulmod(a[i], inv, p);
        q[i - db] = t;
        if (t == 0) continue;
        for (int j = 0; j <= db; ++j) a[i - db + j] = subm(a[i - db + j], mulmod(t, b[j], p), p);
    }
    a.resize(db);
    trim(a);
    trim(q);
    return q;
}

}  // namespace

Poly rem(const Poly& a, const Poly& b, u64 p) {
    Poly r = a;
    divide_in_place(r, b, p);
    return r;
}

Poly quot(const Poly& a, const Poly& b, u64 p) {
    Poly r = a;
    return divide_in_place(r, b, p);
}

Poly mul_mod(const Poly& a, const Poly& b, const Poly& modulus, u64 p) {
    if (a.empty() || b.empty()) return {};
    Poly c(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < b.size(); ++j) c[i + j] = addm(c[i + j], mulmod(a[i], b[j], p), p);
    }
    return rem(c, modulus, p);
}

Poly gcd(Poly a, Poly b, u64 p) {
    trim(a);
    trim(b);
    while (!b.empty()) {
        Poly r = rem(a, b, p);
        a = std::move(b);
        b = std::move(r);
    }
    return monic(a, p);
}

Poly derivative(const Poly& f, u64 p) {
    if (f.size() <= 1) return {};
    Poly d(f.size() - 1);
    for (std::size_t i = 1; i < f.size(); ++i) d[i - 1] = mulmod(f[i], i % p, p);
    trim(d);
    return d;
}

Poly pow_mod(const Poly& base, u64 e, const Poly& modulus, u64 p) {
    Poly result = rem(Poly{1}, modulus, p);
    Poly b = rem(base, modulus, p);
    while (e) {
        if (e & 1) result = mul_mod(result, b, modulus, p);
        e >>= 1;
        if (e) b = mul_mod(b, b, modulus, p);
    }
    return result;
}

u64 eval(const Poly& f, u64 x, u64 p) {
    u64 acc = 0;
    for (std::size_t i = f.size(); i-- > 0;) acc = addm(mulmod(acc, x, p), f[i], p);
    return acc;
}

namespace {

// Splits a monic product of distinct linear factors into its roots.
void split_linear(const Poly& g, u64 p, std::vector<u64>& out) {
    const int d = degree(g);
    if (d <= 0) return;
    if (d == 1) {
        out.push_back(subm(0, g[0], p));
        return;
    }
    // Deterministic sequence of shifts; each succeeds with probability about 1/2.
    for (u64 a = 0;; ++a) {
        Poly h = pow_mod(Poly{a % p, 1}, (p - 1) / 2, g, p);
        if (h.empty()) h = {0};
        h[0] = subm(h[0], 1, p);
        trim(h);
        Poly f = gcd(g, h, p);
        const int df = degree(f);
        if (df > 0 && df < d) {
            split_linear(f, p, out);
            split_linear(quot(g, f, p), p, out);
            return;
        }
    }
}

}  // namespace

std::vector<u64> roots(const Poly& f0, u64 p) {
    Poly f = f0;
    trim(f);
    if (f.empty()) throw DomainError("fp::roots: zero polynomial");
    std::vector<u64> out;
    if (degree(f) == 0) return out;
    if (p < 64) {
        for (u64 x = 0; x < p; ++x)
            if (eval(f, x, p) == 0) out.push_back(x);
        return out;
    }
    f = monic(f, p);
    // gcd(f, x^p - x) collects the distinct linear factors.
    Poly xp = pow_mod(Poly{0, 1}, p, f, p);
    if (xp.size() < 2) xp.resize(2, 0);
    xp[1] = subm(xp[1], 1, p);
    trim(xp);
    Poly g = gcd(f, xp, p);
    split_linear(g, p, out);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<unsigned> factor_degrees(const Poly& f0, u64 p) {
    Poly f = monic(f0, p);
    trim(f);
    if (degree(f) < 1) throw DomainError("fp::factor_degrees: degree must be at least 1");
    std::vector<unsigned> out;
    Poly h{0, 1};  // x^(p^i) mod f
    for (unsigned i = 1; 2 * static_cast<int>(i) <= degree(f); ++i) {
        h = pow_mod(h, p, f, p);
        Poly t = h;
        if (t.size() < 2) t.resize(2, 0);
        t[1] = subm(t[1], 1, p);
        trim(t);
        Poly g = gcd(f, t, p);
        const int dg = degree(g);
        if (dg > 0) {
            for (int k = 0; k < dg / static_cast<int>(i); ++k) out.push_back(i);
            f = quot(f, g, p);
            h = rem(h, f, p);
        }
    }
    if (degree(f) > 0) out.push_back(static_cast<unsigned>(degree(f)));
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<unsigned> distinct_factor_degrees(const Poly& f0, u64 p) {
    Poly f = f0;
    trim(f);
    if (f.empty()) throw DomainError("fp::distinct_factor_degrees: zero polynomial");
    if (degree(f) == 0) return {};
    // Reduce to the product of the distinct irreducible factors.
    Poly rad;
    Poly df = derivative(f, p);
    if (df.empty()) {
        // f is a p-th power: f(x) = g(x^p), and over F_p g(x^p) = g(x)^p.
        Poly g;
        for (std::size_t i = 0; i < f.size(); i += static_cast<std::size_t>(p)) g.push_back(f[i]);
        return distinct_factor_degrees(g, p);
    }
    Poly common = gcd(f, df, p);
    rad = quot(monic(f, p), common, p);
    std::vector<unsigned> out = factor_degrees(rad, p);
    if (degree(common) > 0) {
        // Factors of `common` all divide f; any not dividing rad are impossible, but
        // common may contain factors whose multiplicity in f is a multiple of p.
        Poly rest = common;
        Poly g = gcd(rest, rad, p);
        while (degree(g) > 0) {
            while (degree(gcd(rest, g, p)) > 0) rest = quot(rest, gcd(rest, g, p), p);
            g = gcd(rest, rad, p);
        }
        if (degree(rest) > 0) {
            auto more = distinct_factor_degrees(rest, p);
            out.insert(out.end(), more.begin(), more.end());
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace sievecraft::fp
