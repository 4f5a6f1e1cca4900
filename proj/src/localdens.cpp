#include "sievecraft/localdens.hpp"

#include <algorithm>
#include <stdexcept>

#include "sievecraft/errors.hpp"
#include "sievecraft/fp.hpp"
#include "sievecraft/numutil.hpp"

namespace sievecraft::localdens {

BigInt prime_power(u64 p, unsigned k) {
    BigInt r;
    mpz_ui_pow_ui(r.get_mpz_t(), p, k);
    return r;
}

namespace {

// Lifting visits at most a few branches per level for square-free input; the cap only
// trips on internal inconsistencies.
class Budget {
public:
    void tick() {
        if (++nodes_ > kMaxNodes) throw std::logic_error("localdens: lifting budget exhausted");
    }

private:
    static constexpr std::size_t kMaxNodes = std::size_t{1} << 24;
    std::size_t nodes_ = 0;
};

// min(v_p(content q), cap); the zero polynomial counts as infinitely divisible.
unsigned content_valuation(const IntPoly& q, u64 p, unsigned cap) {
    unsigned best = cap;
    const BigInt bp(static_cast<unsigned long>(p));
    for (const auto& c : q.coeffs()) {
        if (c == 0) continue;
        unsigned v = 0;
        BigInt t = c;
        while (v < best && mpz_divisible_ui_p(t.get_mpz_t(), p)) {
            mpz_divexact_ui(t.get_mpz_t(), t.get_mpz_t(), p);
            ++v;
        }
        best = std::min(best, v);
        if (best == 0) break;
    }
    return best;
}

IntPoly divide_content(const IntPoly& q, u64 p, unsigned c) {
    if (c == 0) return q;
    const BigInt pc = prime_power(p, c);
    std::vector<BigInt> out(q.coeffs());
    for (auto& v : out) mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), pc.get_mpz_t());
    return IntPoly(std::move(out));
}

// q(r + s t) as a polynomial in t.
IntPoly substitute_affine(const IntPoly& q, const BigInt& r, const BigInt& s) {
    std::vector<BigInt> c = taylor_shift(q, r).coeffs();
    BigInt sp = 1;
    for (auto& v : c) {
        v *= sp;
        sp *= s;
    }
    return IntPoly(std::move(c));
}

BigInt count_rec(const IntPoly& q, u64 p, unsigned k, Budget& budget) {
    budget.tick();
    if (k == 0) return 1;
    const unsigned c = content_valuation(q, p, k);
    if (c >= k) return prime_power(p, k);
    if (c > 0) return prime_power(p, c) * count_rec(divide_content(q, p, c), p, k - c, budget);

    const fp::Poly qp = fp::reduce(q, p);
    const fp::Poly dq = fp::derivative(qp, p);
    const BigInt bp(static_cast<unsigned long>(p));
    BigInt total = 0;
    for (u64 r : fp::roots(qp, p)) {
        if (fp::eval(dq, r, p) != 0) {
            total += 1;  // simple root: unique lift to every level
            continue;
        }
        const IntPoly g = substitute_affine(q, BigInt(static_cast<unsigned long>(r)), bp);
        const unsigned cg = content_valuation(g, p, k);
        if (cg >= k) {
            total += prime_power(p, k - 1);
        } else {
            total += prime_power(p, cg - 1) * count_rec(divide_content(g, p, cg), p, k - cg, budget);
        }
    }
    return total;
}

void roots_rec(const IntPoly& q, u64 p, unsigned k, std::size_t cap, Budget& budget, std::vector<BigInt>& out) {
    budget.tick();
    const BigInt pk = prime_power(p, k);
    auto push_all_lifts = [&](const std::vector<BigInt>& base, const BigInt& step, const BigInt& copies,
                              const BigInt& offset, const BigInt& scale) {
        // x = offset + scale * (b + step * j) for b in base, 0 <= j < copies
        if (BigInt(out.size()) + BigInt(base.size()) * copies > BigInt(static_cast<unsigned long>(cap)))
            throw ResourceError("roots_mod_pk: root count exceeds cap");
        const unsigned long n = copies.get_ui();
        for (const auto& b : base)
            for (unsigned long j = 0; j < n; ++j) out.push_back(offset + scale * (b + step * j));
    };
    if (k == 0) {
        out.push_back(0);
        return;
    }
    const unsigned c = content_valuation(q, p, k);
    if (c >= k) {
        push_all_lifts({BigInt(0)}, 1, pk, 0, 1);
        return;
    }
    if (c > 0) {
        std::vector<BigInt> base;
        roots_rec(divide_content(q, p, c), p, k - c, cap, budget, base);
        push_all_lifts(base, prime_power(p, k - c), prime_power(p, c), 0, 1);
        return;
    }
    const BigInt bp(static_cast<unsigned long>(p));
    for (u64 r : fp::roots(fp::reduce(q, p), p)) {
        const BigInt br(static_cast<unsigned long>(r));
        const IntPoly g = substitute_affine(q, br, bp);
        const unsigned cg = content_valuation(g, p, k);
        if (cg >= k) {
            push_all_lifts({BigInt(0)}, 1, prime_power(p, k - 1), br, bp);
            continue;
        }
        std::vector<BigInt> ts;
        roots_rec(divide_content(g, p, cg), p, k - cg, cap, budget, ts);
        push_all_lifts(ts, prime_power(p, k - cg), prime_power(p, cg - 1), br, bp);
    }
}

void require_squarefree(const IntPoly& P, const char* what) {
    if (P.is_zero()) throw DomainError(std::string(what) + ": zero polynomial");
    if (!is_squarefree_poly(P)) throw DomainError(std::string(what) + ": polynomial is not square-free");
}

void require_prime(u64 p, const char* what) {
    if (!numutil::is_prime(p)) throw DomainError(std::string(what) + ": p must be prime");
}

}  // namespace

BigInt count_roots_trusted(const IntPoly& P, u64 p, unsigned k) {
    Budget budget;
    return count_rec(P, p, k, budget);
}

BigInt count_in_class_trusted(const IntPoly& P, u64 p, unsigned k, const BigInt& residue, unsigned e) {
    if (e == 0 || e > k) throw DomainError("count_roots_in_class: need 1 <= e <= k");
    const IntPoly g = substitute_affine(P, residue, prime_power(p, e));
    const unsigned c = content_valuation(g, p, k);
    if (c >= k) return prime_power(p, k - e);
    Budget budget;
    BigInt n = count_rec(divide_content(g, p, c), p, k - c, budget);
    if (c >= e) return n * prime_power(p, c - e);
    mpz_divexact(n.get_mpz_t(), n.get_mpz_t(), prime_power(p, e - c).get_mpz_t());
    return n;
}

BigInt count_roots_mod_pk(const IntPoly& P, u64 p, unsigned k) {
    require_squarefree(P, "count_roots_mod_pk");
    require_prime(p, "count_roots_mod_pk");
    if (k == 0) throw DomainError("count_roots_mod_pk: k must be positive");
    return count_roots_trusted(P, p, k);
}

BigInt count_roots_in_class(const IntPoly& P, u64 p, unsigned k, const BigInt& residue, unsigned e) {
    require_squarefree(P, "count_roots_in_class");
    require_prime(p, "count_roots_in_class");
    return count_in_class_trusted(P, p, k, residue, e);
}

std::vector<BigInt> roots_mod_pk(const IntPoly& P, u64 p, unsigned k, std::size_t cap) {
    require_squarefree(P, "roots_mod_pk");
    require_prime(p, "roots_mod_pk");
    return roots_mod_pk_trusted(P, p, k, cap);
}

std::vector<BigInt> roots_mod_pk_trusted(const IntPoly& P, u64 p, unsigned k, std::size_t cap) {
    Budget budget;
    std::vector<BigInt> out;
    roots_rec(P, p, k, cap, budget, out);
    const BigInt pk = prime_power(p, k);
    for (auto& r : out) mpz_fdiv_r(r.get_mpz_t(), r.get_mpz_t(), pk.get_mpz_t());
    std::sort(out.begin(), out.end());
    return out;
}

BigInt root_count_bound(const IntPoly& P, u64 p) {
    const BigInt disc = discriminant(P);
    if (disc == 0) throw DomainError("root_count_bound: polynomial is not square-free");
    unsigned v = 0;
    BigInt t = abs(disc);
    while (mpz_divisible_ui_p(t.get_mpz_t(), p)) {
        mpz_divexact_ui(t.get_mpz_t(), t.get_mpz_t(), p);
        ++v;
    }
    const BigInt a = prime_power(p, v) * P.degree();
    const BigInt b = prime_power(p, 3 * v);
    return a > b ? a : b;
}

LocalDensityTable local_density_table(const IntPoly& P, u64 p, unsigned max_exponent) {
    require_squarefree(P, "local_density_table");
    require_prime(p, "local_density_table");
    LocalDensityTable t{P, p, {BigInt(1)}};
    for (unsigned m = 1; m <= max_exponent; ++m) t.counts.push_back(count_roots_trusted(P, p, m));
    return t;
}

namespace {

// Pairs with p | x and p | y among (x, y) mod p^2.
BigInt non_primitive_pairs(const BinForm& F, u64 p) {
    if (F.degree() >= 2) return prime_power(p, 2);
    // F = a1 x + a0 z: F(p x', p y') = p (a1 x' + a0 y'), so count (x', y') mod p with p | a1 x' + a0 y'.
    const bool a1_div = mpz_divisible_ui_p(F.coeff(1).get_mpz_t(), p);
    const bool a0_div = mpz_divisible_ui_p(F.coeff(0).get_mpz_t(), p);
    return (a1_div && a0_div) ? prime_power(p, 2) : BigInt(static_cast<unsigned long>(p));
}

BigInt projective_root_classes(const BinForm& F, u64 p) {
    // y a unit: x = t y with p^2 | F(t, 1); x a unit and p | y: y = s x with p | s and p^2 | F(1, s).
    const BigInt affine = count_roots_trusted(F.at_z_one(), p, 2);
    const BigInt at_infinity = count_in_class_trusted(F.at_x_one(), p, 2, 0, 1);
    return affine + at_infinity;
}

void require_squarefree_form(const BinForm& F, const char* what) {
    if (F.degree() < 1) throw DomainError(std::string(what) + ": form degree must be at least 1");
    if (!is_squarefree_poly(F)) throw DomainError(std::string(what) + ": form is not square-free");
}

}  // namespace

BigInt coprime_count_form(const BinForm& F, u64 p) {
    require_squarefree_form(F, "coprime_count_form");
    require_prime(p, "coprime_count_form");
    const BigInt units = prime_power(p, 2) - p;
    return projective_root_classes(F, p) * units;
}

BigInt ell_form(const BinForm& F, u64 p) {
    require_squarefree_form(F, "ell_form");
    require_prime(p, "ell_form");
    const BigInt units = prime_power(p, 2) - p;
    return projective_root_classes(F, p) * units + non_primitive_pairs(F, p);
}

Rational valuation_measure(const IntPoly& P, u64 p, unsigned j) {
    require_squarefree(P, "valuation_measure");
    require_prime(p, "valuation_measure");
    auto mass = [&](unsigned i) {
        if (i == 0) return Rational(1);
        Rational r(count_roots_trusted(P, p, i), prime_power(p, i));
        r.canonicalize();
        return r;
    };
    return mass(j) - mass(j + 1);
}

Rational divisibility_measure_in_class(const IntPoly& P, u64 p, unsigned j, const BigInt& residue, unsigned e) {
    require_prime(p, "divisibility_measure_in_class");
    if (e == 0) throw DomainError("divisibility_measure_in_class: e must be positive");
    if (j <= e) {
        const BigInt v = eval(P, residue);
        const bool divides = (v == 0) || mpz_divisible_p(v.get_mpz_t(), prime_power(p, j).get_mpz_t());
        Rational r(divides ? 1 : 0, 1);
        r /= Rational(prime_power(p, e));
        return r;
    }
    Rational r(count_in_class_trusted(P, p, j, residue, e), prime_power(p, j));
    r.canonicalize();
    return r;
}

Rational valuation_measure_in_class(const IntPoly& P, u64 p, unsigned j, u64 residue) {
    require_squarefree(P, "valuation_measure_in_class");
    require_prime(p, "valuation_measure_in_class");
    if (residue >= p) throw DomainError("valuation_measure_in_class: residue must lie in [0, p)");
    const BigInt r(static_cast<unsigned long>(residue));
    auto mass = [&](unsigned i) {
        if (i == 0) return Rational(BigInt(1), BigInt(static_cast<unsigned long>(p)));
        return divisibility_measure_in_class(P, p, i, r, 1);
    };
    return mass(j) - mass(j + 1);
}

}  // namespace sievecraft::localdens
