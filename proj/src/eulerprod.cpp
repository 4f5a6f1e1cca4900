#include "sievecraft/eulerprod.hpp"

#include <cmath>
#include <functional>

#include "sievecraft/errors.hpp"
#include "sievecraft/localdens.hpp"
#include "sievecraft/numutil.hpp"

namespace sievecraft::eulerprod {

using localdens::prime_power;

Rational prime_tail_bound(u64 B, unsigned m) {
    if (m < 2) throw DomainError("prime_tail_bound: m must be at least 2");
    if (B < 2) throw DomainError("prime_tail_bound: B must be at least 2");
    const BigInt b(static_cast<unsigned long>(B));
    BigInt bm;
    mpz_pow_ui(bm.get_mpz_t(), b.get_mpz_t(), m);
    Rational s(BigInt(2), bm);
    s += Rational(b, bm * 3 * (m - 1));
    if (B < 3) s += Rational(BigInt(1), prime_power(3, m));
    s.canonicalize();
    return s;
}

namespace {

// Nearest double on the requested side of q; mpq_get_d overflows on huge numerators.
double directed_double(const Rational& q, bool up) {
    if (q == 0) return 0.0;
    BigInt num = abs(q.get_num()), den = q.get_den();
    const long shift = 64 - (static_cast<long>(mpz_sizeinbase(num.get_mpz_t(), 2)) -
                             static_cast<long>(mpz_sizeinbase(den.get_mpz_t(), 2)));
    if (shift > 0) num <<= shift;
    else den <<= -shift;
    BigInt quo = num / den;
    double d = std::ldexp(quo.get_d(), static_cast<int>(-shift));
    if (q < 0) d = -d;
    if (up && Rational(d) < q) d = std::nextafter(d, INFINITY);
    if (!up && Rational(d) > q) d = std::nextafter(d, -INFINITY);
    return d;
}

// Collects the primes q > B dividing `threshold`; false when they cannot all be identified.
bool large_prime_divisors(const BigInt& threshold, u64 B, std::vector<u64>* out) {
    if (!mpz_fits_ulong_p(threshold.get_mpz_t())) return false;
    const u64 t = mpz_get_ui(threshold.get_mpz_t());
    if (t <= 1) return true;
    const numutil::Factorization f = numutil::factorize_abs(t);
    if (f.has_opaque()) return false;
    for (const auto& pe : f.factors)
        if (pe.prime > B) out->push_back(pe.prime);
    return true;
}

struct ProductSpec {
    unsigned exponent;               // denominator p^exponent
    unsigned tail_power;             // tail terms behave like p^(-tail_power)
    BigInt tail_coefficient;         // local ratio <= tail_coefficient * p^(-tail_power) for good p
    BigInt threshold;                // primes dividing it may violate the generic bound
    std::function<BigInt(u64)> count;
};

EulerEstimate evaluate(const ProductSpec& spec, u64 B, unsigned m) {
    if (B < 2) throw DomainError("density: B must be at least 2");
    EulerEstimate est;
    est.bound = B;
    est.power = m;

    BigInt num = 1, den = 1;
    for (std::uint32_t p : numutil::primes_up_to(B)) {
        const BigInt count = spec.count(p);
        const BigInt pm = prime_power(p, spec.exponent);
        est.factors.push_back({p, count});
        if (count == pm && !est.zero_density) {
            est.zero_density = true;
            est.obstruction_prime = p;
        }
        num *= pm - count;
        den *= pm;
    }
    est.truncated = Rational(num, den);
    est.truncated.canonicalize();

    Rational tail = 1 - Rational(spec.tail_coefficient) * prime_tail_bound(B, spec.tail_power);
    if (tail < 0) tail = 0;
    if (spec.threshold >= B) {
        est.widened = true;
        std::vector<u64> extra;
        if (large_prime_divisors(spec.threshold, B, &extra)) {
            for (u64 q : extra) {
                const BigInt qm = prime_power(q, spec.exponent);
                Rational f(qm - spec.count(q), qm);
                f.canonicalize();
                tail *= f;
            }
        } else {
            tail = 0;
        }
    }
    est.tail_lower = tail;

    if (est.zero_density) {
        est.lower = est.upper = 0.0;
        return est;
    }
    est.lower = directed_double(est.truncated * est.tail_lower, false);
    est.upper = directed_double(est.truncated, true);
    return est;
}

}  // namespace

EulerEstimate density_univ(const IntPoly& P, u64 B, unsigned m) {
    if (P.degree() < 1) throw DomainError("density_univ: degree must be at least 1");
    if (m < 2) throw DomainError("density_univ: m must be at least 2");
    if (!is_squarefree_poly(P)) throw DomainError("density_univ: polynomial is not square-free");
    ProductSpec spec;
    spec.exponent = m;
    spec.tail_power = m;
    spec.tail_coefficient = P.degree();
    spec.threshold = abs(discriminant(P)) * content(P);
    spec.count = [&](u64 p) { return localdens::count_roots_trusted(P, p, m); };
    return evaluate(spec, B, m);
}

EulerEstimate density_form(const BinForm& F, u64 B, bool coprime_pairs) {
    if (F.degree() < 1) throw DomainError("density_form: degree must be at least 1");
    if (!is_squarefree_poly(F)) throw DomainError("density_form: form is not square-free");
    ProductSpec spec;
    spec.exponent = 4;
    spec.tail_power = 2;
    spec.tail_coefficient = F.degree() + 1;
    spec.threshold = abs(discriminant(F)) * form_content(F);
    if (coprime_pairs) {
        spec.count = [&](u64 p) -> BigInt { return localdens::coprime_count_form(F, p) + prime_power(p, 2); };
    } else {
        spec.count = [&](u64 p) { return localdens::ell_form(F, p); };
    }
    return evaluate(spec, B, 2);
}

}  // namespace sievecraft::eulerprod
