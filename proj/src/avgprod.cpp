#include "sievecraft/avgprod.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <numeric>
#include <thread>
#include <vector>

#include "detail/int_eval.hpp"
#include "sievecraft/census.hpp"
#include "sievecraft/errors.hpp"
#include "sievecraft/eulerprod.hpp"
#include "sievecraft/fp.hpp"
#include "sievecraft/localdens.hpp"
#include "sievecraft/numutil.hpp"

namespace sievecraft::avgprod {

namespace {

using Clock = std::chrono::steady_clock;
using localdens::prime_power;

constexpr u64 kBlock = u64{1} << 16;
constexpr u64 kMaxOverridePrime = u64{1} << 16;

BigInt big(u64 v) { return BigInt(static_cast<unsigned long>(v)); }

Rational inv_power(u64 p, unsigned k) { return Rational(BigInt(1), prime_power(p, k)); }

CRational checked_value(const Rule& rule, u64 p, u64 t, unsigned j) {
    CRational v = rule(p, t, j);
    if (v.re * v.re + v.im * v.im > 1) throw DomainError("local factor: |u_p| exceeds 1");
    return v;
}

Complex checked_complex(const Rule& rule, u64 p, u64 t, unsigned j) { return checked_value(rule, p, t, j).to_complex(); }

CRational scale(const CRational& a, const Rational& k) { return {Rational(a.re * k), Rational(a.im * k)}; }

// Measures mu(>= j) of {x = c mod p^e, p^j | g(x)} for one residue class.
class ClassMasses {
public:
    ClassMasses(const IntPoly& g, u64 p, BigInt residue, unsigned e) : g_(g), p_(p), c_(std::move(residue)), e_(e) {
        if (e_ == 1) {
            const fp::Poly gp = fp::reduce(g_, p_);
            const u64 c = mpz_fdiv_ui(c_.get_mpz_t(), p_);
            if (!gp.empty() && fp::eval(gp, c, p_) != 0) nonroot_ = true;
            else if (!gp.empty() && fp::eval(fp::derivative(gp, p_), c, p_) != 0) simple_ = true;
        }
    }

    Rational at_least(unsigned j) const {
        if (j == 0) return inv_power(p_, e_);
        if (nonroot_) return 0;
        // A simple root mod p lifts to exactly one class mod p^j.
        if (simple_) return inv_power(p_, j);
        return localdens::divisibility_measure_in_class(g_, p_, j, c_, e_);
    }

private:
    const IntPoly& g_;
    u64 p_;
    BigInt c_;
    unsigned e_;
    bool nonroot_ = false;
    bool simple_ = false;
};

// Sum over valuations j of mu(v = j) * (u(t, j) - 1) for the generic rule (only j >= 2 deviate),
// or mu(v = j) * u(t, j) for an override.
LocalIntegral class_integral(const ClassMasses& m, const Rule& rule, bool override_rule, u64 p, u64 t) {
    LocalIntegral out;
    out.value = 0;
    const unsigned first = override_rule ? 0 : 2;
    Rational cur = m.at_least(first);
    for (unsigned j = first; j < kValuationCap && cur != 0; ++j) {
        const Rational next = m.at_least(j + 1);
        CRational v = checked_value(rule, p, t, j);
        if (!override_rule) v = v - CRational(1);
        out.value = out.value + scale(v, Rational(cur - next));
        cur = next;
    }
    if (cur != 0) {
        CRational v = checked_value(rule, p, t, kValuationCap);
        if (!override_rule) v = v - CRational(1);
        out.value = out.value + scale(v, cur);
        out.slack = 2 * cur;
    }
    return out;
}

std::vector<u64> all_residues(u64 p) {
    std::vector<u64> all(p);
    std::iota(all.begin(), all.end(), u64{0});
    return all;
}

// Residues r with p | P(r); all residues when P vanishes mod p.
std::vector<u64> roots_mod_p(const IntPoly& P, u64 p) {
    const fp::Poly f = fp::reduce(P, p);
    return f.empty() ? all_residues(p) : fp::roots(f, p);
}

const Rule* override_for(const LocalFactorFamily& u, u64 p) {
    const auto it = u.overrides.find(p);
    return it == u.overrides.end() ? nullptr : &it->second;
}

void require_rule(const LocalFactorFamily& u) {
    if (!u.rule) throw DomainError("local factor family: missing rule");
    if (!(u.max_deviation >= 0.0 && u.max_deviation <= 2.0))
        throw DomainError("local factor family: max_deviation must lie in [0, 2]");
}

LocalIntegral univ_integral(const IntPoly& P, const LocalFactorFamily& u, u64 p) {
    LocalIntegral out;
    if (const Rule* ov = override_for(u, p)) {
        out.value = 0;
        for (u64 c = 0; c < p; ++c) {
            const LocalIntegral part = class_integral(ClassMasses(P, p, big(c), 1), *ov, true, p, c);
            out.value = out.value + part.value;
            out.slack += part.slack;
        }
        return out;
    }
    out.value = 1;
    for (u64 c : roots_mod_p(P, p)) {
        const LocalIntegral part = class_integral(ClassMasses(P, p, big(c), 1), u.rule, false, p, c);
        out.value = out.value + part.value;
        out.slack += part.slack;
    }
    return out;
}

LocalIntegral univ_integral_in_class(const IntPoly& P, const LocalFactorFamily& u, u64 p, const BigInt& residue,
                                     unsigned e) {
    const Rule* ov = override_for(u, p);
    const u64 t = mpz_fdiv_ui(residue.get_mpz_t(), p);
    LocalIntegral out = class_integral(ClassMasses(P, p, residue, e), ov ? *ov : u.rule, ov != nullptr, p, t);
    if (!ov) out.value = out.value + CRational(inv_power(p, e));
    return out;
}

// F(a d1 + b s, b d2) at b = 1 (affine chart) or a = 1 (chart at infinity).
IntPoly lattice_chart(const BinForm& F, const lattice::Lattice2& L, bool at_infinity) {
    const int d = F.degree();
    const BigInt d1 = L.d1(), s = L.s(), d2 = L.d2();
    // X and Z as linear polynomials in the chart variable.
    const IntPoly X = at_infinity ? IntPoly(std::vector<BigInt>{d1, s}) : IntPoly(std::vector<BigInt>{s, d1});
    const IntPoly Z = at_infinity ? IntPoly(std::vector<BigInt>{0, d2}) : IntPoly(std::vector<BigInt>{d2});
    IntPoly total;
    for (int i = 0; i <= d; ++i) {
        IntPoly term(std::vector<BigInt>{F.coeff(i)});
        for (int k = 0; k < i; ++k) term = term * X;
        for (int k = 0; k < d - i; ++k) term = term * Z;
        total = total + term;
    }
    return total;
}

// Residue label of a pair mod p: x / y, or p when p | y.
u64 pair_label(i64 x, i64 y, u64 p) {
    const u64 xm = static_cast<u64>(((x % static_cast<i64>(p)) + static_cast<i64>(p)) % static_cast<i64>(p));
    const u64 ym = static_cast<u64>(((y % static_cast<i64>(p)) + static_cast<i64>(p)) % static_cast<i64>(p));
    if (ym == 0) return p;
    return numutil::mulmod(xm, numutil::invmod(ym, p), p);
}

LocalIntegral form_integral(const BinForm& F, const LocalFactorFamily& u, u64 p, const lattice::Lattice2& Lfull) {
    const i64 ip = static_cast<i64>(p);
    unsigned e = 0;
    for (i64 rest = Lfull.index(); rest % ip == 0; rest /= ip) ++e;
    const lattice::Lattice2 L = e > 0 ? Lfull : lattice::Lattice2();
    const Rule* ov = override_for(u, p);
    const IntPoly g1 = lattice_chart(F, L, false);
    const IntPoly g2 = lattice_chart(F, L, true);
    // L (x) Z_p has measure p^-e; each chart carries 1 - 1/p from its unit coordinate.
    Rational weight = Rational(big(p - 1), big(p)) * inv_power(p, e);
    weight.canonicalize();

    LocalIntegral out;
    out.value = 0;
    auto add = [&](const ClassMasses& m, u64 t) {
        const LocalIntegral part = class_integral(m, ov ? *ov : u.rule, ov != nullptr, p, t);
        out.value = out.value + scale(part.value, weight);
        out.slack += part.slack * weight;
    };
    // Affine chart: (x, y) = b (c d1 + s, d2) with b a unit and c the class of the chart variable.
    const u64 d1m = static_cast<u64>(L.d1() % ip), sm = static_cast<u64>(L.s() % ip), d2m = static_cast<u64>(L.d2() % ip);
    auto image_x = [&](u64 c) { return (numutil::mulmod(c, d1m, p) + sm) % p; };
    u64 primitive_classes = 0;
    for (u64 c = 0; c < p; ++c)
        if (image_x(c) != 0 || d2m != 0) ++primitive_classes;
    const std::vector<u64> classes = ov ? all_residues(p) : roots_mod_p(g1, p);
    for (u64 c : classes) {
        const u64 x = image_x(c);
        if (x == 0 && d2m == 0) continue;
        add(ClassMasses(g1, p, big(c), 1), pair_label(static_cast<i64>(x), static_cast<i64>(d2m), p));
    }
    // Chart at infinity: (x, y) = a (d1 + w s, w d2) with w in p Z_p.
    if (d1m != 0) {
        ++primitive_classes;
        add(ClassMasses(g2, p, BigInt(0), 1), p);
    }
    // Generic rules deviate from 1 only on root classes; add the mass of every primitive class.
    if (!ov) out.value = out.value + CRational(Rational(weight * Rational(big(primitive_classes), big(p))));
    return out;
}

void require_prime(u64 p, const char* what) {
    if (!numutil::is_prime(p)) throw DomainError(std::string(what) + ": p must be prime");
}

void require_poly(const IntPoly& P, const char* what) {
    if (P.degree() < 1) throw DomainError(std::string(what) + ": degree must be at least 1");
    if (!is_squarefree_poly(P)) throw DomainError(std::string(what) + ": polynomial is not square-free");
}

void require_form(const BinForm& F, const char* what) {
    if (F.degree() < 1) throw DomainError(std::string(what) + ": degree must be at least 1");
    if (!is_squarefree_poly(F)) throw DomainError(std::string(what) + ": form is not square-free");
}

double directed(const Rational& q) {
    const double d = q.get_d();
    return Rational(d) < q ? std::nextafter(d, INFINITY) : d;
}

// Primes q > B dividing T, or nullopt when T cannot be fully factored.
std::optional<std::vector<u64>> large_divisors(const BigInt& T, u64 B) {
    std::vector<u64> out;
    if (T <= 1) return out;
    if (!mpz_fits_ulong_p(T.get_mpz_t())) return std::nullopt;
    const numutil::Factorization f = numutil::factorize_abs(mpz_get_ui(T.get_mpz_t()));
    if (f.has_opaque()) return std::nullopt;
    for (const auto& pe : f.factors)
        if (pe.prime > B) out.push_back(pe.prime);
    return out;
}

// Upper bound for sum_{p > B} mu_p(p^2 | P).
Rational univ_tail_mass(const IntPoly& P, u64 B) {
    const int d = P.degree();
    Rational s = d * eulerprod::prime_tail_bound(B, 2);
    const auto extra = large_divisors(abs(discriminant(P)) * content(P), B);
    if (!extra) throw ResourceError("tail bound: cannot factor the discriminant");
    for (u64 q : *extra) {
        const BigInt l = localdens::count_roots_trusted(P, q, 2);
        if (l > d) s += Rational(l - d, prime_power(q, 2));
    }
    s.canonicalize();
    return s;
}

// Upper bound for sum_{p > B} mu_p(p^2 | F, p not dividing both) / (1 - p^-2).
Rational form_tail_mass(const BinForm& F, u64 B) {
    const int d = F.degree();
    Rational s = d * eulerprod::prime_tail_bound(B, 2);
    const auto extra = large_divisors(abs(discriminant(F)) * form_content(F), B);
    if (!extra) throw ResourceError("tail bound: cannot factor the discriminant");
    for (u64 q : *extra) {
        const BigInt q2 = prime_power(q, 2);
        Rational r(localdens::coprime_count_form(F, q), q2 * q2 - q2);
        r -= Rational(BigInt(d), q2);
        if (r > 0) s += r;
    }
    s.canonicalize();
    return s;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Runs fn(block) for blocks 0..count-1 on the worker pool.
template <class Fn>
void for_blocks(u64 count, Fn&& fn) {
    const unsigned workers = static_cast<unsigned>(std::min<u64>(census::worker_count(), count));
    if (workers <= 1) {
        for (u64 b = 0; b < count; ++b) fn(b);
        return;
    }
    std::atomic<u64> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (u64 b; (b = next.fetch_add(1)) < count;) fn(b);
        });
    for (auto& t : pool) t.join();
}

struct OverrideTable {
    u64 p;
    std::vector<Complex> values;  // [r * 64 + v]
};

struct UnivSum {
    Complex sum;
    u64 zero_values = 0;
};

UnivSum univ_sum(const IntPoly& P, const LocalFactorFamily& u, u64 N, const std::function<Complex(u64)>* weight) {
    const char* what = "empirical_average";
    if (N < 1) throw DomainError("empirical_average: N must be positive");
    if (N > (u64{1} << 34)) throw ResourceError("empirical_average: N too large");
    const std::vector<i64> c = detail::small_coeffs(P.coeffs(), what);
    u64 vmax = 0;
    for (u64 n = 1; n <= N; ++n) vmax = std::max(vmax, detail::abs_to_u64(detail::eval_univ(c, static_cast<i64>(n), what), what));

    u64 max_override = 0;
    std::vector<OverrideTable> tables;
    for (const auto& [p, rule] : u.overrides) {
        require_prime(p, what);
        if (p > kMaxOverridePrime) throw DomainError("empirical_average: override prime too large");
        max_override = std::max(max_override, p);
        OverrideTable t{p, std::vector<Complex>(p * 64)};
        const std::vector<u64> roots = roots_mod_p(P, p);
        std::vector<bool> is_root(p, false);
        for (u64 r : roots) is_root[r] = true;
        for (u64 r = 0; r < p; ++r)
            for (unsigned v = 0; v < (is_root[r] ? 64u : 1u); ++v) t.values[r * 64 + v] = checked_complex(rule, p, r, v);
        tables.push_back(std::move(t));
    }
    const u64 Bs = std::max({numutil::icbrt(vmax) + 1, max_override, u64{2}});
    if (Bs >= (u64{1} << 32)) throw ResourceError("empirical_average: trial-division bound exceeds 2^32");
    const std::vector<std::uint32_t> primes = numutil::primes_up_to(Bs);
    std::vector<std::vector<u64>> roots(primes.size());
    for (std::size_t i = 0; i < primes.size(); ++i)
        if (!u.overrides.count(primes[i])) roots[i] = roots_mod_p(P, primes[i]);

    const u64 blocks = (N + kBlock - 1) / kBlock;
    std::vector<Complex> block_sum(blocks);
    std::vector<u64> block_zero(blocks, 0);
    std::atomic<bool> missing_zero{false};
    for_blocks(blocks, [&](u64 b) {
        const u64 lo = b * kBlock + 1, hi = std::min(N, lo + kBlock - 1), len = hi - lo + 1;
        std::vector<u64> val(len);
        std::vector<Complex> acc(len, Complex(1.0, 0.0));
        for (u64 n = lo; n <= hi; ++n) val[n - lo] = detail::abs_to_u64(detail::eval_univ(c, static_cast<i64>(n), what), what);
        for (const OverrideTable& t : tables)
            for (u64 n = lo; n <= hi; ++n) {
                u64& v = val[n - lo];
                if (v == 0) continue;
                unsigned e = 0;
                while (v % t.p == 0) v /= t.p, ++e;
                acc[n - lo] *= t.values[(n % t.p) * 64 + e];
            }
        for (std::size_t i = 0; i < primes.size(); ++i) {
            const u64 p = primes[i];
            for (u64 r : roots[i]) {
                for (u64 n = lo + (r + p - lo % p) % p; n <= hi; n += p) {
                    u64& v = val[n - lo];
                    if (v == 0) continue;
                    unsigned e = 0;
                    while (v % p == 0) v /= p, ++e;
                    if (e >= 2) acc[n - lo] *= checked_complex(u.rule, p, r, e);
                }
            }
        }
        Complex s(0.0, 0.0);
        for (u64 n = lo; n <= hi; ++n) {
            Complex a = acc[n - lo];
            const u64 v = val[n - lo];
            u64 q = 0;
            if (v == 0) {
                ++block_zero[b];
                if (!u.zero_value) {
                    missing_zero = true;
                    continue;
                }
                a = *u.zero_value;
            } else if (v > 1 && numutil::is_perfect_square(v, &q)) {
                // v < Bs^3 has at most two prime factors, all above Bs.
                a *= checked_complex(u.rule, q, n % q, 2);
            }
            s += weight ? (*weight)(n) * a : a;
        }
        block_sum[b] = s;
    });
    if (missing_zero) throw DomainError("empirical_average: polynomial vanishes in range and the family has no zero value");
    UnivSum out;
    for (u64 b = 0; b < blocks; ++b) {
        out.sum += block_sum[b];
        out.zero_values += block_zero[b];
    }
    return out;
}

void check_overrides_within(const LocalFactorFamily& u, u64 B, const char* what) {
    for (const auto& entry : u.overrides)
        if (entry.first > B) throw DomainError(std::string(what) + ": override prime exceeds B");
}

AverageReport univ_report(const IntPoly& P, const LocalFactorFamily& u, u64 N, u64 B, const TruncatedProduct* pred,
                          const UnivSum& sum) {
    AverageReport r;
    r.family = u.name;
    r.N = N;
    r.B = B;
    r.domain_size = N;
    r.zero_values = sum.zero_values;
    r.empirical = sum.sum / static_cast<double>(N);
    if (pred) {
        r.predicted = pred->value.to_complex();
        r.truncation_slack = directed(pred->slack);
        r.tail_slack = u.max_deviation * directed(univ_tail_mass(P, B));
        r.delta_count = census::delta_census_univ(P, N, B);
        r.delta_term = u.max_deviation * static_cast<double>(r.delta_count) / static_cast<double>(N);
    } else {
        r.has_prediction = false;
    }
    return r;
}

}  // namespace

LocalFactorFamily constant_family() {
    LocalFactorFamily u;
    u.name = "constant";
    u.rule = [](u64, u64, unsigned) { return CRational(1); };
    u.max_deviation = 0.0;
    u.zero_value = Complex(1.0, 0.0);
    return u;
}

LocalFactorFamily squarefree_indicator() {
    LocalFactorFamily u;
    u.name = "squarefree";
    u.rule = [](u64, u64, unsigned) { return CRational(0); };
    u.max_deviation = 1.0;
    u.zero_value = Complex(0.0, 0.0);
    return u;
}

LocalFactorFamily parity_family() {
    LocalFactorFamily u;
    u.name = "parity";
    u.rule = [](u64, u64, unsigned j) { return CRational(j % 2 == 0 ? 1 : -1); };
    u.max_deviation = 2.0;
    return u;
}

LocalIntegral local_integral(const IntPoly& P, const LocalFactorFamily& u, u64 p) {
    require_poly(P, "local_integral");
    require_prime(p, "local_integral");
    require_rule(u);
    return univ_integral(P, u, p);
}

LocalIntegral local_integral_in_class(const IntPoly& P, const LocalFactorFamily& u, u64 p, const BigInt& residue,
                                      unsigned e) {
    require_poly(P, "local_integral_in_class");
    require_prime(p, "local_integral_in_class");
    require_rule(u);
    if (e == 0) throw DomainError("local_integral_in_class: e must be positive");
    return univ_integral_in_class(P, u, p, residue, e);
}

LocalIntegral local_integral_form(const BinForm& F, const LocalFactorFamily& u, u64 p, const lattice::Lattice2& L) {
    require_form(F, "local_integral_form");
    require_prime(p, "local_integral_form");
    require_rule(u);
    return form_integral(F, u, p, L);
}

TruncatedProduct truncated_product(const IntPoly& P, const LocalFactorFamily& u, u64 B) {
    require_poly(P, "truncated_product");
    require_rule(u);
    if (B < 2) throw DomainError("truncated_product: B must be at least 2");
    TruncatedProduct out;
    out.bound = B;
    out.value = 1;
    for (std::uint32_t p : numutil::primes_up_to(B)) {
        const LocalIntegral li = univ_integral(P, u, p);
        out.value = out.value * li.value;
        out.slack += li.slack;
    }
    return out;
}

std::string to_string(MultiplierKind k) {
    switch (k) {
        case MultiplierKind::Progression: return "progression";
        case MultiplierKind::LatticeCoset: return "lattice";
        case MultiplierKind::MobiusExperimental: return "mobius";
        case MultiplierKind::Custom: return "custom";
    }
    return "custom";
}

MultiplierSpec progression_multiplier(u64 residue, u64 modulus) {
    if (modulus < 1 || residue >= modulus) throw DomainError("progression_multiplier: need 0 <= residue < modulus");
    MultiplierSpec s;
    s.kind = MultiplierKind::Progression;
    s.progression = Progression{residue, modulus};
    s.weight = [residue, modulus](u64 n) { return Complex(n % modulus == residue ? 1.0 : 0.0, 0.0); };
    return s;
}

MultiplierSpec mobius_multiplier() {
    MultiplierSpec s;
    s.kind = MultiplierKind::MobiusExperimental;
    s.weight = [](u64 n) { return Complex(numutil::mobius(static_cast<i64>(n)), 0.0); };
    return s;
}

AverageReport empirical_average(const IntPoly& P, const LocalFactorFamily& u, u64 N, u64 B) {
    const auto t0 = Clock::now();
    require_poly(P, "empirical_average");
    require_rule(u);
    check_overrides_within(u, B, "empirical_average");
    const TruncatedProduct pred = truncated_product(P, u, B);
    AverageReport r = univ_report(P, u, N, B, &pred, univ_sum(P, u, N, nullptr));
    r.seconds = seconds_since(t0);
    return r;
}

AverageReport average_with_multiplier(const IntPoly& P, const LocalFactorFamily& u, const MultiplierSpec& s, u64 N,
                                      u64 B) {
    const auto t0 = Clock::now();
    require_poly(P, "average_with_multiplier");
    require_rule(u);
    check_overrides_within(u, B, "average_with_multiplier");
    if (!s.weight) throw DomainError("average_with_multiplier: missing weight");
    if (s.kind == MultiplierKind::LatticeCoset)
        throw DomainError("average_with_multiplier: lattice multipliers apply to forms");
    std::optional<TruncatedProduct> pred;
    if (s.kind == MultiplierKind::Progression) {
        if (!s.progression) throw DomainError("average_with_multiplier: progression kind without its local measures");
        const auto [a, m] = *s.progression;
        if (m < 1 || a >= m) throw DomainError("average_with_multiplier: need 0 <= residue < modulus");
        const numutil::Factorization mf = numutil::factorize_abs(m);
        if (mf.has_opaque()) throw ResourceError("average_with_multiplier: cannot factor the modulus");
        for (const auto& pe : mf.factors)
            if (pe.prime > B) throw DomainError("average_with_multiplier: modulus has a prime factor above B");
        TruncatedProduct tp;
        tp.bound = B;
        tp.value = 1;
        for (std::uint32_t p : numutil::primes_up_to(B)) {
            const unsigned e = numutil::valuation_abs(m, p);
            const LocalIntegral li =
                e == 0 ? univ_integral(P, u, p) : univ_integral_in_class(P, u, p, big(a) % prime_power(p, e), e);
            tp.value = tp.value * li.value;
            tp.slack += li.slack;
        }
        pred = std::move(tp);
    }
    AverageReport r = univ_report(P, u, N, B, pred ? &*pred : nullptr, univ_sum(P, u, N, &s.weight));
    r.multiplier = to_string(s.kind);
    r.seconds = seconds_since(t0);
    return r;
}

AverageReport empirical_average_form(const BinForm& F, const LocalFactorFamily& u, u64 N,
                                     const FormAverageOptions& opt) {
    const auto t0 = Clock::now();
    const char* what = "empirical_average_form";
    require_form(F, what);
    require_rule(u);
    if (N < 1) throw DomainError("empirical_average_form: N must be positive");
    if (N > (u64{1} << 20)) throw ResourceError("empirical_average_form: N too large");
    if (opt.B < 2) throw DomainError("empirical_average_form: B must be at least 2");
    check_overrides_within(u, opt.B, what);
    const lattice::Lattice2 L = opt.lattice.value_or(lattice::Lattice2());
    {
        const numutil::Factorization idx = numutil::factorize_abs(static_cast<u64>(L.index()));
        if (idx.has_opaque()) throw ResourceError("empirical_average_form: cannot factor the lattice index");
        for (const auto& pe : idx.factors)
            if (pe.prime > opt.B) throw DomainError("empirical_average_form: lattice index has a prime factor above B");
    }
    for (const auto& entry : u.overrides)
        if (entry.first > kMaxOverridePrime) throw DomainError("empirical_average_form: override prime too large");

    const std::vector<i64> a = detail::small_coeffs(F.coeffs(), what);
    const i64 n = static_cast<i64>(N);
    const u64 rows = 2 * N + 1;
    std::vector<Complex> row_sum(rows);
    std::vector<u64> row_domain(rows, 0), row_zero(rows, 0), row_delta(rows, 0);
    std::atomic<bool> missing_zero{false};
    for_blocks(rows, [&](u64 row) {
        const i64 x = static_cast<i64>(row) - n;
        Complex s(0.0, 0.0);
        for (i64 y = -n; y <= n; ++y) {
            if (std::gcd(x, y) != 1 || !opt.sector.contains(x, y)) continue;
            ++row_domain[row];
            if (!L.contains(x, y)) continue;
            const u64 v = detail::abs_to_u64(detail::eval_form(a, x, y, what), what);
            if (v == 0) {
                ++row_zero[row];
                ++row_delta[row];
                if (!u.zero_value) {
                    missing_zero = true;
                    continue;
                }
                s += *u.zero_value;
                continue;
            }
            Complex acc(1.0, 0.0);
            for (const auto& [p, rule] : u.overrides)
                acc *= checked_complex(rule, p, pair_label(x, y, p), numutil::valuation_abs(v, p));
            bool large = false;
            for (const auto& pe : numutil::factorize_abs(v).factors) {
                if (pe.exponent < 2 || u.overrides.count(pe.prime)) continue;
                acc *= checked_complex(u.rule, pe.prime, pair_label(x, y, pe.prime), pe.exponent);
                if (pe.prime > opt.B) large = true;
            }
            if (large) ++row_delta[row];
            s += acc;
        }
        row_sum[row] = s;
    });
    if (missing_zero) throw DomainError("empirical_average_form: form vanishes in range and the family has no zero value");

    AverageReport r;
    r.family = u.name;
    if (opt.lattice) r.multiplier = to_string(MultiplierKind::LatticeCoset);
    r.N = N;
    r.B = opt.B;
    Complex total(0.0, 0.0);
    for (u64 row = 0; row < rows; ++row) {
        total += row_sum[row];
        r.domain_size += row_domain[row];
        r.zero_values += row_zero[row];
        r.delta_count += row_delta[row];
    }
    if (r.domain_size == 0) throw DomainError("empirical_average_form: no coprime pairs in the domain");
    r.empirical = total / static_cast<double>(r.domain_size);

    CRational prod = 1;
    Rational slack = 0;
    for (std::uint32_t p : numutil::primes_up_to(opt.B)) {
        const LocalIntegral li = form_integral(F, u, p, L);
        const BigInt p2 = prime_power(p, 2);
        const Rational norm(p2, p2 - 1);
        prod = prod * scale(li.value, norm);
        slack += li.slack * norm;
    }
    r.predicted = prod.to_complex();
    r.truncation_slack = directed(slack);
    r.tail_slack = u.max_deviation * directed(form_tail_mass(F, opt.B));
    r.delta_term = u.max_deviation * static_cast<double>(r.delta_count) / static_cast<double>(r.domain_size);
    r.seconds = seconds_since(t0);
    return r;
}

}  // namespace sievecraft::avgprod
