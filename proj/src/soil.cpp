#include "sievecraft/soil.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <set>

#include "sievecraft/errors.hpp"
#include "sievecraft/localdens.hpp"
#include "sievecraft/numutil.hpp"

namespace sievecraft::soil {

namespace {

constexpr u128 kSaturated = ~static_cast<u128>(0);
constexpr unsigned kMaxLocalLabels = 24;

u128 sat_mul(u128 a, u128 b) {
    if (a == 0 || b == 0) return 0;
    if (a > kSaturated / b) return kSaturated;
    return a * b;
}

u128 square(u64 M) { return static_cast<u128>(M) * M; }

bool is_sorted_unique(const Subset& d) {
    for (std::size_t i = 1; i < d.size(); ++i)
        if (d[i - 1] >= d[i]) return false;
    return true;
}

Subset from_mask(const Subset& base, u64 mask) {
    Subset out;
    for (unsigned i = 0; i < base.size(); ++i)
        if (mask >> i & 1) out.push_back(base[i]);
    return out;
}

}  // namespace

void validate(const SoilSpec& soil) {
    for (u64 w : soil.weights)
        if (w < 2) throw ShapeError("soil: every weight must be at least 2");
    if (!soil.labels.empty() && soil.labels.size() != soil.weights.size())
        throw ShapeError("soil: labels and weights differ in length");
    for (const Subset& d : soil.r) {
        if (!is_sorted_unique(d)) throw ShapeError("soil: r(a) must be sorted without repeats");
        if (!d.empty() && d.back() >= soil.weights.size()) throw ShapeError("soil: label index out of range");
    }
    if (!soil.f) throw ShapeError("soil: f is not set");
}

u128 weight(const SoilSpec& soil, const Subset& d) {
    u128 h = 1;
    for (auto i : d) h = sat_mul(h, soil.weights.at(i));
    return h;
}

Complex SieveBoundConstants::g_value(const Subset& d1, const Subset& d2) const {
    if (multiplicative_g) {
        if (!d2.empty()) return 0.0;
        Complex v = 1.0;
        for (auto i : d1) v *= multiplicative_g->at(i);
        return v;
    }
    if (!g) throw ShapeError("sieve constants: g is not set");
    return g(d1, d2);
}

SoilEvaluator::SoilEvaluator(SoilSpec soil) : soil_(std::move(soil)) {
    validate(soil_);
    const std::size_t L = soil_.weights.size();
    holders_.assign(L, {});
    label_order_.resize(L);
    std::iota(label_order_.begin(), label_order_.end(), 0u);
    std::stable_sort(label_order_.begin(), label_order_.end(),
                     [&](unsigned a, unsigned b) { return soil_.weights[a] < soil_.weights[b]; });

    elements_.resize(soil_.r.size());
    for (std::size_t a = 0; a < soil_.r.size(); ++a) {
        const Subset& ra = soil_.r[a];
        if (ra.size() > kMaxLocalLabels) throw ResourceError("soil: r(a) has too many labels to tabulate");
        Element& e = elements_[a];
        for (auto i : ra) {
            e.local_weights.push_back(soil_.weights[i]);
            holders_[i].push_back(static_cast<std::uint32_t>(a));
        }
        e.by_weight.resize(ra.size());
        std::iota(e.by_weight.begin(), e.by_weight.end(), 0u);
        std::stable_sort(e.by_weight.begin(), e.by_weight.end(),
                         [&](unsigned x, unsigned y) { return e.local_weights[x] < e.local_weights[y]; });
        const u64 full = u64{1} << ra.size();
        e.f.resize(full);
        for (u64 mask = 0; mask < full; ++mask) {
            e.f[mask] = soil_.f(a, from_mask(ra, mask));
            f_max_ = std::max(f_max_, std::abs(e.f[mask]));
        }
        // Subset-sum transform with signs: moebius[S] = sum_{T in S} (-1)^{|S-T|} f[T].
        e.moebius = e.f;
        for (unsigned bit = 0; bit < ra.size(); ++bit)
            for (u64 mask = 0; mask < full; ++mask)
                if (mask >> bit & 1) e.moebius[mask] -= e.moebius[mask ^ (u64{1} << bit)];
    }
}

template <class Visit>
void SoilEvaluator::for_each_local(const Element& e, u128 limit, Visit&& visit) const {
    const std::size_t k = e.by_weight.size();
    auto rec = [&](auto&& self, std::size_t start, u128 h, u64 mask) -> void {
        visit(mask, h);
        for (std::size_t i = start; i < k; ++i) {
            const unsigned j = e.by_weight[i];
            const u128 nh = sat_mul(h, e.local_weights[j]);
            if (nh > limit) break;
            self(self, i + 1, nh, mask | (u64{1} << j));
        }
    };
    if (limit >= 1) rec(rec, 0, 1, 0);
}

template <class Visit>
void SoilEvaluator::for_each_global(u128 limit, Visit&& visit) const {
    Subset current;
    auto rec = [&](auto&& self, std::size_t start, u128 h) -> void {
        Subset sorted = current;
        std::sort(sorted.begin(), sorted.end());
        visit(sorted, h);
        for (std::size_t i = start; i < label_order_.size(); ++i) {
            const unsigned j = label_order_[i];
            const u128 nh = sat_mul(h, soil_.weights[j]);
            if (nh > limit) break;
            current.push_back(j);
            self(self, i + 1, nh);
            current.pop_back();
        }
    };
    if (limit >= 1) rec(rec, 0, 1);
}

std::optional<u64> SoilEvaluator::local_mask(std::size_t a, const Subset& d) const {
    const Subset& ra = soil_.r[a];
    u64 mask = 0;
    std::size_t j = 0;
    for (auto label : d) {
        while (j < ra.size() && ra[j] < label) ++j;
        if (j == ra.size() || ra[j] != label) return std::nullopt;
        mask |= u64{1} << j;
    }
    return mask;
}

Complex SoilEvaluator::direct_sum() const {
    Complex s = 0.0;
    for (const Element& e : elements_) s += e.f.back();
    return s;
}

Complex SoilEvaluator::A_sum(const Subset& d1, const Subset& d2) const {
    if (!is_sorted_unique(d1) || !is_sorted_unique(d2)) throw DomainError("A_sum: subsets must be sorted");
    if (!std::includes(d1.begin(), d1.end(), d2.begin(), d2.end()))
        throw DomainError("A_sum: d2 is not contained in d1");
    Complex s = 0.0;
    for (std::size_t a = 0; a < elements_.size(); ++a) {
        if (!local_mask(a, d1)) continue;
        s += elements_[a].f[*local_mask(a, d2)];
    }
    return s;
}

u64 SoilEvaluator::S_count(const Subset& d) const {
    if (!is_sorted_unique(d)) throw DomainError("S_count: subset must be sorted");
    if (d.empty()) return elements_.size();
    u64 n = 0;
    for (auto a : holders_.at(d.front()))
        if (local_mask(a, d)) ++n;
    return n;
}

Complex SoilEvaluator::truncated_estimate(u64 M) const {
    if (M < 1) throw DomainError("truncated_estimate: M must be positive");
    Complex s = 0.0;
    for (const Element& e : elements_)
        for_each_local(e, M, [&](u64 mask, u128) { s += e.moebius[mask]; });
    return s;
}

double SoilEvaluator::ridd_bound(u64 M) const {
    if (M < 1) throw DomainError("ridd_bound: M must be positive");
    const u128 M2 = square(M);
    long double total = 0.0L;
    for (const Element& e : elements_) {
        for_each_local(e, M2, [&](u64 mask, u128 h) {
            if (h > M) total += std::pow(3.0L, std::popcount(mask)) + 3.0L;
        });
        for (u64 w : e.local_weights)
            if (w > M2) total += 1.0L;
    }
    return static_cast<double>(total * f_max_);
}

std::vector<u64> SoilEvaluator::critical_levels() const {
    std::set<u64> levels{1};
    const u64 cap = std::numeric_limits<u64>::max();
    auto add = [&](u128 v) {
        if (v >= 1 && v <= cap) levels.insert(static_cast<u64>(v));
    };
    std::set<u128> hs;
    for (const Element& e : elements_) {
        const u64 full = u64{1} << e.local_weights.size();
        for (u64 mask = 1; mask < full; ++mask) {
            u128 h = 1;
            for (unsigned i = 0; i < e.local_weights.size(); ++i)
                if (mask >> i & 1) h = sat_mul(h, e.local_weights[i]);
            hs.insert(h);
        }
    }
    for (u128 h : hs) {
        add(h - 1);
        add(h);
        if (h <= cap) {
            const u64 r = numutil::isqrt(static_cast<u64>(h));
            const u64 c = (static_cast<u128>(r) * r == h) ? r : r + 1;  // ceil(sqrt(h))
            add(c - 1);
            add(c);
        }
    }
    return {levels.begin(), levels.end()};
}

HypothesisCheck SoilEvaluator::check_hypotheses(const SieveBoundConstants& K) const {
    HypothesisCheck out;
    auto fail = [&](std::string why) {
        out.ok = false;
        out.failure = std::move(why);
        return out;
    };
    for (double c : {K.X, K.C0, K.C1, K.C2, K.C3, K.C4})
        if (!(c >= 0.0)) return fail("constants must be nonnegative");
    if (f_max_ > K.C3) return fail("|f| exceeds C3");

    // (A1): only subsets with S_d > 0 can violate it.
    std::set<Subset> seen;
    for (std::size_t a = 0; a < elements_.size(); ++a) {
        const u64 full = u64{1} << soil_.r[a].size();
        for (u64 mask = 0; mask < full; ++mask) {
            Subset d = from_mask(soil_.r[a], mask);
            if (!seen.insert(d).second) continue;
            const long double h = static_cast<long double>(weight(soil_, d));
            const long double rhs = static_cast<long double>(K.C0) * K.X * std::pow((long double)K.C1, d.size()) / h +
                                    static_cast<long double>(K.C0) * std::pow((long double)K.C2, d.size());
            if (static_cast<long double>(S_count(d)) > rhs) return fail("(A1) fails for a subset with S_d > 0");
        }
    }

    // |g| <= C4 over all d2 within d1.
    if (K.multiplicative_g) {
        if (K.multiplicative_g->size() != soil_.weights.size()) return fail("multiplicative g has wrong length");
        long double worst = 1.0L;
        for (const Complex& v : *K.multiplicative_g) worst *= std::max(1.0L, (long double)std::abs(v));
        if (worst > K.C4) return fail("|g| exceeds C4");
    } else {
        if (soil_.weights.size() > 12) throw ResourceError("check_hypotheses: too many labels for a general g");
        const u64 full = u64{1} << soil_.weights.size();
        Subset all(soil_.weights.size());
        std::iota(all.begin(), all.end(), 0u);
        for (u64 m1 = 0; m1 < full; ++m1)
            for (u64 m2 = m1;; m2 = (m2 - 1) & m1) {
                if (std::abs(K.g_value(from_mask(all, m1), from_mask(all, m2))) > K.C4)
                    return fail("|g| exceeds C4");
                if (m2 == 0) break;
            }
    }
    return out;
}

Complex SoilEvaluator::yugo_main_term(const SieveBoundConstants& K) const {
    if (K.multiplicative_g) {
        Complex prod = 1.0;
        for (std::size_t i = 0; i < soil_.weights.size(); ++i)
            prod *= 1.0 - K.multiplicative_g->at(i) / static_cast<double>(soil_.weights[i]);
        return K.X * prod;
    }
    if (soil_.weights.size() > 16) throw ResourceError("yugo_main_term: too many labels for a general g");
    const u64 full = u64{1} << soil_.weights.size();
    Subset all(soil_.weights.size());
    std::iota(all.begin(), all.end(), 0u);
    Complex s = 0.0;
    for (u64 m1 = 0; m1 < full; ++m1) {
        const Subset d = from_mask(all, m1);
        const double h = static_cast<double>(weight(soil_, d));
        for (u64 m2 = m1;; m2 = (m2 - 1) & m1) {
            const double sign = (std::popcount(m1 ^ m2) & 1) ? -1.0 : 1.0;
            s += sign * K.g_value(d, from_mask(all, m2)) / h;
            if (m2 == 0) break;
        }
    }
    return K.X * s;
}

double SoilEvaluator::yugo_bound(const SieveBoundConstants& K, u64 M) const {
    if (M < 1) throw DomainError("yugo_bound: M must be positive");
    if (M > K.M0) throw DomainError("yugo_bound: M exceeds M0");
    const u128 M2 = square(M);
    using LD = long double;

    // First term: the full sum over all d by product formulas, minus the part with h(d) <= M.
    LD p2 = 1, p3 = 1, p1 = 1;
    for (u64 w : soil_.weights) {
        p2 *= 1 + 2.0L / w;
        p3 *= 1 + 3.0L * K.C1 / w;
        p1 *= 1 + static_cast<LD>(K.C1) / w;
    }
    LD full = K.C4 * p2 + static_cast<LD>(K.C3) * K.C0 * (p3 + 3 * p1);
    LD head = 0;
    for_each_global(M, [&](const Subset& d, u128 h) {
        const unsigned k = static_cast<unsigned>(d.size());
        head += (K.C4 * std::pow(2.0L, k) +
                 static_cast<LD>(K.C3) * K.C0 * std::pow((LD)K.C1, k) * (std::pow(3.0L, k) + 3)) /
                static_cast<LD>(h);
    });
    const LD first = K.X * std::max<LD>(0, full - head);

    // Second term.
    LD second = 0;
    for_each_global(M2, [&](const Subset& d, u128 h) {
        if (h <= M) return;
        const unsigned k = static_cast<unsigned>(d.size());
        second += static_cast<LD>(K.C0) * std::pow((LD)K.C2, k) * (std::pow(3.0L, k) + 3);
    });
    second *= K.C3;

    // Third term: residuals of (A2).
    LD third = 0;
    for_each_global(M, [&](const Subset& d, u128 h) {
        std::vector<std::uint32_t> members;
        if (d.empty()) {
            members.resize(elements_.size());
            std::iota(members.begin(), members.end(), 0u);
        } else {
            unsigned best = d.front();
            for (auto i : d)
                if (holders_[i].size() < holders_[best].size()) best = i;
            for (auto a : holders_[best])
                if (local_mask(a, d)) members.push_back(a);
        }
        const u64 full = u64{1} << d.size();
        std::vector<u64> masks(members.size());
        for (std::size_t t = 0; t < members.size(); ++t) masks[t] = *local_mask(members[t], d);
        for (u64 sub = 0; sub < full; ++sub) {
            const Subset d2 = from_mask(d, sub);
            Complex A = 0.0;
            for (std::size_t t = 0; t < members.size(); ++t) {
                // Map the mask of d2 within d onto the mask within r(a).
                u64 local = 0, dm = masks[t];
                for (unsigned bit = 0; dm; ++bit) {
                    const u64 low = dm & -dm;
                    if (sub >> bit & 1) local |= low;
                    dm ^= low;
                }
                A += elements_[members[t]].f[local];
            }
            third += std::abs(A - K.X * K.g_value(d, d2) / static_cast<double>(h));
        }
    });

    // Fourth term.
    LD fourth = 0;
    for (std::size_t i = 0; i < soil_.weights.size(); ++i)
        if (soil_.weights[i] > M2) fourth += holders_[i].size();
    fourth *= K.C3;

    return static_cast<double>(first + second + third + fourth);
}

Complex direct_sum(const SoilSpec& soil) { return SoilEvaluator(soil).direct_sum(); }
Complex A_sum(const SoilSpec& soil, const Subset& d1, const Subset& d2) { return SoilEvaluator(soil).A_sum(d1, d2); }
u64 S_count(const SoilSpec& soil, const Subset& d) { return SoilEvaluator(soil).S_count(d); }
Complex truncated_estimate(const SoilSpec& soil, u64 M) { return SoilEvaluator(soil).truncated_estimate(M); }
double ridd_bound(const SoilSpec& soil, u64 M) { return SoilEvaluator(soil).ridd_bound(M); }
double yugo_bound(const SoilSpec& soil, const SieveBoundConstants& K, u64 M) {
    return SoilEvaluator(soil).yugo_bound(K, M);
}

SoilSpec polynomial_soil(const IntPoly& P, u64 N, unsigned m) {
    if (N < 1) throw DomainError("polynomial_soil: N must be positive");
    if (m < 2) throw DomainError("polynomial_soil: m must be at least 2");
    if (!is_squarefree_poly(P)) throw DomainError("polynomial_soil: polynomial is not square-free");
    std::vector<u64> values(N);
    u64 vmax = 0;
    for (u64 a = 1; a <= N; ++a) {
        const BigInt v = abs(eval(P, BigInt(static_cast<unsigned long>(a))));
        if (v == 0) throw DomainError("polynomial_soil: P vanishes inside the range");
        if (!mpz_fits_ulong_p(v.get_mpz_t())) throw ResourceError("polynomial_soil: values exceed 64 bits");
        values[a - 1] = mpz_get_ui(v.get_mpz_t());
        vmax = std::max(vmax, values[a - 1]);
    }
    SoilSpec soil;
    std::vector<u64> primes;
    const u64 root = numutil::isqrt(vmax);
    for (std::uint32_t p : numutil::primes_up_to(root)) {
        const BigInt pm = localdens::prime_power(p, m);
        if (pm > BigInt(static_cast<unsigned long>(vmax))) break;
        primes.push_back(p);
        soil.weights.push_back(pm.get_ui());
        soil.labels.push_back(std::to_string(p));
    }
    soil.r.resize(N);
    for (u64 a = 0; a < N; ++a) {
        const numutil::Factorization fac = numutil::factorize_abs(values[a]);
        // An opaque cofactor is a product of two distinct primes, so it never carries a square.
        for (const auto& pe : fac.factors) {
            if (pe.exponent < m) continue;
            const auto it = std::lower_bound(primes.begin(), primes.end(), pe.prime);
            soil.r[a].push_back(static_cast<std::uint32_t>(it - primes.begin()));
        }
    }
    soil.f = [](std::size_t, const Subset& d) { return Complex(d.empty() ? 1.0 : 0.0); };
    return soil;
}

SieveBoundConstants polynomial_soil_constants(const IntPoly& P, const SoilSpec& soil, u64 N, unsigned m) {
    SieveBoundConstants K;
    K.X = static_cast<double>(N);
    K.C0 = 1.0;
    K.C3 = 1.0;
    K.M0 = N;
    std::vector<Complex> g;
    double lmax = 1.0, c4 = 1.0;
    for (const std::string& label : soil.labels) {
        const u64 p = std::stoull(label);
        const double l = localdens::count_roots_trusted(P, p, m).get_d();
        g.emplace_back(l);
        lmax = std::max(lmax, l);
        c4 *= std::max(1.0, l);
    }
    K.C1 = K.C2 = lmax;
    K.C4 = c4;
    K.multiplicative_g = std::move(g);
    return K;
}

}  // namespace sievecraft::soil

namespace sievecraft::soil {

namespace {

// splitmix64, so the corpus does not depend on library distributions.
struct SplitMix {
    u64 state;
    u64 next() {
        u64 z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    u64 below(u64 n) { return next() % n; }
};

u64 local_index(const Subset& r, const Subset& d) {
    u64 mask = 0;
    std::size_t j = 0;
    for (std::size_t i = 0; i < r.size() && j < d.size(); ++i)
        if (r[i] == d[j]) mask |= u64{1} << i, ++j;
    return mask;
}

constexpr std::size_t kMaxFailures = 8;

}  // namespace

SoilSpec random_soil(u64 seed, const RandomSoilOptions& opt) {
    if (opt.max_elements < 1 || opt.max_labels < 1 || opt.max_labels > kMaxLocalLabels || opt.max_weight < 2)
        throw DomainError("random_soil: invalid options");
    SplitMix rng{seed};
    const std::size_t n = 1 + rng.below(opt.max_elements);
    const unsigned k = 1 + static_cast<unsigned>(rng.below(opt.max_labels));
    SoilSpec soil;
    for (unsigned i = 0; i < k; ++i) soil.weights.push_back(2 + rng.below(opt.max_weight - 1));
    soil.r.resize(n);
    auto table = std::make_shared<std::vector<std::vector<Complex>>>(n);
    for (std::size_t a = 0; a < n; ++a) {
        for (std::uint32_t i = 0; i < k; ++i)
            if (rng.below(2)) soil.r[a].push_back(i);
        auto& t = (*table)[a];
        t.resize(std::size_t{1} << soil.r[a].size());
        for (Complex& v : t) {
            // Real and imaginary parts in {-8, ..., 8} / 8, redrawn until inside the unit disc.
            for (;;) {
                const int re = static_cast<int>(rng.below(17)) - 8, im = static_cast<int>(rng.below(17)) - 8;
                if (re * re + im * im <= 64) {
                    v = Complex(re / 8.0, im / 8.0);
                    break;
                }
            }
        }
    }
    soil.f = [table, r = soil.r](std::size_t a, const Subset& d) { return (*table)[a][local_index(r[a], d)]; };
    return soil;
}

SieveBoundConstants exact_constants(const SoilEvaluator& ev) {
    const SoilSpec& soil = ev.spec();
    const std::size_t k = soil.weights.size();
    if (k > 12) throw ResourceError("exact_constants: too many labels");
    SieveBoundConstants K;
    K.X = static_cast<double>(soil.r.size());
    K.C0 = 1.0;
    K.C3 = ev.f_max();
    Subset all(k);
    std::iota(all.begin(), all.end(), 0u);
    const u64 full = u64{1} << k;
    double base = 1.0;
    for (u64 m = 1; m < full; ++m) {
        const Subset d = from_mask(all, m);
        const u64 s = ev.S_count(d);
        if (s > 0) base = std::max(base, std::pow(static_cast<double>(s), 1.0 / static_cast<double>(d.size())));
    }
    // Guard against pow rounding below the exact root.
    K.C1 = K.C2 = base * (1 + 1e-12);
    auto g = std::make_shared<std::vector<Complex>>(full * full);
    double c4 = 0.0;
    for (u64 m1 = 0; m1 < full; ++m1) {
        const Subset d1 = from_mask(all, m1);
        const double h = static_cast<double>(weight(soil, d1));
        for (u64 m2 = m1;; m2 = (m2 - 1) & m1) {
            const Complex v = h * ev.A_sum(d1, from_mask(all, m2)) / K.X;
            (*g)[m1 * full + m2] = v;
            c4 = std::max(c4, std::abs(v));
            if (m2 == 0) break;
        }
    }
    K.C4 = c4;
    K.g = [g, full, all](const Subset& d1, const Subset& d2) {
        return (*g)[local_index(all, d1) * full + local_index(all, d2)];
    };
    u128 h = weight(soil, all);
    K.M0 = h > std::numeric_limits<u64>::max() ? std::numeric_limits<u64>::max() : static_cast<u64>(h);
    return K;
}

void SieveCheckReport::merge(const SieveCheckReport& o) {
    soils += o.soils;
    levels += o.levels;
    ridd_violations += o.ridd_violations;
    worst_ridd_ratio = std::max(worst_ridd_ratio, o.worst_ridd_ratio);
    yugo_soils += o.yugo_soils;
    yugo_levels += o.yugo_levels;
    yugo_violations += o.yugo_violations;
    worst_yugo_ratio = std::max(worst_yugo_ratio, o.worst_yugo_ratio);
    for (const auto& f : o.failures)
        if (failures.size() < kMaxFailures) failures.push_back(f);
}

SieveCheckReport sieve_check(const SoilEvaluator& ev, const SieveBoundConstants* K, double ridd_factor,
                             const std::string& tag) {
    SieveCheckReport out;
    out.soils = 1;
    const Complex direct = ev.direct_sum();
    // Sums of dyadic values are exact; the tolerance only absorbs rounding in the bounds.
    const double tol = 1e-9 * (1.0 + static_cast<double>(ev.spec().r.size()));
    auto note = [&](const std::string& what) {
        if (out.failures.size() < kMaxFailures) out.failures.push_back(tag + ": " + what);
    };
    const std::vector<u64> levels = ev.critical_levels();
    for (u64 M : levels) {
        const double diff = std::abs(direct - ev.truncated_estimate(M));
        const double bound = ridd_factor * ev.ridd_bound(M);
        ++out.levels;
        if (bound > 0 && diff > tol) out.worst_ridd_ratio = std::max(out.worst_ridd_ratio, diff / bound);
        if (diff > bound + tol) {
            ++out.ridd_violations;
            note("ridd_bound fails at M = " + std::to_string(M) + ": difference " + std::to_string(diff) + " > bound " +
                 std::to_string(bound));
        }
    }
    if (K && ev.check_hypotheses(*K).ok) {
        out.yugo_soils = 1;
        const double diff = std::abs(direct - ev.yugo_main_term(*K));
        const double ytol = tol * (1.0 + K->X);
        for (u64 M : levels) {
            if (M > K->M0) break;
            const double bound = ev.yugo_bound(*K, M);
            ++out.yugo_levels;
            if (bound > 0 && diff > ytol) out.worst_yugo_ratio = std::max(out.worst_yugo_ratio, diff / bound);
            if (diff > bound + ytol) {
                ++out.yugo_violations;
                note("yugo_bound fails at M = " + std::to_string(M) + ": difference " + std::to_string(diff) +
                     " > bound " + std::to_string(bound));
            }
        }
    }
    return out;
}

PolynomialSoilCase random_polynomial_case(u64 seed) {
    SplitMix rng{seed ^ 0x5bd1e9955bd1e995ULL};
    for (;;) {
        const int deg = 1 + static_cast<int>(rng.below(3));
        std::vector<BigInt> c;
        for (int i = 0; i <= deg; ++i) c.emplace_back(static_cast<long>(rng.below(19)) - 9);
        if (c.back() == 0) continue;
        const IntPoly P(std::move(c));
        const u64 N = 50 + rng.below(251);
        if (!is_squarefree_poly(P)) continue;
        bool vanishes = false;
        for (u64 x = 1; x <= N && !vanishes; ++x) vanishes = eval(P, BigInt(static_cast<unsigned long>(x))) == 0;
        if (!vanishes) return {P, N};
    }
}

SieveCheckReport sieve_suite(u64 seed, unsigned random_soils, unsigned polynomial_soils, double ridd_factor) {
    SieveCheckReport total;
    for (unsigned i = 0; i < random_soils; ++i) {
        const SoilEvaluator ev(random_soil(seed + i));
        const SieveBoundConstants K = exact_constants(ev);
        total.merge(sieve_check(ev, &K, ridd_factor, "random soil " + std::to_string(seed + i)));
    }
    for (unsigned i = 0; i < polynomial_soils; ++i) {
        const PolynomialSoilCase pc = random_polynomial_case(seed + i);
        const SoilEvaluator ev(polynomial_soil(pc.P, pc.N));
        const SieveBoundConstants K = polynomial_soil_constants(pc.P, ev.spec(), pc.N);
        total.merge(sieve_check(ev, &K, ridd_factor, to_string(pc.P) + " up to " + std::to_string(pc.N)));
    }
    return total;
}

}  // namespace sievecraft::soil
