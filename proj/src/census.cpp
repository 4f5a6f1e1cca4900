#include "sievecraft/census.hpp"

#include <algorithm>
#include <array>
#include <numeric>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <set>
#include <thread>

#include "sievecraft/errors.hpp"
#include "sievecraft/exponents.hpp"
#include "sievecraft/fp.hpp"
#include "sievecraft/localdens.hpp"
#include "sievecraft/numutil.hpp"
#include "detail/int_eval.hpp"

namespace sievecraft::census {

namespace {

using i128 = __int128;
using detail::abs_to_u64;
using detail::checked_add;
using detail::checked_mul;
using detail::eval_form;
using detail::eval_univ;
using detail::small_coeffs;

template <class Fn>
void parallel_chunks(u64 n, Fn&& fn) {
    detail::parallel_chunks(n, worker_count(), std::forward<Fn>(fn));
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Residues r mod p with p | P(r); all residues when P vanishes mod p.
std::vector<u64> roots_mod_p(const IntPoly& P, u64 p) {
    const fp::Poly f = fp::reduce(P, p);
    if (f.empty()) {
        std::vector<u64> all(p);
        for (u64 r = 0; r < p; ++r) all[r] = r;
        return all;
    }
    return fp::roots(f, p);
}

constexpr std::uint8_t kSmallHit = 1;  // p^m | P(x) for some p <= threshold
constexpr std::uint8_t kLargeHit = 2;  // p^m | P(x) for some p > threshold

struct UnivScan {
    std::vector<std::uint8_t> flags;  // per x - 1
    std::vector<bool> zero;
    u64 bound = 0;                    // trial bound B
};

// Flags every x in [1, N] by the size of the primes whose m-th power divides P(x). Primes up to
// B are sieved by residue classes; B exceeds the cube root of max |P|, so the cofactor left in
// each value is 1, q, q^2 or q q' with primes q, q' > B.
UnivScan scan_univ(const IntPoly& P, u64 N, unsigned m, u64 threshold, u64 min_bound) {
    const char* what = "census";
    const std::vector<i64> c = small_coeffs(P.coeffs(), what);
    UnivScan scan;
    std::vector<u64> values(N);
    scan.zero.assign(N, false);
    u64 vmax = 0;
    for (u64 x = 1; x <= N; ++x) {
        values[x - 1] = abs_to_u64(eval_univ(c, static_cast<i64>(x), what), what);
        scan.zero[x - 1] = values[x - 1] == 0;
        vmax = std::max(vmax, values[x - 1]);
    }
    const u64 B = std::max({min_bound, numutil::icbrt(vmax) + 1, threshold, u64{2}});
    if (B >= (u64{1} << 32)) throw ResourceError("census: trial-division bound exceeds 2^32");
    scan.bound = B;
    const std::vector<std::uint32_t> primes = numutil::primes_up_to(B);
    std::vector<std::vector<u64>> roots(primes.size());
    for (std::size_t i = 0; i < primes.size(); ++i) roots[i] = roots_mod_p(P, primes[i]);

    scan.flags.assign(N, 0);
    parallel_chunks(N, [&](u64 lo, u64 hi) {
        // x runs over [lo + 1, hi].
        for (std::size_t i = 0; i < primes.size(); ++i) {
            const u64 p = primes[i];
            const std::uint8_t hit = p <= threshold ? kSmallHit : kLargeHit;
            for (u64 r : roots[i]) {
                // First x >= lo + 1 with x = r (mod p).
                const u64 start = lo + 1;
                u64 x = start + (r + p - start % p) % p;
                for (; x <= hi; x += p) {
                    u64& v = values[x - 1];
                    if (v == 0) continue;
                    unsigned e = 0;
                    while (v % p == 0) {
                        v /= p;
                        ++e;
                    }
                    if (e >= m) scan.flags[x - 1] |= hit;
                }
            }
        }
        for (u64 x = lo + 1; x <= hi; ++x) {
            const u64 v = values[x - 1];
            if (scan.zero[x - 1]) {
                scan.flags[x - 1] |= kSmallHit | kLargeHit;
                continue;
            }
            if (m == 2 && v > 1 && numutil::is_perfect_square(v)) scan.flags[x - 1] |= kLargeHit;
        }
    });
    return scan;
}

void require_squarefree(const IntPoly& P, const char* what) {
    if (P.degree() < 1) throw DomainError(std::string(what) + ": degree must be at least 1");
    if (!is_squarefree_poly(P)) throw DomainError(std::string(what) + ": polynomial is not square-free");
}

void require_squarefree(const BinForm& F, const char* what) {
    if (!is_squarefree_poly(F)) throw DomainError(std::string(what) + ": form is not square-free");
}

bool coprime(i64 x, i64 z) { return std::gcd(x, z) == 1; }

// Largest prime factor of |n|, or 1.
u64 largest_prime_factor(const BigInt& n) {
    BigInt t = abs(n);
    if (t <= 1) return 1;
    u64 best = 1;
    for (std::uint32_t p : numutil::primes_up_to(1u << 20)) {
        if (mpz_divisible_ui_p(t.get_mpz_t(), p)) {
            best = p;
            while (mpz_divisible_ui_p(t.get_mpz_t(), p)) mpz_divexact_ui(t.get_mpz_t(), t.get_mpz_t(), p);
        }
        if (t == 1) return best;
    }
    if (!mpz_fits_ulong_p(t.get_mpz_t())) throw ResourceError("largest_prime_factor: cofactor exceeds 64 bits");
    const numutil::Factorization f = numutil::factorize_abs(t.get_ui());
    if (f.has_opaque()) throw ResourceError("largest_prime_factor: cofactor could not be split");
    for (const auto& pe : f.factors) best = std::max(best, pe.prime);
    return best;
}

}  // namespace

unsigned worker_count() {
    if (const char* env = std::getenv("SIEVECRAFT_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::string to_string(BoxConvention c) {
    return c == BoxConvention::FullBox ? "full-box" : "positive-quadrant";
}

CensusReport count_powerfree_values(const IntPoly& P, u64 N, unsigned m, u64 main_bound) {
    require_squarefree(P, "count_powerfree_values");
    if (N < 1) throw DomainError("count_powerfree_values: N must be positive");
    if (m < 2) throw DomainError("count_powerfree_values: m must be at least 2");
    const auto t0 = Clock::now();
    const UnivScan scan = scan_univ(P, N, m, 0, 10000);
    CensusReport rep;
    rep.poly = to_string(P);
    rep.N = N;
    rep.m = m;
    rep.convention = "interval";
    rep.sieve_bound = scan.bound;
    for (u64 i = 0; i < N; ++i) {
        if (scan.zero[i]) ++rep.zero_values;
        else if (scan.flags[i] == 0) ++rep.observed;
    }
    const eulerprod::EulerEstimate est = eulerprod::density_univ(P, main_bound, m);
    rep.main_bound = main_bound;
    rep.scale = static_cast<double>(N);
    rep.main_lo = rep.scale * est.lower;
    rep.main_hi = rep.scale * est.upper;
    rep.method = "residue sieve to B plus square test of the cofactor";
    rep.seconds = seconds_since(t0);
    return rep;
}

CensusReport count_squarefree_form(const BinForm& F, u64 N, const FormCensusOptions& opt) {
    require_squarefree(F, "count_squarefree_form");
    if (N < 1) throw DomainError("count_squarefree_form: N must be positive");
    if (opt.sector && opt.convention != BoxConvention::FullBox)
        throw DomainError("count_squarefree_form: sectors require the full box");
    const auto t0 = Clock::now();
    const char* what = "count_squarefree_form";
    const std::vector<i64> a = small_coeffs(F.coeffs(), what);
    const i64 n = static_cast<i64>(N);
    const i64 lo = opt.convention == BoxConvention::FullBox ? -n : 1;

    // Largest |F| on the box bounds the table size.
    u64 vmax = 0;
    for (i64 x = lo; x <= n; ++x)
        for (i64 z = lo; z <= n; ++z) vmax = std::max(vmax, abs_to_u64(eval_form(a, x, z, what), what));
    std::optional<numutil::SquarefreeTable> table;
    if (vmax <= (u64{1} << 30)) table.emplace(std::max<u64>(vmax, 1));

    CensusReport rep;
    rep.poly = to_string(F);
    rep.N = N;
    rep.m = 2;
    rep.convention = to_string(opt.convention);
    rep.coprime = opt.coprime;
    rep.sector = opt.sector.has_value();
    const u64 width = static_cast<u64>(n - lo + 1);
    std::vector<u64> counts(width, 0), zeros(width, 0);
    parallel_chunks(width, [&](u64 r0, u64 r1) {
        for (u64 r = r0; r < r1; ++r) {
            const i64 x = lo + static_cast<i64>(r);
            for (i64 z = lo; z <= n; ++z) {
                if (opt.coprime && !coprime(x, z)) continue;
                if (opt.sector && !opt.sector->contains(x, z)) continue;
                const u64 v = abs_to_u64(eval_form(a, x, z, what), what);
                if (v == 0) {
                    ++zeros[r];
                    continue;
                }
                if (table ? table->test(v) : numutil::is_squarefree(v)) ++counts[r];
            }
        }
    });
    for (u64 r = 0; r < width; ++r) {
        rep.observed += counts[r];
        rep.zero_values += zeros[r];
    }
    const eulerprod::EulerEstimate est = eulerprod::density_form(F, opt.main_bound, opt.coprime);
    rep.main_bound = opt.main_bound;
    const double dn = static_cast<double>(N);
    if (opt.sector) rep.scale = opt.sector->box_area(dn);
    else rep.scale = opt.convention == BoxConvention::FullBox ? 4 * dn * dn : dn * dn;
    rep.main_lo = rep.scale * est.lower;
    rep.main_hi = rep.scale * est.upper;
    rep.sieve_bound = 0;
    rep.method = table ? "pair scan with square-free table" : "pair scan with per-value factorization";
    rep.seconds = seconds_since(t0);
    return rep;
}

u64 delta_census_univ(const IntPoly& P, u64 N, std::optional<u64> threshold) {
    require_squarefree(P, "delta_census_univ");
    if (N < 1) throw DomainError("delta_census_univ: N must be positive");
    const u64 T = threshold.value_or(numutil::isqrt(N));
    const UnivScan scan = scan_univ(P, N, 2, T, 2);
    u64 count = 0;
    for (u64 i = 0; i < N; ++i)
        if (scan.flags[i] & kLargeHit) ++count;
    return count;
}

u64 delta_census_univ_by_primes(const IntPoly& P, u64 N, std::optional<u64> threshold) {
    require_squarefree(P, "delta_census_univ_by_primes");
    if (N < 1) throw DomainError("delta_census_univ_by_primes: N must be positive");
    const u64 T = threshold.value_or(numutil::isqrt(N));
    const char* what = "delta_census_univ_by_primes";
    const std::vector<i64> c = small_coeffs(P.coeffs(), what);
    std::vector<bool> hit(N + 1, false);
    u64 vmax = 0;
    for (u64 x = 1; x <= N; ++x) {
        const u64 v = abs_to_u64(eval_univ(c, static_cast<i64>(x), what), what);
        if (v == 0) hit[x] = true;
        vmax = std::max(vmax, v);
    }
    const u64 top = numutil::isqrt(vmax);
    if (top >= (u64{1} << 32)) throw ResourceError("delta_census_univ_by_primes: prime range too large");
    for (std::uint32_t p : numutil::primes_up_to(top)) {
        if (p <= T) continue;
        const u64 p2 = u64{p} * p;
        for (const BigInt& r : localdens::roots_mod_pk_trusted(P, p, 2)) {
            u64 x = r.get_ui();
            if (x == 0) x = p2;
            for (; x <= N; x += p2) hit[x] = true;
        }
    }
    return static_cast<u64>(std::count(hit.begin() + 1, hit.end(), true));
}

namespace {

FormDelta finish_form_delta(const BinForm& F, u64 N, u64 T, std::map<u64, u64> profile, u64 count) {
    FormDelta out;
    out.count = count;
    out.threshold = T;
    out.profile = std::move(profile);
    for (const auto& [p, k] : out.profile) out.max_per_prime = std::max(out.max_per_prime, k);
    out.facil_bound = 12 * static_cast<u64>(F.degree());
    const BigInt key = discriminant(F) * F.coeffs().front() * F.coeffs().back();
    out.facil_threshold = largest_prime_factor(key == 0 ? BigInt(1) : key);
    out.facil_applicable = N >= out.facil_threshold;
    out.facil_ok = out.max_per_prime <= out.facil_bound;
    return out;
}

u64 box_max(const std::vector<i64>& a, i64 n, const char* what) {
    u64 vmax = 0;
    for (i64 x = -n; x <= n; ++x)
        for (i64 z = -n; z <= n; ++z) vmax = std::max(vmax, abs_to_u64(eval_form(a, x, z, what), what));
    return vmax;
}

i64 mod_i(i128 v, i64 m) {
    i128 r = v % m;
    if (r < 0) r += m;
    return static_cast<i64>(r);
}

}  // namespace

FormDelta delta_census_form(const BinForm& F, u64 N, std::optional<u64> threshold) {
    require_squarefree(F, "delta_census_form");
    if (N < 1) throw DomainError("delta_census_form: N must be positive");
    const u64 T = threshold.value_or(N);
    const char* what = "delta_census_form";
    const std::vector<i64> a = small_coeffs(F.coeffs(), what);
    const i64 n = static_cast<i64>(N);
    const u64 top = numutil::isqrt(box_max(a, n, what));
    if (top >= (u64{1} << 32)) throw ResourceError("delta_census_form: prime range too large");
    std::set<std::pair<i64, i64>> all;
    std::map<u64, u64> profile;
    const IntPoly fx = F.at_z_one(), fz = F.at_x_one();
    for (std::uint32_t p : numutil::primes_up_to(top)) {
        if (p <= T) continue;
        const i64 p2 = static_cast<i64>(p) * p;
        std::set<std::pair<i64, i64>> here;
        // Pairs with x = r z (mod p^2), p not dividing z; then z = r' x with p | r', p not dividing x.
        for (int chart = 0; chart < 2; ++chart) {
            for (const BigInt& rb : localdens::roots_mod_pk_trusted(chart == 0 ? fx : fz, p, 2)) {
                const i64 r = rb.get_si();
                if (chart == 1 && r % static_cast<i64>(p) != 0) continue;
                for (i64 u = -n; u <= n; ++u) {
                    if (u % static_cast<i64>(p) == 0) continue;
                    const i64 v0 = mod_i(static_cast<i128>(r) * u, p2);
                    // All v = v0 (mod p^2) in [-n, n].
                    for (i64 v = v0 - ((v0 + n) / p2) * p2; v <= n; v += p2) {
                        if (v < -n) continue;
                        const i64 x = chart == 0 ? v : u, z = chart == 0 ? u : v;
                        if (coprime(x, z)) here.insert({x, z});
                    }
                }
            }
        }
        if (!here.empty()) {
            profile[p] = here.size();
            all.insert(here.begin(), here.end());
        }
    }
    return finish_form_delta(F, N, T, std::move(profile), all.size());
}

FormDelta delta_census_form_scan(const BinForm& F, u64 N, std::optional<u64> threshold) {
    require_squarefree(F, "delta_census_form_scan");
    if (N < 1) throw DomainError("delta_census_form_scan: N must be positive");
    const u64 T = threshold.value_or(N);
    const char* what = "delta_census_form_scan";
    const std::vector<i64> a = small_coeffs(F.coeffs(), what);
    const i64 n = static_cast<i64>(N);
    std::map<u64, u64> profile;
    u64 count = 0;
    for (i64 x = -n; x <= n; ++x)
        for (i64 z = -n; z <= n; ++z) {
            if (!coprime(x, z)) continue;
            const u64 v = abs_to_u64(eval_form(a, x, z, what), what);
            if (v == 0) throw DomainError("delta_census_form_scan: F vanishes at a coprime pair");
            const numutil::Factorization f = numutil::factorize_abs(v);
            bool any = false;
            for (const auto& pe : f.factors)
                if (pe.prime > T && pe.exponent >= 2) {
                    ++profile[pe.prime];
                    any = true;
                }
            if (any) ++count;
        }
    return finish_form_delta(F, N, T, std::move(profile), count);
}

u64 TwistTable::total() const {
    u64 t = 0;
    for (const auto& [d, s] : S) t += s;
    return t;
}

TwistTable twist_census(const BinForm& F, u64 N) {
    require_squarefree(F, "twist_census");
    if (F.degree() < 3) throw DomainError("twist_census: degree must be at least 3");
    if (N < 1) throw DomainError("twist_census: N must be positive");
    const char* what = "twist_census";
    const std::vector<i64> a = small_coeffs(F.coeffs(), what);
    const i64 n = static_cast<i64>(N);
    TwistTable table;
    table.N = N;
    for (i64 x = -n; x <= n; ++x)
        for (i64 z = -n; z <= n; ++z) {
            if (!coprime(x, z)) continue;
            ++table.coprime_pairs;
            const i128 v = eval_form(a, x, z, what);
            const u64 av = abs_to_u64(v, what);
            table.max_abs_value = std::max(table.max_abs_value, av);
            if (v == 0) {
                ++table.zero_pairs;
                continue;
            }
            const numutil::SquareDecomposition sd = numutil::squarefree_decomposition_abs(av);
            const i64 d = static_cast<i64>(sd.d) * (v < 0 ? -1 : 1);
            ++table.S[d];
        }
    return table;
}

TwistDecomposition twist_decomposition(const BinForm& F, u64 N, u64 M) {
    if (M < 1) throw DomainError("twist_decomposition: M must be positive");
    const TwistTable table = twist_census(F, N);
    const FormDelta delta = delta_census_form(F, N);
    TwistDecomposition out;
    out.delta = delta.count;
    for (const auto& [d, s] : table.S)
        if (static_cast<u64>(d < 0 ? -d : d) <= M) out.small_twists += s;
    const u64 cutoff = numutil::isqrt(table.max_abs_value / M);
    for (const auto& [p, k] : delta.profile)
        if (p <= cutoff) out.large_primes += k;
    return out;
}

std::vector<unsigned> splitting_type(const IntPoly& P, u64 p) {
    if (P.degree() < 1) throw DomainError("splitting_type: degree must be at least 1");
    if (!numutil::is_prime(p)) throw DomainError("splitting_type: p must be prime");
    if (!is_irreducible(P)) throw DomainError("splitting_type: polynomial is not irreducible");
    const BigInt key = discriminant(P) * P.lead();
    if (mpz_divisible_ui_p(key.get_mpz_t(), p))
        throw DomainError("splitting_type: p divides Disc * lead; exclude ramified and degenerate primes");
    return fp::factor_degrees(fp::reduce(P, p), p);
}

namespace {

// Number of distinct prime ideals above p (0 when p is inert), read from P mod p together with
// the point at infinity when p divides the leading coefficient.
unsigned split_code(const IntPoly& P, u64 p) {
    const fp::Poly f = fp::reduce(P, p);
    const bool infinity = mpz_divisible_ui_p(P.lead().get_mpz_t(), p);
    if (f.size() <= 1) return 1;  // P is a constant mod p: only the point at infinity
    const std::vector<unsigned> degs = fp::distinct_factor_degrees(f, p);
    if (!infinity && degs.size() == 1 && static_cast<int>(degs[0]) == P.degree()) return 0;
    return static_cast<unsigned>(degs.size()) + (infinity ? 1 : 0);
}

void require_cubic_field(const IntPoly& P, const char* what) {
    if (P.degree() != 3) throw DomainError(std::string(what) + ": polynomial must be a cubic");
    if (!is_irreducible(P)) throw DomainError(std::string(what) + ": polynomial is not irreducible");
    if (content(P) != 1) throw DomainError(std::string(what) + ": polynomial must be primitive");
}

}  // namespace

double r_alpha(const IntPoly& P, double alpha, u64 d) {
    require_cubic_field(P, "r_alpha");
    if (d < 1) throw DomainError("r_alpha: d must be positive");
    const numutil::Factorization f = numutil::factorize_abs(d);
    if (f.has_opaque()) throw ResourceError("r_alpha: d could not be factored");
    double v = 1.0;
    for (const auto& pe : f.factors) {
        const unsigned k = split_code(P, pe.prime);
        if (k == 0) return 0.0;
        v *= std::exp2(alpha * (static_cast<double>(k) - 1.0));
    }
    return v;
}

RAlphaResult r_alpha_sum(const IntPoly& P, double alpha, u64 X, bool squarefree_only) {
    require_cubic_field(P, "r_alpha_sum");
    if (!(alpha > 0.0)) throw DomainError("r_alpha_sum: alpha must be positive");
    if (X < 1 || X > 10'000'000) throw DomainError("r_alpha_sum: X must lie in [1, 10^7]");
    RAlphaResult res;
    BigInt disc = discriminant(P);
    res.galois = disc > 0 && mpz_perfect_square_p(disc.get_mpz_t());
    res.exponent = exponents::taube_exponent(res.galois, alpha);

    std::vector<std::uint8_t> code(X + 1, 0);
    const std::vector<std::uint32_t> primes = numutil::primes_up_to(X);
    for (std::uint32_t p : primes) code[p] = static_cast<std::uint8_t>(split_code(P, p));
    std::array<double, 8> weight{};
    for (unsigned k = 1; k < weight.size(); ++k) weight[k] = std::exp2(alpha * (k - 1.0));

    const u64 root = numutil::isqrt(X);
    std::vector<std::uint32_t> small;
    for (std::uint32_t p : primes)
        if (p <= root) small.push_back(p);

    std::vector<u64> checkpoints;
    for (u64 c = 10; c < X; c *= 10) checkpoints.push_back(c);
    checkpoints.push_back(X);
    std::size_t next = 0;

    constexpr u64 kBlock = 1 << 16;
    std::vector<u64> rest(kBlock);
    std::vector<double> val(kBlock);
    double sum = 0.0;
    for (u64 lo = 1; lo <= X; lo += kBlock) {
        const u64 hi = std::min(X, lo + kBlock - 1);
        const u64 len = hi - lo + 1;
        for (u64 i = 0; i < len; ++i) {
            rest[i] = lo + i;
            val[i] = 1.0;
        }
        for (std::uint32_t p : small) {
            const double w = code[p] ? weight[code[p]] : 0.0;
            for (u64 m = ((lo + p - 1) / p) * p; m <= hi; m += p) {
                const u64 i = m - lo;
                rest[i] /= p;
                if (rest[i] % p == 0) {
                    if (squarefree_only) val[i] = 0.0;
                    while (rest[i] % p == 0) rest[i] /= p;
                }
                val[i] *= w;
            }
        }
        for (u64 i = 0; i < len; ++i) {
            if (rest[i] > 1) {
                const std::uint8_t k = code[rest[i]];
                val[i] *= k ? weight[k] : 0.0;
            }
            sum += val[i];
            const u64 d = lo + i;
            while (next < checkpoints.size() && checkpoints[next] == d) {
                const double lx = std::log(static_cast<double>(d));
                res.series.push_back({d, sum, sum / static_cast<double>(d) / std::pow(lx, res.exponent)});
                ++next;
            }
        }
    }
    res.sum = sum;
    return res;
}

}  // namespace sievecraft::census
