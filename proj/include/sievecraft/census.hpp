#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sievecraft/eulerprod.hpp"
#include "sievecraft/lattice.hpp"
#include "sievecraft/poly.hpp"

namespace sievecraft::census {

using u64 = std::uint64_t;
using i64 = std::int64_t;

enum class BoxConvention {
    PositiveQuadrant,  // 1 <= x, z <= N
    FullBox,           // -N <= x, z <= N
};

std::string to_string(BoxConvention c);

struct CensusReport {
    std::string poly;
    u64 N = 0;
    unsigned m = 2;
    std::string convention;  // "interval" for univariate censuses
    bool coprime = false;
    bool sector = false;
    u64 observed = 0;
    u64 zero_values = 0;     // arguments with P = 0, never counted as power-free
    u64 sieve_bound = 0;     // trial-division bound used by the scan
    u64 main_bound = 0;      // truncation bound of the Euler product
    double scale = 0.0;      // N, N^2, 4 N^2 or the sector area
    double main_lo = 0.0;
    double main_hi = 0.0;
    double seconds = 0.0;
    std::string method;

    double main_mid() const { return 0.5 * (main_lo + main_hi); }
    double discrepancy() const { return static_cast<double>(observed) - main_mid(); }
    double discrepancy_rel() const { return discrepancy() / main_mid(); }
};

// #{1 <= x <= N : P(x) != 0 and P(x) free of m-th powers}, with the main term from
// density_univ truncated at `main_bound`.
CensusReport count_powerfree_values(const IntPoly& P, u64 N, unsigned m = 2, u64 main_bound = 10000);

struct FormCensusOptions {
    BoxConvention convention = BoxConvention::FullBox;
    bool coprime = true;
    std::optional<lattice::Sector> sector;
    u64 main_bound = 10000;
};

// Pairs in the box (coprime when requested, inside the sector when given) with F square-free
// and nonzero.
CensusReport count_squarefree_form(const BinForm& F, u64 N, const FormCensusOptions& options = {});

// #{1 <= x <= N : p^2 | P(x) for some prime p > threshold}; threshold defaults to floor(sqrt N).
u64 delta_census_univ(const IntPoly& P, u64 N, std::optional<u64> threshold = std::nullopt);
// Same count by looping over primes in (threshold, sqrt(max |P|)] and their roots mod p^2.
u64 delta_census_univ_by_primes(const IntPoly& P, u64 N, std::optional<u64> threshold = std::nullopt);

struct FormDelta {
    u64 count = 0;                // coprime pairs in [-N, N]^2 with p^2 | F for some p > threshold
    u64 threshold = 0;
    std::map<u64, u64> profile;   // prime -> number of such pairs
    u64 max_per_prime = 0;
    u64 facil_bound = 0;          // 12 deg F
    u64 facil_threshold = 0;      // largest prime dividing Disc * a_0 * a_d
    bool facil_applicable = false;  // N >= facil_threshold
    bool facil_ok = true;         // every profile entry <= facil_bound
};

// threshold defaults to N.
FormDelta delta_census_form(const BinForm& F, u64 N, std::optional<u64> threshold = std::nullopt);
// Pair scan with per-value factorization, for cross-checking.
FormDelta delta_census_form_scan(const BinForm& F, u64 N, std::optional<u64> threshold = std::nullopt);

struct TwistTable {
    u64 N = 0;
    std::map<i64, u64> S;  // signed square-free kernel d -> #{(x, y, z) : d y^2 = F, y > 0}
    u64 zero_pairs = 0;    // coprime pairs with F = 0
    u64 coprime_pairs = 0;
    u64 max_abs_value = 0;

    u64 total() const;
    bool conserved() const { return total() + zero_pairs == coprime_pairs; }
};

TwistTable twist_census(const BinForm& F, u64 N);

struct TwistDecomposition {
    u64 delta = 0;       // pairs with p^2 | F for some p > N
    u64 small_twists = 0;  // sum of S(d) over 0 < |d| <= M
    u64 large_primes = 0;  // sum over N < p <= sqrt(A / M) of pairs with p^2 | F
    bool holds() const { return delta <= small_twists + large_primes; }
};

TwistDecomposition twist_decomposition(const BinForm& F, u64 N, u64 M);

// Degrees of the irreducible factors of P mod p, ascending. P irreducible, p not dividing Disc * lead.
std::vector<unsigned> splitting_type(const IntPoly& P, u64 p);

struct RAlphaRow {
    u64 X;
    double sum;
    double normalized;  // sum / X / (log X)^exponent
};

struct RAlphaResult {
    double sum = 0.0;
    double exponent = 0.0;  // taube_exponent for the field
    bool galois = false;
    std::vector<RAlphaRow> series;  // at X = 10, 100, ... and X itself
};

// Sum over d <= X of R(alpha, d) = 2^(alpha (omega_K(d) - omega(d))), or 0 when an inert prime
// divides d. With `squarefree_only`, d runs over square-free integers.
RAlphaResult r_alpha_sum(const IntPoly& P, double alpha, u64 X, bool squarefree_only = true);

// R(alpha, d) for a single d.
double r_alpha(const IntPoly& P, double alpha, u64 d);

// Worker count: SIEVECRAFT_THREADS when set, else hardware concurrency.
unsigned worker_count();

}  // namespace sievecraft::census
