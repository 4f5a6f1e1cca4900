#include "sievecraft/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "sievecraft/errors.hpp"
#include "sievecraft/localdens.hpp"
#include "sievecraft/numutil.hpp"

namespace sievecraft::lattice {

namespace {

using i128 = __int128;

i64 floor_mod(i64 a, i64 m) {
    const i64 r = a % m;
    return r < 0 ? r + m : r;
}

i128 cross(Point a, Point b) { return static_cast<i128>(a.x) * b.y - static_cast<i128>(a.y) * b.x; }
i128 dot(Point a, Point b) { return static_cast<i128>(a.x) * b.x + static_cast<i128>(a.y) * b.y; }

i64 gcd64(i64 a, i64 b) { return std::gcd(a, b); }

}  // namespace

Lattice2::Lattice2(i64 d1, i64 s, i64 d2) : d1_(d1), s_(s), d2_(d2) {
    if (d1 < 1 || d2 < 1) throw DomainError("Lattice2: diagonal entries must be positive");
    if (s < 0 || s >= d1) throw DomainError("Lattice2: off-diagonal entry must lie in [0, d1)");
}

Lattice2 Lattice2::from_generators(const std::vector<Point>& gens) {
    std::vector<Point> v = gens;
    // Euclid on the y-coordinates leaves at most one vector with y != 0.
    Point pivot{0, 0};
    std::vector<Point> flat;
    for (Point g : v) {
        Point a = pivot, b = g;
        while (b.y != 0) {
            const i64 q = a.y / b.y;
            a = {a.x - q * b.x, a.y - q * b.y};
            std::swap(a, b);
        }
        // a now has y = gcd of the two y-coordinates; b has y = 0.
        pivot = a;
        if (b.x != 0) flat.push_back(b);
    }
    if (pivot.y < 0) pivot = {-pivot.x, -pivot.y};
    i64 d1 = 0;
    for (Point f : flat) d1 = gcd64(d1, f.x);
    d1 = std::abs(d1);
    if (d1 == 0 || pivot.y == 0) throw DomainError("Lattice2: generators span a subgroup of infinite index");
    return Lattice2(d1, floor_mod(pivot.x, d1), pivot.y);
}

bool Lattice2::contains(i64 x, i64 y) const {
    if (floor_mod(y, d2_) != 0) return false;
    const i128 t = y / d2_;
    const i128 rest = static_cast<i128>(x) - t * s_;
    return rest % d1_ == 0;
}

bool Lattice2::is_primitive() const { return gcd64(gcd64(d1_, s_), d2_) == 1; }

Lattice2 from_congruence(i64 r, i64 m, Axis axis) {
    if (m < 1) throw DomainError("from_congruence: modulus must be positive");
    if (r < 0 || r >= m) throw DomainError("from_congruence: residue must lie in [0, m)");
    if (axis == Axis::XEqRY) return Lattice2(m, r, 1);
    // y = r x (mod m): y-projection is g Z with g = gcd(r, m); the x-axis part is (m/g) Z.
    const i64 g = gcd64(r, m);
    const i64 d1 = m / g;
    const i64 s = d1 == 1 ? 0 : static_cast<i64>(numutil::invmod(static_cast<u64>((r / g) % d1), static_cast<u64>(d1)));
    return Lattice2(d1, s, g);
}

Sector::Sector(Point from, Point to) : whole_(false), from_(from), to_(to) {
    if (from == Point{} || to == Point{}) throw DomainError("Sector: rays must be nonzero");
    const i128 c = cross(from, to);
    if (c < 0 || (c == 0 && dot(from, to) > 0)) throw DomainError("Sector: angle must lie in (0, pi]");
}

Sector Sector::component(const std::vector<Point>& lines, Point inside) {
    if (lines.empty()) return Sector();
    std::vector<Point> rays;
    for (Point l : lines) {
        if (l == Point{}) throw DomainError("Sector: line direction must be nonzero");
        if (cross(l, inside) == 0) throw DomainError("Sector: interior point lies on a line");
        rays.push_back(l);
        rays.push_back({-l.x, -l.y});
    }
    // Nearest ray clockwise from `inside` and nearest counterclockwise.
    auto angle = [](Point p) { return std::atan2(static_cast<double>(p.y), static_cast<double>(p.x)); };
    const double t = angle(inside);
    const double two_pi = 2 * std::numbers::pi;
    Point best_from = rays[0], best_to = rays[0];
    double best_cw = 10, best_ccw = 10;
    for (Point r : rays) {
        const double a = angle(r);
        double cw = std::fmod(t - a + 2 * two_pi, two_pi);
        double ccw = std::fmod(a - t + 2 * two_pi, two_pi);
        if (cw < best_cw) best_cw = cw, best_from = r;
        if (ccw < best_ccw) best_ccw = ccw, best_to = r;
    }
    return Sector(best_from, best_to);
}

bool Sector::contains(i64 x, i64 y) const {
    if (x == 0 && y == 0) return false;
    if (whole_) return true;
    const Point w{x, y};
    const i128 cu = cross(from_, w);
    if (cu == 0) return dot(from_, w) > 0;
    return cu > 0 && cross(w, to_) > 0;
}

double Sector::box_area(double N) const {
    if (whole_) return 4 * N * N;
    using P2 = std::pair<double, double>;
    std::vector<P2> poly{{-N, -N}, {N, -N}, {N, N}, {-N, N}};
    // Keep the side where cross(a, p) >= 0.
    auto clip = [&](double ax, double ay) {
        std::vector<P2> out;
        const std::size_t n = poly.size();
        for (std::size_t i = 0; i < n; ++i) {
            const P2 p = poly[i], q = poly[(i + 1) % n];
            const double cp = ax * p.second - ay * p.first;
            const double cq = ax * q.second - ay * q.first;
            if (cp >= 0) out.push_back(p);
            if ((cp >= 0) != (cq >= 0)) {
                const double t = cp / (cp - cq);
                out.push_back({p.first + t * (q.first - p.first), p.second + t * (q.second - p.second)});
            }
        }
        poly = std::move(out);
    };
    clip(static_cast<double>(from_.x), static_cast<double>(from_.y));
    if (cross(from_, to_) != 0) clip(static_cast<double>(-to_.x), static_cast<double>(-to_.y));
    double area = 0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const P2 p = poly[i], q = poly[(i + 1) % poly.size()];
        area += p.first * q.second - q.first * p.second;
    }
    return std::abs(area) / 2;
}

u64 count_coprime(const Lattice2& L, i64 N, const Sector& S) {
    if (N < 1) throw DomainError("count_coprime: N must be positive");
    u64 count = 0;
    const i64 d1 = L.d1(), d2 = L.d2();
    for (i64 y = -N; y <= N; ++y) {
        if (floor_mod(y, d2) != 0) continue;
        const i64 t = y / d2;
        const i64 x0 = floor_mod(static_cast<i64>(floor_mod(t, d1) * static_cast<i128>(L.s()) % d1), d1);
        // First x >= -N in the class x0 mod d1.
        i64 x = -N + floor_mod(x0 + N, d1);
        for (; x <= N; x += d1)
            if (std::gcd(x, y) == 1 && S.contains(x, y)) ++count;
    }
    return count;
}

double penult_estimate(const Lattice2& L, i64 N, const Sector& S) {
    if (N < 1) throw DomainError("penult_estimate: N must be positive");
    if (!L.is_primitive()) throw DomainError("penult_estimate: lattice is a multiple of another lattice");
    const double six_over_pi2 = 6.0 / (std::numbers::pi * std::numbers::pi);
    return S.box_area(static_cast<double>(N)) / static_cast<double>(L.index()) * six_over_pi2;
}

double coprime_estimate(const Lattice2& L, i64 N, const Sector& S) {
    double estimate = penult_estimate(L, N, S);
    i64 rest = L.index();
    for (i64 p = 2; p * p <= rest; ++p) {
        if (rest % p != 0) continue;
        while (rest % p == 0) rest /= p;
        estimate *= static_cast<double>(p) / static_cast<double>(p + 1);
    }
    if (rest > 1) estimate *= static_cast<double>(rest) / static_cast<double>(rest + 1);
    return estimate;
}

i64 min_maxnorm(const Lattice2& L) {
    // (d1, 0) has norm d1, so only rows with |y| <= d1 can do better.
    i64 best = L.d1();
    for (i64 t = 1; t * L.d2() < best; ++t) {
        const i64 x0 = static_cast<i64>(static_cast<i128>(t) * L.s() % L.d1());
        const i64 x = std::min(x0, L.d1() - x0);
        best = std::min(best, std::max(x, t * L.d2()));
    }
    return best;
}

std::vector<SolutionLattice> solution_lattices(const BinForm& F, u64 p, unsigned n) {
    if (!is_squarefree_poly(F)) throw DomainError("solution_lattices: form is not square-free");
    if (!numutil::is_prime(p)) throw DomainError("solution_lattices: modulus base must be prime");
    if (n < 1) throw DomainError("solution_lattices: exponent must be positive");
    const BigInt pn = localdens::prime_power(p, n);
    if (!mpz_fits_slong_p(pn.get_mpz_t())) throw ResourceError("solution_lattices: p^n exceeds 64 bits");
    const i64 m = pn.get_si();
    std::vector<SolutionLattice> out;
    for (const BigInt& r : localdens::roots_mod_pk_trusted(F.at_z_one(), p, n))
        out.push_back({from_congruence(r.get_si(), m, Axis::XEqRY), Axis::XEqRY, r});
    for (const BigInt& r : localdens::roots_mod_pk_trusted(F.at_x_one(), p, n))
        if (mpz_divisible_ui_p(r.get_mpz_t(), p)) out.push_back({from_congruence(r.get_si(), m, Axis::YEqRX), Axis::YEqRX, r});
    return out;
}

}  // namespace sievecraft::lattice
