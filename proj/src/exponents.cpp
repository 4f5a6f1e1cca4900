#include "sievecraft/exponents.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>

#include "sievecraft/errors.hpp"

namespace sievecraft::exponents {

Perm identity_perm() {
    Perm p{};
    for (int i = 0; i < kDegree; ++i) p[i] = static_cast<std::uint8_t>(i);
    return p;
}

Perm parse_cycles(std::string_view text) {
    Perm p = identity_perm();
    std::vector<int> cycle;
    bool open = false;
    std::array<bool, kDegree> used{};
    auto close_cycle = [&] {
        for (std::size_t i = 0; i < cycle.size(); ++i) p[cycle[i]] = static_cast<std::uint8_t>(cycle[(i + 1) % cycle.size()]);
        cycle.clear();
    };
    for (std::size_t pos = 0; pos < text.size(); ++pos) {
        const char c = text[pos];
        if (c == ' ') continue;
        if (c == '(') {
            if (open) throw ParseError("nested parenthesis in cycle notation", pos);
            open = true;
        } else if (c == ')') {
            if (!open) throw ParseError("unmatched parenthesis in cycle notation", pos);
            open = false;
            close_cycle();
        } else if (c >= '1' && c <= '0' + kDegree) {
            if (!open) throw ParseError("point outside a cycle", pos);
            const int v = c - '1';
            if (used[v]) throw ParseError("point repeated in cycle notation", pos);
            used[v] = true;
            cycle.push_back(v);
        } else {
            throw ParseError("unexpected character in cycle notation", pos);
        }
    }
    if (open) throw ParseError("unterminated cycle", text.size());
    return p;
}

std::string to_cycles(const Perm& p) {
    std::string out;
    std::array<bool, kDegree> seen{};
    for (int i = 0; i < kDegree; ++i) {
        if (seen[i] || p[i] == i) continue;
        out += '(';
        for (int j = i; !seen[j]; j = p[j]) {
            seen[j] = true;
            out += static_cast<char>('1' + j);
        }
        out += ')';
    }
    return out.empty() ? "()" : out;
}

Perm compose(const Perm& a, const Perm& b) {
    Perm c{};
    for (int i = 0; i < kDegree; ++i) c[i] = a[b[i]];
    return c;
}

Perm inverse(const Perm& p) {
    Perm q{};
    for (int i = 0; i < kDegree; ++i) q[p[i]] = static_cast<std::uint8_t>(i);
    return q;
}

int cycle_count(const Perm& p) {
    std::array<bool, kDegree> seen{};
    int n = 0;
    for (int i = 0; i < kDegree; ++i) {
        if (seen[i]) continue;
        ++n;
        for (int j = i; !seen[j]; j = p[j]) seen[j] = true;
    }
    return n;
}

bool has_fixed_point(const Perm& p) {
    for (int i = 0; i < kDegree; ++i)
        if (p[i] == i) return true;
    return false;
}

bool PermGroup::is_transitive() const {
    std::array<bool, kDegree> orbit{};
    for (const Perm& g : elements) orbit[g[0]] = true;
    return std::all_of(orbit.begin(), orbit.end(), [](bool b) { return b; });
}

bool PermGroup::contains(const Perm& p) const { return std::binary_search(elements.begin(), elements.end(), p); }

PermGroup closure(const std::vector<Perm>& generators, std::string name) {
    std::set<Perm> seen{identity_perm()};
    std::vector<Perm> frontier{identity_perm()};
    while (!frontier.empty()) {
        std::vector<Perm> next;
        for (const Perm& x : frontier)
            for (const Perm& g : generators) {
                const Perm y = compose(g, x);
                if (seen.insert(y).second) next.push_back(y);
            }
        frontier = std::move(next);
    }
    PermGroup G;
    G.name = std::move(name);
    for (const Perm& g : generators) G.generators.push_back(to_cycles(g));
    G.elements.assign(seen.begin(), seen.end());
    return G;
}

PermGroup closure_from_cycles(const std::vector<std::string>& generators, std::string name) {
    std::vector<Perm> gens;
    for (const auto& g : generators) gens.push_back(parse_cycles(g));
    PermGroup G = closure(gens, std::move(name));
    G.generators = generators;
    return G;
}

namespace {

double xlog2x(double x) { return x == 0.0 ? 0.0 : x * std::log2(x); }

}  // namespace

double kl_bound(double theta_degrees) {
    if (!(theta_degrees > 0.0 && theta_degrees <= 90.0)) throw DomainError("kl_bound: angle must lie in (0, 90] degrees");
    const double s = theta_degrees == 90.0 ? 1.0 : std::sin(theta_degrees * std::numbers::pi / 180.0);
    return xlog2x((1 + s) / (2 * s)) - xlog2x((1 - s) / (2 * s));
}

double alpha_constant() {
    const double r3 = std::sqrt(3.0);
    return xlog2x((2 + r3) / (2 * r3)) - xlog2x((2 - r3) / (2 * r3));
}

double DeltaFormula::evaluate(double alpha) const {
    double v = 0.0;
    for (int k = 0; k < 5; ++k) v += coefficients[k].get_d() * std::exp2(k * alpha);
    return v;
}

DeltaFormula delta_formula(const PermGroup& G) {
    if (G.elements.empty() || !G.is_transitive()) throw DomainError("delta_formula: group must be transitive on 6 points");
    std::array<long, 5> counts{};
    for (const Perm& g : G.elements)
        if (has_fixed_point(g)) ++counts[cycle_count(g) - 2];
    DeltaFormula out;
    for (int k = 0; k < 5; ++k) {
        out.coefficients[k] = Rational(counts[k], static_cast<long>(G.order()));
        out.coefficients[k].canonicalize();
    }
    return out;
}

double delta_exponent(const PermGroup& G, double alpha) { return delta_formula(G).evaluate(alpha); }

double beta_sextic(const PermGroup& G) { return 1.0 - delta_exponent(G, alpha_constant()) / 3.0; }

double beta_cubic(bool discriminant_is_square, double alpha) {
    if (discriminant_is_square) return 1.0 - std::exp2(2 * alpha) / 9.0;
    return 1.0 - std::exp2(alpha) / 6.0 - std::exp2(2 * alpha) / 18.0;
}

double beta_cubic(bool discriminant_is_square) { return beta_cubic(discriminant_is_square, alpha_constant()); }

double taube_exponent(bool galois, double alpha) {
    if (!(alpha > 0.0)) throw DomainError("taube_exponent: alpha must be positive");
    if (galois) return std::exp2(2 * alpha) / 3.0 - 1.0;
    return std::exp2(alpha) / 2.0 + std::exp2(2 * alpha) / 6.0 - 1.0;
}

QuinticExponents quintic_exponents() {
    const double r = std::sqrt(113.0);
    QuinticExponents q;
    q.beta = (15.0 - r) / 4.0;
    q.exponent = (5.0 - q.beta) / 2.0;
    q.residual = std::abs(2 * q.beta * q.beta - 15 * q.beta + 14);
    // The crossing of (18 - b^2/2)/(10 - b) with (5 - b)/2 is the same quadratic.
    const double lhs = (18.0 - q.beta * q.beta / 2.0) / (10.0 - q.beta);
    if (!(q.beta > 0.0 && q.beta < 2.0) || q.residual > 1e-12 || std::abs(lhs - q.exponent) > 1e-12 ||
        std::abs(q.exponent - (5.0 + r) / 8.0) > 1e-12)
        throw std::logic_error("quintic_exponents: internal consistency check failed");
    return q;
}

double truncate4(double v) { return std::floor(v * 1e4 + 1e-9) / 1e4; }

namespace {

struct RawEntry {
    const char* name;
    std::vector<std::string> generators;
    std::size_t order;
    std::array<std::pair<long, long>, 5> row;
    double delta;
    double beta;
};

std::vector<CatalogEntry> build_catalog() {
    const std::vector<RawEntry> raw = {
        {"C(6)", {"(123456)"}, 6, {{{0, 1}, {0, 1}, {0, 1}, {0, 1}, {1, 6}}}, 0.5072, 0.8309},
        {"D_6(6)", {"(135)(246)", "(14)(23)(56)"}, 6, {{{0, 1}, {0, 1}, {0, 1}, {0, 1}, {1, 6}}}, 0.5072, 0.8309},
        {"D(6)", {"(123456)", "(14)(23)(56)"}, 12, {{{0, 1}, {0, 1}, {1, 4}, {0, 1}, {1, 12}}}, 0.6897, 0.7700},
        {"A_4(6)", {"(14)(25)", "(135)(246)"}, 12, {{{0, 1}, {0, 1}, {1, 4}, {0, 1}, {1, 12}}}, 0.6897, 0.7700},
        {"F_18(6)", {"(246)", "(14)(23)(56)"}, 18, {{{0, 1}, {0, 1}, {2, 9}, {0, 1}, {1, 18}}}, 0.5567, 0.8144},
        {"2A_4(6)", {"(36)", "(135)(246)"}, 24, {{{0, 1}, {0, 1}, {1, 8}, {1, 8}, {1, 24}}}, 0.6328, 0.7890},
        {"S_4(6d)", {"(14)(25)", "(135)(246)", "(15)(24)"}, 24, {{{0, 1}, {0, 1}, {3, 8}, {0, 1}, {1, 24}}}, 0.7809, 0.7396},
        {"S_4(6c)", {"(14)(25)", "(135)(246)", "(15)(24)(36)"}, 24, {{{0, 1}, {1, 4}, {1, 8}, {0, 1}, {1, 24}}}, 0.6750, 0.7749},
        {"F_18(6):2", {"(246)", "(15)(24)", "(14)(23)(56)"}, 36, {{{0, 1}, {0, 1}, {13, 36}, {0, 1}, {1, 36}}}, 0.7145, 0.7618},
        {"F_36(6)", {"(246)", "(15)(24)", "(1452)(36)"}, 36, {{{0, 1}, {0, 1}, {13, 36}, {0, 1}, {1, 36}}}, 0.7145, 0.7618},
        {"2S_4(6)", {"(36)", "(135)(246)", "(15)(24)"}, 48, {{{0, 1}, {1, 8}, {3, 16}, {1, 16}, {1, 48}}}, 0.6996, 0.7667},
        {"L(6)", {"(12346)", "(14)(56)"}, 60, {{{2, 5}, {0, 1}, {1, 4}, {0, 1}, {1, 60}}}, 0.8868, 0.7043},
        {"F_36(6):2", {"(246)", "(15)(24)", "(14)(23)(56)", "(1452)(36)"}, 72, {{{0, 1}, {1, 6}, {13, 72}, {1, 12}, {1, 72}}}, 0.7693, 0.7435},
        {"L(6):2", {"(12346)", "(12)(34)(56)"}, 120, {{{1, 5}, {1, 4}, {1, 8}, {0, 1}, {1, 120}}}, 0.7736, 0.7421},
        {"A_6", {"(12345)", "(456)"}, 360, {{{2, 5}, {0, 1}, {17, 72}, {0, 1}, {1, 360}}}, 0.8203, 0.7265},
        {"S_6", {"(123456)", "(12)"}, 720, {{{1, 5}, {7, 24}, {17, 144}, {1, 48}, {1, 720}}}, 0.8434, 0.7188},
    };
    std::vector<CatalogEntry> out;
    for (const RawEntry& r : raw) {
        CatalogEntry e;
        e.group = closure_from_cycles(r.generators, r.name);
        for (int k = 0; k < 5; ++k) {
            e.expected[k] = Rational(r.row[k].first, r.row[k].second);
            e.expected[k].canonicalize();
        }
        e.expected_delta = r.delta;
        e.expected_beta = r.beta;
        if (e.group.order() != r.order) throw std::logic_error(std::string("catalog: wrong order for ") + r.name);
        if (!e.group.is_transitive()) throw std::logic_error(std::string("catalog: not transitive: ") + r.name);
        if (delta_formula(e.group).coefficients != e.expected)
            throw std::logic_error(std::string("catalog: coefficient row mismatch for ") + r.name);
        out.push_back(std::move(e));
    }
    return out;
}

}  // namespace

const std::vector<CatalogEntry>& catalog() {
    static const std::vector<CatalogEntry> entries = build_catalog();
    return entries;
}

}  // namespace sievecraft::exponents
