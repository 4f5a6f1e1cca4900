#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sievecraft/avgprod.hpp"
#include "sievecraft/census.hpp"
#include "sievecraft/errors.hpp"
#include "sievecraft/eulerprod.hpp"
#include "sievecraft/exponents.hpp"
#include "sievecraft/lattice.hpp"
#include "sievecraft/numutil.hpp"
#include "sievecraft/poly.hpp"
#include "sievecraft/soil.hpp"

namespace {

using namespace sievecraft;
using json = nlohmann::ordered_json;
using u64 = std::uint64_t;
using i64 = std::int64_t;

constexpr int kExitDomain = 2;
constexpr int kExitResource = 3;
constexpr int kExitUsage = 64;
constexpr const char* kSchema = "sievecraft/1";

struct RunConfig {
    std::string command;
    std::string poly;
    std::string form;
    u64 N = 0;
    unsigned m = 2;
    u64 B = 0;
    std::string box = "full";
    bool coprime = true;
    std::string sector;
    std::string lattice;
    std::string alpha = "paper";
    std::string format;
    unsigned threads = 0;
    u64 seed = 1;
    int digits = 12;
    bool timing = false;
    // command-specific
    std::optional<u64> threshold;
    std::string method = "primes";
    u64 twist_M = 0;
    bool factors = false;
    std::string family = "squarefree";
    std::string progression;
    bool mobius = false;
    unsigned soils = 200;
    unsigned poly_soils = 20;
    double ridd_factor = 1.0;
    u64 primes_upto = 100;
    u64 X = 0;
};

class Reporter {
public:
    explicit Reporter(int digits) : digits_(digits) {}

    double num(double v) const {
        if (!std::isfinite(v)) return v;
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.*g", digits_, v);
        return std::strtod(buf, nullptr);
    }

private:
    int digits_;
};

lattice::Sector parse_sector(const std::string& text) {
    if (text.empty() || text == "whole") return lattice::Sector();
    i64 a, b, c, d;
    char s1, s2, s3;
    std::istringstream in(text);
    if (!(in >> a >> s1 >> b >> s2 >> c >> s3 >> d) || s1 != ',' || s2 != ':' || s3 != ',' || !in.eof())
        throw DomainError("sector must read x1,y1:x2,y2");
    return lattice::Sector({a, b}, {c, d});
}

lattice::Lattice2 parse_lattice(const std::string& text) {
    i64 d1, s, d2;
    char c1, c2;
    std::istringstream in(text);
    if (!(in >> d1 >> c1 >> s >> c2 >> d2) || c1 != ',' || c2 != ',' || !in.eof())
        throw DomainError("lattice must read d1,s,d2");
    return lattice::Lattice2(d1, s, d2);
}

double parse_alpha(const std::string& text) {
    if (text == "paper") return exponents::alpha_constant();
    char* end = nullptr;
    const double alpha = std::strtod(text.c_str(), &end);
    if (text.empty() || *end != '\0' || !(alpha > 0.0)) throw DomainError("--alpha must be 'paper' or a positive number");
    return alpha;
}

json config_json(const RunConfig& c) {
    const std::string& cmd = c.command;
    const bool counts = cmd == "density" || cmd == "census";
    json j;
    j["command"] = cmd;
    if (!c.poly.empty()) j["poly"] = c.poly;
    if (!c.form.empty()) j["form"] = c.form;
    if (c.N) j["N"] = c.N;
    if (counts && !c.poly.empty()) j["m"] = c.m;
    if (counts || cmd == "avgprod") j["B"] = c.B;
    if (counts && !c.form.empty()) j["coprime"] = c.coprime;
    if (cmd == "census" && !c.form.empty()) j["box"] = c.box;
    if ((cmd == "census" || cmd == "avgprod") && !c.form.empty()) j["sector"] = c.sector.empty() ? "whole" : c.sector;
    if (cmd == "delta") {
        j["method"] = c.method;
        if (c.threshold) j["threshold"] = *c.threshold;
    }
    if (cmd == "twists" && c.twist_M) j["M"] = c.twist_M;
    if (cmd == "avgprod") {
        j["family"] = c.family;
        if (!c.progression.empty()) j["progression"] = c.progression;
        if (c.mobius) j["mobius"] = true;
        if (!c.lattice.empty()) j["lattice"] = c.lattice;
    }
    if (cmd == "sievecheck") {
        j["seed"] = c.seed;
        j["soils"] = c.soils;
        j["poly_soils"] = c.poly_soils;
        j["ridd_factor"] = c.ridd_factor;
    }
    if (cmd == "splitting") {
        j["primes_upto"] = c.primes_upto;
        if (c.X) j["X"] = c.X;
    }
    if (cmd == "tables" || (cmd == "splitting" && c.X)) j["alpha"] = c.alpha;
    j["format"] = c.format;
    j["digits"] = c.digits;
    return j;
}

// Flat scalar fields become key,value lines; a "rows" array becomes a table.
void emit(const json& report, const std::string& format) {
    auto scalar = [](const json& v) -> std::string {
        if (v.is_string()) return v.get<std::string>();
        return v.dump();
    };
    auto csv_cell = [&](const json& v) {
        std::string s = scalar(v);
        if (s.find_first_of(",\"\n") != std::string::npos) {
            std::string q = "\"";
            for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
            return q + "\"";
        }
        return s;
    };
    if (format == "json") {
        std::cout << report.dump(2) << "\n";
        return;
    }
    const bool table = report.contains("rows") && report["rows"].is_array() && !report["rows"].empty();
    if (format == "csv") {
        if (table) {
            const json& rows = report["rows"];
            bool first = true;
            for (const auto& [k, v] : rows[0].items()) {
                std::cout << (first ? "" : ",") << k;
                first = false;
            }
            std::cout << "\n";
            for (const json& row : rows) {
                first = true;
                for (const auto& [k, v] : row.items()) {
                    std::cout << (first ? "" : ",") << csv_cell(v);
                    first = false;
                }
                std::cout << "\n";
            }
            return;
        }
    }
    // Nested fields become dotted keys; the rows of a table report are printed separately below.
    json flat_src = report;
    if (table) flat_src.erase("rows");
    const json flattened = flat_src.flatten();
    std::vector<std::pair<std::string, json>> flat;
    for (const auto& [k, v] : flattened.items()) {
        std::string key = k.substr(1);
        std::replace(key.begin(), key.end(), '/', '.');
        flat.emplace_back(std::move(key), v);
    }
    if (format == "csv") {
        std::cout << "key,value\n";
        for (const auto& [k, v] : flat) std::cout << csv_cell(json(k)) << "," << csv_cell(v) << "\n";
        return;
    }
    for (const auto& [k, v] : flat) std::cout << k << ": " << scalar(v) << "\n";
    if (table)
        for (const json& row : report["rows"]) {
            std::string line;
            for (const auto& [k, v] : row.items()) line += (line.empty() ? "" : "  ") + k + "=" + scalar(v);
            std::cout << line << "\n";
        }
}

json base_report(const RunConfig& c) {
    json j;
    j["schema"] = kSchema;
    j["config"] = config_json(c);
    return j;
}

void require_one_input(const RunConfig& c) {
    if (c.poly.empty() == c.form.empty()) throw CLI::ValidationError("exactly one of --poly and --form is required");
}

json run_density(const RunConfig& c, const Reporter& R) {
    require_one_input(c);
    const eulerprod::EulerEstimate est = c.poly.empty() ? eulerprod::density_form(parse_form(c.form), c.B, c.coprime)
                                                        : eulerprod::density_univ(parse_poly(c.poly), c.B, c.m);
    json j = base_report(c);
    j["bound"] = est.bound;
    j["power"] = est.power;
    j["lower"] = R.num(est.lower);
    j["upper"] = R.num(est.upper);
    j["midpoint"] = R.num(est.midpoint());
    j["tail_lower"] = R.num(est.tail_lower.get_d());
    j["zero_density"] = est.zero_density;
    j["obstruction_prime"] = est.obstruction_prime;
    j["widened"] = est.widened;
    j["factor_count"] = est.factors.size();
    if (c.factors) {
        json rows = json::array();
        for (const auto& f : est.factors) rows.push_back({{"p", f.prime}, {"count", f.count.get_str()}});
        j["rows"] = rows;
    }
    return j;
}

json census_json(const RunConfig& c, const census::CensusReport& r, const Reporter& R) {
    json j = base_report(c);
    j["poly"] = r.poly;
    j["N"] = r.N;
    j["m"] = r.m;
    j["convention"] = r.convention;
    j["coprime"] = r.coprime;
    j["sector"] = r.sector;
    j["observed"] = r.observed;
    j["zero_values"] = r.zero_values;
    j["sieve_bound"] = r.sieve_bound;
    j["main_bound"] = r.main_bound;
    j["scale"] = R.num(r.scale);
    j["main_lo"] = R.num(r.main_lo);
    j["main_hi"] = R.num(r.main_hi);
    j["main_mid"] = R.num(r.main_mid());
    j["discrepancy"] = R.num(r.discrepancy());
    j["discrepancy_rel"] = R.num(r.discrepancy_rel());
    j["method"] = r.method;
    if (c.timing) j["seconds"] = R.num(r.seconds);
    return j;
}

json run_census(const RunConfig& c, const Reporter& R) {
    require_one_input(c);
    if (!c.poly.empty()) return census_json(c, census::count_powerfree_values(parse_poly(c.poly), c.N, c.m, c.B), R);
    census::FormCensusOptions opt;
    opt.convention = c.box == "full" ? census::BoxConvention::FullBox : census::BoxConvention::PositiveQuadrant;
    opt.coprime = c.coprime;
    if (!c.sector.empty()) opt.sector = parse_sector(c.sector);
    opt.main_bound = c.B;
    return census_json(c, census::count_squarefree_form(parse_form(c.form), c.N, opt), R);
}

json run_delta(const RunConfig& c, const Reporter&) {
    require_one_input(c);
    json j = base_report(c);
    if (!c.poly.empty()) {
        const IntPoly P = parse_poly(c.poly);
        j["threshold"] = c.threshold.value_or(numutil::isqrt(c.N));
        j["count"] = c.method == "scan" ? census::delta_census_univ(P, c.N, c.threshold)
                                        : census::delta_census_univ_by_primes(P, c.N, c.threshold);
        return j;
    }
    const BinForm F = parse_form(c.form);
    const census::FormDelta d =
        c.method == "scan" ? census::delta_census_form_scan(F, c.N, c.threshold) : census::delta_census_form(F, c.N, c.threshold);
    j["threshold"] = d.threshold;
    j["count"] = d.count;
    j["max_per_prime"] = d.max_per_prime;
    j["facil_bound"] = d.facil_bound;
    j["facil_threshold"] = d.facil_threshold;
    j["facil_applicable"] = d.facil_applicable;
    j["facil_ok"] = d.facil_ok;
    json rows = json::array();
    for (const auto& [p, k] : d.profile) rows.push_back({{"p", p}, {"pairs", k}});
    j["rows"] = rows;
    return j;
}

json run_twists(const RunConfig& c, const Reporter&) {
    if (c.form.empty()) throw CLI::ValidationError("--form is required");
    const BinForm F = parse_form(c.form);
    const census::TwistTable t = census::twist_census(F, c.N);
    json j = base_report(c);
    j["N"] = t.N;
    j["coprime_pairs"] = t.coprime_pairs;
    j["zero_pairs"] = t.zero_pairs;
    j["total"] = t.total();
    j["conserved"] = t.conserved();
    j["max_abs_value"] = t.max_abs_value;
    j["twist_count"] = t.S.size();
    if (c.twist_M) {
        const census::TwistDecomposition d = census::twist_decomposition(F, c.N, c.twist_M);
        j["M"] = c.twist_M;
        j["delta"] = d.delta;
        j["small_twists"] = d.small_twists;
        j["large_primes"] = d.large_primes;
        j["decomposition_holds"] = d.holds();
    }
    json rows = json::array();
    for (const auto& [d, n] : t.S) rows.push_back({{"d", d}, {"S", n}});
    j["rows"] = rows;
    return j;
}

json run_tables(const RunConfig& c, const Reporter& R) {
    const double alpha = parse_alpha(c.alpha);
    json j = base_report(c);
    j["alpha"] = R.num(alpha);
    j["beta_cubic_square"] = R.num(exponents::beta_cubic(true, alpha));
    j["beta_cubic_nonsquare"] = R.num(exponents::beta_cubic(false, alpha));
    const exponents::QuinticExponents q = exponents::quintic_exponents();
    j["quintic_beta"] = R.num(q.beta);
    j["quintic_exponent"] = R.num(q.exponent);
    json rows = json::array();
    bool all_match = true;
    for (const exponents::CatalogEntry& e : exponents::catalog()) {
        const exponents::DeltaFormula f = exponents::delta_formula(e.group);
        const double delta = f.evaluate(alpha);
        const double beta = 1.0 - delta / 3.0;
        const bool match = exponents::truncate4(delta) == e.expected_delta && exponents::truncate4(beta) == e.expected_beta;
        all_match = all_match && match;
        json row;
        row["group"] = e.group.name;
        row["order"] = e.group.order();
        for (int k = 0; k < 5; ++k) row["c" + std::to_string(k)] = f.coefficients[k].get_str();
        row["delta"] = R.num(delta);
        row["beta"] = R.num(beta);
        row["table_delta"] = R.num(e.expected_delta);
        row["table_beta"] = R.num(e.expected_beta);
        row["match"] = match;
        rows.push_back(row);
    }
    j["all_match"] = all_match;
    j["rows"] = rows;
    return j;
}

avgprod::LocalFactorFamily family_named(const std::string& name) {
    if (name == "squarefree") return avgprod::squarefree_indicator();
    if (name == "parity") return avgprod::parity_family();
    if (name == "constant") return avgprod::constant_family();
    throw CLI::ValidationError("--family must be squarefree, parity or constant");
}

json run_avgprod(const RunConfig& c, const Reporter& R) {
    require_one_input(c);
    const avgprod::LocalFactorFamily u = family_named(c.family);
    avgprod::AverageReport r;
    if (!c.form.empty()) {
        if (!c.progression.empty() || c.mobius) throw CLI::ValidationError("forms take --lattice as their multiplier");
        avgprod::FormAverageOptions opt;
        opt.sector = parse_sector(c.sector);
        if (!c.lattice.empty()) opt.lattice = parse_lattice(c.lattice);
        opt.B = c.B;
        r = avgprod::empirical_average_form(parse_form(c.form), u, c.N, opt);
    } else {
        const IntPoly P = parse_poly(c.poly);
        if (!c.progression.empty() && c.mobius) throw CLI::ValidationError("--progression and --mobius are exclusive");
        if (!c.progression.empty()) {
            u64 a, m;
            char colon;
            std::istringstream in(c.progression);
            if (!(in >> a >> colon >> m) || colon != ':' || !in.eof()) throw DomainError("progression must read a:m");
            r = avgprod::average_with_multiplier(P, u, avgprod::progression_multiplier(a, m), c.N, c.B);
        } else if (c.mobius) {
            r = avgprod::average_with_multiplier(P, u, avgprod::mobius_multiplier(), c.N, c.B);
        } else {
            r = avgprod::empirical_average(P, u, c.N, c.B);
        }
    }
    json j = base_report(c);
    j["family"] = r.family;
    j["multiplier"] = r.multiplier.empty() ? "none" : r.multiplier;
    j["N"] = r.N;
    j["B"] = r.B;
    j["domain_size"] = r.domain_size;
    j["zero_values"] = r.zero_values;
    j["empirical_re"] = R.num(r.empirical.real());
    j["empirical_im"] = R.num(r.empirical.imag());
    j["has_prediction"] = r.has_prediction;
    if (r.has_prediction) {
        j["predicted_re"] = R.num(r.predicted.real());
        j["predicted_im"] = R.num(r.predicted.imag());
        j["predicted_lo"] = R.num(r.predicted_lo());
        j["predicted_hi"] = R.num(r.predicted_hi());
        j["truncation_slack"] = R.num(r.truncation_slack);
        j["tail_slack"] = R.num(r.tail_slack);
        j["delta_count"] = r.delta_count;
        j["delta_term"] = R.num(r.delta_term);
        j["discrepancy"] = R.num(r.discrepancy());
        j["within_slack"] = r.within_slack();
    }
    if (c.timing) j["seconds"] = R.num(r.seconds);
    return j;
}

json run_sievecheck(const RunConfig& c, const Reporter& R) {
    const soil::SieveCheckReport r = soil::sieve_suite(c.seed, c.soils, c.poly_soils, c.ridd_factor);
    json j = base_report(c);
    j["random_soils"] = c.soils;
    j["polynomial_soils"] = c.poly_soils;
    j["ridd_factor"] = R.num(c.ridd_factor);
    j["levels"] = r.levels;
    j["ridd_violations"] = r.ridd_violations;
    j["worst_ridd_ratio"] = R.num(r.worst_ridd_ratio);
    j["yugo_soils"] = r.yugo_soils;
    j["yugo_levels"] = r.yugo_levels;
    j["yugo_violations"] = r.yugo_violations;
    j["worst_yugo_ratio"] = R.num(r.worst_yugo_ratio);
    json rows = json::array();
    for (const std::string& f : r.failures) rows.push_back({{"failure", f}});
    j["rows"] = rows;
    return j;
}

json run_splitting(const RunConfig& c, const Reporter& R) {
    if (c.poly.empty()) throw CLI::ValidationError("--poly is required");
    const IntPoly P = parse_poly(c.poly);
    if (!is_irreducible(P)) throw DomainError("splitting: polynomial must be irreducible");
    const BigInt bad = discriminant(P) * P.lead();
    json j = base_report(c);
    json rows = json::array();
    for (std::uint32_t p : numutil::primes_up_to(c.primes_upto)) {
        if (mpz_divisible_ui_p(bad.get_mpz_t(), p)) continue;
        std::string type;
        for (unsigned d : census::splitting_type(P, p)) type += (type.empty() ? "" : " ") + std::to_string(d);
        rows.push_back({{"p", p}, {"type", type}});
    }
    if (c.X) {
        const census::RAlphaResult ra = census::r_alpha_sum(P, parse_alpha(c.alpha), c.X);
        j["X"] = c.X;
        j["r_alpha_sum"] = R.num(ra.sum);
        j["taube_exponent"] = R.num(ra.exponent);
        j["galois"] = ra.galois;
        json series = json::array();
        for (const auto& row : ra.series)
            series.push_back({{"X", row.X}, {"sum", R.num(row.sum)}, {"normalized", R.num(row.normalized)}});
        j["series"] = series;
    }
    j["rows"] = rows;
    return j;
}

void add_input(CLI::App* sub, RunConfig& c, bool poly, bool form) {
    if (poly) sub->add_option("--poly", c.poly, "Univariate polynomial, e.g. x^3+2");
    if (form) sub->add_option("--form", c.form, "Binary form in x and z, e.g. x^3+2*z^3");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Square-free values of polynomials and forms: densities, censuses and sieve checks"};
    app.require_subcommand(1);
    app.fallthrough();
    RunConfig c;
    app.add_option("--format", c.format, "Output format: json, csv or text")->check(CLI::IsMember({"json", "csv", "text"}));
    app.add_option("--digits", c.digits, "Significant digits of floating-point output")->check(CLI::Range(1, 17));
    app.add_option("--threads", c.threads, "Worker threads (sets SIEVECRAFT_THREADS)");
    app.add_flag("--timing", c.timing, "Include wall-clock timings (breaks byte-identical output)");

    auto* density = app.add_subcommand("density", "Euler product for the density of square-free values");
    add_input(density, c, true, true);
    density->add_option("--B", c.B, "Truncation bound")->default_str("10000");
    density->add_option("--m", c.m, "Power m (univariate)")->default_val(2);
    density->add_option("--coprime", c.coprime, "Forms: restrict to coprime pairs")->default_str("false");
    density->add_flag("--factors", c.factors, "List the local factors");

    auto* cen = app.add_subcommand("census", "Count power-free values and compare with the main term");
    add_input(cen, c, true, true);
    cen->add_option("--N", c.N, "Range")->required();
    cen->add_option("--m", c.m, "Power m (univariate)")->default_val(2);
    cen->add_option("--B", c.B, "Euler product bound")->default_str("10000");
    cen->add_option("--box", c.box, "Forms: full or positive")->check(CLI::IsMember({"full", "positive"}))->default_val("full");
    cen->add_option("--coprime", c.coprime, "Forms: restrict to coprime pairs")->default_str("true");
    cen->add_option("--sector", c.sector, "Forms: sector x1,y1:x2,y2");

    auto* delta = app.add_subcommand("delta", "Arguments with a large square factor");
    add_input(delta, c, true, true);
    delta->add_option("--N", c.N, "Range")->required();
    delta->add_option("--threshold", c.threshold, "Prime threshold (default sqrt N, or N for forms)");
    delta->add_option("--method", c.method, "primes or scan")->check(CLI::IsMember({"primes", "scan"}))->default_val("primes");

    auto* twists = app.add_subcommand("twists", "Twist census of a binary form");
    add_input(twists, c, false, true);
    twists->add_option("--N", c.N, "Range")->required();
    twists->add_option("--M", c.twist_M, "Twist bound for the decomposition check");

    auto* tables = app.add_subcommand("tables", "Exponent tables for sextic Galois groups");
    tables->add_option("--alpha", c.alpha, "'paper' or a numeric value")->default_val("paper");

    auto* avg = app.add_subcommand("avgprod", "Average of a product of local factors");
    add_input(avg, c, true, true);
    avg->add_option("--N", c.N, "Range")->required();
    avg->add_option("--B", c.B, "Truncation bound")->default_str("1000");
    avg->add_option("--family", c.family, "squarefree, parity or constant")->default_val("squarefree");
    avg->add_option("--progression", c.progression, "Multiplier: indicator of n = a mod m, as a:m");
    avg->add_flag("--mobius", c.mobius, "Multiplier: Moebius function (no prediction)");
    avg->add_option("--sector", c.sector, "Forms: sector x1,y1:x2,y2");
    avg->add_option("--lattice", c.lattice, "Forms: lattice multiplier d1,s,d2");

    auto* sc = app.add_subcommand("sievecheck", "Sieve inequality checks on random and polynomial soils");
    sc->add_option("--seed", c.seed, "Corpus seed")->default_val(1);
    sc->add_option("--soils", c.soils, "Random soils")->default_val(200);
    sc->add_option("--poly-soils", c.poly_soils, "Polynomial soils")->default_val(20);
    sc->add_option("--ridd-factor", c.ridd_factor, "Multiplier applied to ridd_bound")->default_val(1.0);

    auto* sp = app.add_subcommand("splitting", "Splitting types and the R(alpha, d) sum");
    add_input(sp, c, true, false);
    sp->add_option("--primes-upto", c.primes_upto, "Largest prime listed")->default_val(100);
    sp->add_option("--X", c.X, "Range of the R(alpha, d) sum (0 skips it)");
    sp->add_option("--alpha", c.alpha, "'paper' or a numeric value")->default_val("paper");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return kExitUsage;
    }

    CLI::App* sub = app.get_subcommands().front();
    c.command = sub->get_name();
    // Options shared between subcommands get their per-subcommand defaults here.
    auto given = [sub](const char* name) {
        const CLI::Option* opt = sub->get_option_no_throw(name);
        return opt != nullptr && opt->count() > 0;
    };
    if (!given("--B")) c.B = c.command == "avgprod" ? 1000 : 10000;
    if (!given("--coprime")) c.coprime = c.command != "density";
    if (c.format.empty()) c.format = c.command == "tables" ? "csv" : "json";
    if (c.threads > 0) setenv("SIEVECRAFT_THREADS", std::to_string(c.threads).c_str(), 1);
    const Reporter R(c.digits);
    try {
        json report;
        if (c.command == "density") report = run_density(c, R);
        else if (c.command == "census") report = run_census(c, R);
        else if (c.command == "delta") report = run_delta(c, R);
        else if (c.command == "twists") report = run_twists(c, R);
        else if (c.command == "tables") report = run_tables(c, R);
        else if (c.command == "avgprod") report = run_avgprod(c, R);
        else if (c.command == "sievecheck") report = run_sievecheck(c, R);
        else report = run_splitting(c, R);
        emit(report, c.format);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << sub->help();
        return kExitUsage;
    } catch (const DomainError& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return kExitDomain;
    } catch (const ResourceError& e) {
        std::cerr << "resource error: " << e.what() << "\n";
        return kExitResource;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
