#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "xdrc/xdrc.hpp"

using namespace xdrc;
using nlohmann::json;

namespace {

enum ExitCode { kPass = 0, kUsage = 1, kStatistical = 2, kInvariant = 3, kConfig = 4, kCapacity = 5 };

Config::Schema common_schema() {
    return {{"seed", "1"}, {"workers", "0"}, {"out", "results"}, {"beta", "critical"}};
}

Config::Schema domain_schema() {
    auto s = common_schema();
    s.insert({{"shape", "square"}, {"side", "3"}, {"mesh", "0"}, {"width", "1"}, {"height", "1"}});
    return s;
}

Config::Schema with(Config::Schema base, const Config::Schema& extra) {
    for (const auto& [k, v] : extra) base[k] = v;
    return base;
}

double beta_of(const Config& c) { return c.str("beta") == "critical" ? critical_beta() : c.real("beta"); }

std::size_t workers_of(const Config& c) {
    const auto w = c.count("workers");
    return w == 0 ? default_workers() : w;
}

DomainPtr domain_of(const Config& c) {
    const auto& shape = c.str("shape");
    const double mesh = c.real("mesh");
    if (shape == "square") return mesh > 0.0 ? build_domain(Shape::unit_square(), mesh) : square_domain(static_cast<int>(c.integer("side")));
    if (mesh <= 0.0) throw ConfigError("shape '" + shape + "' needs mesh > 0");
    if (shape == "disk") return build_domain(Shape::unit_disk(), mesh);
    if (shape == "rectangle") return build_domain(Shape::rectangle(c.real("width"), c.real("height")), mesh);
    throw ConfigError("unknown shape '" + shape + "'");
}

std::vector<int> vertices_of(const DiscreteDomain& dom, const Config& c, const std::string& key) {
    std::vector<int> out;
    for (const auto& [x, y] : c.points(key)) out.push_back(dom.nearest_interior_vertex({x, y}));
    return out;
}

std::vector<int> faces_of(const DiscreteDomain& dom, const Config& c, const std::string& key) {
    std::vector<int> out;
    for (const auto& [x, y] : c.points(key)) out.push_back(dom.nearest_face({x, y}));
    return out;
}

std::string fmt(double x) { return format_double(x); }
std::string fmt(std::size_t x) { return std::to_string(x); }

json identity_json(const IdentityReport& r) {
    return {{"mc", r.mc}, {"exact", r.exact}, {"se", r.se}, {"samples", r.samples}, {"pass", r.pass}};
}

struct Command {
    Config::Schema schema;
    std::function<int(const Config&, ArtifactSet&)> run;
};

int sample_coupling(const Config& c, ArtifactSet& out) {
    const auto dom = domain_of(c);
    const auto seed = static_cast<std::uint64_t>(c.integer("seed"));
    out.add_seed(seed);
    CouplingSampler sampler(*dom, beta_of(c), seed, c.count("warmup"), c.count("sweeps"));
    CsvTable t({"sample", "seed", "samples", "clusters", "dual_clusters", "odd_edges", "max_abs_height2", "invariants"});
    std::size_t failures = 0;
    const auto n = c.count("samples");
    for (std::size_t k = 0; k < n; ++k) {
        const auto s = sampler.next();
        const auto inv = check_invariants(s, *dom);
        failures += !inv.all();
        std::size_t odd = 0;
        for (auto b : s.primal_trace.odd) odd += b;
        int hmax = 0;
        for (int h : s.h.primal) hmax = std::max(hmax, std::abs(h));
        for (int h : s.h.dual) hmax = std::max(hmax, std::abs(h));
        t.row({fmt(k), fmt(seed), fmt(n), fmt(s.primal_clusters.size()), fmt(s.dual_clusters.size()), fmt(odd), std::to_string(hmax),
               inv.all() ? "ok" : "violated"});
    }
    out.add_csv("coupling.csv", t);
    out.add_json("summary.json", {{"samples", n}, {"invariant_failures", failures}, {"vertices", dom->num_vertices()}});
    return failures ? kInvariant : kPass;
}

int decompose_cmd(const Config& c, ArtifactSet& out) {
    const auto dom = domain_of(c);
    const auto seed = static_cast<std::uint64_t>(c.integer("seed"));
    out.add_seed(seed);
    const auto rhos = c.reals("rhos");
    CouplingSampler sampler(*dom, beta_of(c), seed, c.count("warmup"), c.count("sweeps"));
    const auto f = TestFunction::constant(1.0);
    std::vector<std::string> header{"sample", "seed", "samples", "components", "reconstruction", "pairing", "pairing_shuffled"};
    for (double r : rhos) header.push_back("census_" + fmt(r));
    CsvTable t(header);
    std::size_t failures = 0;
    const auto n = c.count("samples");
    for (std::size_t k = 0; k < n; ++k) {
        const auto s = sampler.next();
        const auto dec = decompose(s, *dom);
        const bool exact = reconstruct(dec) == s.tau;
        const auto full = partial_sums(dec, f, diameter_ordering(), dec.size());
        const auto shuffled = partial_sums(dec, f, shuffled_ordering(stream_seed(seed, k)), dec.size());
        const bool same = full.back() == shuffled.back();
        failures += !(exact && same);
        std::vector<std::string> row{fmt(k), fmt(seed), fmt(n), fmt(dec.size()), exact ? "exact" : "mismatch", fmt(full.back()),
                                     fmt(shuffled.back())};
        for (auto cnt : diameter_census(dec, rhos)) row.push_back(fmt(cnt));
        t.row(row);
    }
    out.add_csv("decomposition.csv", t);
    out.add_json("summary.json", {{"samples", n}, {"failures", failures}});
    return failures ? kInvariant : kPass;
}

int verify_switching_cmd(const Config& c, ArtifactSet& out) {
    const auto dom = domain_of(c);
    const auto seed = static_cast<std::uint64_t>(c.integer("seed"));
    out.add_seed(seed);
    const auto sets = split(c.str("sets"), '|');
    json results = json::array();
    bool pass = true;
    for (std::size_t i = 0; i < sets.size(); ++i) {
        Config one(Config::Schema{{"points", ""}});
        one.set("points=" + sets[i]);
        const auto a = vertices_of(*dom, one, "points");
        const auto r = verify_switching(*dom, a, beta_of(c), c.count("samples"), stream_seed(seed, i), c.real("sigmas"));
        pass = pass && r.pass;
        auto j = identity_json(r);
        j["points"] = sets[i];
        j["seed"] = stream_seed(seed, i);
        results.push_back(j);
    }
    out.add_json("switching.json", {{"results", results}, {"pass", pass}});
    return pass ? kPass : kStatistical;
}

int verify_bosonisation_cmd(const Config& c, ArtifactSet& out) {
    const auto dom = domain_of(c);
    const auto seed = static_cast<std::uint64_t>(c.integer("seed"));
    out.add_seed(seed);
    const auto r = verify_bosonisation(*dom, vertices_of(*dom, c, "primal_points"), faces_of(*dom, c, "dual_points"), c.count("samples"),
                                       seed, beta_of(c), c.real("sigmas"));
    auto j = identity_json(r);
    j["seed"] = seed;
    out.add_json("bosonisation.json", j);
    return r.pass ? kPass : kStatistical;
}

int scaling_cmd(const Config& c, ArtifactSet& out) {
    const auto seed = static_cast<std::uint64_t>(c.integer("seed"));
    out.add_seed(seed);
    const double beta = beta_of(c);
    const auto sizes = c.integers("sizes");
    const auto samples = c.count("samples");
    const auto warmup = c.count("warmup");
    // One task per size, merged in size order.
    const auto per_size = parallel_map<ScalingMeasurement>(sizes.size(), workers_of(c), [&](std::size_t i) {
        return measure_scaling_point(sizes[i], beta, samples, seed, warmup);
    });
    std::vector<ScalingPoint> two, one;
    CsvTable t({"size", "mesh", "observable", "estimate", "se", "samples", "seed"});
    for (const auto& s : per_size) {
        const auto& p2 = s.two_point;
        const auto& p1 = s.one_point;
        two.push_back(p2);
        one.push_back(p1);
        t.row({std::to_string(p2.size), fmt(p2.mesh), "two_point", fmt(p2.estimate), fmt(p2.se), fmt(p2.samples), fmt(p2.seed)});
        t.row({std::to_string(p1.size), fmt(p1.mesh), "one_point", fmt(p1.estimate), fmt(p1.se), fmt(p1.samples), fmt(p1.seed)});
    }
    json summary;
    bool pass = true;
    if (sizes.size() >= 2) {
        const auto f2 = fit_exponent(two), f1 = fit_exponent(one);
        const double tol = c.real("exponent_tolerance");
        summary["two_point_exponent"] = {{"value", f2.exponent}, {"se", f2.exponent_se}, {"target", 0.5}};
        summary["one_point_exponent"] = {{"value", f1.exponent}, {"se", f1.exponent_se}, {"target", 0.25}};
        pass = std::fabs(f2.exponent - 0.5) <= tol && std::fabs(f1.exponent - 0.25) <= tol;
    }
    if (const auto hs = c.count("height_size"); hs > 0) {
        const auto dom = square_domain(static_cast<int>(hs) - 1);
        const auto h = height_covariance(*dom, {{{0.375, 0.5}, {0.625, 0.5}}, {{0.5, 0.375}, {0.5, 0.625}}}, beta, c.count("height_samples"), stream_seed(seed, 0x4e16), warmup);
        summary["height_covariance"] = {{"estimate", h.estimate}, {"se", h.se}, {"green", h.green}, {"ratio", h.ratio}, {"target", h.target}};
        pass = pass && std::fabs(h.ratio / h.target - 1.0) <= c.real("height_tolerance");
    }
    summary["pass"] = pass;
    out.add_csv("scaling.csv", t);
    out.add_json("scaling.json", summary);
    return pass ? kPass : kStatistical;
}

int gff_chaos_cmd(const Config& c, ArtifactSet& out) {
    const Grid g(static_cast<int>(c.integer("nx")), static_cast<int>(c.integer("ny")));
    const auto seed = static_cast<std::uint64_t>(c.integer("seed"));
    out.add_seed(seed);
    const double alpha = c.real("alpha");
    const auto pairs = c.points("pairs");
    const std::vector<std::pair<std::string, ChaosMode>> modes{
        {"cos-cos", ChaosMode::cos_cos}, {"sin-sin", ChaosMode::sin_sin}, {"exp-exp", ChaosMode::exp_exp}};
    CsvTable t({"x", "y", "mode", "alpha", "mc", "exact", "se", "samples", "seed", "pass"});
    bool pass = true;
    std::size_t task = 0;
    for (const auto& [px, py] : pairs) {
        const int x = static_cast<int>(px), y = static_cast<int>(py);
        for (const auto& [name, mode] : modes) {
            const auto s = stream_seed(seed, task++);
            const auto r = chaos_pair_mc(g, alpha, x, y, mode, c.count("samples"), s, c.real("sigmas"));
            pass = pass && r.pass;
            t.row({std::to_string(x), std::to_string(y), name, fmt(alpha), fmt(r.mc), fmt(r.exact), fmt(r.se), fmt(r.samples), fmt(s),
                   r.pass ? "true" : "false"});
        }
    }
    const auto ineq = lattice_inequalities(g, c.reals("alphas"), c.reals("us"));
    pass = pass && ineq.violations == 0;
    out.add_csv("chaos.csv", t);
    out.add_json("inequalities.json",
                 {{"evaluations", ineq.evaluations}, {"violations", ineq.violations}, {"max_margin", ineq.max_margin}, {"pass", pass}});
    return pass ? kPass : kStatistical;
}

int continuum_cmd(const Config& c, ArtifactSet& out) {
    const auto seed = static_cast<std::uint64_t>(c.integer("seed"));
    out.add_seed(seed);
    const auto rep = check_inequalities(c.count("pairs"), c.reals("alphas"), c.reals("us"), seed);
    Rng rng(seed, 0x4b7);
    std::size_t violations = 0, evaluations = 0;
    double min_margin = std::numeric_limits<double>::infinity();
    json worst;
    const auto triples = c.count("triples");
    const auto halphas = c.reals("hyperbolic_alphas");
    for (std::size_t k = 0; k < triples; ++k) {
        const Complex z = random_disk_point(rng), w = random_disk_point(rng);
        const Complex zeta = std::polar(1.0, 2.0 * std::numbers::pi * rng.uniform());
        for (double a : halphas) {
            const auto h = hyperbolic_inequality(z, w, zeta, a);
            ++evaluations;
            const double margin = h.lhs - h.rhs;
            if (margin < min_margin) {
                min_margin = margin;
                worst = {{"z", {z.real(), z.imag()}}, {"w", {w.real(), w.imag()}}, {"zeta", {zeta.real(), zeta.imag()}}, {"alpha", a}};
            }
            if (a <= 1.0 && !h.holds) ++violations;
        }
    }
    json j;
    j["kernel_inequalities"] = {{"evaluations", rep.evaluations},       {"violations", rep.violations},
                                {"max_margin_i", rep.max_violation_i},   {"max_margin_ii", rep.max_violation_ii},
                                {"max_margin_iii", rep.max_violation_iii}};
    j["hyperbolic"] = {{"evaluations", evaluations}, {"violations_alpha_le_1", violations}, {"min_margin", min_margin}, {"at", worst}};
    const bool pass = rep.violations == 0 && violations == 0;
    j["pass"] = pass;
    out.add_json("continuum.json", j);
    return pass ? kPass : kInvariant;
}

DrivingFunction driving_of(const Config& c, std::uint64_t seed) {
    const auto& kind = c.str("driving");
    if (kind == "constant") return DrivingFunction::constant(c.real("driving_value"));
    if (kind == "linear") {
        std::vector<double> ts, ws;
        for (const auto& [t, w] : c.points("knots")) {
            ts.push_back(t);
            ws.push_back(w);
        }
        return DrivingFunction::piecewise_linear(ts, ws);
    }
    if (kind == "brownian") return DrivingFunction::brownian(c.real("driving_scale"), c.real("horizon"), seed);
    throw ConfigError("unknown driving '" + kind + "'");
}

int loewner_cmd(const Config& c, ArtifactSet& out) {
    const auto seed = static_cast<std::uint64_t>(c.integer("seed"));
    out.add_seed(seed);
    const LoewnerChain chain(driving_of(c, seed));
    const auto alphas = c.reals("alphas");
    const double dt = c.real("dt"), horizon = c.real("horizon");
    const double tol = c.real("tolerance");
    struct Row {
        double t = 0.0;
        Complex z, w;
        std::vector<MonotonicityReport> reports;
        HadamardReport hadamard;
        bool swallowed = false;
    };
    const auto rows = parallel_map<Row>(c.count("triples"), workers_of(c), [&](std::size_t i) {
        Rng rng(seed, 0x10e0 + i);
        Row r;
        r.t = dt + (horizon - 2.0 * dt) * rng.uniform();
        r.z = random_disk_point(rng, 0.95);
        r.w = random_disk_point(rng, 0.95);
        try {
            for (double a : alphas) r.reports.push_back(monotonicity_check(chain, r.t, r.z, r.w, a, dt));
            r.hadamard = hadamard_check(chain, r.t, r.z, r.w, dt);
        } catch (const PointSwallowed&) {
            r.swallowed = true;
        }
        return r;
    });
    CsvTable t({"t", "z_re", "z_im", "w_re", "w_im", "alpha", "dC", "dS", "scale", "rel_err", "seed"});
    std::size_t violations = 0, swallowed = 0;
    for (const auto& r : rows) {
        if (r.swallowed) {
            ++swallowed;
            continue;
        }
        for (std::size_t k = 0; k < alphas.size(); ++k) {
            const auto& m = r.reports[k];
            if (m.dC > tol * m.scale) ++violations;
            if (alphas[k] <= 1.0 && m.dS < -tol * m.scale) ++violations;
            t.row({fmt(r.t), fmt(r.z.real()), fmt(r.z.imag()), fmt(r.w.real()), fmt(r.w.imag()), fmt(alphas[k]), fmt(m.dC), fmt(m.dS),
                   fmt(m.scale), fmt(r.hadamard.rel_err), fmt(seed)});
        }
    }
    out.add_csv("loewner.csv", t);
    out.add_json("loewner.json", {{"triples", rows.size()}, {"swallowed", swallowed}, {"violations", violations}});
    return violations ? kInvariant : kPass;
}

int oracle_cmd(const Config& c, ArtifactSet& out) {
    const auto& g = c.str("graph");
    const bool dbl = c.flag("double_current");
    const double beta = beta_of(c);
    TraceDistribution dist;
    if (g == "triangle") dist = enumerate_trace_distribution(Graph::triangle(), beta, dbl);
    else if (g == "grid") dist = enumerate_trace_distribution(Graph::grid(static_cast<int>(c.integer("side")), static_cast<int>(c.integer("side"))), beta, dbl);
    else if (g == "domain") {
        const auto bc = c.str("boundary") == "wired" ? Boundary::wired : Boundary::free;
        dist = enumerate_trace_distribution(*domain_of(c), bc, beta, dbl);
    } else throw ConfigError("unknown graph '" + g + "'");
    std::map<std::uint64_t, double> sorted(dist.begin(), dist.end());
    CsvTable t({"odd_mask", "occupied_mask", "probability"});
    for (const auto& [k, p] : sorted) t.row({fmt(static_cast<std::size_t>(k & 0xffffffffULL)), fmt(static_cast<std::size_t>(k >> 32)), fmt(p)});
    out.add_csv("trace_distribution.csv", t);
    return kPass;
}

std::map<std::string, Command> commands() {
    std::map<std::string, Command> m;
    m["sample-coupling"] = {with(domain_schema(), {{"samples", "100"}, {"warmup", "1000"}, {"sweeps", "1"}}), sample_coupling};
    m["decompose"] = {with(domain_schema(), {{"samples", "100"}, {"warmup", "1000"}, {"sweeps", "1"}, {"rhos", "0.1,0.25,0.5"}}),
                      decompose_cmd};
    m["verify-switching"] = {with(domain_schema(), {{"sets", "0.5:0.5"}, {"samples", "100000"}, {"sigmas", "4"}}), verify_switching_cmd};
    m["verify-bosonisation"] = {
        with(domain_schema(), {{"primal_points", "0.5:0.5"}, {"dual_points", ""}, {"samples", "100000"}, {"sigmas", "4"}}),
        verify_bosonisation_cmd};
    m["scaling-study"] = {with(common_schema(), {{"sizes", "16,32,64"},
                                                 {"samples", "1000"},
                                                 {"warmup", "1000"},
                                                 {"exponent_tolerance", "0.05"},
                                                 {"height_size", "0"},
                                                 {"height_samples", "1000"},
                                                 {"height_tolerance", "0.15"}}),
                          scaling_cmd};
    m["gff-chaos"] = {with(common_schema(), {{"nx", "8"},
                                             {"ny", "8"},
                                             {"alpha", "0.7071067811865476"},
                                             {"pairs", "27:36"},
                                             {"samples", "100000"},
                                             {"sigmas", "4"},
                                             {"alphas", "0.5,0.7071067811865476,1,1.3"},
                                             {"us", "0,0.7853981633974483,-0.7853981633974483,1.5550883635269477,-1.5550883635269477"}}),
                      gff_chaos_cmd};
    m["continuum-inequalities"] = {with(common_schema(), {{"pairs", "10000"},
                                                          {"alphas", "0.5,0.7071067811865476,0.9,1,1.3"},
                                                          {"us", "-1.5707963267948966,-0.7853981633974483,0,0.7853981633974483,1.5707963267948966"},
                                                          {"triples", "100000"},
                                                          {"hyperbolic_alphas", "0.5,0.7071067811865476,1"}}),
                                   continuum_cmd};
    m["loewner-sweep"] = {with(common_schema(), {{"driving", "brownian"},
                                                 {"driving_value", "0"},
                                                 {"driving_scale", "1.4142135623730951"},
                                                 {"knots", "0:0;0.1:0.8;0.3:-0.5;0.6:0.3"},
                                                 {"horizon", "1"},
                                                 {"triples", "1000"},
                                                 {"alphas", "0.5,0.7071067811865476,1,1.3"},
                                                 {"dt", "1e-4"},
                                                 {"tolerance", "1e-6"}}),
                          loewner_cmd};
    m["oracle-enumerate"] = {with(domain_schema(), {{"graph", "triangle"}, {"boundary", "wired"}, {"double_current", "false"}}), oracle_cmd};
    return m;
}

}  // namespace

int main(int argc, char** argv) {
    const auto table = commands();
    CLI::App app{"Double random current, coupling and continuum verification runs"};
    app.require_subcommand(1);
    std::map<std::string, std::pair<std::string, std::vector<std::string>>> args;
    for (const auto& [name, cmd] : table) {
        auto* sub = app.add_subcommand(name);
        auto& a = args[name];
        sub->add_option("config", a.first, "key=value configuration file");
        sub->add_option("--set", a.second, "override one key, key=value");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kPass : kUsage;
    }
    const std::string name = app.get_subcommands().front()->get_name();
    const auto& cmd = table.at(name);
    try {
        Config config(cmd.schema);
        if (!args[name].first.empty()) config.parse_file(args[name].first);
        for (const auto& s : args[name].second) config.set(s);
        ArtifactSet artifacts(config.str("out"), name, config);
        const int status = cmd.run(config, artifacts);
        artifacts.commit(status);
        std::printf("%s: %s (exit %d), config %s\n", name.c_str(), status == kPass ? "pass" : "fail", status,
                    hex64(config.hash()).c_str());
        return status;
    } catch (const OracleCapacityExceeded& e) {
        std::fprintf(stderr, "capacity exceeded: %s\n", e.what());
        return kCapacity;
    } catch (const CouplingViolation& e) {
        std::fprintf(stderr, "invariant violation: %s\n", e.what());
        return kInvariant;
    } catch (const ParityInconsistency& e) {
        std::fprintf(stderr, "invariant violation: %s\n", e.what());
        return kInvariant;
    } catch (const OverlappingSupports& e) {
        std::fprintf(stderr, "invariant violation: %s\n", e.what());
        return kInvariant;
    } catch (const ContractViolation& e) {
        std::fprintf(stderr, "invariant violation: %s\n", e.what());
        return kInvariant;
    } catch (const Error& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return kConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kConfig;
    }
}
