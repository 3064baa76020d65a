#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "fixtures.hpp"
#include "xdrc/xdrc.hpp"

using namespace xdrc;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string num(double x, int precision = 4) {
    std::ostringstream s;
    s.precision(precision);
    s << x;
    return s.str();
}

TraceDistribution fixture_distribution(const std::string& prefix) {
    TraceDistribution d;
    for (const auto& [name, p] : oracle_values()) {
        if (name.rfind(prefix, 0) != 0) continue;
        const auto dot = name.rfind('.');
        const auto prev = name.rfind('.', dot - 1);
        const std::uint64_t odd = std::stoull(name.substr(prev + 1, dot - prev - 1));
        const std::uint64_t occ = std::stoull(name.substr(dot + 1));
        d[odd | (occ << 32)] = p;
    }
    return d;
}

Outcome trace_oracle_equivalence() {
    const auto t0 = Clock::now();
    const std::size_t n = 1'000'000;
    const double beta = critical_beta();
    Outcome o{true, ""};
    const std::pair<const char*, Graph> fixtures[] = {{"triangle", Graph::triangle()}, {"grid2", Graph::grid(2, 2)}};
    std::uint64_t seed = 100;
    for (const auto& [name, graph] : fixtures) {
        for (bool dbl : {false, true}) {
            const auto exact = fixture_distribution(std::string("trace.") + name + (dbl ? ".double." : ".single."));
            std::unordered_map<std::uint64_t, std::size_t> counts;
            if (dbl) {
                DrcSampler s(free_support(graph), beta, ++seed);
                for (std::size_t k = 0; k < n; ++k) ++counts[trace_key(s.next())];
            } else {
                CurrentSampler s(free_support(graph), beta, ++seed, 1);
                for (std::size_t k = 0; k < n; ++k) ++counts[trace_key(s.next())];
            }
            const double tv = total_variation(exact, counts, n);
            o.pass = o.pass && tv < 0.01;
            o.detail += std::string(name) + (dbl ? "/drc" : "/single") + " TV=" + num(tv, 3) + " ";
        }
    }
    const double secs = seconds_since(t0);
    o.pass = o.pass && secs < 300.0;
    o.detail += "time=" + num(secs, 3) + "s";
    return o;
}

Outcome switching_lemma() {
    const auto dom = square_domain(3);
    auto v = [&](double x, double y) { return dom->nearest_interior_vertex({x, y}); };
    const std::vector<std::vector<int>> sets{{v(0.5, 0.5)}, {v(0.25, 0.25), v(0.75, 0.5)}, {v(0.25, 0.25), v(0.5, 0.5), v(0.75, 0.75)}};
    Outcome o{true, ""};
    std::uint64_t seed = 200;
    for (const auto& a : sets) {
        const auto r = verify_switching(*dom, a, critical_beta(), 200000, ++seed);
        o.pass = o.pass && r.pass;
        o.detail += "|A|=" + std::to_string(a.size()) + " mc=" + num(r.mc, 5) + " exact=" + num(r.exact, 5) + " z=" +
                    num((r.mc - r.exact) / r.se, 2) + " ";
    }
    return o;
}

Outcome bosonisation() {
    Outcome o{true, ""};
    const auto d3 = square_domain(3), d4 = square_domain(4);
    const auto primal = verify_bosonisation(*d3, {d3->nearest_interior_vertex({0.5, 0.5})}, {}, 200000, 301);
    const auto dual = verify_bosonisation(*d4, {}, {d4->nearest_face({0.3, 0.3})}, 200000, 302);
    const auto pair = verify_bosonisation(*d4, {}, {d4->nearest_face({0.3, 0.3}), d4->nearest_face({0.7, 0.5})}, 200000, 303);
    for (const auto& [name, r] : {std::pair{"primal", primal}, std::pair{"dual", dual}, std::pair{"dual-pair", pair}}) {
        o.pass = o.pass && r.pass;
        o.detail += std::string(name) + " mc=" + num(r.mc, 5) + " exact=" + num(r.exact, 5) + " se=" + num(r.se, 2) + " ";
    }
    return o;
}

Outcome coupling_invariants() {
    const auto dom = square_domain(16);
    CouplingSampler sampler(*dom, critical_beta(), 400);
    const std::size_t n = 10000;
    std::size_t good = 0;
    for (std::size_t k = 0; k < n; ++k) good += check_invariants(sampler.next(), *dom).all();
    return {good == n, std::to_string(good) + "/" + std::to_string(n) + " samples satisfy every invariant"};
}

Outcome reconstruction() {
    const auto dom = square_domain(32);
    CouplingSampler sampler(*dom, critical_beta(), 500);
    const TestFunction f{[](Complex z) { return std::sin(std::numbers::pi * z.real()) * (1.0 + z.imag() * z.imag()); }, 2.0};
    const std::size_t n = 1000;
    std::size_t exact = 0, invariant = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const auto s = sampler.next();
        const auto dec = decompose(s, *dom);
        exact += reconstruct(dec) == s.tau;
        const double direct = pair_field(s.tau, f, *dom);
        const bool same = partial_sums(dec, f, diameter_ordering(), dec.size()).back() == direct &&
                          partial_sums(dec, f, size_ordering(), dec.size()).back() == direct &&
                          partial_sums(dec, f, shuffled_ordering(stream_seed(500, k)), dec.size()).back() == direct;
        invariant += same;
    }
    return {exact == n && invariant == n,
            "bit-exact " + std::to_string(exact) + "/" + std::to_string(n) + ", ordering-invariant " + std::to_string(invariant) + "/" +
                std::to_string(n)};
}

Outcome scaling() {
    const auto t0 = Clock::now();
    const auto study = scaling_study({16, 32, 64, 128, 256, 512}, critical_beta(), 4000, 600, 200);
    const auto dom = build_domain(Shape::unit_square(), 1.0 / 256);
    const auto h = height_covariance(*dom, {{{0.375, 0.5}, {0.625, 0.5}}, {{0.5, 0.375}, {0.5, 0.625}}}, critical_beta(), 10000, 601, 200);
    const double secs = seconds_since(t0);
    const double rel = h.ratio / h.target - 1.0;
    const bool two = std::fabs(study.two_point.exponent - 0.5) <= 0.05;
    const bool one = std::fabs(study.one_point.exponent - 0.25) <= 0.05;
    const bool height = std::fabs(rel) <= 0.15;
    return {two && one && height && secs <= 7200.0,
            "two-point=" + num(study.two_point.exponent) + "+-" + num(study.two_point.exponent_se, 2) +
                " one-point=" + num(study.one_point.exponent) + "+-" + num(study.one_point.exponent_se, 2) +
                " height/G=" + num(h.ratio) + " (target " + num(h.target) + ", " + num(100 * rel, 3) + "%)" + " time=" + num(secs, 4) + "s"};
}

Outcome gff_chaos() {
    const Grid g(8, 8);
    const double alpha = 1.0 / std::numbers::sqrt2;
    Outcome o{true, ""};
    std::uint64_t seed = 700;
    for (auto [mode, name] : {std::pair{ChaosMode::cos_cos, "cos"}, std::pair{ChaosMode::sin_sin, "sin"}, std::pair{ChaosMode::exp_exp, "exp"}}) {
        for (auto [x, y] : {std::pair{27, 36}, std::pair{9, 54}}) {
            const auto r = chaos_pair_mc(g, alpha, x, y, mode, 100000, ++seed);
            o.pass = o.pass && r.pass;
            o.detail += std::string(name) + "(" + std::to_string(x) + "," + std::to_string(y) + ") z=" + num((r.mc - r.exact) / r.se, 2) + " ";
        }
    }
    const std::vector<double> alphas{0.25, 0.5, 1.0 / std::numbers::sqrt2, 0.9, 1.0, 1.2, 1.3, 1.4};
    std::vector<double> us;
    for (int k = -4; k <= 4; ++k) us.push_back(k * std::numbers::pi / 8);
    const auto cont = check_inequalities(10000, alphas, us, 710);
    const auto lat = lattice_inequalities(g, alphas, us);
    o.pass = o.pass && cont.violations == 0 && lat.violations == 0;
    o.detail += "continuum violations " + std::to_string(cont.violations) + "/" + std::to_string(cont.evaluations) + ", lattice violations " +
                std::to_string(lat.violations) + "/" + std::to_string(lat.evaluations);
    return o;
}

Outcome hadamard() {
    const std::vector<LoewnerChain> chains{LoewnerChain(DrivingFunction::constant(0.0)),
                                           LoewnerChain(DrivingFunction::constant(2.0)),
                                           LoewnerChain(DrivingFunction::piecewise_linear({0.0, 0.1, 0.3, 0.6}, {0.0, 0.8, -0.5, 0.3}))};
    const std::vector<std::pair<Complex, Complex>> points{{{0.2, 0.1}, {-0.3, 0.4}}, {{0.0, -0.5}, {0.5, 0.5}}, {{-0.4, -0.1}, {-0.4, -0.1}}};
    const std::vector<double> times{0.05, 0.25, 0.45};
    double worst = 0.0, min_order = 1e9, max_order = -1e9;
    std::size_t count = 0;
    for (const auto& chain : chains)
        for (const auto& [z, w] : points)
            for (double t : times) {
                const double e1 = hadamard_check(chain, t, z, w, 1e-4).rel_err;
                const double e2 = hadamard_check(chain, t, z, w, 2e-4).rel_err;
                const double e4 = hadamard_check(chain, t, z, w, 4e-4).rel_err;
                worst = std::max(worst, e1);
                for (double order : {std::log2(e2 / e1), std::log2(e4 / e2)}) {
                    min_order = std::min(min_order, order);
                    max_order = std::max(max_order, order);
                }
                ++count;
            }
    const bool first_order = min_order > 0.8 && max_order < 1.2;
    return {worst < 1e-3 && first_order, std::to_string(count) + " fixtures, max rel_err=" + num(worst, 3) + ", observed order in [" +
                                             num(min_order, 3) + ", " + num(max_order, 3) + "]"};
}

Outcome domain_monotonicity() {
    const std::vector<double> alphas{0.5, 1.0 / std::numbers::sqrt2, 1.0, 1.3};
    const double dt = 1e-4, horizon = 0.5, tol = 1e-6;
    const std::size_t n = 1000;
    struct Row {
        std::size_t violations = 0;
        bool swallowed = false;
        double worst = -1e300;
    };
    const auto rows = parallel_map<Row>(n, default_workers(), [&](std::size_t i) {
        Rng rng(900, i);
        const LoewnerChain chain(DrivingFunction::brownian(std::numbers::sqrt2, horizon, stream_seed(900, i)));
        const double t = dt + (horizon - 2.0 * dt) * rng.uniform();
        const Complex z = random_disk_point(rng, 0.95), w = random_disk_point(rng, 0.95);
        Row r;
        try {
            for (double a : alphas) {
                const auto m = monotonicity_check(chain, t, z, w, a, dt);
                r.worst = std::max(r.worst, m.dC / m.scale);
                r.violations += m.dC > tol * m.scale;
                if (a <= 1.0) {
                    r.worst = std::max(r.worst, -m.dS / m.scale);
                    r.violations += m.dS < -tol * m.scale;
                }
            }
        } catch (const PointSwallowed&) {
            r.swallowed = true;
        }
        return r;
    });
    std::size_t violations = 0, swallowed = 0;
    double worst = -1e300;
    for (const auto& r : rows) {
        violations += r.violations;
        swallowed += r.swallowed;
        if (!r.swallowed) worst = std::max(worst, r.worst);
    }
    return {violations == 0 && swallowed < n / 10, std::to_string(violations) + " violations over " + std::to_string(n - swallowed) +
                                                      " triples (" + std::to_string(swallowed) + " swallowed), max signed margin/scale=" +
                                                      num(worst, 3)};
}

Outcome hyperbolic() {
    Rng rng(1000, 1);
    const std::vector<double> alphas{0.25, 0.5, 1.0 / std::numbers::sqrt2, 0.9, 1.0};
    std::size_t violations = 0;
    const std::size_t n = 100000;
    for (std::size_t k = 0; k < n; ++k) {
        const Complex z = random_disk_point(rng), w = random_disk_point(rng);
        const Complex zeta = std::polar(1.0, 2.0 * std::numbers::pi * rng.uniform());
        for (double a : alphas) violations += !hyperbolic_inequality(z, w, zeta, a).holds;
    }
    return {violations == 0, std::to_string(violations) + " violations over " + std::to_string(n) + " triples x " +
                                 std::to_string(alphas.size()) + " alphas"};
}

Outcome census() {
    const auto points = census_study(Shape::unit_square(), {1.0 / 256, 1.0 / 512}, 0.25, critical_beta(), 600, 1100, 200);
    const double ratio = points[1].mean / points[0].mean;
    return {std::fabs(ratio - 1.0) <= 0.10, "rho=0.25: 256^2 " + num(points[0].mean) + "+-" + num(points[0].se, 2) + ", 512^2 " +
                                                num(points[1].mean) + "+-" + num(points[1].se, 2) + ", ratio " + num(ratio)};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"trace oracle equivalence", trace_oracle_equivalence},
        {"switching lemma", switching_lemma},
        {"bosonisation", bosonisation},
        {"coupling invariants", coupling_invariants},
        {"decomposition reconstruction", reconstruction},
        {"scaling fits", scaling},
        {"gff chaos", gff_chaos},
        {"hadamard formula", hadamard},
        {"domain monotonicity", domain_monotonicity},
        {"hyperbolic inequality", hyperbolic},
        {"cluster census stability", census},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = Clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += !o.pass;
        std::printf("criterion %2zu %-30s %s  %s  [%.1fs]\n", i + 1, criteria[i].first, o.pass ? "PASS" : "FAIL", o.detail.c_str(),
                    seconds_since(t0));
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria failed\n", failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
