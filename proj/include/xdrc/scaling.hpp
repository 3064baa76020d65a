#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <unordered_map>
#include <vector>

#include "xdrc/continuum.hpp"
#include "xdrc/coupling.hpp"
#include "xdrc/currents.hpp"
#include "xdrc/decomposition.hpp"
#include "xdrc/graph.hpp"
#include "xdrc/ising.hpp"
#include "xdrc/lattice.hpp"
#include "xdrc/stats.hpp"

namespace xdrc {

// FK-Ising configurations with wired boundary drawn from a Wolff chain, with
// connectivity queries. Under plus boundary conditions E[sigma_A] is the
// probability that every FK cluster meets A (plus the boundary when |A| is
// odd) an even number of times; one-point and two-point functions are
// connection probabilities.
class FkConnectivity {
public:
    FkConnectivity(const DiscreteDomain& dom, double beta, std::uint64_t seed, std::uint64_t stream,
                   std::size_t warmup_sweeps = kDefaultWarmupSweeps)
        : chain_(wired_support(dom), beta, Rng(seed, stream)) {
        bond_ = probability_threshold(-std::expm1(-2.0 * beta));
        chain_.warm_up(warmup_sweeps);
    }

    void next(std::size_t sweeps = 1) {
        chain_.sweep(sweeps);
        const auto& g = chain_.graph();
        const auto& s = chain_.raw_spins();
        auto& rng = chain_.rng();
        ds_.reset(static_cast<std::size_t>(g.num_vertices()));
        for (int e = 0; e < g.num_edges(); ++e) {
            const auto [a, b] = g.edge(e);
            if (s[static_cast<std::size_t>(a)] == s[static_cast<std::size_t>(b)] && rng() < bond_) ds_.unite(a, b);
        }
    }
    bool connected(int host_a, int host_b) {
        const auto& m = chain_.support().vertex_of_host;
        return ds_.find(m[static_cast<std::size_t>(host_a)]) == ds_.find(m[static_cast<std::size_t>(host_b)]);
    }
    bool connected_to_boundary(int host_v) {
        const auto& sup = chain_.support();
        return ds_.find(sup.vertex_of_host[static_cast<std::size_t>(host_v)]) == ds_.find(sup.ghost);
    }

private:
    WolffChain chain_;
    std::uint64_t bond_ = 0;
    DisjointSets ds_;
};

struct ScalingPoint {
    int size = 0;
    double mesh = 0.0;
    double estimate = 0.0;
    double se = 0.0;
    std::size_t samples = 0;
    std::uint64_t seed = 0;
};

struct ExponentFit {
    std::vector<ScalingPoint> points;
    LinearFit fit;           // log(estimate) against log(size)
    double exponent = 0.0;   // minus the fitted slope
    double exponent_se = 0.0;
};

inline ExponentFit fit_exponent(std::vector<ScalingPoint> points) {
    ExponentFit f;
    std::vector<double> x, y, s;
    for (const auto& p : points) {
        if (!(p.estimate > 0.0)) throw InvalidParameter("fit_exponent: estimates must be positive");
        x.push_back(std::log(static_cast<double>(p.size)));
        y.push_back(std::log(p.estimate));
        s.push_back(std::max(p.se, 1e-12) / p.estimate);
    }
    f.points = std::move(points);
    f.fit = weighted_linear_fit(x, y, s);
    f.exponent = -f.fit.slope;
    f.exponent_se = f.fit.slope_se;
    return f;
}

struct ScalingStudy {
    ExponentFit two_point;  // E[tau(x) tau(y)] at fixed relative positions
    ExponentFit one_point;  // E[tau(v)] at a fixed relative position
};

struct ScalingMeasurement {
    ScalingPoint two_point;
    ScalingPoint one_point;
};

// XOR-Ising one- and two-point functions on the unit square with mesh 1/L
// under plus boundary conditions, estimated as products of FK connection
// indicators of two independent chains. Two-point: x = (3/8, 1/2),
// y = (5/8, 1/2) and its quarter-turn image. One-point: (1/4, 1/2) and its
// three images under the symmetries of the square.
inline ScalingMeasurement measure_scaling_point(int size, double beta, std::size_t samples, std::uint64_t seed,
                                                std::size_t warmup_sweeps = kDefaultWarmupSweeps) {
    const auto dom = build_domain(Shape::unit_square(), 1.0 / size);
    const std::uint64_t run_seed = stream_seed(seed, static_cast<std::uint64_t>(size));
    FkConnectivity a(*dom, beta, run_seed, 1, warmup_sweeps), b(*dom, beta, run_seed, 2, warmup_sweeps);
    const std::array<std::array<int, 2>, 2> pairs{{
        {dom->nearest_interior_vertex({0.375, 0.5}), dom->nearest_interior_vertex({0.625, 0.5})},
        {dom->nearest_interior_vertex({0.5, 0.375}), dom->nearest_interior_vertex({0.5, 0.625})},
    }};
    const std::array<int, 4> singles{dom->nearest_interior_vertex({0.25, 0.5}), dom->nearest_interior_vertex({0.75, 0.5}),
                                     dom->nearest_interior_vertex({0.5, 0.25}), dom->nearest_interior_vertex({0.5, 0.75})};
    std::vector<double> xs2, xs1;
    xs2.reserve(samples);
    xs1.reserve(samples);
    for (std::size_t k = 0; k < samples; ++k) {
        a.next();
        b.next();
        double t = 0.0, o = 0.0;
        for (const auto& [x, y] : pairs) t += (a.connected(x, y) && b.connected(x, y)) ? 1.0 : 0.0;
        for (int v : singles) o += (a.connected_to_boundary(v) && b.connected_to_boundary(v)) ? 1.0 : 0.0;
        xs2.push_back(t / static_cast<double>(pairs.size()));
        xs1.push_back(o / static_cast<double>(singles.size()));
    }
    const auto e2 = batch_means(xs2), e1 = batch_means(xs1);
    return {{size, dom->mesh, e2.mean, e2.se, samples, run_seed}, {size, dom->mesh, e1.mean, e1.se, samples, run_seed}};
}

inline ScalingStudy scaling_study(const std::vector<int>& sizes, double beta, std::size_t samples, std::uint64_t seed,
                                  std::size_t warmup_sweeps = kDefaultWarmupSweeps) {
    if (sizes.size() < 2) throw InvalidParameter("scaling_study: at least two sizes are needed for a fit");
    for (std::size_t i = 1; i < sizes.size(); ++i)
        if (sizes[i] <= sizes[i - 1]) throw InvalidParameter("scaling_study: sizes must be ascending");
    std::vector<ScalingPoint> two, one;
    for (int L : sizes) {
        const auto m = measure_scaling_point(L, beta, samples, seed, warmup_sweeps);
        two.push_back(m.two_point);
        one.push_back(m.one_point);
    }
    return {fit_exponent(std::move(two)), fit_exponent(std::move(one))};
}

// Coefficients A_k with 2h(v) = eps * sum_k xi_k A_k(v), accumulated along a
// vertical path from the boundary up to v.
inline std::unordered_map<int, int> height_coefficients(const DiscreteDomain& dom, const ClusterSet& cs,
                                                         const std::vector<std::uint8_t>& face_par, int v) {
    std::unordered_map<int, int> coef;
    int cur = v;
    std::vector<int> path{cur};
    while (!dom.is_boundary(cur)) {
        cur = dom.primal.neighbor(cur, 3);
        if (cur < 0) throw OutOfDomain("height_coefficients: no boundary below the point");
        path.push_back(cur);
    }
    // path runs from v down to the boundary; walk it upward.
    for (std::size_t i = path.size() - 1; i > 0; --i) {
        const int from = path[i], to = path[i - 1];
        const int e = dom.primal.incident_edge(from, 1);
        const int face = dom.edge_faces[static_cast<std::size_t>(e)][0];
        if (face < 0) throw OutOfDomain("height_coefficients: path leaves the bounded faces");
        const int s = face_par[static_cast<std::size_t>(face)] ? -1 : 1;
        const int cf = cs.cluster_of[static_cast<std::size_t>(from)], ct = cs.cluster_of[static_cast<std::size_t>(to)];
        if (cf == ct) continue;
        coef[cf] += s;
        coef[ct] -= s;
    }
    return coef;
}

struct HeightCovariance {
    double estimate = 0.0;
    double se = 0.0;
    double green = 0.0;      // continuum Green's function at the two points
    double ratio = 0.0;      // estimate / green
    double target = 0.0;     // 1 / (2 pi^2)
    std::size_t samples = 0;
};

// Cov(h(x), h(y)) under the coupling, estimated through the exact conditional
// expectation given the primal trace: E[h(x) h(y) | trace] = sum_k A_k(x) A_k(y) / 4.
// Each additional pair of points is an image of the first under a symmetry of
// the domain, so all pairs share one Green's function value; the estimate is
// their average.
inline HeightCovariance height_covariance(const DiscreteDomain& dom, const std::vector<std::pair<Complex, Complex>>& pairs, double beta,
                                          std::size_t samples, std::uint64_t seed, std::size_t warmup_sweeps = kDefaultWarmupSweeps) {
    if (pairs.empty()) throw InvalidParameter("height_covariance: no points");
    std::vector<std::array<int, 2>> vs;
    for (const auto& [x, y] : pairs) vs.push_back({dom.nearest_interior_vertex(x), dom.nearest_interior_vertex(y)});
    DrcSampler drc(wired_support(dom), beta, seed, warmup_sweeps);
    const int reference = primal_faces(dom).reference_face;
    std::vector<double> xs;
    xs.reserve(samples);
    for (std::size_t k = 0; k < samples; ++k) {
        const auto t = drc.next();
        const auto cs = find_clusters(dom.primal, t.occupied, &dom.boundary, dom.mesh, false);
        const auto par = face_parity(dom, t.odd, reference);
        long long acc = 0;
        for (const auto& [vx, vy] : vs) {
            const auto ax = height_coefficients(dom, cs, par, vx);
            const auto ay = height_coefficients(dom, cs, par, vy);
            for (const auto& [c, a] : ax) {
                const auto it = ay.find(c);
                if (it != ay.end()) acc += static_cast<long long>(a) * it->second;
            }
        }
        xs.push_back(0.25 * static_cast<double>(acc) / static_cast<double>(vs.size()));
    }
    const auto est = batch_means(xs);
    HeightCovariance r;
    r.estimate = est.mean;
    r.se = est.se;
    r.samples = samples;
    const Complex px = dom.vertex_position(vs[0][0]), py = dom.vertex_position(vs[0][1]);
    if (dom.shape.kind == ShapeKind::unit_disk) r.green = GreensOracle{}.green(px, py);
    else r.green = green_rectangle(dom.shape.width, dom.shape.height, px, py);
    r.ratio = r.estimate / r.green;
    r.target = 1.0 / (2.0 * std::numbers::pi * std::numbers::pi);
    return r;
}

inline HeightCovariance height_covariance(const DiscreteDomain& dom, Complex x, Complex y, double beta, std::size_t samples,
                                          std::uint64_t seed, std::size_t warmup_sweeps = kDefaultWarmupSweeps) {
    return height_covariance(dom, {{x, y}}, beta, samples, seed, warmup_sweeps);
}

struct CensusPoint {
    double mesh = 0.0;
    double mean = 0.0;
    double se = 0.0;
    std::size_t samples = 0;
};

// Mean number of wired DRC clusters (boundary cluster included) with diameter
// larger than rho, per mesh.
inline std::vector<CensusPoint> census_study(const Shape& shape, const std::vector<double>& meshes, double rho, double beta,
                                             std::size_t samples, std::uint64_t seed, std::size_t warmup_sweeps = kDefaultWarmupSweeps) {
    std::vector<CensusPoint> out;
    for (double mesh : meshes) {
        const auto dom = build_domain(shape, mesh);
        DrcSampler drc(wired_support(*dom), beta, stream_seed(seed, static_cast<std::uint64_t>(std::lround(1.0 / mesh))), warmup_sweeps);
        std::vector<double> xs;
        xs.reserve(samples);
        for (std::size_t k = 0; k < samples; ++k) xs.push_back(static_cast<double>(trace_census(drc.next(), *dom, {rho})[0]));
        const auto e = batch_means(xs);
        out.push_back({mesh, e.mean, e.se, samples});
    }
    return out;
}

}  // namespace xdrc
