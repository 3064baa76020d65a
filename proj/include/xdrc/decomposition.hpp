#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <vector>

#include "xdrc/clusters.hpp"
#include "xdrc/coupling.hpp"
#include "xdrc/currents.hpp"
#include "xdrc/errors.hpp"
#include "xdrc/ising_oracle.hpp"
#include "xdrc/lattice.hpp"
#include "xdrc/rng.hpp"
#include "xdrc/stats.hpp"

namespace xdrc {

struct ExcursionComponent {
    std::vector<int> vertices;
    double diameter = 0.0;
    int min_vertex = -1;
    std::int8_t sign = 1;
    bool is_boundary_cluster = false;
};

// Clusters ordered by decreasing diameter (ties: lexicographically smallest
// vertex), each carrying its sign. The measure of component k is the indicator
// of its vertices with density mesh^{7/4} per interior vertex.
struct ExcursionDecomposition {
    const DiscreteDomain* domain = nullptr;
    std::vector<ExcursionComponent> components;

    std::size_t size() const { return components.size(); }
};

inline ExcursionDecomposition decompose(const ClusterSet& cs, const std::vector<std::int8_t>& signs, const DiscreteDomain& dom) {
    if (signs.size() != cs.size()) throw SignCountMismatch("decompose: one sign per cluster is required");
    ExcursionDecomposition dec;
    dec.domain = &dom;
    dec.components.reserve(cs.size());
    for (std::size_t c = 0; c < cs.size(); ++c) {
        const auto& cl = cs.clusters[c];
        if (signs[c] != 1 && signs[c] != -1) throw InvalidParameter("decompose: signs must be +1 or -1");
        if (cl.is_boundary_cluster && signs[c] != 1) throw InvalidParameter("decompose: the boundary cluster carries sign +1");
        dec.components.push_back({cl.vertices, cl.diameter, cl.min_vertex, signs[c], cl.is_boundary_cluster});
    }
    std::stable_sort(dec.components.begin(), dec.components.end(), [&](const ExcursionComponent& a, const ExcursionComponent& b) {
        if (a.diameter != b.diameter) return a.diameter > b.diameter;
        return detail::lex_less(dom.primal.point(a.min_vertex), dom.primal.point(b.min_vertex));
    });
    return dec;
}

inline ExcursionDecomposition decompose(const CouplingSample& s, const DiscreteDomain& dom) {
    return decompose(s.primal_clusters, s.signs, dom);
}

inline ExcursionDecomposition decompose(const CurrentTrace& trace, const std::vector<std::int8_t>& signs, const DiscreteDomain& dom) {
    const auto cs = find_clusters(dom.primal, trace.occupied, trace.bc == Boundary::wired ? &dom.boundary : nullptr, dom.mesh);
    return decompose(cs, signs, dom);
}

inline SpinField reconstruct(const ExcursionDecomposition& dec) {
    if (!dec.domain) return {};
    SpinField field(dec.domain->num_vertices(), 0);
    for (const auto& comp : dec.components)
        for (int v : comp.vertices) {
            auto& f = field[static_cast<std::size_t>(v)];
            if (f != 0) throw OverlappingSupports("reconstruct: a vertex belongs to two components");
            f = comp.sign;
        }
    return field;
}

// Read-only view of the geometry of a decomposition handed to orderings. The
// signs are not part of the view.
class ClusterGeometryView {
public:
    explicit ClusterGeometryView(const ExcursionDecomposition& dec) : dec_(&dec) {}
    std::size_t size() const { return dec_->size(); }
    double diameter(std::size_t k) const { return dec_->components[k].diameter; }
    const std::vector<int>& vertices(std::size_t k) const { return dec_->components[k].vertices; }
    int min_vertex(std::size_t k) const { return dec_->components[k].min_vertex; }
    bool is_boundary_cluster(std::size_t k) const { return dec_->components[k].is_boundary_cluster; }
    const DiscreteDomain& domain() const { return *dec_->domain; }
    [[noreturn]] int sign(std::size_t) const {
        throw ContractViolation("orderings may depend on cluster geometry only, not on signs");
    }

private:
    const ExcursionDecomposition* dec_;
};

using Ordering = std::function<std::vector<std::size_t>(const ClusterGeometryView&)>;

// The stored order: decreasing diameter.
inline Ordering diameter_ordering() {
    return [](const ClusterGeometryView& g) {
        std::vector<std::size_t> p(g.size());
        std::iota(p.begin(), p.end(), 0);
        return p;
    };
}

// Decreasing number of vertices, ties by the stored order.
inline Ordering size_ordering() {
    return [](const ClusterGeometryView& g) {
        std::vector<std::size_t> p(g.size());
        std::iota(p.begin(), p.end(), 0);
        std::stable_sort(p.begin(), p.end(), [&](std::size_t a, std::size_t b) { return g.vertices(a).size() > g.vertices(b).size(); });
        return p;
    };
}

// Uniformly random order drawn independently of everything else.
inline Ordering shuffled_ordering(std::uint64_t seed) {
    return [seed](const ClusterGeometryView& g) {
        std::vector<std::size_t> p(g.size());
        std::iota(p.begin(), p.end(), 0);
        Rng rng(seed, 0x0dde);
        std::shuffle(p.begin(), p.end(), rng);
        return p;
    };
}

// (mu_k, f) for one component: mesh^{-1/4} sum over its interior vertices of f(v) mesh^2.
inline double component_pairing(const ExcursionDecomposition& dec, std::size_t k, const TestFunction& f) {
    const auto& dom = *dec.domain;
    ExactSum acc;
    for (int v : dec.components[k].vertices)
        if (!dom.is_boundary(v)) acc.add(f(dom.vertex_position(v)) * dom.face_area());
    return std::pow(dom.mesh, -0.25) * acc.value();
}

// S_N = sum_{k <= N} xi_{pi(k)} (mu_{pi(k)}, f) for N = 1..min(N_max, #components),
// each partial sum exactly rounded.
inline std::vector<double> partial_sums(const ExcursionDecomposition& dec, const TestFunction& f, const Ordering& ordering,
                                        std::size_t n_max) {
    const ClusterGeometryView view(dec);
    const auto perm = ordering(view);
    std::vector<std::uint8_t> seen(dec.size(), 0);
    if (perm.size() != dec.size()) throw InvalidParameter("partial_sums: ordering is not a permutation");
    for (auto k : perm) {
        if (k >= dec.size() || seen[k]) throw InvalidParameter("partial_sums: ordering is not a permutation");
        seen[k] = 1;
    }
    const auto& dom = *dec.domain;
    const double norm = std::pow(dom.mesh, -0.25);
    std::vector<double> out;
    const std::size_t n = std::min(n_max, dec.size());
    out.reserve(n);
    ExactSum acc;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& comp = dec.components[perm[i]];
        for (int v : comp.vertices)
            if (!dom.is_boundary(v)) acc.add(static_cast<double>(comp.sign) * (f(dom.vertex_position(v)) * dom.face_area()));
        out.push_back(norm * acc.value());
    }
    return out;
}

// Number of components with diameter strictly larger than each rho.
inline std::vector<std::size_t> diameter_census(const ExcursionDecomposition& dec, const std::vector<double>& rhos) {
    std::vector<std::size_t> out;
    out.reserve(rhos.size());
    for (double rho : rhos) {
        std::size_t n = 0;
        for (const auto& c : dec.components) n += c.diameter > rho;
        out.push_back(n);
    }
    return out;
}

// Diameter of the closed union of the squares around the given vertices.
inline double closed_set_diameter(const PlanarLattice& lat, const std::vector<int>& vertices, double mesh) {
    std::vector<LatticePoint> corners;
    corners.reserve(4 * vertices.size());
    for (int v : vertices) {
        const auto& p = lat.point(v);
        for (int dx : {-1, 1})
            for (int dy : {-1, 1}) corners.push_back({p.x + dx, p.y + dy});
    }
    return 0.5 * mesh * detail::point_set_diameter(std::move(corners));
}

// Census straight from a trace: clusters whose bounding box is too small are
// discarded before any hull is computed.
inline std::vector<std::size_t> trace_census(const CurrentTrace& trace, const DiscreteDomain& dom, const std::vector<double>& rhos) {
    const auto cs = find_clusters(dom.primal, trace.occupied, trace.bc == Boundary::wired ? &dom.boundary : nullptr, dom.mesh, false);
    const double rho_min = rhos.empty() ? 0.0 : *std::min_element(rhos.begin(), rhos.end());
    std::vector<std::size_t> out(rhos.size(), 0);
    for (const auto& c : cs.clusters) {
        const double bw = 0.5 * dom.mesh * (c.bbox[2] - c.bbox[0]);
        const double bh = 0.5 * dom.mesh * (c.bbox[3] - c.bbox[1]);
        if (std::hypot(bw, bh) <= rho_min) continue;
        const double diam = closed_set_diameter(dom.primal, c.vertices, dom.mesh);
        for (std::size_t i = 0; i < rhos.size(); ++i) out[i] += diam > rhos[i];
    }
    return out;
}

// The event that every cluster of the wired trace meets A (together with the
// boundary when |A| is odd) an even number of times.
inline bool even_intersection(const ClusterSet& cs, const std::vector<int>& a) {
    std::vector<std::uint8_t> parity(cs.size(), 0);
    for (int v : a) parity[static_cast<std::size_t>(cs.cluster_of[static_cast<std::size_t>(v)])] ^= 1;
    if (a.size() % 2 == 1) {
        if (cs.boundary_cluster < 0) return false;
        parity[static_cast<std::size_t>(cs.boundary_cluster)] ^= 1;
    }
    return std::all_of(parity.begin(), parity.end(), [](std::uint8_t p) { return p == 0; });
}

inline IdentityReport verify_switching(const DiscreteDomain& dom, const std::vector<int>& a, double beta, std::size_t samples,
                                       std::uint64_t seed, double sigmas = 4.0) {
    for (int v : a)
        if (v < 0 || static_cast<std::size_t>(v) >= dom.num_vertices()) throw InvalidVertex("verify_switching: vertex outside the domain");
    IdentityReport r;
    const double corr = exact_correlation(dom, a, Boundary::plus, beta);
    r.exact = corr * corr;
    DrcSampler drc(wired_support(dom), beta, seed);
    std::vector<double> xs;
    xs.reserve(samples);
    for (std::size_t k = 0; k < samples; ++k) {
        const auto t = drc.next();
        const auto cs = find_clusters(dom.primal, t.occupied, &dom.boundary, dom.mesh, false);
        xs.push_back(even_intersection(cs, a) ? 1.0 : 0.0);
    }
    const auto est = batch_means(xs);
    r.mc = est.mean;
    r.se = est.se;
    r.samples = samples;
    r.pass = std::fabs(r.mc - r.exact) <= sigmas * r.se || (r.se == 0.0 && r.mc == r.exact);
    return r;
}

}  // namespace xdrc
