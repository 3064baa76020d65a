#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "xdrc/clusters.hpp"
#include "xdrc/currents.hpp"
#include "xdrc/errors.hpp"
#include "xdrc/ising.hpp"
#include "xdrc/ising_oracle.hpp"
#include "xdrc/lattice.hpp"
#include "xdrc/rng.hpp"
#include "xdrc/stats.hpp"

namespace xdrc {

// Heights are stored doubled: integers on primal vertices, odd or even
// integers on dual vertices.
struct Height {
    std::vector<int> primal;
    std::vector<int> dual;
};

// cos(pi h) and sin(pi h) for h = h2 / 2, exactly.
constexpr int cos_half_pi(int h2) {
    switch (((h2 % 4) + 4) % 4) {
        case 0: return 1;
        case 2: return -1;
        default: return 0;
    }
}
constexpr int sin_half_pi(int h2) {
    switch (((h2 % 4) + 4) % 4) {
        case 1: return 1;
        case 3: return -1;
        default: return 0;
    }
}

struct CouplingSample {
    CurrentTrace primal_trace;  // indexed by primal edges
    CurrentTrace dual_trace;    // indexed by dual edges
    SpinField tau;              // primal vertices
    SpinField tau_dual;         // dual vertices
    Height h;
    ClusterSet primal_clusters;
    ClusterSet dual_clusters;
    std::vector<std::int8_t> signs;       // per primal cluster
    std::vector<std::int8_t> dual_signs;  // per dual cluster
    std::vector<std::vector<int>> labels;       // per primal cluster, per inner boundary
    std::vector<std::vector<int>> dual_labels;  // per dual cluster, per inner boundary
    NestingTree primal_nesting;
    NestingTree dual_nesting;
    std::uint64_t key = 0;
};

// Counter-based sign for one component of one sample.
inline std::int8_t component_sign(std::uint64_t key, std::uint64_t component) {
    return (mix64(stream_seed(key, component)) >> 63) ? std::int8_t{1} : std::int8_t{-1};
}

// Parity of odd primal edges crossed from the reference face to every face,
// along paths in the weak dual.
inline std::vector<std::uint8_t> face_parity(const DiscreteDomain& dom, const std::vector<std::uint8_t>& odd, int reference) {
    const auto& du = dom.dual;
    std::vector<std::int8_t> p(du.size(), -1);
    std::vector<int> queue;
    queue.reserve(du.size());
    auto run = [&](int seed) {
        p[static_cast<std::size_t>(seed)] = 0;
        queue.push_back(seed);
        while (!queue.empty()) {
            const int f = queue.back();
            queue.pop_back();
            for (int d = 0; d < 4; ++d) {
                const int de = du.incident_edge(f, d);
                if (de < 0) continue;
                const int g = du.neighbor(f, d);
                const int want = p[static_cast<std::size_t>(f)] ^ odd[static_cast<std::size_t>(dom.primal_of_dual_edge[static_cast<std::size_t>(de)])];
                auto& pg = p[static_cast<std::size_t>(g)];
                if (pg < 0) {
                    pg = static_cast<std::int8_t>(want);
                    queue.push_back(g);
                } else if (pg != want) {
                    throw ParityInconsistency("odd edges are not sourceless around a face cycle");
                }
            }
        }
    };
    if (reference >= 0) run(reference);
    for (int f = 0; f < static_cast<int>(du.size()); ++f)
        if (p[static_cast<std::size_t>(f)] < 0) run(f);
    return {p.begin(), p.end()};
}

// Integrates 2h(u) - 2h(v) = tau(v) tau_dual(u) over corner incidences, with h = 0
// on boundary vertices.
inline Height height_from_spins(const SpinField& tau, const SpinField& tau_dual, const DiscreteDomain& dom) {
    if (tau.size() != dom.num_vertices() || tau_dual.size() != dom.dual.size())
        throw ShapeMismatch("height_from_spins: spin fields do not match the domain");
    constexpr int kUnset = std::numeric_limits<int>::min();
    Height h;
    h.primal.assign(tau.size(), kUnset);
    h.dual.assign(tau_dual.size(), kUnset);
    std::vector<int> queue;  // primal v as v, dual u as -(u + 1)
    for (int v = 0; v < static_cast<int>(tau.size()); ++v)
        if (dom.is_boundary(v)) {
            h.primal[static_cast<std::size_t>(v)] = 0;
            queue.push_back(v);
        }
    auto set = [&](int& slot, int value, int node) {
        if (slot == kUnset) {
            slot = value;
            queue.push_back(node);
        } else if (slot != value) {
            throw CouplingViolation("height increments do not close around a cycle");
        }
    };
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const int node = queue[head];
        const bool primal = node >= 0;
        const int idx = primal ? node : -node - 1;
        const auto& p = primal ? dom.primal.point(idx) : dom.dual.point(idx);
        for (int dx : {-1, 1})
            for (int dy : {-1, 1}) {
                if (primal) {
                    const int u = dom.dual.index(p.x + dx, p.y + dy);
                    if (u < 0) continue;
                    const int inc = tau[static_cast<std::size_t>(idx)] * tau_dual[static_cast<std::size_t>(u)];
                    set(h.dual[static_cast<std::size_t>(u)], h.primal[static_cast<std::size_t>(idx)] + inc, -u - 1);
                } else {
                    const int v = dom.primal.index(p.x + dx, p.y + dy);
                    if (v < 0) continue;
                    const int inc = tau[static_cast<std::size_t>(v)] * tau_dual[static_cast<std::size_t>(idx)];
                    set(h.primal[static_cast<std::size_t>(v)], h.dual[static_cast<std::size_t>(idx)] - inc, v);
                }
            }
    }
    for (int x : h.primal)
        if (x == kUnset) throw CouplingViolation("height undetermined at a primal vertex");
    for (int x : h.dual)
        if (x == kUnset) throw CouplingViolation("height undetermined at a dual vertex");
    return h;
}

// Joint sampler of the primal wired double random current, the dual free
// double random current, the two spin fields and the height function.
//
// The primal DRC is sampled with wired boundary conditions and its clusters
// receive independent symmetric signs, the boundary cluster being +1; tau is
// the sign of the cluster of each vertex. tau_dual is a uniform global sign
// times (-1) to the number of odd primal edges crossed from the reference face.
// The dual DRC consists of the interfaces of tau (odd) together with every
// other dual edge crossing a vacant primal edge, kept with probability
// exp(-2 beta).
class CouplingSampler {
public:
    CouplingSampler(const DiscreteDomain& dom, double beta, std::uint64_t seed,
                    std::size_t warmup_sweeps = kDefaultWarmupSweeps, std::size_t sweeps_between = 1,
                    bool with_structure = true)
        : dom_(&dom), beta_(beta), drc_(wired_support(dom), beta, seed, warmup_sweeps, sweeps_between),
          rng_(seed, 3), with_structure_(with_structure) {
        keep_dual_ = probability_threshold(std::exp(-2.0 * beta));
        primal_faces_ = primal_faces(dom);
        dual_faces_ = dual_faces(dom);
    }

    DrcSampler& drc() { return drc_; }

    CouplingSample next() {
        const auto& dom = *dom_;
        CouplingSample s;
        s.primal_trace = drc_.next();
        s.key = rng_();
        s.primal_clusters = find_clusters(dom.primal, s.primal_trace.occupied, &dom.boundary, dom.mesh, with_structure_);
        const auto& cs = s.primal_clusters;
        s.signs.resize(cs.size());
        for (std::size_t c = 0; c < cs.size(); ++c)
            s.signs[c] = static_cast<int>(c) == cs.boundary_cluster
                             ? std::int8_t{1}
                             : component_sign(s.key, static_cast<std::uint64_t>(cs.clusters[c].min_vertex));
        s.tau.resize(dom.num_vertices());
        for (std::size_t v = 0; v < s.tau.size(); ++v) s.tau[v] = s.signs[static_cast<std::size_t>(cs.cluster_of[v])];

        const auto parity = face_parity(dom, s.primal_trace.odd, primal_faces_.reference_face);
        const std::int8_t eps = component_sign(s.key, ~std::uint64_t{0});
        s.tau_dual.resize(dom.dual.size());
        for (std::size_t u = 0; u < s.tau_dual.size(); ++u) s.tau_dual[u] = parity[u] ? static_cast<std::int8_t>(-eps) : eps;

        auto& dt = s.dual_trace;
        dt.bc = Boundary::free;
        dt.beta = dual_beta(beta_);
        dt.occupied.assign(dom.dual.num_edges(), 0);
        dt.odd.assign(dom.dual.num_edges(), 0);
        for (std::size_t de = 0; de < dt.occupied.size(); ++de) {
            const int e = dom.primal_of_dual_edge[de];
            if (s.primal_trace.occupied[static_cast<std::size_t>(e)]) continue;
            const auto [a, b] = dom.primal.edge(e);
            if (s.tau[static_cast<std::size_t>(a)] != s.tau[static_cast<std::size_t>(b)]) {
                dt.occupied[de] = 1;
                dt.odd[de] = 1;
            } else if (rng_() < keep_dual_) {
                dt.occupied[de] = 1;
            }
        }

        s.h = height_from_spins(s.tau, s.tau_dual, dom);

        s.dual_clusters = find_clusters(dom.dual, dt.occupied, nullptr, dom.mesh, with_structure_);
        s.dual_signs.assign(s.dual_clusters.size(), 0);
        for (std::size_t u = 0; u < s.tau_dual.size(); ++u) {
            auto& sg = s.dual_signs[static_cast<std::size_t>(s.dual_clusters.cluster_of[u])];
            if (sg == 0) sg = s.tau_dual[u];
            else if (sg != s.tau_dual[u]) throw CouplingViolation("dual spin not constant on a dual cluster");
        }
        if (with_structure_) {
            s.labels = parity_labels(dom.primal, s.primal_trace.odd, cs, primal_faces_);
            s.dual_labels = parity_labels(dom.dual, dt.odd, s.dual_clusters, dual_faces_);
            s.primal_nesting = nesting_tree(dom.primal, cs);
            s.dual_nesting = nesting_tree(dom.dual, s.dual_clusters);
        }
        return s;
    }

private:
    const DiscreteDomain* dom_;
    double beta_;
    DrcSampler drc_;
    Rng rng_;
    bool with_structure_;
    std::uint64_t keep_dual_ = 0;
    FaceSystem primal_faces_, dual_faces_;
};

inline CouplingSample sample_master_coupling(const DiscreteDomain& dom, double beta, std::uint64_t seed) {
    CouplingSampler sampler(dom, beta, seed);
    return sampler.next();
}

struct CouplingInvariants {
    bool non_crossing = true;
    bool spin_identities = true;
    bool gradient_law = true;
    bool boundary_zero = true;
    bool interfaces = true;

    bool all() const { return non_crossing && spin_identities && gradient_law && boundary_zero && interfaces; }
};

inline CouplingInvariants check_invariants(const CouplingSample& s, const DiscreteDomain& dom) {
    CouplingInvariants r;
    for (std::size_t de = 0; de < dom.dual.num_edges(); ++de)
        if (s.dual_trace.occupied[de] && s.primal_trace.occupied[static_cast<std::size_t>(dom.primal_of_dual_edge[de])])
            r.non_crossing = false;
    for (std::size_t v = 0; v < dom.num_vertices(); ++v) {
        const int c = cos_half_pi(s.h.primal[v]), sn = sin_half_pi(s.h.primal[v]);
        if (c != s.tau[v] || c * c + sn * sn != 1) r.spin_identities = false;
    }
    for (std::size_t u = 0; u < dom.dual.size(); ++u) {
        const int c = cos_half_pi(s.h.dual[u]), sn = sin_half_pi(s.h.dual[u]);
        if (sn != s.tau_dual[u] || c * c + sn * sn != 1) r.spin_identities = false;
        const auto& p = dom.dual.point(static_cast<int>(u));
        for (int dx : {-1, 1})
            for (int dy : {-1, 1}) {
                const int v = dom.primal.index(p.x + dx, p.y + dy);
                if (v < 0) continue;
                if (s.h.dual[u] - s.h.primal[static_cast<std::size_t>(v)] != s.tau[static_cast<std::size_t>(v)] * s.tau_dual[u])
                    r.gradient_law = false;
            }
    }
    const int b = s.primal_clusters.boundary_cluster;
    if (b < 0 || s.signs[static_cast<std::size_t>(b)] != 1) r.boundary_zero = false;
    for (std::size_t v = 0; v < dom.num_vertices(); ++v)
        if (s.primal_clusters.cluster_of[v] == b && s.h.primal[v] != 0) r.boundary_zero = false;
    for (std::size_t e = 0; e < dom.primal.num_edges(); ++e) {
        const int de = dom.dual_of_primal_edge[e];
        const bool odd = s.primal_trace.odd[e] != 0;
        if (de < 0) {
            if (odd) r.interfaces = false;
            continue;
        }
        const auto [l, rgt] = dom.edge_faces[e];
        if (odd != (s.tau_dual[static_cast<std::size_t>(l)] != s.tau_dual[static_cast<std::size_t>(rgt)])) r.interfaces = false;
    }
    return r;
}

inline void require_invariants(const CouplingSample& s, const DiscreteDomain& dom) {
    const auto r = check_invariants(s, dom);
    if (!r.non_crossing) throw CouplingViolation("primal and dual traces cross");
    if (!r.spin_identities) throw CouplingViolation("spins differ from cos/sin of the height");
    if (!r.gradient_law) throw CouplingViolation("height increments violate the gradient law");
    if (!r.boundary_zero) throw CouplingViolation("height nonzero on the boundary cluster");
    if (!r.interfaces) throw CouplingViolation("odd primal edges differ from dual spin interfaces");
}

struct IdentityReport {
    double mc = 0.0;
    double exact = 0.0;
    double se = 0.0;
    std::size_t samples = 0;
    bool pass = false;
};

// E[prod cos(pi h(v)) prod sin(pi h(u))] against the squared correlation of
// spins and disorders of the plus-boundary Ising model.
inline IdentityReport verify_bosonisation(const DiscreteDomain& dom, const std::vector<int>& primal_points,
                                          const std::vector<int>& dual_points, std::size_t samples, std::uint64_t seed,
                                          double beta = critical_beta(), double sigmas = 4.0) {
    for (int v : primal_points)
        if (v < 0 || static_cast<std::size_t>(v) >= dom.num_vertices()) throw InvalidVertex("bosonisation: bad primal point");
    for (int u : dual_points)
        if (u < 0 || static_cast<std::size_t>(u) >= dom.dual.size()) throw InvalidVertex("bosonisation: bad dual point");
    IdentityReport r;
    const double corr = disorder_correlation(dom, primal_points, dual_points, beta);
    r.exact = corr * corr;
    CouplingSampler sampler(dom, beta, seed, kDefaultWarmupSweeps, 1, false);
    std::vector<double> xs;
    xs.reserve(samples);
    for (std::size_t k = 0; k < samples; ++k) {
        const auto s = sampler.next();
        int value = 1;
        for (int v : primal_points) value *= cos_half_pi(s.h.primal[static_cast<std::size_t>(v)]);
        for (int u : dual_points) value *= sin_half_pi(s.h.dual[static_cast<std::size_t>(u)]);
        xs.push_back(value);
    }
    const auto est = batch_means(xs);
    r.mc = est.mean;
    r.se = est.se;
    r.samples = samples;
    r.pass = std::fabs(r.mc - r.exact) <= sigmas * r.se || (r.se == 0.0 && r.mc == r.exact);
    return r;
}

}  // namespace xdrc
