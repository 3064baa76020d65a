#pragma once

#include <array>
#include <cstdint>
#include <numeric>
#include <vector>

#include "xdrc/errors.hpp"
#include "xdrc/lattice.hpp"

namespace xdrc {

// Undirected multigraph with compressed adjacency.
class Graph {
public:
    Graph() = default;
    Graph(int n, std::vector<std::array<int, 2>> edges) : n_(n), edges_(std::move(edges)) {
        std::vector<int> deg(static_cast<std::size_t>(n_) + 1, 0);
        for (const auto& [a, b] : edges_) {
            if (a < 0 || b < 0 || a >= n_ || b >= n_ || a == b) throw InvalidVertex("Graph: bad edge endpoint");
            ++deg[static_cast<std::size_t>(a) + 1];
            ++deg[static_cast<std::size_t>(b) + 1];
        }
        offset_.assign(deg.begin(), deg.end());
        std::partial_sum(offset_.begin(), offset_.end(), offset_.begin());
        adj_vertex_.resize(2 * edges_.size());
        adj_edge_.resize(2 * edges_.size());
        std::vector<int> fill(offset_.begin(), offset_.end() - 1);
        for (int e = 0; e < static_cast<int>(edges_.size()); ++e) {
            const auto [a, b] = edges_[static_cast<std::size_t>(e)];
            auto& fa = fill[static_cast<std::size_t>(a)];
            adj_vertex_[static_cast<std::size_t>(fa)] = b;
            adj_edge_[static_cast<std::size_t>(fa++)] = e;
            auto& fb = fill[static_cast<std::size_t>(b)];
            adj_vertex_[static_cast<std::size_t>(fb)] = a;
            adj_edge_[static_cast<std::size_t>(fb++)] = e;
        }
    }

    int num_vertices() const { return n_; }
    int num_edges() const { return static_cast<int>(edges_.size()); }
    const std::array<int, 2>& edge(int e) const { return edges_[static_cast<std::size_t>(e)]; }
    const std::vector<std::array<int, 2>>& edges() const { return edges_; }
    int degree(int v) const {
        return offset_[static_cast<std::size_t>(v) + 1] - offset_[static_cast<std::size_t>(v)];
    }
    int begin(int v) const { return offset_[static_cast<std::size_t>(v)]; }
    int end(int v) const { return offset_[static_cast<std::size_t>(v) + 1]; }
    int adj_vertex(int i) const { return adj_vertex_[static_cast<std::size_t>(i)]; }
    int adj_edge(int i) const { return adj_edge_[static_cast<std::size_t>(i)]; }

    static Graph triangle() { return Graph(3, {{0, 1}, {1, 2}, {0, 2}}); }
    static Graph cycle(int n) {
        std::vector<std::array<int, 2>> es;
        for (int i = 0; i < n; ++i) es.push_back({i, (i + 1) % n});
        return Graph(n, std::move(es));
    }
    // w x h grid of vertices, vertex (i, j) has index j * w + i.
    static Graph grid(int w, int h) {
        std::vector<std::array<int, 2>> es;
        for (int j = 0; j < h; ++j)
            for (int i = 0; i < w; ++i) {
                if (i + 1 < w) es.push_back({j * w + i, j * w + i + 1});
                if (j + 1 < h) es.push_back({j * w + i, (j + 1) * w + i});
            }
        return Graph(w * h, std::move(es));
    }

private:
    int n_ = 0;
    std::vector<std::array<int, 2>> edges_;
    std::vector<int> offset_{0};
    std::vector<int> adj_vertex_;
    std::vector<int> adj_edge_;
};

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n = 0) { reset(n); }
    void reset(std::size_t n) {
        parent_.resize(n);
        std::iota(parent_.begin(), parent_.end(), 0);
        size_.assign(n, 1);
    }
    int find(int x) {
        auto* p = parent_.data();
        while (p[x] != x) {
            p[x] = p[p[x]];
            x = p[x];
        }
        return x;
    }
    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        if (size_[static_cast<std::size_t>(a)] < size_[static_cast<std::size_t>(b)]) std::swap(a, b);
        parent_[static_cast<std::size_t>(b)] = a;
        size_[static_cast<std::size_t>(a)] += size_[static_cast<std::size_t>(b)];
        return true;
    }

private:
    std::vector<int> parent_;
    std::vector<int> size_;
};

enum class Boundary { free, wired, plus = wired };

// The graph a spin system or current lives on, with the bookkeeping needed to
// report results on a host edge/vertex set (a domain, its dual, or a bare graph).
struct SupportGraph {
    Graph graph;
    int ghost = -1;                       // graph vertex standing for the identified boundary
    std::size_t host_vertices = 0;
    std::size_t host_edges = 0;
    std::vector<int> vertex_of_host;      // host vertex -> graph vertex
    std::vector<int> host_of_edge;        // graph edge -> host edge
    std::vector<int> forced_even;         // host edges that carry an even nonzero current by convention
};

inline SupportGraph free_support(const Graph& g) {
    SupportGraph s;
    s.graph = g;
    s.host_vertices = static_cast<std::size_t>(g.num_vertices());
    s.host_edges = static_cast<std::size_t>(g.num_edges());
    s.vertex_of_host.resize(s.host_vertices);
    std::iota(s.vertex_of_host.begin(), s.vertex_of_host.end(), 0);
    s.host_of_edge.resize(s.host_edges);
    std::iota(s.host_of_edge.begin(), s.host_of_edge.end(), 0);
    return s;
}

inline Graph lattice_graph(const PlanarLattice& lat) {
    return Graph(static_cast<int>(lat.size()), lat.edges());
}

// All vertices and edges of the domain, no identification.
inline SupportGraph free_support(const DiscreteDomain& dom) { return free_support(lattice_graph(dom.primal)); }

// Interior vertices plus one ghost for the boundary; edges between two
// boundary vertices are dropped from the graph and recorded as forced even.
inline SupportGraph wired_support(const DiscreteDomain& dom) {
    SupportGraph s;
    s.host_vertices = dom.num_vertices();
    s.host_edges = dom.primal.num_edges();
    s.vertex_of_host.assign(s.host_vertices, -1);
    int n = 0;
    for (std::size_t v = 0; v < s.host_vertices; ++v)
        if (!dom.boundary[v]) s.vertex_of_host[v] = n++;
    s.ghost = n++;
    for (std::size_t v = 0; v < s.host_vertices; ++v)
        if (dom.boundary[v]) s.vertex_of_host[v] = s.ghost;
    std::vector<std::array<int, 2>> es;
    for (int e = 0; e < static_cast<int>(s.host_edges); ++e) {
        const auto [a, b] = dom.primal.edge(e);
        const int ga = s.vertex_of_host[static_cast<std::size_t>(a)];
        const int gb = s.vertex_of_host[static_cast<std::size_t>(b)];
        if (ga == s.ghost && gb == s.ghost) {
            s.forced_even.push_back(e);
            continue;
        }
        es.push_back({ga, gb});
        s.host_of_edge.push_back(e);
    }
    s.graph = Graph(n, std::move(es));
    return s;
}

// The weak dual graph with free boundary conditions.
inline SupportGraph dual_support(const DiscreteDomain& dom) { return free_support(lattice_graph(dom.dual)); }

inline SupportGraph make_support(const DiscreteDomain& dom, Boundary bc) {
    return bc == Boundary::wired ? wired_support(dom) : free_support(dom);
}

}  // namespace xdrc
