#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <deque>
#include <string>
#include <unordered_map>
#include <vector>

#include "xdrc/errors.hpp"
#include "xdrc/graph.hpp"
#include "xdrc/lattice.hpp"

namespace xdrc {

// One unit side of the closed square around a lattice point, facing direction dir.
struct Side {
    int vertex = 0;
    int dir = 0;
};

struct Loop {
    std::vector<Side> sides;
    long long twice_area = 0;  // signed shoelace area in doubled coordinates, positive when counterclockwise
};

struct Cluster {
    std::vector<int> vertices;
    Loop outer;
    std::vector<Loop> inner;
    double diameter = 0.0;
    bool is_boundary_cluster = false;
    int min_vertex = -1;  // lexicographically smallest (x, y)
    std::array<int, 4> bbox{0, 0, 0, 0};  // x0, y0, x1, y1 of the closed set, doubled coordinates
};

struct ClusterSet {
    std::vector<int> cluster_of;
    std::vector<Cluster> clusters;
    int boundary_cluster = -1;

    std::size_t size() const { return clusters.size(); }
};

inline LatticePoint side_start(const PlanarLattice& lat, const Side& s) {
    const auto& p = lat.point(s.vertex);
    const int r = left_of(s.dir);
    return {p.x + kDirX[static_cast<std::size_t>(s.dir)] - kDirX[static_cast<std::size_t>(r)],
            p.y + kDirY[static_cast<std::size_t>(s.dir)] - kDirY[static_cast<std::size_t>(r)]};
}

namespace detail {

inline bool lex_less(const LatticePoint& a, const LatticePoint& b) {
    return a.x != b.x ? a.x < b.x : a.y < b.y;
}

inline long long cross(long long ox, long long oy, long long ax, long long ay, long long bx, long long by) {
    return (ax - ox) * (by - oy) - (ay - oy) * (bx - ox);
}

// Euclidean diameter of a set of lattice points (doubled coordinates), via the convex hull.
inline double point_set_diameter(std::vector<LatticePoint> pts) {
    std::sort(pts.begin(), pts.end(), lex_less);
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 2) return 0.0;
    std::vector<LatticePoint> hull(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts) {
        while (k >= 2 && cross(hull[k - 2].x, hull[k - 2].y, hull[k - 1].x, hull[k - 1].y, p.x, p.y) <= 0) --k;
        hull[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, lo = k + 1; i-- > 0;) {
        const auto& p = pts[i];
        while (k >= lo && cross(hull[k - 2].x, hull[k - 2].y, hull[k - 1].x, hull[k - 1].y, p.x, p.y) <= 0) --k;
        hull[k++] = p;
    }
    hull.resize(k - 1);
    long long best = 0;
    for (std::size_t i = 0; i < hull.size(); ++i)
        for (std::size_t j = i + 1; j < hull.size(); ++j) {
            const long long dx = hull[i].x - hull[j].x, dy = hull[i].y - hull[j].y;
            best = std::max(best, dx * dx + dy * dy);
        }
    return std::sqrt(static_cast<double>(best));
}

}  // namespace detail

// Connected components of the occupied graph. With boundary flags given, all
// flagged vertices are identified (wired boundary). Cluster ids follow the
// smallest vertex index of each cluster. With trace_loops, boundary loops,
// diameters (in units of the mesh) and bounding boxes are filled in.
inline ClusterSet find_clusters(const PlanarLattice& lat, const std::vector<std::uint8_t>& occupied,
                                const std::vector<std::uint8_t>* wired, double mesh, bool trace_loops = true) {
    const int n = static_cast<int>(lat.size());
    if (occupied.size() != lat.num_edges()) throw ShapeMismatch("find_clusters: trace does not match the lattice");
    DisjointSets ds(static_cast<std::size_t>(n));
    for (int e = 0; e < static_cast<int>(occupied.size()); ++e)
        if (occupied[static_cast<std::size_t>(e)]) ds.unite(lat.edge(e)[0], lat.edge(e)[1]);
    int first_boundary = -1;
    if (wired)
        for (int v = 0; v < n; ++v)
            if ((*wired)[static_cast<std::size_t>(v)]) {
                if (first_boundary < 0) first_boundary = v;
                else ds.unite(first_boundary, v);
            }

    ClusterSet out;
    out.cluster_of.assign(static_cast<std::size_t>(n), -1);
    std::vector<int> id_of_root(static_cast<std::size_t>(n), -1);
    for (int v = 0; v < n; ++v) {
        const int r = ds.find(v);
        auto& id = id_of_root[static_cast<std::size_t>(r)];
        if (id < 0) {
            id = static_cast<int>(out.clusters.size());
            out.clusters.emplace_back();
        }
        out.cluster_of[static_cast<std::size_t>(v)] = id;
        out.clusters[static_cast<std::size_t>(id)].vertices.push_back(v);
    }
    if (first_boundary >= 0) {
        out.boundary_cluster = out.cluster_of[static_cast<std::size_t>(first_boundary)];
        out.clusters[static_cast<std::size_t>(out.boundary_cluster)].is_boundary_cluster = true;
    }
    for (auto& c : out.clusters) {
        int best = c.vertices.front();
        auto& bb = c.bbox;
        bb = {lat.point(best).x - 1, lat.point(best).y - 1, lat.point(best).x + 1, lat.point(best).y + 1};
        for (int v : c.vertices) {
            const auto& p = lat.point(v);
            if (detail::lex_less(p, lat.point(best))) best = v;
            bb[0] = std::min(bb[0], p.x - 1);
            bb[1] = std::min(bb[1], p.y - 1);
            bb[2] = std::max(bb[2], p.x + 1);
            bb[3] = std::max(bb[3], p.y + 1);
        }
        c.min_vertex = best;
    }
    if (!trace_loops) return out;

    auto in_cluster = [&](int x, int y, int c) {
        const int w = lat.index(x, y);
        return w >= 0 && out.cluster_of[static_cast<std::size_t>(w)] == c;
    };
    std::vector<std::uint8_t> visited(4 * static_cast<std::size_t>(n), 0);
    for (int c = 0; c < static_cast<int>(out.clusters.size()); ++c) {
        auto& cl = out.clusters[static_cast<std::size_t>(c)];
        int outer_count = 0;
        for (int v : cl.vertices) {
            for (int d = 0; d < 4; ++d) {
                const auto& p = lat.point(v);
                if (in_cluster(p.x + 2 * kDirX[static_cast<std::size_t>(d)], p.y + 2 * kDirY[static_cast<std::size_t>(d)], c))
                    continue;
                if (visited[4 * static_cast<std::size_t>(v) + static_cast<std::size_t>(d)]) continue;
                Loop loop;
                Side s{v, d};
                do {
                    visited[4 * static_cast<std::size_t>(s.vertex) + static_cast<std::size_t>(s.dir)] = 1;
                    loop.sides.push_back(s);
                    const auto& a = lat.point(s.vertex);
                    const int r = left_of(s.dir);
                    const int rx = kDirX[static_cast<std::size_t>(r)], ry = kDirY[static_cast<std::size_t>(r)];
                    const int dx = kDirX[static_cast<std::size_t>(s.dir)], dy = kDirY[static_cast<std::size_t>(s.dir)];
                    const int a2 = lat.index(a.x + 2 * rx + 2 * dx, a.y + 2 * ry + 2 * dy);
                    const int a1 = lat.index(a.x + 2 * rx, a.y + 2 * ry);
                    if (a2 >= 0 && out.cluster_of[static_cast<std::size_t>(a2)] == c) {
                        s = {a2, opposite(r)};
                    } else if (a1 >= 0 && out.cluster_of[static_cast<std::size_t>(a1)] == c) {
                        s = {a1, s.dir};
                    } else {
                        s = {s.vertex, r};
                    }
                } while (!(s.vertex == v && s.dir == d));
                long long area = 0;
                for (std::size_t i = 0; i < loop.sides.size(); ++i) {
                    const auto p0 = side_start(lat, loop.sides[i]);
                    const auto p1 = side_start(lat, loop.sides[(i + 1) % loop.sides.size()]);
                    area += static_cast<long long>(p0.x) * p1.y - static_cast<long long>(p1.x) * p0.y;
                }
                loop.twice_area = area;
                if (area > 0) {
                    ++outer_count;
                    cl.outer = std::move(loop);
                } else {
                    cl.inner.push_back(std::move(loop));
                }
            }
        }
        if (outer_count != 1) throw ContractViolation("find_clusters: cluster without a unique outer boundary");
        std::vector<LatticePoint> corners;
        corners.reserve(cl.outer.sides.size());
        for (const auto& s : cl.outer.sides) corners.push_back(side_start(lat, s));
        cl.diameter = 0.5 * mesh * detail::point_set_diameter(std::move(corners));
    }
    return out;
}

// Parent/child structure of clusters and the regions enclosed by their inner
// boundaries. Region 0 is the exterior of every cluster.
struct NestingTree {
    struct Region {
        int cluster = -1;  // enclosing cluster, -1 for the exterior
        int loop = -1;     // index of its inner boundary
    };
    std::vector<Region> regions;
    std::vector<int> region_of_cluster;
    std::vector<std::vector<int>> inner_regions;  // cluster -> region id per inner boundary

    int parent_cluster(int c) const { return regions[static_cast<std::size_t>(region_of_cluster[static_cast<std::size_t>(c)])].cluster; }
    int depth(int c) const {
        int d = 0;
        for (int p = parent_cluster(c); p >= 0; p = parent_cluster(p)) ++d;
        return d;
    }
};

inline NestingTree nesting_tree(const PlanarLattice& lat, const ClusterSet& cs) {
    NestingTree t;
    const auto nc = cs.clusters.size();
    t.regions.push_back({});
    t.region_of_cluster.assign(nc, -1);
    t.inner_regions.resize(nc);
    std::deque<int> queue;
    auto across = [&](const Side& s) {
        const auto& p = lat.point(s.vertex);
        return lat.index(p.x + 2 * kDirX[static_cast<std::size_t>(s.dir)], p.y + 2 * kDirY[static_cast<std::size_t>(s.dir)]);
    };
    for (std::size_t c = 0; c < nc; ++c)
        for (const auto& s : cs.clusters[c].outer.sides)
            if (across(s) < 0) {
                t.region_of_cluster[c] = 0;
                queue.push_back(static_cast<int>(c));
                break;
            }
    while (!queue.empty()) {
        const int c = queue.front();
        queue.pop_front();
        const auto& cl = cs.clusters[static_cast<std::size_t>(c)];
        auto visit = [&](const Loop& loop, int region) {
            for (const auto& s : loop.sides) {
                const int w = across(s);
                if (w < 0) continue;
                const int c2 = cs.cluster_of[static_cast<std::size_t>(w)];
                if (t.region_of_cluster[static_cast<std::size_t>(c2)] >= 0) continue;
                t.region_of_cluster[static_cast<std::size_t>(c2)] = region;
                queue.push_back(c2);
            }
        };
        visit(cl.outer, t.region_of_cluster[static_cast<std::size_t>(c)]);
        for (std::size_t k = 0; k < cl.inner.size(); ++k) {
            const int region = static_cast<int>(t.regions.size());
            t.regions.push_back({c, static_cast<int>(k)});
            t.inner_regions[static_cast<std::size_t>(c)].push_back(region);
            visit(cl.inner[k], region);
        }
    }
    for (auto r : t.region_of_cluster)
        if (r < 0) throw ContractViolation("nesting_tree: cluster not reachable from the exterior");
    return t;
}

// The faces of a planar lattice: a lattice of complementary parity, with the
// positions that belong to the unbounded face marked. reference_face, when set,
// anchors parities of the wired boundary cluster.
struct FaceSystem {
    const PlanarLattice* faces = nullptr;
    std::vector<std::uint8_t> bounded;
    int reference_face = -1;

    int face_at(int x, int y) const {
        const int f = faces->index(x, y);
        return (f >= 0 && bounded[static_cast<std::size_t>(f)]) ? f : -1;
    }
};

// Faces of the primal lattice of a domain: the bounded faces, anchored at the
// first face having a boundary corner.
inline FaceSystem primal_faces(const DiscreteDomain& dom) {
    FaceSystem fs;
    fs.faces = &dom.dual;
    fs.bounded.assign(dom.dual.size(), 1);
    for (int f = 0; f < static_cast<int>(dom.dual.size()) && fs.reference_face < 0; ++f) {
        const auto& p = dom.dual.point(f);
        for (int dx : {-1, 1})
            for (int dy : {-1, 1}) {
                const int v = dom.primal.index(p.x + dx, p.y + dy);
                if (v >= 0 && dom.is_boundary(v)) fs.reference_face = f;
            }
    }
    return fs;
}

// Faces of the weak dual lattice: interior primal vertices are bounded faces,
// boundary vertices belong to the unbounded face.
inline FaceSystem dual_faces(const DiscreteDomain& dom) {
    FaceSystem fs;
    fs.faces = &dom.primal;
    fs.bounded.resize(dom.num_vertices());
    for (std::size_t v = 0; v < dom.num_vertices(); ++v) fs.bounded[v] = static_cast<std::uint8_t>(!dom.boundary[v]);
    return fs;
}

// Labels of the inner boundaries of one cluster: +1 when a path from a face
// enclosed by the boundary to the unbounded face crosses an odd number of odd
// edges of the cluster, -1 otherwise. For the wired boundary cluster, parities
// are taken relative to the reference face. Every face met on a boundary loop
// is checked to carry the same parity.
inline std::vector<int> cluster_parity_labels(const PlanarLattice& lat, const std::vector<std::uint8_t>& odd,
                                              const ClusterSet& cs, int c, const FaceSystem& fs) {
    const auto& cl = cs.clusters[static_cast<std::size_t>(c)];
    const bool anchored = cl.is_boundary_cluster;
    constexpr int kUnbounded = -1;
    auto key = [](int x, int y) { return (static_cast<long long>(x) << 32) ^ static_cast<long long>(static_cast<unsigned>(y)); };
    std::unordered_map<long long, int> value;  // face position -> parity
    value.reserve(4 * cl.vertices.size() + 8);
    int unbounded_value = anchored ? -1 : 0;
    auto touches = [&](int x, int y) {
        for (int dx : {-1, 1})
            for (int dy : {-1, 1}) {
                const int w = lat.index(x + dx, y + dy);
                if (w >= 0 && cs.cluster_of[static_cast<std::size_t>(w)] == c) return true;
            }
        return false;
    };
    std::vector<std::array<int, 2>> queue;
    auto assign = [&](int x, int y, int parity) {
        const bool unbounded = fs.face_at(x, y) == kUnbounded;
        if (unbounded) {
            if (anchored) return;
            if (unbounded_value != parity) throw ParityInconsistency("parity labels depend on the dual path");
        }
        const auto [it, inserted] = value.emplace(key(x, y), parity);
        if (!inserted) {
            if (it->second != parity) throw ParityInconsistency("parity labels depend on the dual path");
            return;
        }
        queue.push_back({x, y});
    };

    if (anchored) {
        if (fs.reference_face < 0) throw ParityInconsistency("no reference face for the boundary cluster");
        const auto& p = fs.faces->point(fs.reference_face);
        assign(p.x, p.y, 0);
    } else {
        for (const auto& s : cl.outer.sides) {
            const auto p = side_start(lat, s);
            assign(p.x, p.y, 0);
        }
    }
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const auto [x, y] = queue[head];
        const int parity = value.at(key(x, y));
        for (int d = 0; d < 4; ++d) {
            const int dx = kDirX[static_cast<std::size_t>(d)], dy = kDirY[static_cast<std::size_t>(d)];
            const int gx = x + 2 * dx, gy = y + 2 * dy;
            if (!touches(gx, gy)) continue;
            const int r = left_of(d);
            const int v = lat.index(x + dx - kDirX[static_cast<std::size_t>(r)], y + dy - kDirY[static_cast<std::size_t>(r)]);
            int flip = 0;
            if (v >= 0 && cs.cluster_of[static_cast<std::size_t>(v)] == c) {
                const int e = lat.incident_edge(v, r);
                if (e >= 0 && odd[static_cast<std::size_t>(e)]) flip = 1;
            }
            assign(gx, gy, parity ^ flip);
        }
    }
    auto loop_parity = [&](const Loop& loop) {
        int result = -1;
        for (const auto& s : loop.sides) {
            const auto p = side_start(lat, s);
            const auto it = value.find(key(p.x, p.y));
            if (it == value.end()) throw ParityInconsistency("boundary loop face not reached");
            if (result >= 0 && it->second != result) throw ParityInconsistency("parity differs along a boundary loop");
            result = it->second;
        }
        return result;
    };
    if (!anchored && loop_parity(cl.outer) != 0) throw ParityInconsistency("outer boundary carries odd parity");
    std::vector<int> labels;
    labels.reserve(cl.inner.size());
    for (const auto& loop : cl.inner) labels.push_back(loop_parity(loop) ? 1 : -1);
    return labels;
}

inline std::vector<std::vector<int>> parity_labels(const PlanarLattice& lat, const std::vector<std::uint8_t>& odd,
                                                   const ClusterSet& cs, const FaceSystem& fs) {
    std::vector<std::vector<int>> out(cs.size());
    for (int c = 0; c < static_cast<int>(cs.size()); ++c) out[static_cast<std::size_t>(c)] = cluster_parity_labels(lat, odd, cs, c, fs);
    return out;
}

}  // namespace xdrc
