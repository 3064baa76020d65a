#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <vector>

#include "xdrc/errors.hpp"
#include "xdrc/graph.hpp"
#include "xdrc/ising.hpp"
#include "xdrc/lattice.hpp"

namespace xdrc {

// Ising weight exp(sum_e J_e s_a s_b + sum_v h_v s_v) on a finite graph.
struct IsingProblem {
    int n = 0;
    std::vector<std::array<int, 2>> edges;
    std::vector<double> coupling;
    std::vector<double> field;
    std::vector<LatticePoint> coords;  // optional lattice layout, enables the transfer matrix
};

inline constexpr int kMaxEnumerationSpins = 24;
inline constexpr int kMaxTransferWidth = 12;

struct OracleResult {
    double log_partition = 0.0;
    double correlation = 0.0;
};

namespace detail {

inline OracleResult enumerate_correlation(const IsingProblem& p, const std::vector<int>& a) {
    const int n = p.n;
    std::vector<std::vector<std::pair<int, double>>> nbr(static_cast<std::size_t>(n));
    for (std::size_t e = 0; e < p.edges.size(); ++e) {
        const auto [u, v] = p.edges[e];
        nbr[static_cast<std::size_t>(u)].push_back({v, p.coupling[e]});
        nbr[static_cast<std::size_t>(v)].push_back({u, p.coupling[e]});
    }
    std::vector<std::uint8_t> in_a(static_cast<std::size_t>(n), 0);
    for (int v : a) in_a[static_cast<std::size_t>(v)] ^= 1;

    // Gray-code walk starting from all spins +1.
    std::vector<int> s(static_cast<std::size_t>(n), 1);
    double energy = 0.0;
    for (std::size_t e = 0; e < p.edges.size(); ++e) energy += p.coupling[e];
    for (int v = 0; v < n; ++v) energy += p.field[static_cast<std::size_t>(v)];
    const double shift = energy;
    int sign = 1;
    long double z = 1.0L, za = 1.0L;
    const std::uint64_t total = std::uint64_t{1} << n;
    for (std::uint64_t k = 1; k < total; ++k) {
        const int v = std::countr_zero(k);
        const auto vs = static_cast<std::size_t>(v);
        double local = p.field[vs];
        for (const auto& [w, j] : nbr[vs]) local += j * s[static_cast<std::size_t>(w)];
        energy -= 2.0 * s[vs] * local;
        s[vs] = -s[vs];
        if (in_a[vs]) sign = -sign;
        const long double wgt = std::exp(static_cast<long double>(energy - shift));
        z += wgt;
        za += sign * wgt;
    }
    return {static_cast<double>(shift + std::log(z)), static_cast<double>(za / z)};
}

// Row-by-row transfer matrix on a full w x h rectangle of spins.
inline OracleResult transfer_correlation(const IsingProblem& p, const std::vector<int>& a) {
    int x0 = std::numeric_limits<int>::max(), y0 = x0, x1 = std::numeric_limits<int>::min(), y1 = x1;
    for (const auto& c : p.coords) {
        x0 = std::min(x0, c.x);
        y0 = std::min(y0, c.y);
        x1 = std::max(x1, c.x);
        y1 = std::max(y1, c.y);
    }
    int w = (x1 - x0) / 2 + 1, h = (y1 - y0) / 2 + 1;
    const bool transpose = w > h;
    if (transpose) std::swap(w, h);
    auto col = [&](int v) {
        const auto& c = p.coords[static_cast<std::size_t>(v)];
        return transpose ? (c.y - y0) / 2 : (c.x - x0) / 2;
    };
    auto row = [&](int v) {
        const auto& c = p.coords[static_cast<std::size_t>(v)];
        return transpose ? (c.x - x0) / 2 : (c.y - y0) / 2;
    };
    const auto W = static_cast<std::size_t>(w), H = static_cast<std::size_t>(h);
    std::vector<double> field(W * H, 0.0), jh(W * H, 0.0), jv(W * H, 0.0);
    std::vector<std::uint32_t> amask(H, 0);
    for (int v = 0; v < p.n; ++v)
        field[static_cast<std::size_t>(row(v)) * W + static_cast<std::size_t>(col(v))] = p.field[static_cast<std::size_t>(v)];
    for (int v : a) amask[static_cast<std::size_t>(row(v))] ^= (1u << col(v));
    for (std::size_t e = 0; e < p.edges.size(); ++e) {
        int u = p.edges[e][0], v = p.edges[e][1];
        if (row(u) > row(v) || col(u) > col(v)) std::swap(u, v);
        const auto idx = static_cast<std::size_t>(row(u)) * W + static_cast<std::size_t>(col(u));
        if (row(u) == row(v) && col(v) == col(u) + 1)
            jh[idx] += p.coupling[e];
        else if (col(u) == col(v) && row(v) == row(u) + 1)
            jv[idx] += p.coupling[e];
        else
            throw OracleCapacityExceeded("transfer matrix: edge is not between lattice neighbours");
    }

    const std::size_t states = std::size_t{1} << w;
    auto spin = [](std::size_t s, int i) { return ((s >> i) & 1u) ? -1.0 : 1.0; };
    auto run = [&](bool with_a, long double& log_scale) {
        std::vector<double> vec(states, 1.0), tmp(states);
        log_scale = 0.0L;
        for (std::size_t r = 0; r < H; ++r) {
            if (r > 0) {
                for (int i = 0; i < w; ++i) {
                    const double j = jv[(r - 1) * W + static_cast<std::size_t>(i)];
                    const double same = std::exp(j), diff = std::exp(-j);
                    const std::size_t bit = std::size_t{1} << i;
                    for (std::size_t s = 0; s < states; ++s) {
                        if (s & bit) continue;
                        const double a0 = vec[s], a1 = vec[s | bit];
                        tmp[s] = same * a0 + diff * a1;
                        tmp[s | bit] = diff * a0 + same * a1;
                    }
                    vec.swap(tmp);
                }
            }
            double mx = 0.0;
            for (std::size_t s = 0; s < states; ++s) {
                double e = 0.0;
                for (int i = 0; i < w; ++i) {
                    e += field[r * W + static_cast<std::size_t>(i)] * spin(s, i);
                    if (i + 1 < w) e += jh[r * W + static_cast<std::size_t>(i)] * spin(s, i) * spin(s, i + 1);
                }
                double f = std::exp(e);
                if (with_a && (std::popcount(static_cast<std::uint32_t>(s) & amask[r]) & 1)) f = -f;
                vec[s] *= f;
                mx = std::max(mx, std::fabs(vec[s]));
            }
            if (mx > 0.0) {
                for (auto& x : vec) x /= mx;
                log_scale += std::log(static_cast<long double>(mx));
            }
        }
        long double sum = 0.0L;
        for (double x : vec) sum += x;
        return sum;
    };
    long double lz, lza;
    const long double z = run(false, lz);
    const long double za = run(true, lza);
    return {static_cast<double>(lz + std::log(z)), static_cast<double>(za / z * std::exp(lza - lz))};
}

inline bool is_full_rectangle(const IsingProblem& p) {
    if (p.coords.size() != static_cast<std::size_t>(p.n) || p.n == 0) return false;
    int x0 = std::numeric_limits<int>::max(), y0 = x0, x1 = std::numeric_limits<int>::min(), y1 = x1;
    for (const auto& c : p.coords) {
        x0 = std::min(x0, c.x);
        y0 = std::min(y0, c.y);
        x1 = std::max(x1, c.x);
        y1 = std::max(y1, c.y);
    }
    const long w = (x1 - x0) / 2 + 1, h = (y1 - y0) / 2 + 1;
    return w * h == p.n;
}

}  // namespace detail

// Exact log partition function and E[prod_{v in a} s_v]. Enumeration up to 24
// spins, otherwise a transfer matrix when the spins fill a rectangle of width at most 12.
inline OracleResult exact_oracle(const IsingProblem& p, const std::vector<int>& a) {
    if (p.n <= kMaxEnumerationSpins) return detail::enumerate_correlation(p, a);
    if (detail::is_full_rectangle(p)) {
        int x0 = std::numeric_limits<int>::max(), x1 = std::numeric_limits<int>::min();
        int y0 = x0, y1 = x1;
        for (const auto& c : p.coords) {
            x0 = std::min(x0, c.x);
            x1 = std::max(x1, c.x);
            y0 = std::min(y0, c.y);
            y1 = std::max(y1, c.y);
        }
        const int width = std::min((x1 - x0) / 2 + 1, (y1 - y0) / 2 + 1);
        if (width <= kMaxTransferWidth) return detail::transfer_correlation(p, a);
    }
    throw OracleCapacityExceeded("exact oracle: graph exceeds enumeration and transfer-matrix capacity");
}

inline double exact_correlation(const IsingProblem& p, const std::vector<int>& a) {
    return exact_oracle(p, a).correlation;
}

// Maps host vertices of a domain to oracle spins; boundary vertices under
// plus conditions are frozen to +1 and folded into fields.
struct DomainIsingProblem {
    IsingProblem problem;
    std::vector<int> spin_of_host;   // -1 for frozen boundary vertices
    std::vector<int> edge_index;     // host edge -> problem edge, -1 if folded into a field or constant
};

inline DomainIsingProblem domain_problem(const DiscreteDomain& dom, Boundary bc, double beta) {
    DomainIsingProblem d;
    auto& p = d.problem;
    d.spin_of_host.assign(dom.num_vertices(), -1);
    for (int v = 0; v < static_cast<int>(dom.num_vertices()); ++v) {
        if (bc == Boundary::plus && dom.is_boundary(v)) continue;
        d.spin_of_host[static_cast<std::size_t>(v)] = p.n++;
        p.coords.push_back(dom.primal.point(v));
    }
    p.field.assign(static_cast<std::size_t>(p.n), 0.0);
    d.edge_index.assign(dom.primal.num_edges(), -1);
    for (int e = 0; e < static_cast<int>(dom.primal.num_edges()); ++e) {
        const auto [a, b] = dom.primal.edge(e);
        const int sa = d.spin_of_host[static_cast<std::size_t>(a)];
        const int sb = d.spin_of_host[static_cast<std::size_t>(b)];
        if (sa >= 0 && sb >= 0) {
            d.edge_index[static_cast<std::size_t>(e)] = static_cast<int>(p.edges.size());
            p.edges.push_back({sa, sb});
            p.coupling.push_back(beta);
        } else if (sa >= 0) {
            p.field[static_cast<std::size_t>(sa)] += beta;
        } else if (sb >= 0) {
            p.field[static_cast<std::size_t>(sb)] += beta;
        }
    }
    return d;
}

inline std::vector<int> spins_of(const DomainIsingProblem& d, const std::vector<int>& host_vertices) {
    std::vector<int> a;
    for (int v : host_vertices) {
        if (v < 0 || static_cast<std::size_t>(v) >= d.spin_of_host.size()) throw InvalidVertex("vertex outside the domain");
        const int s = d.spin_of_host[static_cast<std::size_t>(v)];
        if (s >= 0) a.push_back(s);
    }
    return a;
}

// Exact E[prod_{v in A} sigma_v] for the Ising model on a domain.
inline double exact_correlation(const DiscreteDomain& dom, const std::vector<int>& a, Boundary bc, double beta) {
    const auto d = domain_problem(dom, bc, beta);
    return exact_correlation(d.problem, spins_of(d, a));
}

inline IsingProblem graph_problem(const Graph& g, double beta) {
    IsingProblem p;
    p.n = g.num_vertices();
    p.edges = g.edges();
    p.coupling.assign(p.edges.size(), beta);
    p.field.assign(static_cast<std::size_t>(p.n), 0.0);
    return p;
}

inline double exact_correlation(const Graph& g, const std::vector<int>& a, double beta) {
    return exact_correlation(graph_problem(g, beta), a);
}

// Free boundary spin correlation on the weak dual graph at the given inverse temperature.
inline double exact_dual_correlation(const DiscreteDomain& dom, const std::vector<int>& faces, double beta) {
    IsingProblem p = graph_problem(lattice_graph(dom.dual), beta);
    p.coords = dom.dual.points();
    return exact_correlation(p, faces);
}

// Dual edges (as primal edges crossed) of a path between two faces in the weak dual.
inline std::vector<int> disorder_path(const DiscreteDomain& dom, int from, int to) {
    const auto& du = dom.dual;
    std::vector<int> prev_edge(du.size(), -2);
    std::deque<int> q{from};
    prev_edge[static_cast<std::size_t>(from)] = -1;
    while (!q.empty()) {
        const int f = q.front();
        q.pop_front();
        if (f == to) break;
        for (int d = 0; d < 4; ++d) {
            const int de = du.incident_edge(f, d);
            if (de < 0) continue;
            const int g = du.neighbor(f, d);
            if (prev_edge[static_cast<std::size_t>(g)] != -2) continue;
            prev_edge[static_cast<std::size_t>(g)] = de;
            q.push_back(g);
        }
    }
    if (prev_edge[static_cast<std::size_t>(to)] == -2) throw InvalidVertex("disorder_path: faces are not connected");
    std::vector<int> crossed;
    for (int f = to; f != from;) {
        const int de = prev_edge[static_cast<std::size_t>(f)];
        crossed.push_back(dom.primal_of_dual_edge[static_cast<std::size_t>(de)]);
        const auto [a, b] = du.edge(de);
        f = (a == f) ? b : a;
    }
    return crossed;
}

// E^+[prod_{v in A} sigma_v prod_{u in U} mu_u] at inverse temperature beta, where the
// disorder insertion is exp(-2 beta sum_{gamma} sigma sigma') for a dual edge set gamma whose
// odd-degree vertices are U. An odd number of disorders gives zero.
inline double disorder_correlation(const DiscreteDomain& dom, const std::vector<int>& a,
                                   const std::vector<int>& faces, double beta) {
    if (faces.size() % 2 == 1) return 0.0;
    auto d = domain_problem(dom, Boundary::plus, beta);
    const auto a_spins = spins_of(d, a);
    const double log_z = exact_oracle(d.problem, {}).log_partition;
    std::vector<std::uint8_t> in_gamma(dom.primal.num_edges(), 0);
    for (std::size_t k = 0; k + 1 < faces.size(); k += 2)
        for (int e : disorder_path(dom, faces[k], faces[k + 1])) in_gamma[static_cast<std::size_t>(e)] ^= 1;
    auto& p = d.problem;
    for (int e = 0; e < static_cast<int>(dom.primal.num_edges()); ++e) {
        if (!in_gamma[static_cast<std::size_t>(e)]) continue;
        const int pe = d.edge_index[static_cast<std::size_t>(e)];
        if (pe >= 0) {
            p.coupling[static_cast<std::size_t>(pe)] = -p.coupling[static_cast<std::size_t>(pe)];
            continue;
        }
        const auto [u, v] = dom.primal.edge(e);
        const int s = std::max(d.spin_of_host[static_cast<std::size_t>(u)], d.spin_of_host[static_cast<std::size_t>(v)]);
        if (s < 0) throw ContractViolation("disorder line crosses an edge between two boundary vertices");
        p.field[static_cast<std::size_t>(s)] -= 2.0 * beta;
    }
    const auto twisted = exact_oracle(p, a_spins);
    return std::exp(twisted.log_partition - log_z) * twisted.correlation;
}

}  // namespace xdrc
