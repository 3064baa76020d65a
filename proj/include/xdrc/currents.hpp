#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "xdrc/errors.hpp"
#include "xdrc/graph.hpp"
#include "xdrc/ising.hpp"
#include "xdrc/lattice.hpp"
#include "xdrc/rng.hpp"

namespace xdrc {

struct EdgeWeightTriple {
    double w_zero = 1.0;
    double w_odd = 0.0;
    double w_even_pos = 0.0;
};

// Per-edge sums of beta^n / n! over n = 0, odd n, and even n > 0.
inline EdgeWeightTriple edge_weights(double beta) {
    if (!(beta > 0.0)) throw InvalidParameter("edge_weights: beta must be positive");
    return {1.0, std::sinh(beta), std::cosh(beta) - 1.0};
}

struct CurrentTrace {
    std::vector<std::uint8_t> occupied;
    std::vector<std::uint8_t> odd;
    Boundary bc = Boundary::free;
    double beta = 0.0;

    std::size_t size() const { return occupied.size(); }
};

// Every vertex of the support graph (the ghost included) meets an even number
// of odd edges, odd edges are occupied, and forced edges are occupied and even.
inline bool is_sourceless(const CurrentTrace& t, const SupportGraph& s) {
    if (t.occupied.size() != s.host_edges || t.odd.size() != s.host_edges) return false;
    std::vector<std::uint8_t> parity(static_cast<std::size_t>(s.graph.num_vertices()), 0);
    for (int e = 0; e < s.graph.num_edges(); ++e) {
        const auto h = static_cast<std::size_t>(s.host_of_edge[static_cast<std::size_t>(e)]);
        if (t.odd[h] && !t.occupied[h]) return false;
        if (!t.odd[h]) continue;
        const auto [a, b] = s.graph.edge(e);
        parity[static_cast<std::size_t>(a)] ^= 1;
        parity[static_cast<std::size_t>(b)] ^= 1;
    }
    for (int e : s.forced_even)
        if (!t.occupied[static_cast<std::size_t>(e)] || t.odd[static_cast<std::size_t>(e)]) return false;
    for (auto p : parity)
        if (p) return false;
    return true;
}

// Trace sampler for a sourceless random current. An Ising configuration is
// drawn by a Wolff chain; Edwards-Sokal bonds give an FK configuration; a
// uniformly random even subgraph of it has law proportional to tanh(beta)^|O|
// and is the odd part; the remaining FK edges, kept with probability
// tanh(beta/2), are the even occupied edges.
class CurrentSampler {
public:
    CurrentSampler(SupportGraph support, double beta, std::uint64_t seed, std::uint64_t stream,
                   std::size_t warmup_sweeps = kDefaultWarmupSweeps, std::size_t sweeps_between = 1)
        : chain_(std::move(support), beta, Rng(seed, stream)), sweeps_between_(sweeps_between) {
        const auto& g = chain_.graph();
        const auto n = static_cast<std::size_t>(g.num_vertices());
        const auto m = static_cast<std::size_t>(g.num_edges());
        fk_.resize(m);
        in_odd_.resize(m);
        parent_edge_.resize(n);
        order_.reserve(n);
        visited_.resize(n);
        parity_.resize(n);
        fk_bond_ = probability_threshold(-std::expm1(-2.0 * beta));
        keep_even_ = probability_threshold(std::tanh(0.5 * beta));
        chain_.warm_up(warmup_sweeps);
    }

    const SupportGraph& support() const { return chain_.support(); }
    WolffChain& chain() { return chain_; }
    double beta() const { return chain_.beta(); }

    CurrentTrace next() {
        chain_.sweep(sweeps_between_);
        return current_from_spins();
    }

    // FK configuration drawn from the current spins (graph edge indexed).
    const std::vector<std::uint8_t>& draw_fk() {
        const auto& g = chain_.graph();
        const auto& s = chain_.raw_spins();
        auto& rng = chain_.rng();
        for (int e = 0; e < g.num_edges(); ++e) {
            const auto [a, b] = g.edge(e);
            fk_[static_cast<std::size_t>(e)] =
                static_cast<std::uint8_t>(s[static_cast<std::size_t>(a)] == s[static_cast<std::size_t>(b)] && rng() < fk_bond_);
        }
        return fk_;
    }

    CurrentTrace current_from_spins() {
        const auto& g = chain_.graph();
        const auto& sup = chain_.support();
        auto& rng = chain_.rng();
        draw_fk();

        // Spanning forest of the FK graph; non-tree edges enter the odd part with
        // probability 1/2, tree edges are then fixed from the leaves up.
        std::fill(visited_.begin(), visited_.end(), 0);
        std::fill(parity_.begin(), parity_.end(), 0);
        std::fill(in_odd_.begin(), in_odd_.end(), 0);
        order_.clear();
        std::vector<std::uint8_t>& tree = tree_;
        tree.assign(fk_.size(), 0);
        for (int root = 0; root < g.num_vertices(); ++root) {
            if (visited_[static_cast<std::size_t>(root)]) continue;
            visited_[static_cast<std::size_t>(root)] = 1;
            parent_edge_[static_cast<std::size_t>(root)] = -1;
            std::size_t head = order_.size();
            order_.push_back(root);
            while (head < order_.size()) {
                const int v = order_[head++];
                for (int i = g.begin(v); i < g.end(v); ++i) {
                    const int e = g.adj_edge(i);
                    if (!fk_[static_cast<std::size_t>(e)]) continue;
                    const int w = g.adj_vertex(i);
                    if (visited_[static_cast<std::size_t>(w)]) continue;
                    visited_[static_cast<std::size_t>(w)] = 1;
                    parent_edge_[static_cast<std::size_t>(w)] = e;
                    tree[static_cast<std::size_t>(e)] = 1;
                    order_.push_back(w);
                }
            }
        }
        for (int e = 0; e < g.num_edges(); ++e) {
            const auto es = static_cast<std::size_t>(e);
            if (!fk_[es] || tree[es] || !rng.coin()) continue;
            in_odd_[es] = 1;
            const auto [a, b] = g.edge(e);
            parity_[static_cast<std::size_t>(a)] ^= 1;
            parity_[static_cast<std::size_t>(b)] ^= 1;
        }
        for (auto it = order_.rbegin(); it != order_.rend(); ++it) {
            const int v = *it;
            const int pe = parent_edge_[static_cast<std::size_t>(v)];
            if (pe < 0 || !parity_[static_cast<std::size_t>(v)]) continue;
            in_odd_[static_cast<std::size_t>(pe)] = 1;
            const auto [a, b] = g.edge(pe);
            parity_[static_cast<std::size_t>(a)] ^= 1;
            parity_[static_cast<std::size_t>(b)] ^= 1;
        }

        CurrentTrace t;
        t.bc = sup.ghost >= 0 ? Boundary::wired : Boundary::free;
        t.beta = chain_.beta();
        t.occupied.assign(sup.host_edges, 0);
        t.odd.assign(sup.host_edges, 0);
        for (int e = 0; e < g.num_edges(); ++e) {
            const auto es = static_cast<std::size_t>(e);
            const auto h = static_cast<std::size_t>(sup.host_of_edge[es]);
            if (in_odd_[es]) {
                t.odd[h] = 1;
                t.occupied[h] = 1;
            } else if (fk_[es] && rng() < keep_even_) {
                t.occupied[h] = 1;
            }
        }
        for (int e : sup.forced_even) t.occupied[static_cast<std::size_t>(e)] = 1;
        return t;
    }

private:
    WolffChain chain_;
    std::size_t sweeps_between_;
    std::uint64_t fk_bond_ = 0;
    std::uint64_t keep_even_ = 0;
    std::vector<std::uint8_t> fk_, in_odd_, tree_, visited_, parity_;
    std::vector<int> parent_edge_, order_;
};

// Union of occupied sets, symmetric difference of odd sets.
inline CurrentTrace superpose(const CurrentTrace& a, const CurrentTrace& b) {
    if (a.size() != b.size()) throw ShapeMismatch("superpose: traces on different edge sets");
    CurrentTrace t;
    t.bc = a.bc;
    t.beta = a.beta;
    t.occupied.resize(a.size());
    t.odd.resize(a.size());
    for (std::size_t e = 0; e < a.size(); ++e) {
        t.occupied[e] = a.occupied[e] | b.occupied[e];
        t.odd[e] = a.odd[e] ^ b.odd[e];
    }
    return t;
}

// Double random current: two independent sourceless currents.
class DrcSampler {
public:
    DrcSampler(const SupportGraph& support, double beta, std::uint64_t seed,
               std::size_t warmup_sweeps = kDefaultWarmupSweeps, std::size_t sweeps_between = 1)
        : first_(support, beta, seed, 1, warmup_sweeps, sweeps_between),
          second_(support, beta, seed, 2, warmup_sweeps, sweeps_between) {}

    CurrentTrace next() {
        last_first_ = first_.next();
        last_second_ = second_.next();
        return superpose(last_first_, last_second_);
    }
    const CurrentTrace& last_first() const { return last_first_; }
    const CurrentTrace& last_second() const { return last_second_; }
    CurrentSampler& first() { return first_; }
    CurrentSampler& second() { return second_; }
    const SupportGraph& support() const { return first_.support(); }

private:
    CurrentSampler first_, second_;
    CurrentTrace last_first_, last_second_;
};

inline CurrentTrace sample_current_trace(const DiscreteDomain& dom, Boundary bc, double beta, std::uint64_t seed) {
    CurrentSampler s(make_support(dom, bc), beta, seed, 1);
    return s.next();
}

inline CurrentTrace sample_drc_trace(const DiscreteDomain& dom, Boundary bc, double beta, std::uint64_t seed) {
    DrcSampler s(make_support(dom, bc), beta, seed);
    return s.next();
}

// Exact law of (odd set, occupied set), keyed by odd | occupied << 32 over host edges.
using TraceDistribution = std::unordered_map<std::uint64_t, double>;

inline constexpr int kMaxOracleEdges = 16;
inline constexpr double kMaxConvolutionPairs = 5e7;

inline std::uint64_t trace_key(const CurrentTrace& t) {
    if (t.size() > 32) throw OracleCapacityExceeded("trace_key: more than 32 edges");
    std::uint64_t odd = 0, occ = 0;
    for (std::size_t e = 0; e < t.size(); ++e) {
        odd |= std::uint64_t{t.odd[e]} << e;
        occ |= std::uint64_t{t.occupied[e]} << e;
    }
    return odd | (occ << 32);
}

inline TraceDistribution enumerate_trace_distribution(const SupportGraph& s, double beta, bool double_current) {
    const int m = s.graph.num_edges();
    if (m > kMaxOracleEdges || s.host_edges > 32)
        throw OracleCapacityExceeded("trace oracle: more than 16 edges");
    const auto w = edge_weights(beta);
    std::vector<std::uint32_t> incidence(static_cast<std::size_t>(s.graph.num_vertices()), 0);
    for (int e = 0; e < m; ++e) {
        const auto [a, b] = s.graph.edge(e);
        incidence[static_cast<std::size_t>(a)] ^= (1u << e);
        incidence[static_cast<std::size_t>(b)] ^= (1u << e);
    }
    auto host_mask = [&](std::uint32_t mask) {
        std::uint64_t h = 0;
        for (int e = 0; e < m; ++e)
            if (mask & (1u << e)) h |= std::uint64_t{1} << s.host_of_edge[static_cast<std::size_t>(e)];
        return h;
    };
    std::uint64_t forced = 0;
    for (int e : s.forced_even) forced |= std::uint64_t{1} << e;

    TraceDistribution single;
    double total = 0.0;
    const std::uint32_t all = (m == 32) ? ~0u : ((1u << m) - 1u);
    for (std::uint32_t odd = 0; odd <= all; ++odd) {
        bool sourceless = true;
        for (auto inc : incidence)
            if (std::popcount(odd & inc) & 1) {
                sourceless = false;
                break;
            }
        if (sourceless) {
            const std::uint32_t rest = all & ~odd;
            const double base = std::pow(w.w_odd, std::popcount(odd));
            for (std::uint32_t fill = rest;; fill = (fill - 1) & rest) {
                const double p = base * std::pow(w.w_even_pos, std::popcount(fill));
                const std::uint64_t key = host_mask(odd) | ((host_mask(odd | fill) | forced) << 32);
                single[key] += p;
                total += p;
                if (fill == 0) break;
            }
        }
        if (odd == all) break;
    }
    for (auto& [k, p] : single) p /= total;
    if (!double_current) return single;

    if (static_cast<double>(single.size()) * static_cast<double>(single.size()) > kMaxConvolutionPairs)
        throw OracleCapacityExceeded("trace oracle: double-current convolution too large");
    TraceDistribution dbl;
    for (const auto& [k1, p1] : single)
        for (const auto& [k2, p2] : single) {
            const std::uint64_t odd = (k1 ^ k2) & 0xffffffffULL;
            const std::uint64_t occ = ((k1 | k2) >> 32);
            dbl[odd | (occ << 32)] += p1 * p2;
        }
    return dbl;
}

inline TraceDistribution enumerate_trace_distribution(const DiscreteDomain& dom, Boundary bc, double beta, bool double_current) {
    return enumerate_trace_distribution(make_support(dom, bc), beta, double_current);
}

inline TraceDistribution enumerate_trace_distribution(const Graph& g, double beta, bool double_current) {
    return enumerate_trace_distribution(free_support(g), beta, double_current);
}

inline double total_variation(const TraceDistribution& exact, const std::unordered_map<std::uint64_t, std::size_t>& counts,
                              std::size_t samples) {
    double tv = 0.0;
    for (const auto& [k, p] : exact) {
        const auto it = counts.find(k);
        const double q = it == counts.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(samples);
        tv += std::fabs(p - q);
    }
    for (const auto& [k, c] : counts)
        if (!exact.count(k)) tv += static_cast<double>(c) / static_cast<double>(samples);
    return 0.5 * tv;
}

}  // namespace xdrc
