#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "xdrc/errors.hpp"
#include "xdrc/graph.hpp"
#include "xdrc/lattice.hpp"
#include "xdrc/rng.hpp"

namespace xdrc {

inline double critical_beta() { return 0.5 * std::log1p(std::sqrt(2.0)); }

// tanh(dual) = exp(-2 beta).
inline double dual_beta(double beta) {
    if (!(beta > 0.0)) throw InvalidParameter("dual_beta: beta must be positive");
    return std::atanh(std::exp(-2.0 * beta));
}

// Threshold t with P(rng() < t) = p for a 64-bit uniform draw.
inline std::uint64_t probability_threshold(double p) {
    if (p <= 0.0) return 0;
    if (p >= 1.0) return ~std::uint64_t{0};
    return static_cast<std::uint64_t>(std::ldexp(p, 64));
}

struct SpinConfig {
    SpinField spins;
    Boundary bc = Boundary::free;
    double beta = 0.0;
};

// Wolff single-cluster dynamics. The ghost vertex of a wired support is
// updated like any other spin; reported configurations are gauged so that
// the ghost, and hence the whole boundary, reads +1.
class WolffChain {
public:
    WolffChain(SupportGraph support, double beta, Rng rng)
        : support_(std::move(support)), beta_(beta), rng_(std::move(rng)) {
        if (!(beta > 0.0)) throw InvalidParameter("WolffChain: beta must be positive");
        const auto n = static_cast<std::size_t>(support_.graph.num_vertices());
        spins_.assign(n, 1);
        stack_.reserve(n);
        bond_ = probability_threshold(-std::expm1(-2.0 * beta));
    }

    const SupportGraph& support() const { return support_; }
    const Graph& graph() const { return support_.graph; }
    double beta() const { return beta_; }
    Rng& rng() { return rng_; }

    std::size_t step() {
        const auto& g = support_.graph;
        const int seed = static_cast<int>(rng_.below(static_cast<std::size_t>(g.num_vertices())));
        const std::int8_t s = spins_[static_cast<std::size_t>(seed)];
        spins_[static_cast<std::size_t>(seed)] = static_cast<std::int8_t>(-s);
        stack_.clear();
        stack_.push_back(seed);
        std::size_t size = 1;
        while (!stack_.empty()) {
            const int v = stack_.back();
            stack_.pop_back();
            for (int i = g.begin(v); i < g.end(v); ++i) {
                const int w = g.adj_vertex(i);
                auto& sw = spins_[static_cast<std::size_t>(w)];
                if (sw == s && rng_() < bond_) {
                    sw = static_cast<std::int8_t>(-s);
                    stack_.push_back(w);
                    ++size;
                }
            }
        }
        return size;
    }

    // Warm-up with sweeps of adaptive length (cluster flips until as many spins
    // as vertices have been flipped); the mean cluster size seen here fixes the
    // number of cluster flips per sweep used afterwards.
    void warm_up(std::size_t sweeps) {
        const auto n = static_cast<std::size_t>(support_.graph.num_vertices());
        std::size_t steps = 0, flipped = 0;
        for (std::size_t k = 0; k < sweeps; ++k) {
            std::size_t here = 0;
            while (here < n) {
                here += step();
                ++steps;
            }
            flipped += here;
        }
        if (steps > 0) {
            const double mean_size = static_cast<double>(flipped) / static_cast<double>(steps);
            steps_per_sweep_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(static_cast<double>(n) / mean_size)));
        }
    }

    void sweep(std::size_t count = 1) {
        if (steps_per_sweep_ == 0) warm_up(1);
        for (std::size_t k = 0; k < count * steps_per_sweep_; ++k) step();
    }
    std::size_t steps_per_sweep() const { return steps_per_sweep_; }

    const std::vector<std::int8_t>& raw_spins() const { return spins_; }
    int gauge() const { return support_.ghost >= 0 ? spins_[static_cast<std::size_t>(support_.ghost)] : 1; }

    SpinField host_spins() const {
        SpinField out(support_.host_vertices);
        const int gsign = gauge();
        for (std::size_t v = 0; v < out.size(); ++v)
            out[v] = static_cast<std::int8_t>(spins_[static_cast<std::size_t>(support_.vertex_of_host[v])] * gsign);
        return out;
    }

private:
    SupportGraph support_;
    double beta_;
    Rng rng_;
    std::vector<std::int8_t> spins_;
    std::vector<int> stack_;
    std::uint64_t bond_ = 0;
    std::size_t steps_per_sweep_ = 0;
};

inline constexpr std::size_t kDefaultWarmupSweeps = 1000;

inline SpinConfig sample_ising(const DiscreteDomain& dom, Boundary bc, double beta, std::uint64_t seed,
                               std::size_t warmup_sweeps = kDefaultWarmupSweeps) {
    WolffChain chain(make_support(dom, bc), beta, Rng(seed, 0x15146));
    chain.warm_up(warmup_sweeps);
    return {chain.host_spins(), bc, beta};
}

inline SpinField xor_field(const SpinConfig& a, const SpinConfig& b) {
    if (a.spins.size() != b.spins.size() || a.bc != b.bc)
        throw ShapeMismatch("xor_field: configurations live on different domains or boundary conditions");
    SpinField t(a.spins.size());
    for (std::size_t v = 0; v < t.size(); ++v) t[v] = static_cast<std::int8_t>(a.spins[v] * b.spins[v]);
    return t;
}

}  // namespace xdrc
