#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "xdrc/errors.hpp"
#include "xdrc/rng.hpp"
#include "xdrc/stats.hpp"

namespace xdrc {

// Rectangular grid of nx by ny interior vertices with Dirichlet boundary
// outside. Vertex (i, j) has index i + nx * j.
struct Grid {
    int nx = 0;
    int ny = 0;

    Grid(int nx_, int ny_) : nx(nx_), ny(ny_) {
        if (nx < 1 || ny < 1) throw InvalidParameter("Grid: at least one interior vertex per direction");
    }
    int size() const { return nx * ny; }
    int index(int i, int j) const { return i + nx * j; }
    int x_of(int v) const { return v % nx; }
    int y_of(int v) const { return v / nx; }
    bool contains(int v) const { return v >= 0 && v < size(); }
};

namespace detail {

// Orthonormal sine basis: column k is sqrt(2/(n+1)) sin(pi (k+1)(i+1)/(n+1)).
inline Eigen::MatrixXd sine_basis(int n) {
    Eigen::MatrixXd s(n, n);
    const double c = std::sqrt(2.0 / (n + 1));
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) s(i, k) = c * std::sin(std::numbers::pi * (k + 1) * (i + 1) / (n + 1));
    return s;
}

inline Eigen::VectorXd sine_eigenvalues(int n) {
    Eigen::VectorXd l(n);
    for (int k = 0; k < n; ++k) l(k) = 2.0 - 2.0 * std::cos(std::numbers::pi * (k + 1) / (n + 1));
    return l;
}

}  // namespace detail

// Entry of (4I - A)^{-1} by the sine eigenbasis.
inline double discrete_green(const Grid& g, int x, int y) {
    if (!g.contains(x) || !g.contains(y)) throw InvalidVertex("discrete_green: vertex outside the grid");
    const auto sx = detail::sine_basis(g.nx), sy = detail::sine_basis(g.ny);
    const auto lx = detail::sine_eigenvalues(g.nx), ly = detail::sine_eigenvalues(g.ny);
    const int xi = g.x_of(x), xj = g.y_of(x), yi = g.x_of(y), yj = g.y_of(y);
    ExactSum acc;
    for (int k = 0; k < g.nx; ++k)
        for (int l = 0; l < g.ny; ++l) acc.add(sx(xi, k) * sy(xj, l) * sx(yi, k) * sy(yj, l) / (lx(k) + ly(l)));
    return acc.value();
}

// Dense Green's matrix from a Cholesky solve of the grid Laplacian.
inline Eigen::MatrixXd green_matrix(const Grid& g) {
    const int n = g.size();
    Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n, n);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const int v = g.index(i, j);
            lap(v, v) = 4.0;
            if (i + 1 < g.nx) lap(v, g.index(i + 1, j)) = lap(g.index(i + 1, j), v) = -1.0;
            if (j + 1 < g.ny) lap(v, g.index(i, j + 1)) = lap(g.index(i, j + 1), v) = -1.0;
        }
    Eigen::LLT<Eigen::MatrixXd> llt(lap);
    return llt.solve(Eigen::MatrixXd::Identity(n, n));
}

struct DGFFSample {
    int nx = 0;
    int ny = 0;
    std::vector<double> field;

    double at(int v) const { return field[static_cast<std::size_t>(v)]; }
};

// Exact Gaussian draws with covariance the discrete Green's function, by the
// separable sine transform.
class DgffSampler {
public:
    DgffSampler(const Grid& g, std::uint64_t seed, std::uint64_t stream = 0)
        : grid_(g), sx_(detail::sine_basis(g.nx)), sy_(detail::sine_basis(g.ny)), scale_(g.nx, g.ny), rng_(seed, stream) {
        const auto lx = detail::sine_eigenvalues(g.nx), ly = detail::sine_eigenvalues(g.ny);
        for (int k = 0; k < g.nx; ++k)
            for (int l = 0; l < g.ny; ++l) scale_(k, l) = 1.0 / std::sqrt(lx(k) + ly(l));
    }

    DGFFSample next() {
        Eigen::MatrixXd z(grid_.nx, grid_.ny);
        for (int l = 0; l < grid_.ny; ++l)
            for (int k = 0; k < grid_.nx; ++k) z(k, l) = rng_.normal() * scale_(k, l);
        const Eigen::MatrixXd f = sx_ * z * sy_.transpose();
        DGFFSample s{grid_.nx, grid_.ny, std::vector<double>(static_cast<std::size_t>(grid_.size()))};
        for (int j = 0; j < grid_.ny; ++j)
            for (int i = 0; i < grid_.nx; ++i) s.field[static_cast<std::size_t>(grid_.index(i, j))] = f(i, j);
        return s;
    }

private:
    Grid grid_;
    Eigen::MatrixXd sx_, sy_, scale_;
    Rng rng_;
};

inline DGFFSample sample_dgff(const Grid& g, std::uint64_t seed) { return DgffSampler(g, seed).next(); }

enum class ChaosMode { cos_cos, sin_sin, exp_exp };

// e^{-alpha^2 (G(x,x) + G(y,y)) / 2} {cosh, sinh, exp}(alpha^2 G(x,y)).
inline double chaos_pair_exact(double gxx, double gyy, double gxy, double alpha, ChaosMode mode) {
    const double a2 = alpha * alpha;
    const double pref = std::exp(-0.5 * a2 * (gxx + gyy));
    switch (mode) {
        case ChaosMode::cos_cos: return pref * std::cosh(a2 * gxy);
        case ChaosMode::sin_sin: return pref * std::sinh(a2 * gxy);
        case ChaosMode::exp_exp: return pref * std::exp(a2 * gxy);
    }
    return 0.0;
}

struct ChaosReport {
    double mc = 0.0;
    double exact = 0.0;
    double se = 0.0;
    std::size_t samples = 0;
    bool pass = false;
};

// Monte Carlo estimate of E[cos(a phi(x)) cos(a phi(y))], E[sin sin] or
// E[e^{i a phi(x)} e^{-i a phi(y)}] (whose imaginary part vanishes).
inline ChaosReport chaos_pair_mc(const Grid& g, double alpha, int x, int y, ChaosMode mode, std::size_t samples, std::uint64_t seed,
                                 double sigmas = 4.0) {
    if (!(alpha > 0.0) || !(alpha < std::numbers::sqrt2)) throw InvalidParameter("chaos_pair_mc: alpha must lie in (0, sqrt 2)");
    if (!g.contains(x) || !g.contains(y)) throw InvalidVertex("chaos_pair_mc: vertex outside the grid");
    if (x == y) throw InvalidParameter("chaos_pair_mc: points must be distinct");
    DgffSampler sampler(g, seed);
    std::vector<double> xs;
    xs.reserve(samples);
    for (std::size_t k = 0; k < samples; ++k) {
        const auto s = sampler.next();
        const double a = alpha * s.at(x), b = alpha * s.at(y);
        switch (mode) {
            case ChaosMode::cos_cos: xs.push_back(std::cos(a) * std::cos(b)); break;
            case ChaosMode::sin_sin: xs.push_back(std::sin(a) * std::sin(b)); break;
            case ChaosMode::exp_exp: xs.push_back(std::cos(a - b)); break;
        }
    }
    const auto est = batch_means(xs);
    ChaosReport r;
    r.mc = est.mean;
    r.se = est.se;
    r.samples = samples;
    r.exact = chaos_pair_exact(discrete_green(g, x, x), discrete_green(g, y, y), discrete_green(g, x, y), alpha, mode);
    r.pass = std::fabs(r.mc - r.exact) <= sigmas * r.se;
    return r;
}

struct LatticeInequalityReport {
    std::size_t evaluations = 0;
    std::size_t violations = 0;
    double max_margin = -std::numeric_limits<double>::infinity();
};

// Closed-form lattice versions of sin-sin <= cos-cos, truncated cos-cos <= sin-sin
// and its phase-shifted form, over all pairs of distinct vertices.
inline LatticeInequalityReport lattice_inequalities(const Grid& g, const std::vector<double>& alphas, const std::vector<double>& us,
                                                    double rel_tol = 1e-12) {
    const auto green = green_matrix(g);
    LatticeInequalityReport r;
    auto record = [&](double margin, double scale) {
        const double rel = margin / std::max(scale, std::numeric_limits<double>::min());
        r.max_margin = std::max(r.max_margin, rel);
        r.violations += rel > rel_tol;
        ++r.evaluations;
    };
    for (int x = 0; x < g.size(); ++x)
        for (int y = x + 1; y < g.size(); ++y)
            for (double alpha : alphas) {
                const double a2 = alpha * alpha;
                const double pref = std::exp(-0.5 * a2 * (green(x, x) + green(y, y)));
                const double c = pref * std::cosh(a2 * green(x, y)), s = pref * std::sinh(a2 * green(x, y));
                const double trunc = c - pref;
                record(s - c, c);
                record(trunc - s, s);
                for (double u : us) {
                    const double cu = std::cos(u), su = std::sin(u);
                    record(cu * cu * trunc + su * su * s - s, s);
                }
            }
    return r;
}

}  // namespace xdrc
