#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "xdrc/continuum.hpp"
#include "xdrc/errors.hpp"
#include "xdrc/lattice.hpp"
#include "xdrc/rng.hpp"

namespace xdrc {

// Real driving function w_t, linear between knots and constant after the last
// one; the boundary point is zeta_t = e^{i w_t}.
class DrivingFunction {
public:
    static DrivingFunction constant(double w0) { return DrivingFunction({0.0}, {w0}); }

    static DrivingFunction piecewise_linear(std::vector<double> times, std::vector<double> values) {
        return DrivingFunction(std::move(times), std::move(values));
    }

    // Scaled Brownian path sampled on a grid and interpolated linearly.
    static DrivingFunction brownian(double scale, double horizon, std::uint64_t seed, double step = 1e-4) {
        if (!(step > 0.0) || !(horizon > 0.0)) throw InvalidParameter("brownian driving: step and horizon must be positive");
        const auto n = static_cast<std::size_t>(std::ceil(horizon / step));
        Rng rng(seed, 0xb0);
        std::vector<double> t(n + 1), w(n + 1);
        const double sd = scale * std::sqrt(step);
        for (std::size_t k = 1; k <= n; ++k) {
            t[k] = static_cast<double>(k) * step;
            w[k] = w[k - 1] + sd * rng.normal();
        }
        return DrivingFunction(std::move(t), std::move(w));
    }

    double value(double t) const {
        if (t <= times_.front()) return values_.front();
        if (t >= times_.back()) return values_.back();
        const auto it = std::upper_bound(times_.begin(), times_.end(), t);
        const auto k = static_cast<std::size_t>(it - times_.begin());
        const double s = (t - times_[k - 1]) / (times_[k] - times_[k - 1]);
        return values_[k - 1] + s * (values_[k] - values_[k - 1]);
    }
    Complex zeta(double t) const { return std::polar(1.0, value(t)); }

    // Knot times strictly inside (a, b).
    std::vector<double> knots_between(double a, double b) const {
        auto lo = std::upper_bound(times_.begin(), times_.end(), a);
        auto hi = std::lower_bound(times_.begin(), times_.end(), b);
        return lo < hi ? std::vector<double>(lo, hi) : std::vector<double>{};
    }
    const std::vector<double>& times() const { return times_; }
    const std::vector<double>& values() const { return values_; }

private:
    DrivingFunction(std::vector<double> times, std::vector<double> values) : times_(std::move(times)), values_(std::move(values)) {
        if (times_.empty() || times_.size() != values_.size()) throw InvalidParameter("driving function: knots and values must match");
        if (times_.front() != 0.0) throw InvalidParameter("driving function: first knot must be at t = 0");
        for (std::size_t k = 1; k < times_.size(); ++k)
            if (!(times_[k] > times_[k - 1])) throw InvalidParameter("driving function: knot times must increase");
    }

    std::vector<double> times_;
    std::vector<double> values_;
};

struct MapValue {
    Complex g;   // g_t(z)
    Complex dg;  // g_t'(z)
};

// Radial Loewner chain: d/dt g_t(z) = g_t(z) (zeta_t + g_t(z)) / (zeta_t - g_t(z)), g_0(z) = z,
// integrated together with its z-derivative by adaptive Dormand-Prince steps
// on each interval where the driving function is linear.
class LoewnerChain {
public:
    explicit LoewnerChain(DrivingFunction driving, double rel_tol = 1e-12, double abs_tol = 1e-14)
        : driving_(std::move(driving)), rel_tol_(rel_tol), abs_tol_(abs_tol) {}

    static constexpr double kSwallowDistance = 1e-6;

    const DrivingFunction& driving() const { return driving_; }

    // g_t(z) and g_t'(z) at each of the ascending times.
    std::vector<MapValue> trajectory(Complex z, const std::vector<double>& times) const {
        require_in_disk(z, "LoewnerChain");
        std::vector<MapValue> out;
        out.reserve(times.size());
        State y{z, Complex(1.0, 0.0)};
        double t = 0.0;
        for (double target : times) {
            if (target < t) throw InvalidParameter("LoewnerChain: times must be ascending and nonnegative");
            for (double knot : driving_.knots_between(t, target)) {
                y = integrate(y, t, knot);
                t = knot;
            }
            y = integrate(y, t, target);
            t = target;
            out.push_back({y[0], y[1]});
        }
        return out;
    }

    MapValue evolve_with_derivative(Complex z, double t) const { return trajectory(z, {t}).front(); }
    Complex evolve(Complex z, double t) const { return evolve_with_derivative(z, t).g; }

private:
    using State = std::array<Complex, 2>;

    State rhs(double t, const State& y) const {
        const Complex zeta = driving_.zeta(t);
        const Complex d = zeta - y[0];
        if (std::abs(d) < kSwallowDistance) throw PointSwallowed("LoewnerChain: point swallowed", t);
        const Complex q = (zeta + y[0]) / d;
        return {y[0] * q, y[1] * (q + 2.0 * y[0] * zeta / (d * d))};
    }

    State integrate(State y, double t0, double t1) const {
        static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
        static constexpr double a21 = 1.0 / 5;
        static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
        static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
        static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
        static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176, a65 = -5103.0 / 18656;
        static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
        static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200, e6 = 22.0 / 525,
                                e7 = -1.0 / 40;
        double t = t0;
        double h = std::min(t1 - t0, 1e-3);
        if (!(h > 0.0)) return y;
        auto comb = [](const State& base, double h, std::initializer_list<std::pair<double, const State*>> terms) {
            State r = base;
            for (const auto& [c, k] : terms)
                for (std::size_t i = 0; i < 2; ++i) r[i] += h * c * (*k)[i];
            return r;
        };
        State k1 = rhs(t, y);
        while (t < t1) {
            h = std::min(h, t1 - t);
            if (h < 1e-15 * std::max(1.0, t)) throw PointSwallowed("LoewnerChain: step size underflow", t);
            const State k2 = rhs(t + c2 * h, comb(y, h, {{a21, &k1}}));
            const State k3 = rhs(t + c3 * h, comb(y, h, {{a31, &k1}, {a32, &k2}}));
            const State k4 = rhs(t + c4 * h, comb(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
            const State k5 = rhs(t + c5 * h, comb(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
            const State k6 = rhs(t + h, comb(y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
            const State y5 = comb(y, h, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
            const State k7 = rhs(t + h, y5);
            double err = 0.0;
            for (std::size_t i = 0; i < 2; ++i) {
                const Complex e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
                const double sc = abs_tol_ + rel_tol_ * std::max(std::abs(y[i]), std::abs(y5[i]));
                err = std::max(err, std::abs(e) / sc);
            }
            if (err <= 1.0) {
                t = (t1 - t <= h) ? t1 : t + h;
                y = y5;
                k1 = k7;
            }
            const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
            h *= factor;
        }
        return y;
    }

    DrivingFunction driving_;
    double rel_tol_;
    double abs_tol_;
};

inline double green_slit(const LoewnerChain& chain, double t, Complex z, Complex w) {
    return green_disk(chain.evolve(z, t), chain.evolve(w, t));
}

// CR_t(z) = (1 - |g_t(z)|^2) / |g_t'(z)|.
inline double conformal_radius_slit(const MapValue& m) { return (1.0 - std::norm(m.g)) / std::abs(m.dg); }

inline double conformal_radius_slit(const LoewnerChain& chain, double t, Complex z) {
    return conformal_radius_slit(chain.evolve_with_derivative(z, t));
}

struct HadamardReport {
    double fd_lhs = 0.0;       // -(G_{t+dt} - G_t) / dt
    double poisson_rhs = 0.0;  // P(g_t(z), zeta_t) P(g_t(w), zeta_t)
    double rel_err = 0.0;
};

// For z = w the regular part H_t(z, z) = log CR_t(z) replaces the Green's function.
inline HadamardReport hadamard_check(const LoewnerChain& chain, double t, Complex z, Complex w, double dt) {
    if (!(dt > 0.0) || t < 0.0) throw InvalidParameter("hadamard_check: need t >= 0 and dt > 0");
    const auto mz = chain.trajectory(z, {t, t + dt});
    const auto mw = chain.trajectory(w, {t, t + dt});
    const Complex zeta = chain.driving().zeta(t);
    HadamardReport r;
    if (z == w) {
        r.fd_lhs = -(std::log(conformal_radius_slit(mz[1])) - std::log(conformal_radius_slit(mz[0]))) / dt;
    } else {
        r.fd_lhs = -(green_disk(mz[1].g, mw[1].g) - green_disk(mz[0].g, mw[0].g)) / dt;
    }
    r.poisson_rhs = poisson_disk(mz[0].g, zeta) * poisson_disk(mw[0].g, zeta);
    r.rel_err = std::fabs(r.fd_lhs - r.poisson_rhs) / std::fabs(r.poisson_rhs);
    return r;
}

struct MonotonicityReport {
    double dC = 0.0;            // -d/dt of the cos kernel, central difference
    double dS = 0.0;            // -d/dt of the sin kernel, central difference
    double dC_closed = 0.0;     // Z (X sinh - Y cosh)
    double dS_closed = 0.0;     // Z (X cosh - Y sinh)
    double scale = 0.0;         // Z (X + Y) cosh, the size of the terms
    double ratio = 0.0;         // Y / X = (P_z / P_w + P_w / P_z) / 2
};

// Time derivatives of the cos and sin two-point kernels of D_t at time t,
// both by central differences of the kernels and from the Poisson kernels.
inline MonotonicityReport monotonicity_check(const LoewnerChain& chain, double t, Complex z, Complex w, double alpha, double dt) {
    if (!(alpha > 0.0) || !(alpha < std::numbers::sqrt2)) throw InvalidParameter("monotonicity_check: alpha must lie in (0, sqrt 2)");
    if (!(dt > 0.0) || t < dt) throw InvalidParameter("monotonicity_check: need t >= dt > 0");
    if (z == w) throw DiagonalSingularity("monotonicity_check: coinciding points");
    const auto mz = chain.trajectory(z, {t - dt, t, t + dt});
    const auto mw = chain.trajectory(w, {t - dt, t, t + dt});
    auto kernel = [&](std::size_t k, KernelMode mode) {
        return kernel_from_parts(conformal_radius_slit(mz[k]), conformal_radius_slit(mw[k]), green_disk(mz[k].g, mw[k].g), alpha, mode);
    };
    MonotonicityReport r;
    r.dC = -(kernel(2, KernelMode::cos) - kernel(0, KernelMode::cos)) / (2.0 * dt);
    r.dS = -(kernel(2, KernelMode::sin) - kernel(0, KernelMode::sin)) / (2.0 * dt);
    const Complex zeta = chain.driving().zeta(t);
    const double pz = poisson_disk(mz[1].g, zeta), pw = poisson_disk(mw[1].g, zeta);
    const double a2 = alpha * alpha;
    const double g = green_disk(mz[1].g, mw[1].g);
    const double x = pz * pw, y = 0.5 * (pz * pz + pw * pw);
    const double zf = a2 * std::pow(conformal_radius_slit(mz[1]) * conformal_radius_slit(mw[1]), -0.5 * a2);
    r.dC_closed = zf * (x * std::sinh(a2 * g) - y * std::cosh(a2 * g));
    r.dS_closed = zf * (x * std::cosh(a2 * g) - y * std::sinh(a2 * g));
    r.scale = zf * (x + y) * std::cosh(a2 * g);
    r.ratio = y / x;
    return r;
}

}  // namespace xdrc
