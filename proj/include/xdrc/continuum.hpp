#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <vector>

#include "xdrc/errors.hpp"
#include "xdrc/lattice.hpp"
#include "xdrc/rng.hpp"

namespace xdrc {

inline void require_in_disk(Complex z, const char* who) {
    if (!(std::abs(z) < 1.0)) throw OutOfDomain(std::string(who) + ": point outside the open unit disk");
}

// G(z, w) = log |(1 - z conj(w)) / (z - w)|; +infinity on the diagonal.
inline double green_disk(Complex z, Complex w) {
    require_in_disk(z, "green_disk");
    require_in_disk(w, "green_disk");
    if (z == w) return std::numeric_limits<double>::infinity();
    return std::log(std::abs(1.0 - z * std::conj(w)) / std::abs(z - w));
}

inline double conformal_radius_disk(Complex z) {
    require_in_disk(z, "conformal_radius_disk");
    return 1.0 - std::norm(z);
}

inline double poisson_disk(Complex z, Complex zeta) {
    require_in_disk(z, "poisson_disk");
    return (1.0 - std::norm(z)) / std::norm(zeta - z);
}

inline double hyperbolic_distance_disk(Complex z, Complex w) {
    require_in_disk(z, "hyperbolic_distance_disk");
    require_in_disk(w, "hyperbolic_distance_disk");
    return 2.0 * std::atanh(std::abs(z - w) / std::abs(1.0 - z * std::conj(w)));
}

inline double busemann_disk(Complex zeta, Complex z) { return -std::log(poisson_disk(z, zeta)); }

// Green's function of the rectangle (0, W) x (0, H), normalized like
// green_disk: G(z, w) = -log|z - w| + O(1). Sine series in one direction with
// the other direction summed in closed form; the closed-form direction is the
// one in which the points are further apart.
inline double green_rectangle(double width, double height, Complex z, Complex w) {
    auto inside = [&](Complex p) { return p.real() > 0.0 && p.real() < width && p.imag() > 0.0 && p.imag() < height; };
    if (!inside(z) || !inside(w)) throw OutOfDomain("green_rectangle: point outside the rectangle");
    if (z == w) return std::numeric_limits<double>::infinity();
    double along_w = width, across_h = height;
    double x = z.real(), xp = w.real(), y = z.imag(), yp = w.imag();
    if (std::fabs(x - xp) < std::fabs(y - yp)) {
        std::swap(along_w, across_h);
        std::swap(x, y);
        std::swap(xp, yp);
    }
    const double a = std::min(x, xp), b = std::max(x, xp);
    double sum = 0.0;
    for (int n = 1; n < 10'000'000; ++n) {
        const double k = n * std::numbers::pi / across_h;
        const double decay = std::exp(-k * (b - a));
        const double term = 2.0 / across_h * std::sin(k * y) * std::sin(k * yp) * decay * (-std::expm1(-2.0 * k * a)) *
                            (-std::expm1(-2.0 * k * (along_w - b))) / (2.0 * k * (-std::expm1(-2.0 * k * along_w)));
        sum += term;
        if (decay / k < 1e-18 * std::fabs(sum)) break;
    }
    return 2.0 * std::numbers::pi * sum;
}

// Disk automorphism z -> e^{i theta} (z - a) / (1 - conj(a) z).
struct Mobius {
    Complex a{0.0, 0.0};
    double theta = 0.0;

    Complex operator()(Complex z) const { return std::polar(1.0, theta) * (z - a) / (1.0 - std::conj(a) * z); }
    double abs_derivative(Complex z) const { return (1.0 - std::norm(a)) / std::norm(1.0 - std::conj(a) * z); }
};

// Continuum evaluators on the disk, optionally pulled back by a disk automorphism.
struct GreensOracle {
    Mobius map{};

    double green(Complex z, Complex w) const { return green_disk(map(z), map(w)); }
    double conformal_radius(Complex z) const { return conformal_radius_disk(map(z)) / map.abs_derivative(z); }
    // Density of harmonic measure from z with respect to arc length at zeta, times 2 pi.
    double poisson(Complex z, Complex zeta) const { return poisson_disk(map(z), map(zeta)) * map.abs_derivative(zeta); }
    double hyperbolic_distance(Complex z, Complex w) const { return hyperbolic_distance_disk(map(z), map(w)); }
    double busemann(Complex zeta, Complex z) const { return busemann_disk(map(zeta), map(z)); }
};

struct CriticalParameters {
    static constexpr double lambda = std::numbers::pi / 2.0;
    static double a_c(double alpha) {
        if (!(alpha > 0.0)) throw InvalidParameter("a_c: alpha must be positive");
        return lambda / alpha;
    }
    static double alpha_c(double a) {
        if (!(a > 0.0)) throw InvalidParameter("alpha_c: a must be positive");
        return lambda / a;
    }
};

enum class KernelMode { cos, sin };

inline void require_alpha(double alpha) {
    if (!(alpha > 0.0) || !(alpha < std::numbers::sqrt2)) throw InvalidParameter("alpha must lie in (0, sqrt 2)");
}

// Two-point functions of :cos(alpha phi): and :sin(alpha phi): from the
// conformal radii and the Green's function.
inline double kernel_from_parts(double cr_z, double cr_w, double green, double alpha, KernelMode mode) {
    const double a2 = alpha * alpha;
    const double pref = std::pow(cr_z, -0.5 * a2) * std::pow(cr_w, -0.5 * a2);
    return pref * (mode == KernelMode::cos ? std::cosh(a2 * green) : std::sinh(a2 * green));
}

inline double kernel_two_point(Complex z, Complex w, double alpha, KernelMode mode, const GreensOracle& oracle = {}) {
    require_alpha(alpha);
    if (z == w) throw DiagonalSingularity("kernel_two_point: coinciding points");
    return kernel_from_parts(oracle.conformal_radius(z), oracle.conformal_radius(w), oracle.green(z, w), alpha, mode);
}

// E[:cos(alpha phi(z) + u):] = cos(u) CR(z)^{-alpha^2/2}.
inline double kernel_one_point_cos(Complex z, double alpha, double u = 0.0, const GreensOracle& oracle = {}) {
    require_alpha(alpha);
    return std::cos(u) * std::pow(oracle.conformal_radius(z), -0.5 * alpha * alpha);
}

// Covariance of :cos(alpha phi(z) + u): and :cos(alpha phi(w) + u):,
// cos^2(u) (cos kernel - product of means) + sin^2(u) sin kernel.
inline double kernel_truncated_cos(Complex z, Complex w, double alpha, double u = 0.0, const GreensOracle& oracle = {}) {
    require_alpha(alpha);
    if (z == w) throw DiagonalSingularity("kernel_truncated_cos: coinciding points");
    const double a2 = alpha * alpha;
    const double pref = std::pow(oracle.conformal_radius(z), -0.5 * a2) * std::pow(oracle.conformal_radius(w), -0.5 * a2);
    const double g = a2 * oracle.green(z, w);
    const double c = std::cos(u), s = std::sin(u);
    return pref * (c * c * (std::cosh(g) - 1.0) + s * s * std::sinh(g));
}

struct InequalityReport {
    std::size_t evaluations = 0;
    std::size_t violations = 0;
    double max_violation_i = -std::numeric_limits<double>::infinity();    // sin - cos
    double max_violation_ii = -std::numeric_limits<double>::infinity();   // truncated cos - sin
    double max_violation_iii = -std::numeric_limits<double>::infinity();  // shifted truncated cos - sin
    Complex worst_z{}, worst_w{};
    double worst_alpha = 0.0, worst_u = 0.0;
};

inline Complex random_disk_point(Rng& rng, double radius = 1.0) {
    const double r = radius * std::sqrt(rng.uniform());
    return std::polar(r, 2.0 * std::numbers::pi * rng.uniform());
}

// Closed-form checks of sin <= cos, truncated cos <= sin and the phase-shifted
// truncated cos <= sin on random pairs of the disk. Violations are margins
// above a relative tolerance.
inline InequalityReport check_inequalities(std::size_t n_pairs, const std::vector<double>& alphas, const std::vector<double>& us,
                                           std::uint64_t seed, double rel_tol = 1e-12) {
    for (double u : us)
        if (u < -std::numbers::pi / 2 || u > std::numbers::pi / 2) throw InvalidParameter("check_inequalities: u outside [-pi/2, pi/2]");
    Rng rng(seed, 0x1e9);
    InequalityReport r;
    auto record = [&](double margin, double scale, double& slot, Complex z, Complex w, double alpha, double u) {
        const double rel = margin / std::max(scale, std::numeric_limits<double>::min());
        if (rel > slot) {
            slot = rel;
            if (rel > rel_tol) {
                r.worst_z = z;
                r.worst_w = w;
                r.worst_alpha = alpha;
                r.worst_u = u;
            }
        }
        if (rel > rel_tol) ++r.violations;
    };
    for (std::size_t i = 0; i < n_pairs; ++i) {
        const Complex z = random_disk_point(rng), w = random_disk_point(rng);
        if (z == w) continue;
        for (double alpha : alphas) {
            const double c = kernel_two_point(z, w, alpha, KernelMode::cos);
            const double s = kernel_two_point(z, w, alpha, KernelMode::sin);
            record(s - c, c, r.max_violation_i, z, w, alpha, 0.0);
            record(kernel_truncated_cos(z, w, alpha) - s, s, r.max_violation_ii, z, w, alpha, 0.0);
            r.evaluations += 2;
            for (double u : us) {
                record(kernel_truncated_cos(z, w, alpha, u) - s, s, r.max_violation_iii, z, w, alpha, u);
                ++r.evaluations;
            }
        }
    }
    return r;
}

struct HyperbolicCheck {
    double lhs = 0.0;  // tanh(d(z, w) / 2)^{2 alpha^2}
    double rhs = 0.0;  // tanh^2((B(z) - B(w)) / 2)
    bool holds = true;
};

inline HyperbolicCheck hyperbolic_inequality(Complex z, Complex w, Complex zeta, double alpha, double rel_tol = 1e-12) {
    if (std::fabs(std::abs(zeta) - 1.0) > 1e-12) throw InvalidParameter("hyperbolic_inequality: zeta must lie on the unit circle");
    if (!(alpha > 0.0)) throw InvalidParameter("hyperbolic_inequality: alpha must be positive");
    HyperbolicCheck h;
    const double t = z == w ? 0.0 : std::exp(-green_disk(z, w));
    h.lhs = std::pow(t, 2.0 * alpha * alpha);
    const double db = busemann_disk(zeta, z) - busemann_disk(zeta, w);
    const double th = std::tanh(0.5 * db);
    h.rhs = th * th;
    h.holds = h.lhs >= h.rhs * (1.0 - rel_tol);
    return h;
}

}  // namespace xdrc
