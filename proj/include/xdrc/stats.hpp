#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "xdrc/errors.hpp"

namespace xdrc {

class RunningStats {
public:
    void add(double x) {
        ++n_;
        const double d = x - mean_;
        mean_ += d / static_cast<double>(n_);
        m2_ += d * (x - mean_);
    }
    void merge(const RunningStats& o) {
        if (o.n_ == 0) return;
        if (n_ == 0) {
            *this = o;
            return;
        }
        const double n = static_cast<double>(n_ + o.n_);
        const double d = o.mean_ - mean_;
        mean_ += d * static_cast<double>(o.n_) / n;
        m2_ += o.m2_ + d * d * static_cast<double>(n_) * static_cast<double>(o.n_) / n;
        n_ += o.n_;
    }
    std::size_t count() const { return n_; }
    double mean() const { return mean_; }
    double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
    double standard_error() const {
        return n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
    }

private:
    std::size_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

struct Estimate {
    double mean = 0.0;
    double se = 0.0;
    std::size_t n = 0;
};

// Standard error of the mean of a correlated series, from the spread of
// non-overlapping batch averages.
inline Estimate batch_means(const std::vector<double>& xs, std::size_t batches = 50) {
    Estimate e;
    e.n = xs.size();
    if (xs.empty()) return e;
    RunningStats all;
    for (double x : xs) all.add(x);
    e.mean = all.mean();
    batches = std::min(batches, xs.size());
    if (batches < 2) return e;
    const std::size_t per = xs.size() / batches;
    RunningStats bm;
    for (std::size_t b = 0; b < batches; ++b) {
        double s = 0.0;
        for (std::size_t i = b * per; i < (b + 1) * per; ++i) s += xs[i];
        bm.add(s / static_cast<double>(per));
    }
    e.se = std::max(bm.standard_error(), all.standard_error());
    return e;
}

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_se = 0.0;
    double chi2 = 0.0;
};

// Weighted least squares y = intercept + slope * x with weights 1/sigma^2.
inline LinearFit weighted_linear_fit(const std::vector<double>& x, const std::vector<double>& y,
                                     const std::vector<double>& sigma) {
    const auto n = static_cast<Eigen::Index>(x.size());
    if (n < 2 || y.size() != x.size() || sigma.size() != x.size())
        throw InvalidParameter("weighted_linear_fit: need at least two matching points");
    Eigen::MatrixXd a(n, 2);
    Eigen::VectorXd b(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double w = 1.0 / sigma[static_cast<std::size_t>(i)];
        a(i, 0) = w;
        a(i, 1) = w * x[static_cast<std::size_t>(i)];
        b(i) = w * y[static_cast<std::size_t>(i)];
    }
    const Eigen::Vector2d coef = a.colPivHouseholderQr().solve(b);
    const Eigen::Matrix2d cov = (a.transpose() * a).inverse();
    LinearFit f;
    f.intercept = coef(0);
    f.slope = coef(1);
    f.slope_se = std::sqrt(cov(1, 1));
    f.chi2 = (a * coef - b).squaredNorm();
    return f;
}

// Exactly rounded floating-point summation (Shewchuk partials). The result
// depends only on the multiset of added terms, never on their order.
class ExactSum {
public:
    void add(double x) {
        std::size_t i = 0;
        for (double y : partials_) {
            if (std::fabs(x) < std::fabs(y)) std::swap(x, y);
            const double hi = x + y;
            const double lo = y - (hi - x);
            if (lo != 0.0) partials_[i++] = lo;
            x = hi;
        }
        partials_.resize(i);
        partials_.push_back(x);
    }

    double value() const {
        if (partials_.empty()) return 0.0;
        std::size_t n = partials_.size();
        double hi = partials_[--n];
        double lo = 0.0;
        while (n > 0) {
            const double x = hi;
            const double y = partials_[--n];
            hi = x + y;
            const double yr = hi - x;
            lo = y - yr;
            if (lo != 0.0) break;
        }
        if (n > 0 && ((lo < 0.0 && partials_[n - 1] < 0.0) ||
                      (lo > 0.0 && partials_[n - 1] > 0.0))) {
            const double y = lo * 2.0;
            const double x = hi + y;
            const double yr = x - hi;
            if (y == yr) hi = x;
        }
        return hi;
    }

private:
    std::vector<double> partials_;
};

}  // namespace xdrc
