#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "xdrc/xdrc.hpp"

using namespace xdrc;

TEST(Gff, DiscreteGreenMatchesOracle) {
    const Grid g(3, 3);
    EXPECT_NEAR(discrete_green(g, 4, 4), oracle("green3.center"), 1e-14);
    EXPECT_NEAR(discrete_green(g, 0, 4), oracle("green3.corner_center"), 1e-14);
    EXPECT_NEAR(discrete_green(g, 0, 8), oracle("green3.corner_opposite"), 1e-14);
    EXPECT_THROW(discrete_green(g, 0, 9), InvalidVertex);
}

TEST(Gff, SpectralGreenAgreesWithCholesky) {
    const Grid g(5, 4);
    const auto m = green_matrix(g);
    for (int x = 0; x < g.size(); ++x)
        for (int y = 0; y < g.size(); ++y) EXPECT_NEAR(m(x, y), discrete_green(g, x, y), 1e-12);
}

TEST(Gff, EmpiricalCovarianceMatchesGreen) {
    const Grid g(4, 4);
    DgffSampler sampler(g, 3);
    const int x = g.index(1, 1), y = g.index(2, 2);
    std::vector<double> xx, xy;
    for (int k = 0; k < 40000; ++k) {
        const auto s = sampler.next();
        xx.push_back(s.at(x) * s.at(x));
        xy.push_back(s.at(x) * s.at(y));
    }
    const auto exx = batch_means(xx), exy = batch_means(xy);
    EXPECT_LT(std::fabs(exx.mean - discrete_green(g, x, x)), 4.0 * exx.se);
    EXPECT_LT(std::fabs(exy.mean - discrete_green(g, x, y)), 4.0 * exy.se);
}

TEST(Gff, SamplerIsDeterministic) {
    const Grid g(6, 5);
    EXPECT_EQ(sample_dgff(g, 9).field, sample_dgff(g, 9).field);
    EXPECT_NE(sample_dgff(g, 9).field, sample_dgff(g, 10).field);
}

TEST(Gff, ChaosClosedForms) {
    const double gxx = 0.4, gyy = 0.3, gxy = 0.1, a = 0.8, a2 = a * a;
    const double pref = std::exp(-0.5 * a2 * (gxx + gyy));
    EXPECT_DOUBLE_EQ(chaos_pair_exact(gxx, gyy, gxy, a, ChaosMode::cos_cos), pref * std::cosh(a2 * gxy));
    EXPECT_DOUBLE_EQ(chaos_pair_exact(gxx, gyy, gxy, a, ChaosMode::sin_sin), pref * std::sinh(a2 * gxy));
    EXPECT_DOUBLE_EQ(chaos_pair_exact(gxx, gyy, gxy, a, ChaosMode::exp_exp), pref * std::exp(a2 * gxy));
}

TEST(Gff, ChaosMonteCarloOnSmallGrid) {
    const Grid g(6, 6);
    for (auto mode : {ChaosMode::cos_cos, ChaosMode::sin_sin, ChaosMode::exp_exp}) {
        const auto r = chaos_pair_mc(g, 1.0, g.index(2, 2), g.index(3, 3), mode, 40000, 4);
        EXPECT_TRUE(r.pass) << r.mc << " vs " << r.exact << " se " << r.se;
    }
    EXPECT_THROW(chaos_pair_mc(g, 1.5, 0, 1, ChaosMode::cos_cos, 10, 1), InvalidParameter);
    EXPECT_THROW(chaos_pair_mc(g, 1.0, 0, 0, ChaosMode::cos_cos, 10, 1), InvalidParameter);
    EXPECT_THROW(chaos_pair_mc(g, 1.0, 0, 99, ChaosMode::cos_cos, 10, 1), InvalidVertex);
}

TEST(Gff, LatticeInequalitiesHold) {
    const auto r = lattice_inequalities(Grid(5, 5), {0.5, 1.0, 1.3}, {0.0, 0.7, -1.5});
    EXPECT_GT(r.evaluations, 0u);
    EXPECT_EQ(r.violations, 0u);
}
