#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "xdrc/xdrc.hpp"

using namespace xdrc;

TEST(Ising, CriticalBetaMatchesOracle) { EXPECT_NEAR(critical_beta(), oracle("beta_critical"), 1e-15); }

TEST(Ising, DualBetaMatchesOracleAndFixesCriticalPoint) {
    EXPECT_NEAR(dual_beta(1.0), oracle("dual_beta_of_1"), 1e-14);
    EXPECT_NEAR(dual_beta(critical_beta()), critical_beta(), 1e-14);
    EXPECT_NEAR(dual_beta(dual_beta(0.3)), 0.3, 1e-12);
    EXPECT_THROW(dual_beta(0.0), InvalidParameter);
}

TEST(Lattice, DomainVertexCountsMatchOracle) {
    const auto square = build_domain(Shape::unit_square(), 1.0 / 8);
    EXPECT_EQ(square->num_vertices(), static_cast<std::size_t>(oracle("domain.square8.vertices")));
    EXPECT_EQ(square->num_interior(), static_cast<std::size_t>(oracle("domain.square8.interior")));
    const auto disk = build_domain(Shape::unit_disk(), 1.0 / 8);
    EXPECT_EQ(disk->num_vertices(), static_cast<std::size_t>(oracle("domain.disk8.vertices")));
    EXPECT_EQ(disk->num_interior(), static_cast<std::size_t>(oracle("domain.disk8.interior")));
}

TEST(Lattice, SquareDomainLayout) {
    const auto dom = square_domain(3);
    EXPECT_EQ(dom->num_vertices(), 25u);
    EXPECT_EQ(dom->num_interior(), 9u);
    EXPECT_EQ(dom->dual.size(), 16u);
    const int v = dom->nearest_interior_vertex({0.5, 0.5});
    EXPECT_DOUBLE_EQ(dom->vertex_position(v).real(), 0.5);
    EXPECT_THROW(dom->nearest_interior_vertex({0.0, 0.5}), OutOfDomain);
    EXPECT_THROW(dom->nearest_face({2.0, 2.0}), OutOfDomain);
    for (std::size_t e = 0; e < dom->primal.num_edges(); ++e) {
        const int de = dom->dual_of_primal_edge[e];
        if (de >= 0) {
            EXPECT_EQ(dom->primal_of_dual_edge[static_cast<std::size_t>(de)], static_cast<int>(e));
        }
    }
}

TEST(Lattice, RejectsBadMesh) {
    EXPECT_THROW(build_domain(Shape::unit_square(), 0.0), InvalidParameter);
    EXPECT_THROW(build_domain(Shape::unit_square(), 2.0), InvalidParameter);
    EXPECT_THROW(square_domain(0), InvalidParameter);
}

TEST(IsingOracle, PlusBoundaryCorrelationsMatchOracle) {
    const auto dom = square_domain(3);
    auto v = [&](double x, double y) { return dom->nearest_interior_vertex({x, y}); };
    const double b = critical_beta();
    EXPECT_NEAR(exact_correlation(*dom, {v(0.5, 0.5)}, Boundary::plus, b), oracle("plus3.corr_center"), 1e-12);
    EXPECT_NEAR(exact_correlation(*dom, {v(0.25, 0.25), v(0.75, 0.5)}, Boundary::plus, b), oracle("plus3.corr_pair"), 1e-12);
    EXPECT_NEAR(exact_correlation(*dom, {v(0.25, 0.25), v(0.5, 0.5), v(0.75, 0.75)}, Boundary::plus, b), oracle("plus3.corr_triple"),
                1e-12);
}

TEST(IsingOracle, DisorderCorrelationMatchesOracle) {
    const auto dom = square_domain(4);
    const double b = critical_beta();
    const int f1 = dom->nearest_face({0.3, 0.3}), f2 = dom->nearest_face({0.7, 0.5});
    EXPECT_NEAR(disorder_correlation(*dom, {}, {f1, f2}, b), oracle("plus4.disorder_pair"), 1e-12);
    EXPECT_NEAR(disorder_correlation(*dom, {dom->nearest_interior_vertex({0.4, 0.4})}, {}, b), oracle("plus4.corr_site_2_2"), 1e-12);
    EXPECT_EQ(disorder_correlation(*dom, {}, {f1}, b), 0.0);
}

TEST(IsingOracle, TransferMatrixAgreesWithEnumeration) {
    const auto dom = square_domain(3);
    const auto d = domain_problem(*dom, Boundary::plus, 0.37);
    const auto a = spins_of(d, {dom->nearest_interior_vertex({0.25, 0.5}), dom->nearest_interior_vertex({0.75, 0.75})});
    const auto enumerated = detail::enumerate_correlation(d.problem, a);
    const auto transfer = detail::transfer_correlation(d.problem, a);
    EXPECT_NEAR(enumerated.correlation, transfer.correlation, 1e-12);
    EXPECT_NEAR(enumerated.log_partition, transfer.log_partition, 1e-10);
}

TEST(IsingOracle, FreeTriangleClosedForm) {
    const double b = 0.6, t = std::tanh(b);
    // E[s0 s1] on a triangle: (t + t^2) / (1 + t^3).
    EXPECT_NEAR(exact_correlation(Graph::triangle(), {0, 1}, b), (t + t * t) / (1 + t * t * t), 1e-13);
    EXPECT_NEAR(exact_correlation(Graph::triangle(), {0}, b), 0.0, 1e-15);
}

TEST(Wolff, PlusBoundaryMagnetisationWithinFourSigma) {
    const auto dom = square_domain(3);
    const int c = dom->nearest_interior_vertex({0.5, 0.5});
    WolffChain chain(wired_support(*dom), critical_beta(), Rng(5, 1));
    chain.warm_up(200);
    std::vector<double> xs;
    for (int k = 0; k < 40000; ++k) {
        chain.sweep();
        xs.push_back(chain.host_spins()[static_cast<std::size_t>(c)]);
    }
    const auto e = batch_means(xs);
    EXPECT_LT(std::fabs(e.mean - oracle("plus3.corr_center")), 4.0 * e.se);
}

TEST(Wolff, BoundaryReadsPlusAndSamplingIsDeterministic) {
    const auto dom = square_domain(5);
    const auto a = sample_ising(*dom, Boundary::plus, critical_beta(), 42, 50);
    const auto b = sample_ising(*dom, Boundary::plus, critical_beta(), 42, 50);
    EXPECT_EQ(a.spins, b.spins);
    for (std::size_t v = 0; v < dom->num_vertices(); ++v)
        if (dom->is_boundary(static_cast<int>(v))) {
            EXPECT_EQ(a.spins[v], 1);
        }
    const auto free_cfg = sample_ising(*dom, Boundary::free, critical_beta(), 42, 50);
    EXPECT_THROW(xor_field(a, free_cfg), ShapeMismatch);
    const auto t = xor_field(a, sample_ising(*dom, Boundary::plus, critical_beta(), 43, 50));
    EXPECT_TRUE(std::all_of(t.begin(), t.end(), [](std::int8_t s) { return s == 1 || s == -1; }));
}

TEST(Rng, StreamsAreReproducibleAndDistinct) {
    Rng a(7, 1), b(7, 1), c(7, 2);
    const auto x = a(), y = b(), z = c();
    EXPECT_EQ(x, y);
    EXPECT_NE(x, z);
    Rng u(3);
    for (int k = 0; k < 1000; ++k) {
        const double r = u.uniform();
        ASSERT_GE(r, 0.0);
        ASSERT_LT(r, 1.0);
    }
}

TEST(Stats, ExactSumIsOrderIndependent) {
    std::vector<double> xs{1e16, 1.0, -1e16, 3.5, 1e-3, -2.25};
    ExactSum a;
    for (double x : xs) a.add(x);
    std::reverse(xs.begin(), xs.end());
    ExactSum b;
    for (double x : xs) b.add(x);
    EXPECT_EQ(a.value(), b.value());
    EXPECT_DOUBLE_EQ(a.value(), 1.0 + 3.5 + 1e-3 - 2.25);
}

TEST(Stats, WeightedFitRecoversLine) {
    const auto f = weighted_linear_fit({1, 2, 3, 4}, {1.5, 3.5, 5.5, 7.5}, {1, 1, 1, 1});
    EXPECT_NEAR(f.slope, 2.0, 1e-12);
    EXPECT_NEAR(f.intercept, -0.5, 1e-12);
    EXPECT_THROW(weighted_linear_fit({1}, {1}, {1}), InvalidParameter);
}

TEST(Stats, BatchMeansOfConstantSeries) {
    const auto e = batch_means(std::vector<double>(1000, 2.0));
    EXPECT_DOUBLE_EQ(e.mean, 2.0);
    EXPECT_DOUBLE_EQ(e.se, 0.0);
}
