#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "xdrc/xdrc.hpp"

using namespace xdrc;

TEST(Coupling, HalfAngleTables) {
    const int cosines[] = {1, 0, -1, 0};
    const int sines[] = {0, 1, 0, -1};
    for (int h = -8; h <= 8; ++h) {
        const int r = ((h % 4) + 4) % 4;
        EXPECT_EQ(cos_half_pi(h), cosines[r]);
        EXPECT_EQ(sin_half_pi(h), sines[r]);
    }
}

TEST(Coupling, InvariantsHoldOnSquareAndDisk) {
    for (const auto& dom : {square_domain(8), build_domain(Shape::unit_disk(), 1.0 / 6)}) {
        CouplingSampler sampler(*dom, critical_beta(), 21, 50);
        for (int k = 0; k < 300; ++k) {
            const auto s = sampler.next();
            const auto r = check_invariants(s, *dom);
            ASSERT_TRUE(r.non_crossing);
            ASSERT_TRUE(r.spin_identities);
            ASSERT_TRUE(r.gradient_law);
            ASSERT_TRUE(r.boundary_zero);
            ASSERT_TRUE(r.interfaces);
            ASSERT_NO_THROW(require_invariants(s, *dom));
        }
    }
}

TEST(Coupling, TamperedHeightIsDetected) {
    const auto dom = square_domain(5);
    auto s = sample_master_coupling(*dom, critical_beta(), 4);
    s.h.primal[static_cast<std::size_t>(dom->nearest_interior_vertex({0.5, 0.5}))] += 1;
    EXPECT_FALSE(check_invariants(s, *dom).all());
    EXPECT_THROW(require_invariants(s, *dom), CouplingViolation);
}

TEST(Coupling, SamplesAreDeterministicPerSeed) {
    const auto dom = square_domain(6);
    const auto a = sample_master_coupling(*dom, critical_beta(), 12);
    const auto b = sample_master_coupling(*dom, critical_beta(), 12);
    EXPECT_EQ(a.h.primal, b.h.primal);
    EXPECT_EQ(a.h.dual, b.h.dual);
    EXPECT_EQ(a.signs, b.signs);
}

TEST(Coupling, SignsArePlusMinusOneAndBoundaryIsPlus) {
    const auto dom = square_domain(8);
    const auto s = sample_master_coupling(*dom, critical_beta(), 8);
    ASSERT_EQ(s.signs.size(), s.primal_clusters.size());
    for (auto x : s.signs) EXPECT_TRUE(x == 1 || x == -1);
    EXPECT_EQ(s.signs[static_cast<std::size_t>(s.primal_clusters.boundary_cluster)], 1);
}

TEST(Coupling, BosonisationSinglePrimalPoint) {
    const auto dom = square_domain(3);
    const auto r = verify_bosonisation(*dom, {dom->nearest_interior_vertex({0.5, 0.5})}, {}, 40000, 31);
    const double corr = oracle("plus3.corr_center");
    EXPECT_NEAR(r.exact, corr * corr, 1e-12);
    EXPECT_TRUE(r.pass) << r.mc << " vs " << r.exact << " se " << r.se;
}

TEST(Coupling, BosonisationDisorderPair) {
    const auto dom = square_domain(4);
    const auto r = verify_bosonisation(*dom, {}, {dom->nearest_face({0.3, 0.3}), dom->nearest_face({0.7, 0.5})}, 40000, 32);
    const double corr = oracle("plus4.disorder_pair");
    EXPECT_NEAR(r.exact, corr * corr, 1e-12);
    EXPECT_TRUE(r.pass) << r.mc << " vs " << r.exact << " se " << r.se;
}

TEST(Coupling, BosonisationRejectsBadPoints) {
    const auto dom = square_domain(3);
    EXPECT_THROW(verify_bosonisation(*dom, {1000}, {}, 10, 1), InvalidVertex);
    EXPECT_THROW(verify_bosonisation(*dom, {}, {-1}, 10, 1), InvalidVertex);
}
