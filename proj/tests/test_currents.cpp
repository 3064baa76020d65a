#include <cmath>
#include <string>
#include <unordered_map>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "xdrc/xdrc.hpp"

using namespace xdrc;

namespace {

std::uint64_t fixture_key(const std::string& name) {
    const auto dot = name.rfind('.');
    const auto prev = name.rfind('.', dot - 1);
    const std::uint64_t odd = std::stoull(name.substr(prev + 1, dot - prev - 1));
    const std::uint64_t occ = std::stoull(name.substr(dot + 1));
    return odd | (occ << 32);
}

TraceDistribution fixture_distribution(const std::string& prefix) {
    TraceDistribution d;
    for (const auto& [name, p] : oracle_values())
        if (name.rfind(prefix, 0) == 0) d[fixture_key(name)] = p;
    return d;
}

void expect_matches_fixture(const TraceDistribution& computed, const std::string& prefix) {
    const auto expected = fixture_distribution(prefix);
    ASSERT_FALSE(expected.empty());
    EXPECT_EQ(computed.size(), expected.size()) << prefix;
    for (const auto& [k, p] : expected) {
        const auto it = computed.find(k);
        ASSERT_NE(it, computed.end()) << prefix << " key " << k;
        EXPECT_NEAR(it->second, p, 1e-12) << prefix << " key " << k;
    }
}

}  // namespace

TEST(Currents, EdgeWeightsMatchOracle) {
    const auto w = edge_weights(critical_beta());
    EXPECT_NEAR(w.w_odd, oracle("weight_odd_critical"), 1e-15);
    EXPECT_NEAR(w.w_even_pos, oracle("weight_even_critical"), 1e-15);
    EXPECT_EQ(w.w_zero, 1.0);
    EXPECT_THROW(edge_weights(0.0), InvalidParameter);
}

TEST(Currents, EnumerationMatchesIndependentOracle) {
    const double b = critical_beta();
    expect_matches_fixture(enumerate_trace_distribution(Graph::triangle(), b, false), "trace.triangle.single.");
    expect_matches_fixture(enumerate_trace_distribution(Graph::triangle(), b, true), "trace.triangle.double.");
    expect_matches_fixture(enumerate_trace_distribution(Graph::grid(2, 2), b, false), "trace.grid2.single.");
    expect_matches_fixture(enumerate_trace_distribution(Graph::grid(2, 2), b, true), "trace.grid2.double.");
}

TEST(Currents, EnumerationIsNormalised) {
    const auto dom = square_domain(1);
    for (bool dbl : {false, true}) {
        double total = 0.0;
        for (const auto& [k, p] : enumerate_trace_distribution(*dom, Boundary::wired, 0.5, dbl)) total += p;
        EXPECT_NEAR(total, 1.0, 1e-12);
    }
}

TEST(Currents, EnumerationRefusesLargeGraphs) {
    EXPECT_THROW(enumerate_trace_distribution(Graph::grid(4, 4), 0.4, false), OracleCapacityExceeded);
}

TEST(Currents, SuperposeTakesUnionAndSymmetricDifference) {
    CurrentTrace a{{1, 1, 0}, {1, 0, 0}}, b{{0, 1, 1}, {0, 0, 1}};
    const auto t = superpose(a, b);
    EXPECT_EQ(t.occupied, (std::vector<std::uint8_t>{1, 1, 1}));
    EXPECT_EQ(t.odd, (std::vector<std::uint8_t>{1, 0, 1}));
    CurrentTrace c{{1}, {0}};
    EXPECT_THROW(superpose(a, c), ShapeMismatch);
}

TEST(Currents, SampledTracesAreSourceless) {
    const auto dom = square_domain(6);
    for (auto bc : {Boundary::free, Boundary::wired}) {
        const auto support = make_support(*dom, bc);
        CurrentSampler single(support, critical_beta(), 9, 1, 20);
        DrcSampler drc(support, critical_beta(), 9, 20);
        for (int k = 0; k < 200; ++k) {
            ASSERT_TRUE(is_sourceless(single.next(), support));
            ASSERT_TRUE(is_sourceless(drc.next(), support));
        }
    }
}

TEST(Currents, SamplerIsDeterministicPerSeed) {
    const auto dom = square_domain(4);
    const auto a = sample_drc_trace(*dom, Boundary::wired, critical_beta(), 3);
    const auto b = sample_drc_trace(*dom, Boundary::wired, critical_beta(), 3);
    EXPECT_EQ(a.occupied, b.occupied);
    EXPECT_EQ(a.odd, b.odd);
}

TEST(Currents, WiredSampleMatchesEnumerationInTotalVariation) {
    const auto dom = square_domain(1);
    const double b = critical_beta();
    const auto support = wired_support(*dom);
    const auto exact = enumerate_trace_distribution(support, b, true);
    DrcSampler drc(support, b, 17, 100);
    std::unordered_map<std::uint64_t, std::size_t> counts;
    const std::size_t n = 200000;
    for (std::size_t k = 0; k < n; ++k) ++counts[trace_key(drc.next())];
    EXPECT_LT(total_variation(exact, counts, n), 0.02);
}

TEST(Currents, TotalVariationCountsUnseenAndSpuriousKeys) {
    TraceDistribution exact{{1, 0.5}, {2, 0.5}};
    EXPECT_DOUBLE_EQ(total_variation(exact, {{1, 5}, {2, 5}}, 10), 0.0);
    EXPECT_DOUBLE_EQ(total_variation(exact, {{1, 10}}, 10), 0.5);
    EXPECT_DOUBLE_EQ(total_variation(exact, {{3, 10}}, 10), 1.0);
}
