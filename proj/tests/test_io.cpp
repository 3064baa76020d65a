#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "xdrc/xdrc.hpp"

using namespace xdrc;
namespace fs = std::filesystem;

namespace {

Config schema() { return Config(Config::Schema{{"seed", "1"}, {"alpha", "0.5"}, {"points", ""}, {"flag", "false"}}); }

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST(Config, ParsesKnownKeysAndComments) {
    auto c = schema();
    c.parse_text("seed = 12  # comment\n\nalpha=pi\npoints=0.1:0.2; 0.3:0.4\n");
    EXPECT_EQ(c.integer("seed"), 12);
    EXPECT_DOUBLE_EQ(c.real("alpha"), std::numbers::pi);
    ASSERT_EQ(c.points("points").size(), 2u);
    EXPECT_DOUBLE_EQ(c.points("points")[1].second, 0.4);
    EXPECT_FALSE(c.flag("flag"));
}

TEST(Config, RejectsUnknownDuplicateAndMalformed) {
    auto c = schema();
    EXPECT_THROW(c.parse_text("sede=3\n"), ConfigError);
    auto d = schema();
    EXPECT_THROW(d.parse_text("seed=3\nseed=4\n"), ConfigError);
    auto e = schema();
    EXPECT_THROW(e.parse_text("seed\n"), ConfigError);
    auto f = schema();
    f.set("seed=abc");
    EXPECT_THROW(f.integer("seed"), ConfigError);
    f.set("alpha=1.5x");
    EXPECT_THROW(f.real("alpha"), ConfigError);
    f.set("flag=maybe");
    EXPECT_THROW(f.flag("flag"), ConfigError);
    EXPECT_THROW(f.str("missing"), ConfigError);
}

TEST(Config, HashDependsOnResolvedValuesOnly) {
    auto a = schema(), b = schema(), c = schema();
    a.parse_text("alpha=0.7\nseed=2\n");
    b.parse_text("seed = 2\n# reordered\nalpha = 0.7\n");
    c.parse_text("seed=3\n");
    EXPECT_EQ(a.hash(), b.hash());
    EXPECT_NE(a.hash(), c.hash());
    EXPECT_EQ(a.hash(), fnv1a64(a.canonical()));
}

TEST(Io, Fnv1aReferenceValues) {
    EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
    EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
    EXPECT_EQ(hex64(0xabcULL), "0000000000000abc");
}

TEST(Io, FormatDoubleRoundTrips) {
    for (double x : {0.1, 1.0 / 3.0, 1e-300, 12345.678, -2.5}) EXPECT_EQ(std::stod(format_double(x)), x);
    EXPECT_EQ(format_double(0.5), "0.5");
}

TEST(Io, ParallelMapIsIndependentOfWorkers) {
    const std::function<double(std::size_t)> task = [](std::size_t i) {
        Rng r(99, i);
        return r.uniform();
    };
    EXPECT_EQ(parallel_map<double>(64, 1, task), parallel_map<double>(64, 4, task));
    const std::function<int(std::size_t)> failing = [](std::size_t i) -> int {
        if (i == 3) throw InvalidParameter("three");
        return 0;
    };
    EXPECT_THROW(parallel_map<int>(8, 2, failing), InvalidParameter);
}

TEST(Io, CsvRowsMustMatchHeader) {
    CsvTable t({"a", "b"});
    t.row({"1", "2"});
    EXPECT_EQ(t.text(), "a,b\n1,2\n");
    EXPECT_THROW(t.row({"1"}), ContractViolation);
}

TEST(Io, ArtifactSetWritesManifest) {
    const auto dir = fs::temp_directory_path() / "xdrc_artifact_test";
    fs::remove_all(dir);
    auto c = schema();
    c.set("seed=5");
    ArtifactSet out(dir, "demo", c);
    CsvTable t({"x"});
    t.row({"1"});
    out.add_csv("table.csv", t);
    out.add_seed(5);
    out.commit(0);
    EXPECT_EQ(slurp(dir / "table.csv"), "x\n1\n");
    const auto m = nlohmann::json::parse(slurp(dir / "manifest.json"));
    EXPECT_EQ(m["command"], "demo");
    EXPECT_EQ(m["config_hash"], "fnv1a64:" + hex64(c.hash()));
    EXPECT_EQ(m["seeds"][0], 5);
    EXPECT_EQ(m["csv_schemas"]["table.csv"]["columns"][0], "x");
    EXPECT_FALSE(m.contains("timestamp"));
    for (const auto& e : fs::directory_iterator(dir)) EXPECT_EQ(e.path().filename().string().rfind(".staging", 0), std::string::npos);
    fs::remove_all(dir);
}
