#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() / ("xdrc_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    int run(const std::string& args) const {
        const std::string cmd = "cd '" + dir_.string() + "' && '" XDRC_CLI "' " + args + " > log.txt 2>&1";
        const int status = std::system(cmd.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }
    std::string read(const std::string& rel) const {
        std::ifstream in(dir_ / rel);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }
    bool exists(const std::string& rel) const { return fs::exists(dir_ / rel); }

    fs::path dir_;
};

}  // namespace

TEST_F(Cli, SwitchingFixturePasses) {
    ASSERT_EQ(run("verify-switching '" XDRC_FIXTURE_DIR "/verify_switching_3x3.cfg' --set out=sw"), 0) << read("log.txt");
    const auto j = nlohmann::json::parse(read("sw/switching.json"));
    EXPECT_TRUE(j["pass"].get<bool>());
    const auto m = nlohmann::json::parse(read("sw/manifest.json"));
    EXPECT_EQ(m["command"], "verify-switching");
    EXPECT_EQ(m["exit_status"], 0);
    EXPECT_EQ(m["config"]["seed"], "11");
}

TEST_F(Cli, OutputIsDeterministic) {
    const std::string args = "--set side=8 --set samples=20 --set warmup=20 --set seed=3";
    ASSERT_EQ(run("decompose " + args + " --set out=a"), 0) << read("log.txt");
    ASSERT_EQ(run("decompose " + args + " --set out=b"), 0) << read("log.txt");
    EXPECT_EQ(read("a/decomposition.csv"), read("b/decomposition.csv"));
    EXPECT_FALSE(read("a/decomposition.csv").empty());
    EXPECT_NE(read("a/manifest.json"), read("b/manifest.json"));
}

TEST_F(Cli, WorkerCountDoesNotChangeResults) {
    const std::string args = "--set triples=12 --set driving=constant --set horizon=0.5";
    ASSERT_EQ(run("loewner-sweep " + args + " --set workers=1 --set out=one"), 0) << read("log.txt");
    ASSERT_EQ(run("loewner-sweep " + args + " --set workers=3 --set out=three"), 0) << read("log.txt");
    EXPECT_EQ(read("one/loewner.csv"), read("three/loewner.csv"));
}

TEST_F(Cli, UnknownKeyIsConfigErrorWithoutArtifacts) {
    EXPECT_EQ(run("sample-coupling --set out=bad --set sampels=3"), 4);
    EXPECT_FALSE(exists("bad"));
    std::ofstream(dir_ / "broken.cfg") << "side=3\nside=4\n";
    EXPECT_EQ(run("sample-coupling broken.cfg --set out=bad"), 4);
    EXPECT_FALSE(exists("bad"));
    EXPECT_EQ(run("sample-coupling --set out=bad --set samples=many"), 4);
    EXPECT_FALSE(exists("bad"));
}

TEST_F(Cli, UnknownCommandIsUsageError) { EXPECT_EQ(run("no-such-command"), 1); }

TEST_F(Cli, OracleCapacityExitCode) {
    EXPECT_EQ(run("oracle-enumerate --set graph=domain --set side=4 --set out=cap"), 5);
    EXPECT_FALSE(exists("cap"));
    ASSERT_EQ(run("oracle-enumerate --set graph=triangle --set boundary=free --set out=tri"), 0) << read("log.txt");
    EXPECT_NE(read("tri/trace_distribution.csv").find('\n'), std::string::npos);
}

TEST_F(Cli, CouplingSamplesPassInvariants) {
    ASSERT_EQ(run("sample-coupling --set side=6 --set samples=50 --set warmup=20 --set out=c"), 0) << read("log.txt");
    EXPECT_TRUE(exists("c/coupling.csv"));
    EXPECT_TRUE(exists("c/summary.json"));
}
