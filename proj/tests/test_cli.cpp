#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "polar/polar.hpp"

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
    const std::string cmd = std::string(POLAR_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("polar_cli_" + name + "_" + std::to_string(getpid()));
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

TEST(Cli, OracleDemoWritesEstimate) {
    const auto out = scratch("oracle");
    ASSERT_EQ(run("oracle --config " POLAR_SOURCE_DIR "/demo/oracle.conf --out " + out.string()), 0);
    const auto table = polar::csv::read_table((out / "oracle" / "estimate.csv").string());
    ASSERT_EQ(table.rows.size(), 1u);
    EXPECT_TRUE(fs::exists(out / "oracle" / "baseline.csv"));

    // same seed, same bytes
    const auto again = scratch("oracle_again");
    ASSERT_EQ(run("oracle --config " POLAR_SOURCE_DIR "/demo/oracle.conf --out " + again.string()), 0);
    EXPECT_EQ(slurp(out / "oracle" / "estimate.csv"), slurp(again / "oracle" / "estimate.csv"));
    EXPECT_EQ(slurp(out / "oracle" / "baseline.csv"), slurp(again / "oracle" / "baseline.csv"));
    fs::remove_all(out);
    fs::remove_all(again);
}

TEST(Cli, MissingArtifactsExitTwo) {
    const auto dir = scratch("missing");
    std::ofstream(dir / "tweets.jsonl").close();
    std::ofstream(dir / "follows.csv") << "user_id,handle\n";
    std::ofstream(dir / "run.conf") << "tweets = tweets.jsonl\nfollows = follows.csv\nseed = 1\nout = out\n";
    EXPECT_EQ(run("polarize --config " + (dir / "run.conf").string()), 2);
    // an empty tweet file passes ingest, then polarize has nothing to read
    EXPECT_EQ(run("ingest --config " + (dir / "run.conf").string()), 0);
    EXPECT_TRUE(fs::exists(dir / "out" / "ingest" / "tweets.jsonl"));
    EXPECT_EQ(run("vocab --config " + (dir / "run.conf").string()), 2);
    EXPECT_EQ(run("polarize --config " + (dir / "run.conf").string()), 2);
    fs::remove_all(dir);
}

TEST(Cli, ConfigProblemsExitThree) {
    const auto dir = scratch("config");
    std::ofstream(dir / "bad.conf") << "colour = red\n";
    EXPECT_EQ(run("polarize --config " + (dir / "bad.conf").string()), 3);
    EXPECT_EQ(run("polarize"), 3);
    EXPECT_EQ(run("no-such-stage"), 3);
    EXPECT_EQ(run("polarize --config " + (dir / "absent.conf").string()), 3);
    fs::remove_all(dir);
}

TEST(Cli, HelpExitsZero) { EXPECT_EQ(run("--help"), 0); }
