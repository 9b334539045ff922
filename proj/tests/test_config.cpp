#include <gtest/gtest.h>

#include <sstream>

#include "polar/polar.hpp"

using namespace polar;

namespace {

RunConfig parse(const std::string& text, const std::filesystem::path& base = "/base") {
    std::istringstream in(text);
    return parse_config(in, "test.conf", base);
}

}  // namespace

TEST(Config, ParsesValuesAndResolvesRelativePaths) {
    const auto c = parse(
        "# comment\n"
        "tweets = data/t.jsonl\n"
        "follows = /abs/f.csv\n"
        "seed = 42\n"
        "k = 5\n"
        "alpha = 0.5\n"
        "lemmas = gun;shoot\n"
        "\n"
        "tracked_tokens = terrorist\n");
    EXPECT_EQ(c.tweets, std::filesystem::path("/base/data/t.jsonl"));
    EXPECT_EQ(c.follows, std::filesystem::path("/abs/f.csv"));
    EXPECT_EQ(c.seed, 42u);
    EXPECT_EQ(c.k, 5u);
    EXPECT_DOUBLE_EQ(c.alpha, 0.5);
    EXPECT_EQ(c.lemmas, (std::vector<std::string>{"gun", "shoot"}));
    EXPECT_EQ(c.tracked_tokens, std::vector<std::string>{"terrorist"});
    EXPECT_EQ(c.min_count, 50);
    EXPECT_FALSE(c.oracle);
}

TEST(Config, RejectsUnknownDuplicateAndMalformed) {
    EXPECT_THROW(parse("colour = red\n"), ConfigError);
    EXPECT_THROW(parse("k = 3\nk = 4\n"), ConfigError);
    EXPECT_THROW(parse("k\n"), ConfigError);
    EXPECT_THROW(parse("k = three\n"), ConfigError);
    EXPECT_THROW(parse("k = 1\n"), ConfigError);
    EXPECT_THROW(parse("percentile = 120\n"), ConfigError);
    EXPECT_THROW(parse("n_dem = 10\n"), ConfigError);
    try {
        parse("seed = 1\nbogus = 2\n");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("test.conf:2"), std::string::npos);
    }
}

TEST(Config, SeedRequiredForStochasticStages) {
    EXPECT_THROW(parse("k = 3\n").require_seed("topics"), ConfigError);
    EXPECT_EQ(parse("seed = 9\n").require_seed("topics"), 9u);
}

TEST(Config, OracleBlock) {
    const auto c = parse("seed = 3\nphi_dem = 0.6,0.4\nphi_rep = 0.4,0.6\nn_dem = 10\nn_rep = 12\n");
    ASSERT_TRUE(c.oracle);
    EXPECT_EQ(c.oracle->n_rep, 12u);
    EXPECT_EQ(c.oracle->seed, 3u);
    EXPECT_THROW(parse("phi_dem = 0.6,0.3\nphi_rep = 0.4,0.6\n"), ConfigError);
}

TEST(Config, DemoConfigsLoad) {
    const auto toy = load_config(POLAR_SOURCE_DIR "/demo/toy.conf");
    EXPECT_TRUE(toy.seed);
    EXPECT_TRUE(std::filesystem::exists(toy.tweets));
    const auto orc = load_config(POLAR_SOURCE_DIR "/demo/oracle.conf");
    EXPECT_TRUE(orc.oracle);
    EXPECT_THROW(load_config("/nonexistent/x.conf"), ConfigError);
}
