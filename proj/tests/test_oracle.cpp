#include <gtest/gtest.h>

#include <filesystem>

#include "oracles.hpp"
#include "polar/polar.hpp"

using namespace polar;

TEST(Oracle, TruePartisanshipClosedForm) {
    EXPECT_NEAR(true_partisanship({0.6, 0.4}, {0.4, 0.6}), 0.52, 1e-15);
    EXPECT_DOUBLE_EQ(true_partisanship({0.5, 0.5}, {0.5, 0.5}), 0.5);
    EXPECT_DOUBLE_EQ(true_partisanship({1.0, 0.0}, {0.0, 1.0}), 1.0);
    Rng rng(3);
    for (int i = 0; i < 200; ++i) {
        std::vector<double> d(6), r(6);
        double sd = 0, sr = 0;
        for (std::size_t j = 0; j < 6; ++j) {
            d[j] = rng.uniform();
            r[j] = rng.uniform();
            sd += d[j];
            sr += r[j];
        }
        for (std::size_t j = 0; j < 6; ++j) {
            d[j] /= sd;
            r[j] /= sr;
        }
        EXPECT_GE(true_partisanship(d, r), 0.5);
    }
}

TEST(Oracle, SpecValidation) {
    GenerativeSpec s;
    s.phi_dem = {0.5, 0.5};
    s.phi_rep = {0.5, 0.4};
    EXPECT_THROW(s.validate(), PreconditionError);
    s.phi_rep = {0.5};
    EXPECT_THROW(s.validate(), PreconditionError);
    s.phi_rep = {0.5, 0.5};
    s.topic_of_token = std::vector<std::size_t>{0};
    EXPECT_THROW(s.validate(), PreconditionError);
}

TEST(Oracle, GenerationIsSeededAndSized) {
    GenerativeSpec s;
    s.phi_dem = {0.6, 0.4};
    s.phi_rep = {0.4, 0.6};
    s.n_dem = 30;
    s.n_rep = 20;
    s.tokens_per_user = 25;
    s.tokens_per_tweet = 10;
    s.seed = 5;
    const auto a = generate(s), b = generate(s);
    EXPECT_EQ(a.tweets, b.tweets);
    EXPECT_EQ(a.counts.rows, b.counts.rows);
    EXPECT_EQ(a.counts.size(), 50u);
    EXPECT_EQ(a.tweets.size(), 50u * 3u);
    for (auto t : a.counts.totals) EXPECT_EQ(t, 25);
    std::size_t dems = 0;
    for (const auto& [u, p] : a.labels) dems += p == Party::Democrat;
    EXPECT_EQ(dems, 30u);
    s.seed = 6;
    EXPECT_NE(generate(s).counts.rows, a.counts.rows);
}

TEST(Oracle, EstimatorConvergesToTruth) {
    GenerativeSpec s;
    s.phi_dem = {0.30, 0.20, 0.15, 0.10, 0.10, 0.05, 0.05, 0.05};
    s.phi_rep = {0.05, 0.10, 0.10, 0.15, 0.10, 0.20, 0.15, 0.15};
    s.n_dem = s.n_rep = 500;
    s.tokens_per_user = 400;
    double err = 0.0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        s.seed = seed;
        err += std::abs(leave_out(generate(s).counts).pi_lo - true_partisanship(s));
    }
    EXPECT_LT(err / 5.0, 0.005);
}

TEST(Oracle, TopicStructureRestrictsTokens) {
    GenerativeSpec s;
    s.phi_dem = {0.4, 0.1, 0.25, 0.25};
    s.phi_rep = {0.1, 0.4, 0.25, 0.25};
    s.topic_of_token = std::vector<std::size_t>{0, 0, 1, 1};
    s.n_dem = s.n_rep = 10;
    s.tokens_per_user = 30;
    s.seed = 1;
    const auto g = generate(s);
    ASSERT_EQ(g.tweet_topics.size(), g.tweets.size());
    for (std::size_t i = 0; i < g.tweets.size(); ++i)
        for (auto tok : g.tweet_tokens[i]) EXPECT_EQ((*s.topic_of_token)[tok], g.tweet_topics[i]);
}

TEST(Oracle, ToyCorpusFilesWritten) {
    const auto dir = std::filesystem::temp_directory_path() / "polar_toy_test";
    std::filesystem::remove_all(dir);
    const auto info = make_toy_corpus(dir, 7, 600, 80);
    EXPECT_EQ(info.tweets, 600u);
    for (const char* f : {"tweets.jsonl", "follows.csv", "events.csv", "pronouns.txt"})
        EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
    std::ifstream in(dir / "tweets.jsonl");
    EXPECT_EQ(read_tweets(in, TweetFormat::jsonl).tweets.size(), 600u);
    std::filesystem::remove_all(dir);
}
