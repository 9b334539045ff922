#include <gtest/gtest.h>

#include "oracles.hpp"
#include "polar/polar.hpp"

using namespace polar;

namespace {

// n points around each of k well-separated unit directions in d dimensions.
Matrix blobs(std::size_t k, std::size_t n, std::size_t d, double noise, std::uint64_t seed,
             std::vector<std::size_t>& truth) {
    Rng rng(seed);
    Matrix m;
    truth.clear();
    for (std::size_t c = 0; c < k; ++c)
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<double> v(d);
            for (std::size_t j = 0; j < d; ++j) v[j] = (j == c ? 1.0 : 0.0) + noise * rng.normal();
            m.append_row(v);
            truth.push_back(c);
        }
    return m;
}

TopicAssignment assignment(std::string id, std::vector<double> distances) {
    TopicAssignment a;
    a.tweet_id = std::move(id);
    a.distances = std::move(distances);
    std::vector<double> s = a.distances;
    std::sort(s.begin(), s.end());
    a.topic = static_cast<std::size_t>(std::min_element(a.distances.begin(), a.distances.end()) - a.distances.begin());
    a.d1 = s[0];
    a.d2 = s[1];
    a.ratio = a.d2 > 0 ? a.d1 / a.d2 : 1.0;
    return a;
}

}  // namespace

TEST(Kmeans, RecoversSeparatedClustersWithMonotoneObjective) {
    std::vector<std::size_t> truth;
    const auto x = blobs(4, 50, 6, 0.1, 3, truth);
    const auto m = kmeans_cosine(x, 4, 17, 100, 3);
    std::vector<std::size_t> labels;
    for (std::size_t i = 0; i < x.rows(); ++i) labels.push_back(assign_topic("", x.row(i), m).topic);
    EXPECT_NEAR(oracle::ari(labels, truth), 1.0, 1e-12);
    EXPECT_TRUE(m.converged);
    for (std::size_t i = 1; i < m.objective_history.size(); ++i)
        EXPECT_LE(m.objective_history[i], m.objective_history[i - 1] + 1e-12);
    for (std::size_t c = 0; c < 4; ++c) EXPECT_NEAR(norm(m.centroids.row(c)), 1.0, 1e-12);
}

TEST(Kmeans, SeededAndValidated) {
    std::vector<std::size_t> truth;
    const auto x = blobs(3, 20, 4, 0.4, 5, truth);
    const auto a = kmeans_cosine(x, 3, 9), b = kmeans_cosine(x, 3, 9);
    EXPECT_EQ(a.centroids.data(), b.centroids.data());
    EXPECT_EQ(a.inertia, b.inertia);
    EXPECT_LE(kmeans_cosine(x, 3, 9, 100, 5).inertia, a.inertia + 1e-12);
    EXPECT_THROW(kmeans_cosine(x, 1, 9), PreconditionError);
    Matrix few(3, 2, 1.0);
    EXPECT_THROW(kmeans_cosine(few, 2, 9), PreconditionError);
    Matrix zero = x;
    for (double& v : zero.row(0)) v = 0.0;
    EXPECT_THROW(kmeans_cosine(zero, 3, 9), PreconditionError);
}

TEST(Assignment, RatioOfTwoNearestDistances) {
    TopicModel m;
    m.k = 2;
    m.centroids = Matrix(2, 2);
    m.centroids(0, 0) = 1;
    m.centroids(1, 1) = 1;
    const std::vector<double> e = {2.0, 1.0};
    const auto a = assign_topic("t", e, m);
    EXPECT_EQ(a.topic, 0u);
    EXPECT_NEAR(a.d1, 1 - 2 / std::sqrt(5.0), 1e-15);
    EXPECT_NEAR(a.ratio, a.d1 / a.d2, 1e-15);
    EXPECT_LE(a.ratio, 1.0);
}

TEST(Filter, NearestRankPercentile) {
    EXPECT_EQ(nearest_rank_percentile({5, 1, 4, 2, 3}, 75), 4);  // ceil(3.75) = 4th smallest
    EXPECT_EQ(nearest_rank_percentile({5, 1, 4, 2, 3}, 0), 1);
    EXPECT_EQ(nearest_rank_percentile({5, 1, 4, 2, 3}, 100), 5);
    EXPECT_EQ(nearest_rank_percentile({1, 2, 3, 4}, 75), 3);
    EXPECT_THROW(nearest_rank_percentile({}, 50), PreconditionError);
    EXPECT_THROW(nearest_rank_percentile({1}, 101), PreconditionError);
}

TEST(Filter, RemovesStrictlyAboveThreshold) {
    std::vector<TopicAssignment> as;
    for (int i = 0; i < 8; ++i) as.push_back(assignment(std::to_string(i), {0.1 * (i + 1), 1.0}));
    const auto f = filter_ambiguous(as);
    EXPECT_DOUBLE_EQ(f.threshold, 0.6);
    EXPECT_EQ(f.kept.size(), 6u);
    EXPECT_EQ(f.removed.size(), 2u);
    for (const auto& a : f.kept) EXPECT_LE(a.ratio, f.threshold);
}

TEST(Decomposition, WithinWeightsAreTweetShares) {
    // topic 0 strongly split, topic 1 balanced
    const Preprocessor pre(std::unordered_set<std::string>{});
    const Vocab v({"a", "b", "c"});
    Labels l;
    std::vector<TweetRecord> ts;
    std::map<std::string, std::size_t> topic_of;
    for (int u = 0; u < 8; ++u) {
        const std::string id = "u" + std::to_string(u);
        const bool dem = u < 4;
        l[id] = dem ? Party::Democrat : Party::Republican;
        for (int k = 0; k < 3; ++k) {
            ts.push_back({id + "t0" + std::to_string(k), id, "e", 0, dem ? "a a" : "b b"});
            topic_of[ts.back().tweet_id] = 0;
        }
        ts.push_back({id + "t1", id, "e", 0, "c a b"});
        topic_of[ts.back().tweet_id] = 1;
    }
    const auto w = within_topic_partisanship(ts, topic_of, l, v, pre);
    EXPECT_DOUBLE_EQ(w.weights.at(0), 0.75);
    EXPECT_DOUBLE_EQ(w.weights.at(1), 0.25);
    const double p0 = w.per_topic.at(0)->pi_lo, p1 = w.per_topic.at(1)->pi_lo;
    EXPECT_DOUBLE_EQ(p0, 1.0);
    EXPECT_NEAR(w.overall, 0.75 * p0 + 0.25 * p1, 1e-15);

    // every user splits tweets 3:1 across topics identically: no between-topic signal
    const auto b = between_topic_partisanship(ts, topic_of, l, 2);
    EXPECT_NEAR(b.pi_lo, 0.5, 1e-12);

    const auto lo = topic_log_odds(ts, topic_of, l, 2);
    ASSERT_EQ(lo.entries.size(), 2u);
    EXPECT_NEAR(lo.entries[0].delta, 0.0, 1e-12);
    EXPECT_EQ(lo.vocab_size, 2u);
}

TEST(Decomposition, BetweenSeesTopicChoice) {
    Labels l;
    std::vector<TweetRecord> ts;
    std::map<std::string, std::size_t> topic_of;
    for (int u = 0; u < 6; ++u) {
        const std::string id = "u" + std::to_string(u);
        l[id] = u < 3 ? Party::Democrat : Party::Republican;
        ts.push_back({id, id, "e", 0, "x"});
        topic_of[id] = u < 3 ? 0 : 1;
    }
    EXPECT_DOUBLE_EQ(between_topic_partisanship(ts, topic_of, l, 2).pi_lo, 1.0);
}

TEST(Intrusion, WordItemsHaveOneIntruderFromAnotherTopic) {
    std::vector<std::size_t> truth;
    const auto x = blobs(3, 40, 6, 0.15, 7, truth);
    const auto m = kmeans_cosine(x, 3, 1, 100, 3);
    EmbeddingTable t(6);
    for (std::size_t i = 0; i < x.rows(); ++i) t.add("s" + std::to_string(i), x.row(i));
    const auto near = nearest_stems(m, t, 10);
    ASSERT_EQ(near.size(), 3u);
    const auto items = gen_word_intrusion_items(m, t, 20, 4);
    ASSERT_EQ(items.size(), 20u);
    for (const auto& it : items) {
        ASSERT_EQ(it.candidates.size(), 6u);
        EXPECT_NE(it.topic, it.intruder_topic);
        const auto& top = near[it.topic];
        for (std::size_t c = 0; c < 6; ++c) {
            const bool in_top = std::find(top.begin(), top.end(), it.candidates[c]) != top.end();
            EXPECT_EQ(in_top, c != it.answer_index) << it.candidates[c];
        }
    }
    EXPECT_EQ(gen_word_intrusion_items(m, t, 20, 4)[5].candidates, items[5].candidates);
}

TEST(Intrusion, TweetItemsUseProximityRatio) {
    std::vector<TopicAssignment> as;
    Rng rng(3);
    for (int i = 0; i < 1200; ++i) {
        std::vector<double> d(3);
        for (std::size_t c = 0; c < 3; ++c) d[c] = c == static_cast<std::size_t>(i % 3) ? 0.05 + 0.3 * rng.uniform() : 0.6 + 0.4 * rng.uniform();
        as.push_back(assignment("t" + std::to_string(i), d));
    }
    EXPECT_DOUBLE_EQ(proximity_ratio(assignment("x", {0.2, 0.4, 0.8}), 0), 0.5);
    EXPECT_DOUBLE_EQ(proximity_ratio(assignment("x", {0.2, 0.4, 0.8}), 2), 4.0);
    const auto items = gen_tweet_intrusion_items(as, 10, 2);
    ASSERT_EQ(items.size(), 10u);
    for (const auto& it : items) {
        EXPECT_EQ(it.candidates.size(), 4u);
        EXPECT_NE(it.topic, it.intruder_topic);
        EXPECT_LT(it.answer_index, 4u);
    }
}
