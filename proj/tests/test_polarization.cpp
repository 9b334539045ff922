#include <gtest/gtest.h>

#include "oracles.hpp"
#include "polar/polar.hpp"

using namespace polar;

namespace {

UserTokenCounts counts_of(const std::map<std::string, std::map<std::uint32_t, std::int64_t>>& rows, const Labels& labels,
                          std::size_t v) {
    return make_counts(rows, labels, v);
}

}  // namespace

TEST(LeaveOut, HandComputedExample) {
    // two tokens, two users per party
    const Labels l = {{"d1", Party::Democrat}, {"d2", Party::Democrat}, {"r1", Party::Republican}, {"r2", Party::Republican}};
    const auto c = counts_of({{"d1", {{0, 3}, {1, 1}}}, {"d2", {{0, 2}, {1, 2}}}, {"r1", {{0, 1}, {1, 3}}}, {"r2", {{0, 2}, {1, 2}}}},
                             l, 2);
    const auto est = leave_out(c);
    // d1: others D = d2 (2,2)/4, R = (3,5)/8 -> rho0 = .5/(.5+.375), rho1 = .5/(.5+.625)
    const double d1 = 0.75 * (0.5 / 0.875) + 0.25 * (0.5 / 1.125);
    EXPECT_NEAR(est.per_user.at("d1"), d1, 1e-15);
    EXPECT_NEAR(est.pi_lo, oracle::naive_leave_out(c), 1e-15);
    EXPECT_EQ(est.n_dem, 2u);
    EXPECT_EQ(est.n_rep, 2u);
    EXPECT_EQ(est.vocab_size_effective, 2u);
}

TEST(LeaveOut, MatchesNaiveOracleOnRandomCorpora) {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        Rng rng(seed, 3);
        const auto c = oracle::random_counts(rng, 4 + rng.below(25), 5 + rng.below(60), 6, 0.05 + 0.5 * rng.uniform());
        const auto est = try_leave_out(c);
        if (!est) continue;
        EXPECT_NEAR(est->pi_lo, oracle::naive_leave_out(c), 1e-12) << seed;
    }
}

TEST(LeaveOut, DropsSingleUserTokensAndEmptiedUsers) {
    const Labels l = {{"d1", Party::Democrat}, {"d2", Party::Democrat}, {"d3", Party::Democrat},
                      {"r1", Party::Republican}, {"r2", Party::Republican}};
    // token 2 is used only by d3, which then has nothing left
    const auto c = counts_of({{"d1", {{0, 1}, {1, 1}}}, {"d2", {{0, 2}}}, {"d3", {{2, 5}}}, {"r1", {{1, 2}}}, {"r2", {{0, 1}, {1, 1}}}},
                             l, 3);
    const auto est = leave_out(c);
    EXPECT_EQ(est.vocab_size_effective, 2u);
    EXPECT_EQ(est.dropped_users, std::vector<std::string>{"d3"});
    EXPECT_EQ(est.n_dem, 2u);
    EXPECT_NEAR(est.pi_lo, oracle::naive_leave_out(c), 1e-15);
}

TEST(LeaveOut, Preconditions) {
    const Labels l = {{"d1", Party::Democrat}, {"r1", Party::Republican}, {"r2", Party::Republican}};
    const auto c = counts_of({{"d1", {{0, 1}}}, {"r1", {{0, 1}}}, {"r2", {{0, 1}}}}, l, 1);
    EXPECT_THROW(leave_out(c), PreconditionError);
    EXPECT_FALSE(try_leave_out(c));
    auto bad = c;
    bad.labels[0] = Party::Unassigned;
    EXPECT_THROW(leave_out(bad), PreconditionError);
    auto empty = c;
    empty.rows[0].clear();
    empty.totals[0] = 0;
    EXPECT_THROW(leave_out(empty), PreconditionError);
}

TEST(LeaveOut, IdenticalDistributionsNearHalfAndBounded) {
    GenerativeSpec s;
    s.phi_dem = s.phi_rep = {0.1, 0.2, 0.3, 0.4};
    s.n_dem = s.n_rep = 300;
    s.seed = 4;
    const auto est = leave_out(generate(s).counts);
    EXPECT_NEAR(est.pi_lo, 0.5, 0.01);
    for (const auto& [u, v] : est.per_user) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
    }
}

TEST(LeaveOut, JobsDoNotChangeBits) {
    GenerativeSpec s;
    s.phi_dem = {0.5, 0.3, 0.2};
    s.phi_rep = {0.2, 0.3, 0.5};
    s.n_dem = s.n_rep = 150;
    s.seed = 8;
    const auto c = generate(s).counts;
    const auto a = leave_out(c, 1), b = leave_out(c, 4);
    EXPECT_EQ(a.pi_lo, b.pi_lo);
    EXPECT_EQ(a.per_user, b.per_user);
}

TEST(LeaveOut, InvariantToUserOrderAndPartySwap) {
    Rng rng(21);
    const auto c = oracle::random_counts(rng, 12, 30);
    const double base = leave_out(c).pi_lo;
    auto swapped = c;
    for (auto& p : swapped.labels) p = opposite(p);
    EXPECT_NEAR(leave_out(swapped).pi_lo, base, 1e-14);
    // reversed user order
    UserTokenCounts r = c;
    std::reverse(r.users.begin(), r.users.end());
    std::reverse(r.labels.begin(), r.labels.end());
    std::reverse(r.rows.begin(), r.rows.end());
    std::reverse(r.totals.begin(), r.totals.end());
    EXPECT_NEAR(leave_out(r).pi_lo, base, 1e-14);
}

TEST(Baseline, ShufflesAreSeededAndNearHalf) {
    GenerativeSpec s;
    s.phi_dem = {0.7, 0.3};
    s.phi_rep = {0.3, 0.7};
    s.n_dem = s.n_rep = 200;
    s.seed = 2;
    const auto c = generate(s).counts;
    const auto a = random_assignment_baseline(c, 10, 5), b = random_assignment_baseline(c, 10, 5);
    EXPECT_EQ(a, b);
    EXPECT_NEAR(stats::mean(a), 0.5, 0.01);
    EXPECT_GT(leave_out(c).pi_lo, 0.55);
}

TEST(Temporal, DaysBucketedFromEventDate) {
    EventMeta e;
    e.event_id = "e";
    e.day = 100;
    const Preprocessor pre(std::unordered_set<std::string>{});
    const Vocab v({"a", "b"});
    Labels l;
    std::vector<TweetRecord> ts;
    for (int u = 0; u < 6; ++u) {
        const std::string id = "u" + std::to_string(u);
        l[id] = u < 3 ? Party::Democrat : Party::Republican;
        ts.push_back({id + "x", id, "e", 100 * 86400 + 10, u < 3 ? "a a b" : "b b a"});
        ts.push_back({id + "y", id, "e", 102 * 86400 + 10, "a b"});
    }
    ts.push_back({"late", "u0", "e", 130 * 86400, "a"});
    const auto series = temporal_series(ts, l, v, pre, e, 4);
    ASSERT_EQ(series.size(), 4u);
    EXPECT_TRUE(series[0].estimate);
    EXPECT_FALSE(series[1].estimate);
    EXPECT_TRUE(series[2].estimate);
    EXPECT_GT(series[0].estimate->pi_lo, 0.5);
}

TEST(Multiday, RemovesUsersActiveOnSeveralUtcDays) {
    const Labels l = {{"a", Party::Democrat}, {"b", Party::Republican}, {"c", Party::Unassigned}};
    const std::vector<TweetRecord> ts = {{"1", "a", "e", 86400 - 1, "x"}, {"2", "a", "e", 86400, "x"},
                                         {"3", "b", "e", 5, "x"},         {"4", "b", "e", 86000, "x"},
                                         {"5", "c", "e", 0, "x"},         {"6", "c", "e", 3 * 86400, "x"}};
    const auto [kept, rep] = exclude_multiday_users(ts, l);
    EXPECT_EQ(rep.removed, (std::vector<std::string>{"a", "c"}));
    EXPECT_EQ(kept.size(), 2u);
    EXPECT_EQ(rep.users_total, 2u);
    EXPECT_DOUBLE_EQ(rep.user_fraction, 0.5);
    EXPECT_DOUBLE_EQ(rep.tweet_fraction, 0.5);
}

TEST(FollowRegression, RecoversPlantedEffects) {
    Rng rng(31);
    std::map<std::string, double> y, total, own;
    std::map<std::string, std::string> ev;
    for (int i = 0; i < 400; ++i) {
        const std::string k = "u" + std::to_string(i);
        total[k] = 1 + static_cast<double>(rng.below(20));
        own[k] = std::floor(total[k] * rng.uniform());
        ev[k] = i % 2 ? "e1" : "e2";
        y[k] = 0.5 + 0.01 * own[k] + (i % 2 ? 0.02 : 0.0) + 0.01 * rng.normal();
    }
    const auto r = user_follow_regression(y, total, own, ev);
    EXPECT_EQ(r.names.size(), 4u);
    EXPECT_LT(r.p("followed_own_party"), 1e-6);
    EXPECT_GT(r.coef("followed_own_party"), 0.0);
    EXPECT_LT(r.p("event[e2]"), 1e-6);
    EXPECT_LT(r.coef("event[e2]"), 0.0);
    ev.erase("u0");
    EXPECT_THROW(user_follow_regression(y, total, own, ev), PreconditionError);
}
