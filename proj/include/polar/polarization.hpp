#pragma once

// Leave-out phrase partisanship and the analyses built on it: label-shuffle
// baselines, per-day series, multi-day-user exclusion and the follow regression.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "polar/corpus.hpp"
#include "polar/error.hpp"
#include "polar/linalg.hpp"
#include "polar/rng.hpp"
#include "polar/stats.hpp"
#include "polar/textprep.hpp"

namespace polar {

struct PolarizationEstimate {
    double pi_lo = 0.5;
    double mean_dem = 0.0;
    double mean_rep = 0.0;
    std::map<std::string, double> per_user;  // q_i . rho_-i (Democrats) or q_i . (1 - rho_-i) (Republicans)
    std::size_t n_dem = 0;
    std::size_t n_rep = 0;
    std::size_t vocab_size_effective = 0;    // tokens used by at least two users
    std::vector<std::string> dropped_users;  // no retained tokens left
};

namespace detail {

struct LeaveOutInput {
    std::vector<std::size_t> users;  // indices into counts
    std::vector<char> keep_token;
    std::vector<std::int64_t> mass;  // m_i over retained tokens, per counts row
    std::size_t n_tokens = 0;
};

// Token and user filtering shared by leave_out and its feasibility check.
inline LeaveOutInput leave_out_input(const UserTokenCounts& counts) {
    if (counts.labels.size() != counts.size() || counts.rows.size() != counts.size())
        throw PreconditionError("leave_out: inconsistent UserTokenCounts");
    std::vector<std::uint32_t> speakers(counts.vocab_size, 0);
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (counts.labels[i] == Party::Unassigned)
            throw PreconditionError("leave_out: user '" + counts.users[i] + "' has no party");
        std::int64_t m = 0;
        for (const auto& [j, c] : counts.rows[i]) {
            if (j >= counts.vocab_size) throw PreconditionError("leave_out: token index out of range");
            if (c < 0) throw PreconditionError("leave_out: negative count");
            if (c > 0) ++speakers[j];
            m += c;
        }
        if (m == 0) throw PreconditionError("leave_out: user '" + counts.users[i] + "' has no tokens");
    }
    LeaveOutInput in;
    in.keep_token.assign(counts.vocab_size, 0);
    for (std::size_t j = 0; j < counts.vocab_size; ++j)
        if (speakers[j] >= 2) {
            in.keep_token[j] = 1;
            ++in.n_tokens;
        }
    in.mass.assign(counts.size(), 0);
    for (std::size_t i = 0; i < counts.size(); ++i) {
        for (const auto& [j, c] : counts.rows[i])
            if (in.keep_token[j]) in.mass[i] += c;
        if (in.mass[i] > 0) in.users.push_back(i);
    }
    return in;
}

}  // namespace detail

/// Leave-out estimate of partisanship.
///
/// Tokens used by fewer than two users (over the whole input) are dropped
/// once; users left without tokens are then dropped. For each user i the
/// opposite-or-own party frequencies are recomputed without i, and
/// rho_-i(j) = q^{D\i}_j / (q^{D\i}_j + q^{R\i}_j); tokens where both are
/// zero do not contribute to that user's dot product. Per-user folds touch
/// only the user's nonzero entries and are reduced in user order, so any
/// `jobs` value gives the same bits.
inline PolarizationEstimate leave_out(const UserTokenCounts& counts, unsigned jobs = 1) {
    const auto in = detail::leave_out_input(counts);
    PolarizationEstimate est;
    est.vocab_size_effective = in.n_tokens;
    for (std::size_t i = 0; i < counts.size(); ++i)
        if (in.mass[i] == 0) est.dropped_users.push_back(counts.users[i]);
    for (std::size_t i : in.users) (counts.labels[i] == Party::Democrat ? est.n_dem : est.n_rep)++;
    if (est.n_dem < 2 || est.n_rep < 2)
        throw PreconditionError("leave_out: need at least two users per party (have " + std::to_string(est.n_dem) +
                                " D, " + std::to_string(est.n_rep) + " R)");

    // group sums over retained tokens
    std::vector<std::int64_t> sum_d(counts.vocab_size, 0), sum_r(counts.vocab_size, 0);
    std::int64_t mass_d = 0, mass_r = 0;
    for (std::size_t i : in.users) {
        const bool dem = counts.labels[i] == Party::Democrat;
        auto& s = dem ? sum_d : sum_r;
        for (const auto& [j, c] : counts.rows[i])
            if (in.keep_token[j]) s[j] += c;
        (dem ? mass_d : mass_r) += in.mass[i];
    }

    std::vector<double> value(in.users.size());
    auto fold = [&](std::size_t u) {
        const std::size_t i = in.users[u];
        const bool dem = counts.labels[i] == Party::Democrat;
        const std::int64_t m = in.mass[i];
        const double md = static_cast<double>(dem ? mass_d - m : mass_d);
        const double mr = static_cast<double>(dem ? mass_r : mass_r - m);
        double acc = 0.0;
        for (const auto& [j, c] : counts.rows[i]) {
            if (!in.keep_token[j] || c == 0) continue;
            const double qd = static_cast<double>(dem ? sum_d[j] - c : sum_d[j]) / md;
            const double qr = static_cast<double>(dem ? sum_r[j] : sum_r[j] - c) / mr;
            if (qd + qr == 0.0) continue;
            const double own = dem ? qd : qr;
            acc += (static_cast<double>(c) / static_cast<double>(m)) * (own / (qd + qr));
        }
        value[u] = acc;
    };
    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(in.users.size())));
    if (jobs == 1) {
        for (std::size_t u = 0; u < in.users.size(); ++u) fold(u);
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < jobs; ++t)
            pool.emplace_back([&, t] {
                for (std::size_t u = t; u < in.users.size(); u += jobs) fold(u);
            });
        for (auto& th : pool) th.join();
    }

    double total_d = 0.0, total_r = 0.0;
    for (std::size_t u = 0; u < in.users.size(); ++u) {
        const std::size_t i = in.users[u];
        (counts.labels[i] == Party::Democrat ? total_d : total_r) += value[u];
        est.per_user.emplace(counts.users[i], value[u]);
    }
    est.mean_dem = total_d / static_cast<double>(est.n_dem);
    est.mean_rep = total_r / static_cast<double>(est.n_rep);
    est.pi_lo = 0.5 * (est.mean_dem + est.mean_rep);
    return est;
}

/// leave_out, or nullopt when the corpus has fewer than two usable users in a party.
inline std::optional<PolarizationEstimate> try_leave_out(const UserTokenCounts& counts, unsigned jobs = 1) {
    const auto in = detail::leave_out_input(counts);
    std::size_t nd = 0, nr = 0;
    for (std::size_t i : in.users) (counts.labels[i] == Party::Democrat ? nd : nr)++;
    if (nd < 2 || nr < 2) return std::nullopt;
    return leave_out(counts, jobs);
}

/// pi_LO under `trials` random permutations of the party labels (party sizes
/// preserved). Trial t draws from Rng(seed, t).
inline std::vector<double> random_assignment_baseline(const UserTokenCounts& counts, std::size_t trials,
                                                      std::uint64_t seed, unsigned jobs = 1) {
    if (trials < 1) throw PreconditionError("random_assignment_baseline: trials must be >= 1");
    std::vector<double> out;
    out.reserve(trials);
    UserTokenCounts shuffled = counts;
    for (std::size_t t = 0; t < trials; ++t) {
        Rng rng(seed, t);
        shuffled.labels = counts.labels;
        rng.shuffle(shuffled.labels);
        out.push_back(leave_out(shuffled, jobs).pi_lo);
    }
    return out;
}

struct DayEstimate {
    int day = 0;
    std::optional<PolarizationEstimate> estimate;  // nullopt: fewer than two users per party
};

/// One leave-out estimate per day bucket d in [0, days), bucket d covering
/// [event date + d, event date + d + 1) in UTC.
inline std::vector<DayEstimate> temporal_series(const std::vector<TweetRecord>& tweets, const Labels& labels,
                                                const Vocab& vocab, const Preprocessor& pre, const EventMeta& event,
                                                int days = 10, unsigned jobs = 1) {
    std::vector<std::vector<TweetRecord>> by_day(static_cast<std::size_t>(std::max(days, 0)));
    for (const auto& t : tweets) {
        const std::int64_t d = event.day_of(t.timestamp);
        if (d >= 0 && d < days) by_day[static_cast<std::size_t>(d)].push_back(t);
    }
    std::vector<DayEstimate> out;
    for (int d = 0; d < days; ++d) {
        DayEstimate de{d, std::nullopt};
        if (!by_day[d].empty()) de.estimate = try_leave_out(count_user_tokens(by_day[d], vocab, pre, labels), jobs);
        out.push_back(std::move(de));
    }
    return out;
}

struct MultidayReport {
    std::size_t users_total = 0;
    std::size_t users_removed = 0;
    std::size_t tweets_total = 0;
    std::size_t tweets_removed = 0;
    double user_fraction = 0.0;
    double tweet_fraction = 0.0;
    std::vector<std::string> removed;
};

/// Drops every tweet of users who tweeted on two or more UTC calendar days.
/// Fractions are over partisan users and their tweets when `labels` is
/// non-empty, otherwise over everyone.
inline std::pair<std::vector<TweetRecord>, MultidayReport> exclude_multiday_users(
    const std::vector<TweetRecord>& tweets, const Labels& labels) {
    auto floor_day = [](std::int64_t ts) { return ts >= 0 ? ts / 86400 : -((-ts + 86399) / 86400); };
    std::map<std::string, std::set<std::int64_t>> days;
    for (const auto& t : tweets) days[t.user_id].insert(floor_day(t.timestamp));
    auto counted = [&](const std::string& user) {
        if (labels.empty()) return true;
        auto it = labels.find(user);
        return it != labels.end() && it->second != Party::Unassigned;
    };
    MultidayReport rep;
    std::set<std::string> removed;
    for (const auto& [user, ds] : days) {
        if (ds.size() >= 2) {
            removed.insert(user);
            rep.removed.push_back(user);
        }
        if (counted(user)) {
            ++rep.users_total;
            if (ds.size() >= 2) ++rep.users_removed;
        }
    }
    std::vector<TweetRecord> kept;
    for (const auto& t : tweets) {
        const bool drop = removed.count(t.user_id) > 0;
        if (counted(t.user_id)) {
            ++rep.tweets_total;
            if (drop) ++rep.tweets_removed;
        }
        if (!drop) kept.push_back(t);
    }
    if (rep.users_total) rep.user_fraction = static_cast<double>(rep.users_removed) / rep.users_total;
    if (rep.tweets_total) rep.tweet_fraction = static_cast<double>(rep.tweets_removed) / rep.tweets_total;
    return {std::move(kept), std::move(rep)};
}

/// OLS of the standardized per-user leave-out value on followed_total and
/// followed_own_party with event dummies (first event id, lexicographically,
/// is the reference). All maps are keyed by the same observation ids.
inline stats::RegressionReport user_follow_regression(const std::map<std::string, double>& per_user,
                                                      const std::map<std::string, double>& followed_total,
                                                      const std::map<std::string, double>& followed_own_party,
                                                      const std::map<std::string, std::string>& event_ids) {
    auto same_keys = [&](const auto& m, const char* name) {
        if (m.size() != per_user.size())
            throw PreconditionError(std::string("user_follow_regression: key set of ") + name + " differs");
        for (const auto& [k, v] : per_user)
            if (!m.count(k))
                throw PreconditionError(std::string("user_follow_regression: '") + k + "' missing from " + name);
    };
    same_keys(followed_total, "followed_total");
    same_keys(followed_own_party, "followed_own_party");
    same_keys(event_ids, "event_ids");

    std::vector<double> y;
    for (const auto& [k, v] : per_user) y.push_back(v);
    if (y.size() < 2) throw PreconditionError("user_follow_regression: need at least two observations");
    const double m = stats::mean(y), sd = stats::stddev(y);
    if (!(sd > 0.0)) throw NumericError("user_follow_regression: response has zero variance");
    for (double& v : y) v = (v - m) / sd;

    std::set<std::string> events;
    for (const auto& [k, e] : event_ids) events.insert(e);
    std::vector<std::string> dummies(std::next(events.begin()), events.end());
    std::vector<std::string> names = {"intercept", "followed_total", "followed_own_party"};
    for (const auto& e : dummies) names.push_back("event[" + e + "]");

    Matrix x(y.size(), names.size());
    std::size_t r = 0;
    for (const auto& [k, v] : per_user) {
        x(r, 0) = 1.0;
        x(r, 1) = followed_total.at(k);
        x(r, 2) = followed_own_party.at(k);
        const auto& e = event_ids.at(k);
        for (std::size_t d = 0; d < dummies.size(); ++d) x(r, 3 + d) = dummies[d] == e ? 1.0 : 0.0;
        ++r;
    }
    return stats::ols(y, x, std::nullopt, std::move(names));
}

}  // namespace polar
