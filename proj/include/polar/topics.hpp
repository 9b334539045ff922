#pragma once

// Cosine k-means topics over sentence embeddings: assignment, ambiguity
// filtering, within/between-topic partisanship, topic log-odds, nearest stems
// and intrusion items.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "polar/corpus.hpp"
#include "polar/embed.hpp"
#include "polar/error.hpp"
#include "polar/lexica.hpp"
#include "polar/linalg.hpp"
#include "polar/polarization.hpp"
#include "polar/rng.hpp"
#include "polar/textprep.hpp"

namespace polar {

struct TopicModel {
    std::size_t k = 0;
    Matrix centroids;  // k unit rows
    double inertia = 0.0;  // sum of cosine distances to assigned centroids
    std::uint64_t seed = 0;
    std::size_t iterations = 0;
    bool converged = false;
    std::vector<double> objective_history;  // after each assignment step

    std::size_t dim() const { return centroids.cols(); }
};

namespace detail {

inline Matrix normalized_rows(const Matrix& rows) {
    Matrix out = rows;
    for (std::size_t i = 0; i < out.rows(); ++i) {
        const double n = norm(out.row(i));
        if (!(n > 0.0)) throw PreconditionError("kmeans_cosine: row " + std::to_string(i) + " is zero");
        for (double& x : out.row(i)) x /= n;
    }
    return out;
}

// Cosine distance between unit vectors.
inline double unit_distance(std::span<const double> a, std::span<const double> b) {
    return std::clamp(1.0 - dot(a, b), 0.0, 2.0);
}

inline std::size_t distinct_rows(const Matrix& x) {
    std::set<std::vector<double>> s;
    for (std::size_t i = 0; i < x.rows(); ++i) s.emplace(x.row(i).begin(), x.row(i).end());
    return s.size();
}

struct KmeansRun {
    Matrix centroids;
    std::vector<std::size_t> labels;
    std::vector<double> history;
    double inertia = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
};

inline KmeansRun kmeans_once(const Matrix& x, std::size_t k, Rng& rng, std::size_t max_iters) {
    const std::size_t n = x.rows(), d = x.cols();
    KmeansRun run;
    run.centroids = Matrix(k, d);

    // k-means++ seeding on squared cosine distance
    std::vector<double> best(n, std::numeric_limits<double>::infinity());
    std::size_t first = rng.below(n);
    std::copy(x.row(first).begin(), x.row(first).end(), run.centroids.row(0).begin());
    for (std::size_t c = 1; c < k; ++c) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            best[i] = std::min(best[i], unit_distance(x.row(i), run.centroids.row(c - 1)));
            total += best[i] * best[i];
        }
        std::size_t pick = 0;
        if (total > 0.0) {
            double u = rng.uniform() * total;
            pick = n - 1;
            for (std::size_t i = 0; i < n; ++i) {
                u -= best[i] * best[i];
                if (u < 0.0 && best[i] > 0.0) {
                    pick = i;
                    break;
                }
            }
            while (best[pick] == 0.0) --pick;
        }
        std::copy(x.row(pick).begin(), x.row(pick).end(), run.centroids.row(c).begin());
    }

    run.labels.assign(n, k);
    std::vector<double> dist(n, 0.0);
    for (std::size_t it = 0; it < max_iters; ++it) {
        bool changed = false;
        double obj = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t arg = 0;
            double bd = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < k; ++c) {
                const double dc = unit_distance(x.row(i), run.centroids.row(c));
                if (dc < bd) {
                    bd = dc;
                    arg = c;
                }
            }
            if (arg != run.labels[i]) changed = true;
            run.labels[i] = arg;
            dist[i] = bd;
            obj += bd;
        }
        run.history.push_back(obj);
        run.inertia = obj;
        run.iterations = it + 1;
        if (!changed) {
            run.converged = true;
            break;
        }

        // centroid update: renormalized member mean
        Matrix sum(k, d);
        std::vector<std::size_t> size(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            ++size[run.labels[i]];
            auto s = sum.row(run.labels[i]);
            for (std::size_t a = 0; a < d; ++a) s[a] += x(i, a);
        }
        std::vector<char> taken(n, 0);
        for (std::size_t c = 0; c < k; ++c) {
            const double nn = norm(sum.row(c));
            if (size[c] > 0 && nn > 1e-12 * static_cast<double>(size[c])) {
                for (std::size_t a = 0; a < d; ++a) run.centroids(c, a) = sum(c, a) / nn;
                continue;
            }
            // empty or degenerate cluster: move it onto the farthest point
            std::size_t far = n;
            for (std::size_t i = 0; i < n; ++i)
                if (!taken[i] && (far == n || dist[i] > dist[far])) far = i;
            taken[far] = 1;
            dist[far] = 0.0;
            std::copy(x.row(far).begin(), x.row(far).end(), run.centroids.row(c).begin());
        }
    }
    return run;
}

}  // namespace detail

/// Cosine k-means. Rows are scaled to unit length; each of `n_init` restarts
/// seeds with k-means++ from Rng(seed, restart) and alternates assignment
/// (nearest centroid, ties to the lower index) and renormalized-mean updates
/// until assignments stop changing or `max_iters` assignment steps. An empty
/// or zero-mean cluster is moved onto the point farthest from its centroid.
/// The run with the lowest inertia is kept.
inline TopicModel kmeans_cosine(const Matrix& rows, std::size_t k, std::uint64_t seed, std::size_t max_iters = 100,
                                std::size_t n_init = 1) {
    if (k < 2) throw PreconditionError("kmeans_cosine: k must be >= 2");
    if (max_iters < 1 || n_init < 1) throw PreconditionError("kmeans_cosine: max_iters and n_init must be >= 1");
    const Matrix x = detail::normalized_rows(rows);
    if (detail::distinct_rows(x) < k)
        throw PreconditionError("kmeans_cosine: fewer than k = " + std::to_string(k) + " distinct directions");
    std::optional<detail::KmeansRun> best;
    for (std::size_t r = 0; r < n_init; ++r) {
        Rng rng(seed, r);
        auto run = detail::kmeans_once(x, k, rng, max_iters);
        if (!best || run.inertia < best->inertia) best = std::move(run);
    }
    TopicModel m;
    m.k = k;
    m.centroids = std::move(best->centroids);
    m.inertia = best->inertia;
    m.seed = seed;
    m.iterations = best->iterations;
    m.converged = best->converged;
    m.objective_history = std::move(best->history);
    return m;
}

struct TopicAssignment {
    std::string tweet_id;
    std::size_t topic = 0;
    double d1 = 0.0;  // distance to the closest centroid
    double d2 = 0.0;  // distance to the second closest
    double ratio = 0.0;
    std::vector<double> distances;  // to every centroid
};

/// Nearest-centroid assignment of one embedding. Ratio d1/d2 is 1 when d2 is 0.
inline TopicAssignment assign_topic(std::string tweet_id, std::span<const double> e, const TopicModel& model) {
    if (model.k < 2) throw PreconditionError("assign_topics: k must be >= 2");
    if (e.size() != model.dim()) throw PreconditionError("assign_topics: embedding dimension differs from the model");
    TopicAssignment a;
    a.tweet_id = std::move(tweet_id);
    a.distances.resize(model.k);
    for (std::size_t c = 0; c < model.k; ++c) a.distances[c] = cosine_distance(e, model.centroids.row(c));
    std::vector<std::size_t> order(model.k);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](auto p, auto q) { return a.distances[p] < a.distances[q]; });
    a.topic = order[0];
    a.d1 = a.distances[order[0]];
    a.d2 = a.distances[order[1]];
    a.ratio = a.d2 > 0.0 ? a.d1 / a.d2 : 1.0;
    return a;
}

/// Assignments for every embeddable sentence embedding.
inline std::vector<TopicAssignment> assign_topics(const std::vector<SentenceEmbedding>& embeddings,
                                                  const TopicModel& model) {
    std::vector<TopicAssignment> out;
    for (const auto& s : embeddings)
        if (s.embeddable) out.push_back(assign_topic(s.tweet_id, s.e, model));
    return out;
}

struct FilterResult {
    std::vector<TopicAssignment> kept;
    std::vector<TopicAssignment> removed;
    double threshold = 0.0;
};

/// Nearest-rank percentile: the ceil(p/100 * N)-th smallest value (at least the first).
inline double nearest_rank_percentile(std::vector<double> values, double percentile) {
    if (values.empty()) throw PreconditionError("percentile of an empty set");
    if (!(percentile >= 0.0 && percentile <= 100.0)) throw PreconditionError("percentile must be in [0, 100]");
    std::sort(values.begin(), values.end());
    auto rank = static_cast<std::size_t>(std::ceil(percentile / 100.0 * static_cast<double>(values.size())));
    rank = std::clamp<std::size_t>(rank, 1, values.size());
    return values[rank - 1];
}

/// Removes assignments whose ratio is strictly above the percentile of all ratios.
inline FilterResult filter_ambiguous(const std::vector<TopicAssignment>& assignments, double percentile = 75.0) {
    if (assignments.empty()) throw PreconditionError("filter_ambiguous: no assignments");
    std::vector<double> r;
    for (const auto& a : assignments) r.push_back(a.ratio);
    FilterResult out;
    out.threshold = nearest_rank_percentile(std::move(r), percentile);
    for (const auto& a : assignments) (a.ratio > out.threshold ? out.removed : out.kept).push_back(a);
    return out;
}

inline std::map<std::string, std::size_t> topic_map(const std::vector<TopicAssignment>& assignments) {
    std::map<std::string, std::size_t> m;
    for (const auto& a : assignments) m[a.tweet_id] = a.topic;
    return m;
}

// ---------------------------------------------------------------------------
// Partisanship decomposition

struct WithinTopicResult {
    std::map<std::size_t, std::optional<PolarizationEstimate>> per_topic;  // nullopt: too few users
    std::map<std::size_t, double> weights;                                 // renormalized over included topics
    std::map<std::size_t, std::size_t> tweet_counts;
    double overall = 0.0;
};

/// Weighted mean of per-topic pi_LO; weights are topic tweet shares,
/// renormalized over topics that have at least two users per party.
inline WithinTopicResult within_topic_partisanship(const std::map<std::size_t, UserTokenCounts>& counts_by_topic,
                                                   const std::map<std::size_t, std::size_t>& tweets_by_topic,
                                                   unsigned jobs = 1) {
    WithinTopicResult r;
    r.tweet_counts = tweets_by_topic;
    double wsum = 0.0;
    for (const auto& [topic, counts] : counts_by_topic) {
        auto est = try_leave_out(counts, jobs);
        auto n = tweets_by_topic.find(topic);
        if (est && n != tweets_by_topic.end() && n->second > 0) {
            r.weights[topic] = static_cast<double>(n->second);
            wsum += static_cast<double>(n->second);
        }
        r.per_topic.emplace(topic, std::move(est));
    }
    if (r.weights.empty()) throw PreconditionError("within_topic_partisanship: no topic has two users per party");
    for (auto& [topic, w] : r.weights) {
        w /= wsum;
        r.overall += w * r.per_topic.at(topic)->pi_lo;
    }
    return r;
}

/// Tweet-level form: splits the assigned tweets by topic and counts vocabulary
/// items per user within each topic.
inline WithinTopicResult within_topic_partisanship(const std::vector<TweetRecord>& tweets,
                                                   const std::map<std::string, std::size_t>& topic_of,
                                                   const Labels& labels, const Vocab& vocab, const Preprocessor& pre,
                                                   unsigned jobs = 1) {
    std::map<std::size_t, std::vector<TweetRecord>> split;
    for (const auto& t : tweets)
        if (auto it = topic_of.find(t.tweet_id); it != topic_of.end()) split[it->second].push_back(t);
    std::map<std::size_t, UserTokenCounts> counts;
    std::map<std::size_t, std::size_t> sizes;
    for (const auto& [topic, ts] : split) {
        counts.emplace(topic, count_user_tokens(ts, vocab, pre, labels));
        sizes[topic] = ts.size();
    }
    return within_topic_partisanship(counts, sizes, jobs);
}

/// pi_LO after replacing every assigned tweet by a single token, its topic.
inline PolarizationEstimate between_topic_partisanship(const std::vector<TweetRecord>& tweets,
                                                       const std::map<std::string, std::size_t>& topic_of,
                                                       const Labels& labels, std::size_t k, unsigned jobs = 1) {
    std::map<std::string, std::map<std::uint32_t, std::int64_t>> per_user;
    for (const auto& t : tweets) {
        auto it = topic_of.find(t.tweet_id);
        if (it == topic_of.end()) continue;
        if (it->second >= k) throw PreconditionError("between_topic_partisanship: topic id out of range");
        ++per_user[t.user_id][static_cast<std::uint32_t>(it->second)];
    }
    return leave_out(make_counts(per_user, labels, k), jobs);
}

/// Topic log-odds: f = the party's tweets in the topic, N = the party's
/// assigned tweets, |V| = k.
inline LogOddsTable topic_log_odds(const std::vector<TweetRecord>& tweets,
                                   const std::map<std::string, std::size_t>& topic_of, const Labels& labels,
                                   std::size_t k, double alpha = 0.01) {
    std::vector<std::int64_t> fd(k, 0), fr(k, 0);
    std::int64_t nd = 0, nr = 0;
    for (const auto& t : tweets) {
        auto it = topic_of.find(t.tweet_id);
        auto lab = labels.find(t.user_id);
        if (it == topic_of.end() || lab == labels.end() || lab->second == Party::Unassigned) continue;
        if (it->second >= k) throw PreconditionError("topic_log_odds: topic id out of range");
        if (lab->second == Party::Democrat) {
            ++fd[it->second];
            ++nd;
        } else {
            ++fr[it->second];
            ++nr;
        }
    }
    LogOddsTable t;
    t.vocab_size = k;
    t.alpha = alpha;
    for (std::size_t x = 0; x < k; ++x) t.entries.push_back(log_odds(std::to_string(x), fd[x], fr[x], nd, nr, k, alpha));
    return t;
}

/// Per topic and day: within-topic leave-out series over the first `days` days.
inline std::map<std::pair<std::size_t, int>, std::optional<double>> daily_topic_polarization(
    const std::vector<TweetRecord>& tweets, const std::map<std::string, std::size_t>& topic_of, const Labels& labels,
    const Vocab& vocab, const Preprocessor& pre, const EventMeta& event, std::size_t k, int days = 9,
    unsigned jobs = 1) {
    std::vector<std::vector<TweetRecord>> split(k);
    for (const auto& t : tweets)
        if (auto it = topic_of.find(t.tweet_id); it != topic_of.end() && it->second < k) split[it->second].push_back(t);
    std::map<std::pair<std::size_t, int>, std::optional<double>> out;
    for (std::size_t x = 0; x < k; ++x)
        for (const auto& de : temporal_series(split[x], labels, vocab, pre, event, days, jobs))
            out[{x, de.day}] = de.estimate ? std::optional<double>(de.estimate->pi_lo) : std::nullopt;
    return out;
}

// ---------------------------------------------------------------------------
// Summaries and intrusion items

namespace detail {

// Stems ordered by cosine distance to `centroid`, ties lexicographic.
inline std::vector<std::pair<double, std::string>> ranked_stems(std::span<const double> centroid,
                                                                const EmbeddingTable& table) {
    std::vector<std::pair<double, std::string>> r;
    r.reserve(table.size());
    for (std::size_t i = 0; i < table.size(); ++i) r.emplace_back(cosine_distance(table[i], centroid), table.words()[i]);
    std::sort(r.begin(), r.end());
    return r;
}

inline std::size_t pool_size(double fraction, std::size_t n) {
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n))));
}

}  // namespace detail

/// The n stems nearest to each centroid.
inline std::vector<std::vector<std::string>> nearest_stems(const TopicModel& model, const EmbeddingTable& table,
                                                           std::size_t n = 10) {
    if (table.dim() != model.dim()) throw PreconditionError("nearest_stems: dimension mismatch");
    std::vector<std::vector<std::string>> out(model.k);
    for (std::size_t x = 0; x < model.k; ++x) {
        auto r = detail::ranked_stems(model.centroids.row(x), table);
        for (std::size_t i = 0; i < std::min(n, r.size()); ++i) out[x].push_back(r[i].second);
    }
    return out;
}

struct IntrusionItem {
    std::size_t item_id = 0;
    std::size_t topic = 0;
    std::size_t intruder_topic = 0;  // the topic the intruder is close to
    std::vector<std::string> candidates;
    std::size_t answer_index = 0;
};

/// Word intrusion: 5 of the 10 stems nearest a random topic x plus one
/// intruder drawn from the stems in the farthest 5% from x that are also in
/// the closest 5% of some other topic (excluding x's top 10). Topics whose
/// intruder pool is empty are redrawn, up to 100 times per item.
inline std::vector<IntrusionItem> gen_word_intrusion_items(const TopicModel& model, const EmbeddingTable& table,
                                                           std::size_t count, std::uint64_t seed) {
    if (table.size() < 20 * model.k)
        throw PreconditionError("gen_word_intrusion_items: need at least 20 stems per topic");
    if (table.dim() != model.dim()) throw PreconditionError("gen_word_intrusion_items: dimension mismatch");
    const std::size_t pool = detail::pool_size(0.05, table.size());
    std::vector<std::vector<std::string>> top10(model.k), far(model.k);
    std::vector<std::set<std::string>> close(model.k);
    for (std::size_t x = 0; x < model.k; ++x) {
        auto r = detail::ranked_stems(model.centroids.row(x), table);
        for (std::size_t i = 0; i < 10; ++i) top10[x].push_back(r[i].second);
        for (std::size_t i = 0; i < pool; ++i) close[x].insert(r[i].second);
        for (std::size_t i = r.size() - pool; i < r.size(); ++i) far[x].push_back(r[i].second);
    }
    Rng rng(seed);
    std::vector<IntrusionItem> items;
    for (std::size_t id = 0; id < count; ++id) {
        bool made = false;
        for (int attempt = 0; attempt < 100 && !made; ++attempt) {
            const std::size_t x = rng.below(model.k);
            std::vector<std::pair<std::string, std::size_t>> intruders;
            for (const auto& w : far[x]) {
                if (std::find(top10[x].begin(), top10[x].end(), w) != top10[x].end()) continue;
                for (std::size_t y = 0; y < model.k; ++y)
                    if (y != x && close[y].count(w)) {
                        intruders.emplace_back(w, y);
                        break;
                    }
            }
            if (intruders.empty()) continue;
            std::sort(intruders.begin(), intruders.end());
            IntrusionItem it;
            it.item_id = id;
            it.topic = x;
            for (std::size_t i : rng.sample_without_replacement(10, 5)) it.candidates.push_back(top10[x][i]);
            const auto& pick = intruders[rng.below(intruders.size())];
            it.intruder_topic = pick.second;
            it.candidates.push_back(pick.first);
            std::vector<std::size_t> perm(6);
            std::iota(perm.begin(), perm.end(), std::size_t{0});
            rng.shuffle(perm);
            std::vector<std::string> shuffled(6);
            for (std::size_t i = 0; i < 6; ++i) {
                shuffled[i] = it.candidates[perm[i]];
                if (perm[i] == 5) it.answer_index = i;
            }
            it.candidates = std::move(shuffled);
            items.push_back(std::move(it));
            made = true;
        }
        if (!made) throw PreconditionError("gen_word_intrusion_items: no intruder found after 100 topic draws");
    }
    return items;
}

/// Proximity ratio of a tweet to topic x: d_x / min over y != x of d_y
/// (1 when that minimum is 0).
inline double proximity_ratio(const TopicAssignment& a, std::size_t x) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t y = 0; y < a.distances.size(); ++y)
        if (y != x) m = std::min(m, a.distances[y]);
    return m > 0.0 ? a.distances[x] / m : 1.0;
}

/// Tweet intrusion: 3 of the closest 1% of tweets to a random topic x by
/// proximity ratio plus one intruder from the farthest 1% for x that is in
/// the closest 1% of another topic.
inline std::vector<IntrusionItem> gen_tweet_intrusion_items(const std::vector<TopicAssignment>& assignments,
                                                            std::size_t count, std::uint64_t seed) {
    if (assignments.empty()) throw PreconditionError("gen_tweet_intrusion_items: no assignments");
    const std::size_t k = assignments.front().distances.size();
    if (k < 2) throw PreconditionError("gen_tweet_intrusion_items: k must be >= 2");
    const std::size_t n = assignments.size();
    const std::size_t pool = detail::pool_size(0.01, n);
    std::vector<std::vector<std::size_t>> close(k), far(k);
    std::vector<std::set<std::size_t>> close_set(k);
    for (std::size_t x = 0; x < k; ++x) {
        std::vector<std::pair<double, std::size_t>> r;
        for (std::size_t i = 0; i < n; ++i) {
            if (assignments[i].distances.size() != k) throw PreconditionError("gen_tweet_intrusion_items: ragged distances");
            r.emplace_back(proximity_ratio(assignments[i], x), i);
        }
        std::sort(r.begin(), r.end(), [&](const auto& a, const auto& b) {
            return a.first != b.first ? a.first < b.first : assignments[a.second].tweet_id < assignments[b.second].tweet_id;
        });
        for (std::size_t i = 0; i < pool; ++i) {
            close[x].push_back(r[i].second);
            close_set[x].insert(r[i].second);
        }
        for (std::size_t i = n - pool; i < n; ++i) far[x].push_back(r[i].second);
    }
    Rng rng(seed);
    std::vector<IntrusionItem> items;
    for (std::size_t id = 0; id < count; ++id) {
        bool made = false;
        for (int attempt = 0; attempt < 100 && !made; ++attempt) {
            const std::size_t x = rng.below(k);
            if (close[x].size() < 3) continue;
            std::vector<std::pair<std::string, std::size_t>> intruders;
            for (std::size_t i : far[x]) {
                if (close_set[x].count(i)) continue;
                for (std::size_t y = 0; y < k; ++y)
                    if (y != x && close_set[y].count(i)) {
                        intruders.emplace_back(assignments[i].tweet_id, y);
                        break;
                    }
            }
            if (intruders.empty()) continue;
            std::sort(intruders.begin(), intruders.end());
            IntrusionItem it;
            it.item_id = id;
            it.topic = x;
            for (std::size_t i : rng.sample_without_replacement(close[x].size(), 3))
                it.candidates.push_back(assignments[close[x][i]].tweet_id);
            const auto& pick = intruders[rng.below(intruders.size())];
            it.intruder_topic = pick.second;
            it.candidates.push_back(pick.first);
            std::vector<std::size_t> perm(4);
            std::iota(perm.begin(), perm.end(), std::size_t{0});
            rng.shuffle(perm);
            std::vector<std::string> shuffled(4);
            for (std::size_t i = 0; i < 4; ++i) {
                shuffled[i] = it.candidates[perm[i]];
                if (perm[i] == 3) it.answer_index = i;
            }
            it.candidates = std::move(shuffled);
            items.push_back(std::move(it));
            made = true;
        }
        if (!made) throw PreconditionError("gen_tweet_intrusion_items: no intruder found after 100 topic draws");
    }
    return items;
}

/// Task file (item_id, candidates; candidates mapped through `display` when
/// given) and a separate answer key (item_id, topic, intruder_topic, answer_index).
inline void write_intrusion_items(const std::filesystem::path& tasks, const std::filesystem::path& key,
                                  const std::vector<IntrusionItem>& items,
                                  const std::map<std::string, std::string>* display = nullptr) {
    std::ofstream t(tasks, std::ios::binary), k(key, std::ios::binary);
    if (!t || !k) throw IoError("cannot write intrusion items to " + tasks.string());
    for (const auto& it : items) {
        nlohmann::ordered_json j;
        j["item_id"] = it.item_id;
        auto& c = j["candidates"] = nlohmann::ordered_json::array();
        for (const auto& s : it.candidates) {
            if (display) {
                auto d = display->find(s);
                c.push_back(d == display->end() ? s : d->second);
            } else {
                c.push_back(s);
            }
        }
        t << j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) << '\n';
        nlohmann::ordered_json a;
        a["item_id"] = it.item_id;
        a["topic"] = it.topic;
        a["intruder_topic"] = it.intruder_topic;
        a["answer_index"] = it.answer_index;
        a["answer"] = it.candidates[it.answer_index];
        k << a.dump() << '\n';
    }
}

}  // namespace polar
