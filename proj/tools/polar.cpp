// polar: stage-file pipeline over labeled tweet corpora.
//
//   polar ingest    raw tweets + follow edges -> relevant tweets, party labels
//   polar vocab     per-event vocabularies and user counts, joint vocabulary
//   polar polarize  leave-out estimates, baselines, daily series, regressions
//   polar topics    embeddings, topic model, within/between partisanship
//   polar affect    lexical category log-odds and t-tests
//   polar devices   tracked tokens, grounding, modals, pronouns, collocations
//   polar oracle    synthetic corpus estimate (or --toy DIR to write the toy corpus)
//   polar report    figure-ready long tables
//
// Exit codes: 0 ok, 1 analysis error, 2 missing upstream artifact, 3 config error.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "polar/polar.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace polar;

namespace {

struct Flags {
    std::string config;
    std::vector<std::string> events;
    unsigned jobs = 0;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string toy;
};

struct Context {
    RunConfig cfg;
    std::set<std::string> only_events;

    fs::path stage(const std::string& name) const { return cfg.out / name; }
    bool selected(const std::string& e) const { return only_events.empty() || only_events.count(e) > 0; }
    std::uint64_t event_seed(const std::string& stage_name, const std::string& event) const {
        return Rng(cfg.require_seed(stage_name), fnv1a(event)).next();
    }
};

// ---------------------------------------------------------------------------
// file helpers

fs::path require_file(const fs::path& p) {
    std::error_code ec;
    if (!fs::is_regular_file(p, ec)) throw MissingArtifactError(p.string());
    return p;
}

std::ofstream open_out(const fs::path& p) {
    fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw IoError("cannot write " + p.string());
    return out;
}

void write_json(const fs::path& p, const json& j) {
    auto out = open_out(p);
    out << j.dump(2, ' ', false, nlohmann::json::error_handler_t::replace) << '\n';
}

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

const char* na = "NA";

template <class Fn>
void parallel_for(std::size_t n, unsigned jobs, Fn fn) {
    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    if (jobs == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(n);
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < jobs; ++t)
        pool.emplace_back([&, t] {
            for (std::size_t i = t; i < n; i += jobs) {
                try {
                    fn(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

// ---------------------------------------------------------------------------
// stage inputs

std::map<std::string, std::vector<TweetRecord>> load_ingested(const Context& ctx) {
    const auto path = require_file(ctx.stage("ingest") / "tweets.jsonl");
    auto coll = load_tweets(path, TweetFormat::jsonl);
    if (coll.tweets.empty()) throw MissingArtifactError(path.string() + " (no tweets)");
    std::map<std::string, std::vector<TweetRecord>> by_event;
    for (auto& t : coll.tweets)
        if (ctx.selected(t.event_id)) by_event[t.event_id].push_back(std::move(t));
    if (by_event.empty()) throw PreconditionError("no tweets for the selected events");
    return by_event;
}

Labels load_ingested_labels(const Context& ctx) { return load_labels(require_file(ctx.stage("ingest") / "labels.csv")); }

Preprocessor preprocessor(const Context& ctx) { return Preprocessor(load_word_set(require_file(ctx.cfg.stopwords))); }

std::vector<EventMeta> events_table(const Context& ctx) { return load_events(require_file(ctx.cfg.events)); }

struct EventData {
    Vocab vocab;
    UserTokenCounts counts;
};

EventData load_event_counts(const Context& ctx, const std::string& event, const Labels& labels) {
    const auto dir = ctx.stage("vocab") / event;
    EventData d;
    d.vocab = load_vocab(require_file(dir / "vocab.csv"));
    d.counts = load_counts(require_file(dir / "counts.csv"), labels, d.vocab.size());
    return d;
}

// ---------------------------------------------------------------------------
// ingest

void cmd_ingest(const Context& ctx) {
    const auto& cfg = ctx.cfg;
    if (cfg.tweets.empty()) throw ConfigError("ingest: 'tweets' is not set");
    auto raw = load_tweets(require_file(cfg.tweets));
    const auto events = events_table(ctx);

    Labels labels;
    std::map<std::string, FollowCounts> follows;
    if (!cfg.labels.empty()) {
        labels = load_labels(require_file(cfg.labels));
    } else {
        if (cfg.follows.empty()) throw ConfigError("ingest: set 'follows' or 'labels'");
        const auto edges = load_follow_edges(require_file(cfg.follows));
        const auto dem = load_handles(require_file(cfg.dem_handles));
        const auto rep = load_handles(require_file(cfg.rep_handles));
        follows = follow_counts(edges, dem, rep);
        labels = assign_party(edges, dem, rep);
    }

    std::map<std::string, std::vector<TweetRecord>> by_event;
    std::size_t unknown_event = 0;
    for (const auto& t : raw.tweets) {
        if (!ctx.selected(t.event_id)) continue;
        bool known = false;
        for (const auto& e : events) known = known || e.event_id == t.event_id;
        if (!known) {
            ++unknown_event;
            continue;
        }
        by_event[t.event_id].push_back(t);
    }

    const auto dir = ctx.stage("ingest");
    fs::create_directories(dir);
    std::vector<TweetRecord> relevant;
    auto cov_out = open_out(dir / "coverage.csv");
    csv::Writer cov(cov_out);
    cov.row("event_id", "tweets", "relevant", "users", "partisan_users", "coverage", "partisan_tweets");
    json rep_events = json::array();
    for (const auto& [event, tweets] : by_event) {
        TweetCollection c;
        c.tweets = tweets;
        auto kept = filter_relevant(c, find_event(events, event), cfg.lemmas);
        std::set<std::string> users;
        std::size_t partisan_tweets = 0;
        for (const auto& t : kept.tweets) {
            users.insert(t.user_id);
            auto it = labels.find(t.user_id);
            if (it != labels.end() && it->second != Party::Unassigned) ++partisan_tweets;
        }
        Labels ev_labels;
        for (const auto& u : users) {
            auto it = labels.find(u);
            ev_labels[u] = it == labels.end() ? Party::Unassigned : it->second;
        }
        std::size_t partisan_users = 0;
        for (const auto& [u, p] : ev_labels) partisan_users += p != Party::Unassigned;
        const double coverage = ev_labels.empty() ? std::nan("") : partisan_coverage(ev_labels);
        cov.row(event, tweets.size(), kept.tweets.size(), users.size(), partisan_users, coverage, partisan_tweets);
        rep_events.push_back({{"event_id", event}, {"tweets", tweets.size()}, {"relevant", kept.tweets.size()}});
        relevant.insert(relevant.end(), kept.tweets.begin(), kept.tweets.end());
    }
    save_tweets(dir / "tweets.jsonl", relevant, TweetFormat::jsonl);
    save_labels(dir / "labels.csv", labels);
    {
        auto out = open_out(dir / "user_follows.csv");
        csv::Writer w(out);
        w.row("user_id", "followed_dem", "followed_rep", "party");
        for (const auto& [u, c] : follows) w.row(u, c.dem, c.rep, party_name(labels.at(u)));
    }
    json rep;
    rep["input"] = cfg.tweets.filename().string();
    rep["records"] = raw.tweets.size();
    rep["skipped_malformed"] = raw.skipped;
    rep["unknown_event"] = unknown_event;
    rep["relevant"] = relevant.size();
    rep["labeled_users"] = labels.size();
    rep["events"] = rep_events;
    write_json(dir / "report.json", rep);
}

// ---------------------------------------------------------------------------
// vocab

void cmd_vocab(const Context& ctx) {
    const auto& cfg = ctx.cfg;
    const auto by_event = load_ingested(ctx);
    const auto labels = load_ingested_labels(ctx);
    const auto pre = preprocessor(ctx);
    const auto dir = ctx.stage("vocab");
    fs::create_directories(dir);

    std::vector<std::string> ids;
    for (const auto& [e, ts] : by_event) ids.push_back(e);
    std::vector<std::size_t> vocab_sizes(ids.size()), users(ids.size());
    parallel_for(ids.size(), cfg.jobs, [&](std::size_t i) {
        const auto& tweets = by_event.at(ids[i]);
        const auto vocab = build_event_vocab(tweets, pre, cfg.min_count);
        const auto counts = count_user_tokens(tweets, vocab, pre, labels);
        fs::create_directories(dir / ids[i]);
        save_vocab(dir / ids[i] / "vocab.csv", vocab);
        save_counts(dir / ids[i] / "counts.csv", counts);
        vocab_sizes[i] = vocab.size();
        users[i] = counts.size();
    });

    // seeded per-event sample S for the joint vocabulary and embeddings
    std::map<std::string, std::vector<TweetRecord>> samples;
    {
        auto out = open_out(dir / "sample_ids.csv");
        csv::Writer w(out);
        w.row("event_id", "tweet_id");
        for (const auto& [event, tweets] : by_event) {
            Rng rng(ctx.event_seed("vocab", event));
            auto idx = rng.sample_without_replacement(tweets.size(), cfg.sample_size);
            std::sort(idx.begin(), idx.end());
            auto& s = samples[event];
            for (std::size_t i : idx) {
                s.push_back(tweets[i]);
                w.row(event, tweets[i].tweet_id);
            }
        }
    }
    json rep;
    rep["events"] = json::array();
    for (std::size_t i = 0; i < ids.size(); ++i)
        rep["events"].push_back({{"event_id", ids[i]}, {"vocab_size", vocab_sizes[i]}, {"partisan_users", users[i]}});
    if (samples.size() >= cfg.joint_min_events) {
        const auto joint = build_joint_vocab(samples, pre, cfg.joint_min_count, cfg.joint_min_events);
        save_vocab(dir / "joint_vocab.csv", joint);
        rep["joint_vocab_size"] = joint.size();
    } else {
        rep["joint_vocab_size"] = nullptr;
        rep["note"] = "joint vocabulary skipped: " + std::to_string(samples.size()) + " events, joint_min_events = " +
                      std::to_string(cfg.joint_min_events);
    }
    write_json(dir / "report.json", rep);
}

// ---------------------------------------------------------------------------
// polarize

struct EventPolarization {
    std::string event;
    PolarizationEstimate overall;
    std::vector<double> baseline;
    std::vector<DayEstimate> days;
    MultidayReport multiday;
    std::optional<PolarizationEstimate> excluded;
    std::map<std::string, Party> user_party;
};

void cmd_polarize(const Context& ctx) {
    const auto& cfg = ctx.cfg;
    const auto by_event = load_ingested(ctx);
    const auto labels = load_ingested_labels(ctx);
    const auto pre = preprocessor(ctx);
    const auto events = events_table(ctx);
    cfg.require_seed("polarize");

    std::vector<std::string> ids;
    for (const auto& [e, ts] : by_event) ids.push_back(e);
    std::vector<EventPolarization> res(ids.size());
    parallel_for(ids.size(), cfg.jobs, [&](std::size_t i) {
        const auto& event = ids[i];
        const auto data = load_event_counts(ctx, event, labels);
        auto& r = res[i];
        r.event = event;
        r.overall = leave_out(data.counts);
        for (std::size_t u = 0; u < data.counts.size(); ++u) r.user_party[data.counts.users[u]] = data.counts.labels[u];
        r.baseline = random_assignment_baseline(data.counts, cfg.baseline_trials, ctx.event_seed("polarize", event));
        const auto& tweets = by_event.at(event);
        r.days = temporal_series(tweets, labels, data.vocab, pre, find_event(events, event), cfg.days);
        auto [kept, rep] = exclude_multiday_users(tweets, labels);
        r.multiday = rep;
        r.excluded = try_leave_out(count_user_tokens(kept, data.vocab, pre, labels));
    });

    const auto dir = ctx.stage("polarize");
    fs::create_directories(dir);
    {
        auto out = open_out(dir / "overall.csv");
        csv::Writer w(out);
        w.row("event_id", "pi_lo", "n_dem", "n_rep", "vocab_size_effective", "baseline_mean", "baseline_sd");
        for (const auto& r : res) {
            const double bm = stats::mean(r.baseline);
            const double bsd = r.baseline.size() > 1 ? stats::stddev(r.baseline) : std::nan("");
            w.row(r.event, r.overall.pi_lo, r.overall.n_dem, r.overall.n_rep, r.overall.vocab_size_effective, bm, bsd);
        }
    }
    {
        auto out = open_out(dir / "estimates.csv");
        csv::Writer w(out);
        w.row("event_id", "day", "pi_lo", "n_dem", "n_rep");
        for (const auto& r : res)
            for (const auto& d : r.days) {
                if (d.estimate) w.row(r.event, d.day, d.estimate->pi_lo, d.estimate->n_dem, d.estimate->n_rep);
                else w.row(r.event, d.day, na, na, na);
            }
    }
    {
        auto out = open_out(dir / "baseline.csv");
        csv::Writer w(out);
        w.row("event_id", "trial", "pi_lo");
        for (const auto& r : res)
            for (std::size_t t = 0; t < r.baseline.size(); ++t) w.row(r.event, t, r.baseline[t]);
    }
    {
        auto out = open_out(dir / "user_values.csv");
        csv::Writer w(out);
        w.row("event_id", "user_id", "party", "value");
        for (const auto& r : res)
            for (const auto& [u, v] : r.overall.per_user) w.row(r.event, u, party_name(r.user_party.at(u)), v);
    }
    {
        auto out = open_out(dir / "multiday.csv");
        csv::Writer w(out);
        w.row("event_id", "users_removed", "user_fraction", "tweets_removed", "tweet_fraction", "pi_lo_all",
              "pi_lo_excluded");
        for (const auto& r : res) {
            const auto& m = r.multiday;
            if (r.excluded)
                w.row(r.event, m.users_removed, m.user_fraction, m.tweets_removed, m.tweet_fraction, r.overall.pi_lo,
                      r.excluded->pi_lo);
            else
                w.row(r.event, m.users_removed, m.user_fraction, m.tweets_removed, m.tweet_fraction, r.overall.pi_lo, na);
        }
    }

    // per-day trend across events: pi_lo ~ day + event dummies
    {
        json j;
        std::vector<double> y;
        std::vector<std::pair<std::string, int>> obs;
        for (const auto& r : res)
            for (const auto& d : r.days)
                if (d.estimate) {
                    y.push_back(d.estimate->pi_lo);
                    obs.emplace_back(r.event, d.day);
                }
        std::set<std::string> evs;
        for (const auto& [e, d] : obs) evs.insert(e);
        std::vector<std::string> names = {"intercept", "day"};
        std::vector<std::string> dummies(evs.empty() ? evs.end() : std::next(evs.begin()), evs.end());
        for (const auto& e : dummies) names.push_back("event[" + e + "]");
        Matrix x(y.size(), names.size());
        for (std::size_t i = 0; i < obs.size(); ++i) {
            x(i, 0) = 1.0;
            x(i, 1) = obs[i].second;
            for (std::size_t d = 0; d < dummies.size(); ++d) x(i, 2 + d) = dummies[d] == obs[i].first ? 1.0 : 0.0;
        }
        try {
            j = stats::ols(y, x, std::nullopt, names).to_json();
        } catch (const Error& e) {
            j["error"] = e.what();
        }
        write_json(dir / "series_regression.json", j);
    }

    // follow regression over (event, user) observations
    {
        json j;
        const auto follows_path = ctx.stage("ingest") / "user_follows.csv";
        if (fs::exists(follows_path)) {
            auto t = csv::read_table(follows_path.string());
            const auto cu = t.require("user_id"), cd = t.require("followed_dem"), cr = t.require("followed_rep");
            std::map<std::string, std::pair<double, double>> f;
            for (const auto& row : t.rows)
                f[row[cu]] = {static_cast<double>(csv::parse_int(row[cd])), static_cast<double>(csv::parse_int(row[cr]))};
            std::map<std::string, double> value, total, own;
            std::map<std::string, std::string> ev;
            for (const auto& r : res)
                for (const auto& [u, v] : r.overall.per_user) {
                    auto it = f.find(u);
                    if (it == f.end()) continue;
                    const std::string key = r.event + "/" + u;
                    value[key] = v;
                    total[key] = it->second.first + it->second.second;
                    own[key] = r.user_party.at(u) == Party::Democrat ? it->second.first : it->second.second;
                    ev[key] = r.event;
                }
            try {
                j = user_follow_regression(value, total, own, ev).to_json();
            } catch (const Error& e) {
                j["error"] = e.what();
            }
        } else {
            j["error"] = "no follow counts (labels were supplied directly)";
        }
        write_json(dir / "user_follow_regression.json", j);
    }
}

// ---------------------------------------------------------------------------
// topics

std::map<std::string, std::vector<std::string>> load_sample_ids(const Context& ctx) {
    auto t = csv::read_table(require_file(ctx.stage("vocab") / "sample_ids.csv").string());
    const auto ce = t.require("event_id"), ct = t.require("tweet_id");
    std::map<std::string, std::vector<std::string>> out;
    for (const auto& r : t.rows) out[r[ce]].push_back(r[ct]);
    return out;
}

void cmd_topics(const Context& ctx) {
    const auto& cfg = ctx.cfg;
    const std::uint64_t seed = cfg.require_seed("topics");
    const auto by_event = load_ingested(ctx);
    const auto labels = load_ingested_labels(ctx);
    const auto pre = preprocessor(ctx);
    const auto events = events_table(ctx);
    const auto joint = load_vocab(require_file(ctx.stage("vocab") / "joint_vocab.csv"));
    const auto sample_ids = load_sample_ids(ctx);
    const auto dir = ctx.stage("topics");
    fs::create_directories(dir);

    std::map<std::string, const TweetRecord*> by_id;
    std::vector<TweetRecord> all, sample;
    for (const auto& [e, ts] : by_event)
        for (const auto& t : ts) all.push_back(t);
    for (const auto& t : all) by_id[t.tweet_id] = &t;
    for (const auto& [e, ids] : sample_ids) {
        if (!ctx.selected(e)) continue;
        for (const auto& id : ids)
            if (auto it = by_id.find(id); it != by_id.end()) sample.push_back(*it->second);
    }
    if (sample.empty()) throw MissingArtifactError((ctx.stage("vocab") / "sample_ids.csv").string() + " (no sampled tweets)");

    json model_json;
    EmbeddingTable table;
    if (!cfg.embeddings.empty()) {
        table = load_embeddings(require_file(cfg.embeddings));
        model_json["embeddings"] = "pretrained";
    } else {
        auto g = train_glove(sample, joint, pre, cfg.glove(seed));
        table = std::move(g.table);
        model_json["embeddings"] = "glove";
        model_json["glove_loss_history"] = g.loss_history;
        model_json["glove_excluded"] = g.excluded;
        model_json["glove_cooccurrence_pairs"] = g.cooccurrence_pairs;
    }
    save_embeddings(dir / "embeddings.txt", table);

    const auto weights = sif_weights(sample, joint, pre);
    const auto pc1 = sif_component(sample, table, weights, pre);
    const auto sentence = sif_embed(all, table, weights, pre, pc1);
    std::set<std::string> sample_set;
    for (const auto& t : sample) sample_set.insert(t.tweet_id);
    Matrix rows;
    for (const auto& s : sentence)
        if (s.embeddable && sample_set.count(s.tweet_id)) rows.append_row(s.e);
    const auto model = kmeans_cosine(rows, cfg.k, seed, cfg.kmeans_max_iters, cfg.kmeans_n_init);
    const auto assignments = assign_topics(sentence, model);
    const auto filtered = filter_ambiguous(assignments, cfg.percentile);
    const auto topic_of = topic_map(filtered.kept);

    {
        auto out = open_out(dir / "sentence_embeddings.csv");
        csv::Writer w(out);
        csv::Row header = {"tweet_id"};
        for (std::size_t d = 0; d < table.dim(); ++d) header.push_back("e" + std::to_string(d + 1));
        w.row(header);
        for (const auto& s : sentence) {
            if (!s.embeddable) continue;
            csv::Row r = {s.tweet_id};
            for (double x : s.e) r.push_back(csv::fmt(x));
            w.row(r);
        }
    }
    {
        std::set<std::string> removed;
        for (const auto& a : filtered.removed) removed.insert(a.tweet_id);
        auto out = open_out(dir / "assignments.csv");
        csv::Writer w(out);
        w.row("tweet_id", "event_id", "topic", "d1", "d2", "ratio", "kept");
        for (const auto& a : assignments)
            w.row(a.tweet_id, by_id.at(a.tweet_id)->event_id, a.topic, a.d1, a.d2, a.ratio,
                  removed.count(a.tweet_id) ? 0 : 1);
    }
    {
        auto out = open_out(dir / "centroids.csv");
        csv::Writer w(out);
        csv::Row header = {"topic"};
        for (std::size_t d = 0; d < model.dim(); ++d) header.push_back("c" + std::to_string(d + 1));
        w.row(header);
        for (std::size_t x = 0; x < model.k; ++x) {
            csv::Row r = {std::to_string(x)};
            for (double v : model.centroids.row(x)) r.push_back(csv::fmt(v));
            w.row(r);
        }
    }
    {
        // nearest stems among the joint vocabulary
        EmbeddingTable vocab_table(table.dim());
        for (const auto& s : joint.entries())
            if (auto v = table.find(s)) vocab_table.add(s, *v);
        const auto near = nearest_stems(model, vocab_table, cfg.nearest_stems);
        auto out = open_out(dir / "nearest_stems.csv");
        csv::Writer w(out);
        w.row("topic", "rank", "stem");
        for (std::size_t x = 0; x < near.size(); ++x)
            for (std::size_t r = 0; r < near[x].size(); ++r) w.row(x, r + 1, near[x][r]);
        if (cfg.word_intrusion_items > 0) {
            auto items = gen_word_intrusion_items(model, vocab_table, cfg.word_intrusion_items, Rng(seed, 1).next());
            write_intrusion_items(dir / "word_intrusion.jsonl", dir / "word_intrusion_key.jsonl", items);
        }
    }
    if (cfg.tweet_intrusion_items > 0) {
        auto items = gen_tweet_intrusion_items(assignments, cfg.tweet_intrusion_items, Rng(seed, 2).next());
        std::map<std::string, std::string> text;
        for (const auto& t : all) text[t.tweet_id] = t.text;
        write_intrusion_items(dir / "tweet_intrusion.jsonl", dir / "tweet_intrusion_key.jsonl", items, &text);
    }

    // per-event decomposition, topic log-odds and daily series
    auto part_out = open_out(dir / "partisanship.csv");
    csv::Writer part(part_out);
    part.row("event_id", "within", "between", "topics_included", "tweets_kept");
    auto per_topic_out = open_out(dir / "within_per_topic.csv");
    csv::Writer per_topic(per_topic_out);
    per_topic.row("event_id", "topic", "pi_lo", "weight", "tweets");
    auto lo_out = open_out(dir / "topic_log_odds.csv");
    csv::Writer lo(lo_out);
    lo.row("event_id", "topic", "f_dem", "f_rep", "n_dem", "n_rep", "delta", "variance", "z", "zscored");
    auto daily_out = open_out(dir / "daily.csv");
    csv::Writer daily(daily_out);
    daily.row("event_id", "topic", "day", "pi_lo");
    for (const auto& [event, tweets] : by_event) {
        const auto vocab = load_vocab(require_file(ctx.stage("vocab") / event / "vocab.csv"));
        std::size_t kept = 0;
        for (const auto& t : tweets) kept += topic_of.count(t.tweet_id);
        std::optional<WithinTopicResult> within;
        std::optional<PolarizationEstimate> between;
        try {
            within = within_topic_partisanship(tweets, topic_of, labels, vocab, pre);
        } catch (const PreconditionError&) {
        }
        try {
            between = between_topic_partisanship(tweets, topic_of, labels, model.k);
        } catch (const PreconditionError&) {
        }
        csv::Row row = {event, within ? csv::fmt(within->overall) : na, between ? csv::fmt(between->pi_lo) : na,
                        within ? csv::fmt(within->weights.size()) : "0", csv::fmt(kept)};
        part.row(row);
        if (within)
            for (const auto& [x, est] : within->per_topic) {
                auto wt = within->weights.find(x);
                per_topic.row(csv::Row{event, std::to_string(x), est ? csv::fmt(est->pi_lo) : na,
                                       wt == within->weights.end() ? na : csv::fmt(wt->second),
                                       csv::fmt(within->tweet_counts.at(x))});
            }
        try {
            std::map<std::string, LogOddsTable> tables{{event, topic_log_odds(tweets, topic_of, labels, model.k, cfg.alpha)}};
            try {
                zscore_within_group(tables);
            } catch (const NumericError&) {
            }
            for (const auto& e : tables.at(event).entries)
                lo.row(event, e.item, e.f_dem, e.f_rep, e.n_dem, e.n_rep, e.delta, e.variance, e.z, e.zscored);
        } catch (const PreconditionError&) {
        }
        const auto series = daily_topic_polarization(tweets, topic_of, labels, vocab, pre, find_event(events, event),
                                                     model.k, cfg.topic_days);
        for (const auto& [key, v] : series) {
            if (v) daily.row(event, key.first, key.second, *v);
            else daily.row(event, key.first, key.second, na);
        }
    }

    model_json["k"] = model.k;
    model_json["seed"] = seed;
    model_json["inertia"] = model.inertia;
    model_json["iterations"] = model.iterations;
    model_json["converged"] = model.converged;
    model_json["objective_history"] = model.objective_history;
    model_json["ratio_threshold"] = filtered.threshold;
    model_json["percentile"] = cfg.percentile;
    model_json["assigned"] = assignments.size();
    model_json["removed"] = filtered.removed.size();
    model_json["sample_rows"] = rows.rows();
    model_json["pc1"] = pc1;
    write_json(dir / "model.json", model_json);
}

// ---------------------------------------------------------------------------
// affect

void cmd_affect(const Context& ctx) {
    const auto& cfg = ctx.cfg;
    const auto by_event = load_ingested(ctx);
    const auto labels = load_ingested_labels(ctx);
    const auto pre = preprocessor(ctx);
    const auto events = events_table(ctx);
    const auto joint = load_vocab(require_file(ctx.stage("vocab") / "joint_vocab.csv"));
    const auto dir = ctx.stage("affect");
    fs::create_directories(dir);

    std::vector<Lexicon> lexicons;
    std::error_code ec;
    if (!fs::is_directory(cfg.lexicons, ec)) throw MissingArtifactError(cfg.lexicons.string());
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(cfg.lexicons)) {
        const auto name = entry.path().filename().string();
        if (entry.path().extension() == ".txt" && name.find(".seeds.") == std::string::npos) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
        auto seeds = f;
        seeds.replace_extension(".seeds.txt");
        lexicons.push_back(load_lexicon(f, fs::exists(seeds) ? seeds : fs::path{}));
    }
    if (lexicons.empty()) throw MissingArtifactError(cfg.lexicons.string() + " (no lexicons)");

    // in-vocabulary stems: the joint vocabulary plus every lexicon stem
    std::vector<std::string> entries = joint.entries();
    for (const auto& l : lexicons) entries.insert(entries.end(), l.stems.begin(), l.stems.end());
    const Vocab vocab(entries);

    std::map<std::string, LogOddsTable> per_event;
    for (const auto& [event, tweets] : by_event) {
        LogOddsTable t;
        t.vocab_size = vocab.size();
        t.alpha = cfg.alpha;
        for (const auto& l : lexicons) t.entries.push_back(category_log_odds(tweets, labels, l, vocab, pre, cfg.alpha));
        per_event.emplace(event, std::move(t));
    }
    if (lexicons.size() >= 2) {
        try {
            zscore_within_group(per_event);
        } catch (const NumericError&) {
        }
    }
    {
        auto out = open_out(dir / "log_odds.csv");
        csv::Writer w(out);
        w.row("event_id", "category", "shooter_race", "f_dem", "f_rep", "n_dem", "n_rep", "delta", "variance", "z",
              "zscored");
        for (const auto& [event, t] : per_event)
            for (const auto& e : t.entries)
                w.row(event, e.item, race_name(find_event(events, event).shooter_race), e.f_dem, e.f_rep, e.n_dem,
                      e.n_rep, e.delta, e.variance, e.z, e.zscored);
    }
    {
        auto out = open_out(dir / "ttests.csv");
        csv::Writer w(out);
        w.row("category", "events", "mean_delta", "t", "p");
        for (const auto& l : lexicons) {
            std::vector<double> d;
            for (const auto& [event, t] : per_event) d.push_back(t.find(l.category)->delta);
            try {
                const auto r = stats::one_sample_ttest(d, 0.0);
                w.row(l.category, d.size(), r.mean, r.t, r.p);
            } catch (const Error&) {
                w.row(l.category, d.size(), d.empty() ? std::nan("") : stats::mean(d), na, na);
            }
        }
    }

    // lexicon induction when a topics run left embeddings behind
    const auto emb_path = ctx.stage("topics") / "embeddings.txt";
    if (fs::exists(emb_path)) {
        const auto table = load_embeddings(emb_path);
        std::vector<std::string> pool;
        for (const auto& s : joint.entries())
            if (table.contains(s)) pool.push_back(s);
        fs::create_directories(dir / "induced");
        json j = json::array();
        for (const auto& l : lexicons) {
            std::vector<std::string> seeds, missing;
            for (const auto& s : l.seeds) (table.contains(s) ? seeds : missing).push_back(s);
            json item = {{"category", l.category}, {"seeds_used", seeds}, {"seeds_missing", missing}};
            if (!seeds.empty()) {
                auto lex = induce_lexicon(seeds, l.category, table, pool, cfg.lexicon_size);
                save_lexicon(dir / "induced" / (l.category + ".txt"), lex);
                item["stems"] = lex.stems;
            } else {
                item["stems"] = nullptr;
            }
            j.push_back(item);
        }
        write_json(dir / "induced" / "lexicons.json", j);
    }
}

// ---------------------------------------------------------------------------
// devices

void write_log_odds_rows(csv::Writer& w, const std::string& event, const LogOddsTable& t) {
    for (const auto& e : t.entries)
        w.row(event, e.item, e.f_dem, e.f_rep, e.n_dem, e.n_rep, e.delta, e.variance, e.z, e.raw_delta, e.zscored);
}

void cmd_devices(const Context& ctx) {
    const auto& cfg = ctx.cfg;
    const auto by_event = load_ingested(ctx);
    const auto labels = load_ingested_labels(ctx);
    const auto events = events_table(ctx);
    const auto contexts = load_context_events(require_file(cfg.context_events));
    const auto dir = ctx.stage("devices");
    fs::create_directories(dir);

    // token log-odds per event, standardized within event
    std::map<std::string, LogOddsTable> tokens;
    for (const auto& [event, tweets] : by_event) {
        const auto data = load_event_counts(ctx, event, labels);
        if (data.counts.count(Party::Democrat) == 0 || data.counts.count(Party::Republican) == 0) continue;
        std::map<std::string, LogOddsTable> one{{event, event_token_log_odds(data.counts, data.vocab, cfg.alpha)}};
        try {
            zscore_within_group(one);
        } catch (const Error&) {
        }
        tokens.emplace(event, std::move(one.at(event)));
    }
    {
        auto out = open_out(dir / "token_log_odds.csv");
        csv::Writer w(out);
        w.row("event_id", "item", "f_dem", "f_rep", "n_dem", "n_rep", "delta", "variance", "z", "raw_delta", "zscored");
        for (const auto& [event, t] : tokens) write_log_odds_rows(w, event, t);
    }
    {
        json j = json::array();
        auto out = open_out(dir / "tracked.csv");
        csv::Writer w(out);
        w.row("token", "event_id", "shooter_race", "delta", "z", "zscored");
        for (const auto& tok : cfg.tracked_tokens) {
            const std::string s = stem(normalize_text(tok));
            try {
                const auto r = track_token(s, tokens, events);
                json g;
                for (const auto& [race, ds] : r.groups) g[race] = ds;
                j.push_back({{"token", tok}, {"stem", s}, {"groups", g}});
                for (const auto& [event, e] : r.per_event)
                    w.row(tok, event, race_name(find_event(events, event).shooter_race), e.delta, e.z, e.zscored);
            } catch (const PreconditionError& e) {
                j.push_back({{"token", tok}, {"stem", s}, {"groups", nullptr}, {"error", e.what()}});
            }
        }
        write_json(dir / "tracked.json", j);
    }
    {
        auto out = open_out(dir / "grounding.csv");
        csv::Writer w(out);
        w.row("event_id", "context_event", "mentions_dem", "mentions_rep", "dem_share", "rep_share", "delta", "z");
        for (const auto& [event, tweets] : by_event)
            for (const auto& r : grounding_log_odds(tweets, labels, contexts, event, cfg.min_mentions, cfg.alpha))
                w.row(event, r.context_event, r.mentions_dem, r.mentions_rep, r.dem_share, r.rep_share, r.log_odds.delta,
                      r.log_odds.z);
    }
    const auto& forms = default_modal_forms();
    {
        auto out = open_out(dir / "modals.csv");
        csv::Writer w(out);
        w.row("event_id", "item", "f_dem", "f_rep", "n_dem", "n_rep", "delta", "variance", "z", "raw_delta", "zscored");
        for (const auto& [event, tweets] : by_event) {
            try {
                write_log_odds_rows(w, event, modal_partisanship(tweets, labels, forms, cfg.alpha));
            } catch (const PreconditionError&) {
            }
        }
    }

    // modal representation over the kept topic assignments, if a topics run exists
    const auto assign_path = ctx.stage("topics") / "assignments.csv";
    if (fs::exists(assign_path)) {
        auto t = csv::read_table(assign_path.string());
        const auto ci = t.require("tweet_id"), ce = t.require("event_id"), cx = t.require("topic"), ck = t.require("kept");
        std::map<std::string, std::size_t> topic_of;
        for (const auto& r : t.rows)
            if (r[ck] == "1" && ctx.selected(r[ce])) topic_of[r[ci]] = static_cast<std::size_t>(csv::parse_int(r[cx]));
        std::map<std::string, std::set<std::string>> hits;
        for (const auto& [event, tweets] : by_event)
            for (const auto& tw : tweets) {
                if (!topic_of.count(tw.tweet_id)) continue;
                for (const auto& m : modal_hits(tw.text, forms)) hits[m].insert(tw.tweet_id);
            }
        auto out = open_out(dir / "modal_representation.csv");
        csv::Writer w(out);
        w.row("modal", "topic", "f_x", "f_x_m", "p");
        for (const auto& [modal, patterns] : forms) {
            if (hits[modal].empty()) continue;
            const auto r = modal_topic_representation(topic_of, hits[modal], modal);
            for (const auto& [x, p] : r.per_topic) w.row(modal, x, r.f_x.at(x), r.f_x_m.at(x), p);
        }
    }
    if (!cfg.pronouns.empty()) {
        const auto cats = load_word_categories(require_file(cfg.pronouns));
        auto out = open_out(dir / "pronouns.csv");
        csv::Writer w(out);
        w.row("event_id", "item", "f_dem", "f_rep", "n_dem", "n_rep", "delta", "variance", "z", "raw_delta", "zscored");
        for (const auto& [event, tweets] : by_event) {
            try {
                write_log_odds_rows(w, event, pronoun_partisanship(tweets, labels, cats, cfg.alpha));
            } catch (const PreconditionError&) {
            }
        }
    }
    {
        auto out = open_out(dir / "collocations.csv");
        csv::Writer w(out);
        w.row("modal", "collocation", "side", "events", "mean_zscored", "event_ids");
        for (const auto& [modal, patterns] : forms) {
            const auto rep = modal_collocations(by_event, labels, modal, forms, cfg.collocation_z,
                                                cfg.collocation_min_events, cfg.alpha);
            for (const auto& c : rep.kept) {
                std::string ids;
                for (const auto& e : c.events) ids += (ids.empty() ? "" : ";") + e;
                w.row(modal, c.collocation, party_name(c.side), c.events.size(), c.mean_zscored, ids);
            }
        }
    }
}

// ---------------------------------------------------------------------------
// oracle

void cmd_oracle(const Context& ctx, const std::string& toy_dir) {
    if (!toy_dir.empty()) {
        const auto info = make_toy_corpus(toy_dir, ctx.cfg.seed.value_or(7));
        std::cout << "wrote " << info.tweets << " tweets from " << info.users << " users to " << toy_dir << '\n';
        return;
    }
    const auto& cfg = ctx.cfg;
    if (!cfg.oracle) throw ConfigError("oracle: config needs phi_dem and phi_rep");
    GenerativeSpec spec = *cfg.oracle;
    spec.seed = cfg.require_seed("oracle");
    const auto g = generate(spec);
    const auto est = leave_out(g.counts, cfg.jobs);
    const auto dir = ctx.stage("oracle");
    {
        auto out = open_out(dir / "estimate.csv");
        csv::Writer w(out);
        w.row("event_id", "pi_lo", "true_partisanship", "n_dem", "n_rep", "vocab_size_effective", "tweets");
        w.row(spec.event_id, est.pi_lo, true_partisanship(spec), est.n_dem, est.n_rep, est.vocab_size_effective,
              g.tweets.size());
    }
    {
        const auto base = random_assignment_baseline(g.counts, cfg.baseline_trials, Rng(spec.seed, 1).next(), cfg.jobs);
        auto out = open_out(dir / "baseline.csv");
        csv::Writer w(out);
        w.row("trial", "pi_lo");
        for (std::size_t t = 0; t < base.size(); ++t) w.row(t, base[t]);
    }
}

// ---------------------------------------------------------------------------
// report

void cmd_report(const Context& ctx) {
    const auto dir = ctx.stage("report");
    fs::create_directories(dir);
    json summary;
    summary["stages"] = json::object();
    for (const char* s : {"ingest", "vocab", "polarize", "topics", "affect", "devices", "oracle"})
        summary["stages"][s] = fs::exists(ctx.stage(s));

    struct Source {
        const char* stage;
        const char* file;
        const char* figure;
    };
    const std::vector<Source> sources = {
        {"polarize", "estimates.csv", "polarization_over_time"},
        {"polarize", "baseline.csv", "random_assignment_baseline"},
        {"topics", "topic_log_odds.csv", "topic_log_odds"},
        {"topics", "daily.csv", "topic_polarization_over_time"},
        {"affect", "log_odds.csv", "affect_log_odds"},
        {"devices", "modals.csv", "modal_log_odds"},
        {"devices", "grounding.csv", "grounding"},
        {"devices", "tracked.csv", "tracked_tokens"},
    };
    bool any = false;
    json produced = json::array();
    for (const auto& s : sources) {
        const auto path = ctx.stage(s.stage) / s.file;
        if (!fs::exists(path)) continue;
        any = true;
        auto t = csv::read_table(path.string());
        // long format: one row per (record, column) for every non-key column
        std::set<std::string> keys = {"event_id", "item", "topic", "day", "trial", "token", "context_event",
                                      "category", "shooter_race"};
        auto out = open_out(dir / (std::string(s.figure) + ".csv"));
        csv::Writer w(out);
        w.row("figure", "event_id", "series", "x", "variable", "value");
        const auto ce = t.column("event_id");
        std::optional<std::size_t> cseries, cx;
        for (const char* c : {"item", "token", "context_event", "category", "topic"})
            if (!cseries) cseries = t.column(c);
        for (const char* c : {"day", "trial"})
            if (!cx) cx = t.column(c);
        if (cseries && cx && *cseries == *cx) cx.reset();
        for (const auto& r : t.rows)
            for (std::size_t c = 0; c < t.header.size(); ++c) {
                if (keys.count(t.header[c])) continue;
                w.row(s.figure, ce ? r[*ce] : "", cseries ? r[*cseries] : "", cx ? r[*cx] : "", t.header[c], r[c]);
            }
        produced.push_back(std::string(s.figure) + ".csv");
    }
    if (!any) throw MissingArtifactError((ctx.cfg.out / "polarize" / "estimates.csv").string());
    summary["tables"] = produced;
    const auto overall = ctx.stage("polarize") / "overall.csv";
    if (fs::exists(overall)) {
        auto t = csv::read_table(overall.string());
        json e = json::object();
        const auto ci = t.require("event_id"), cp = t.require("pi_lo"), cb = t.require("baseline_mean");
        for (const auto& r : t.rows)
            e[r[ci]] = {{"pi_lo", number_or_null(csv::parse_double(r[cp]))},
                        {"baseline_mean", number_or_null(csv::parse_double(r[cb]))}};
        summary["polarization"] = e;
    }
    const auto part = ctx.stage("topics") / "partisanship.csv";
    if (fs::exists(part)) {
        auto t = csv::read_table(part.string());
        json e = json::object();
        const auto ci = t.require("event_id"), cw = t.require("within"), cb = t.require("between");
        for (const auto& r : t.rows)
            e[r[ci]] = {{"within", number_or_null(csv::parse_double(r[cw]))},
                        {"between", number_or_null(csv::parse_double(r[cb]))}};
        summary["topic_partisanship"] = e;
    }
    write_json(dir / "summary.json", summary);
}

int fail(int code, const char* kind, const std::string& msg) {
    std::cerr << "polar: error: " << kind << ": " << msg << '\n';
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Linguistic polarization pipeline over labeled tweet corpora"};
    app.require_subcommand(1);
    Flags flags;
    app.add_option("--config", flags.config, "flat key = value config file");
    app.add_option("--event", flags.events, "restrict to this event id (repeatable)");
    app.add_option("--jobs", flags.jobs, "worker threads for per-event work");
    app.add_option("--seed", flags.seed, "seed for stochastic stages (overrides config)");
    app.add_option("--out", flags.out, "output directory (overrides config)");
    std::map<std::string, std::function<void(const Context&)>> stages = {
        {"ingest", cmd_ingest}, {"vocab", cmd_vocab},     {"polarize", cmd_polarize}, {"topics", cmd_topics},
        {"affect", cmd_affect}, {"devices", cmd_devices}, {"report", cmd_report}};
    std::map<std::string, CLI::App*> subs;
    for (const auto& [name, fn] : stages) subs[name] = app.add_subcommand(name);
    auto* oracle = app.add_subcommand("oracle", "synthetic corpus estimate; --toy DIR writes the toy corpus");
    oracle->add_option("--toy", flags.toy, "write the toy corpus into this directory");
    subs["ingest"]->description("filter relevant tweets and assign parties");
    subs["vocab"]->description("build vocabularies and user token counts");
    subs["polarize"]->description("leave-out estimates, baselines and series");
    subs["topics"]->description("embeddings, topic model and decomposition");
    subs["affect"]->description("lexical category log-odds");
    subs["devices"]->description("framing-device analyses");
    subs["report"]->description("collate figure-ready tables");
    for (auto* s : app.get_subcommands({})) s->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail(3, "usage", e.what());
    }

    try {
        Context ctx;
        if (!flags.config.empty()) {
            ctx.cfg = load_config(flags.config);
        } else if (!oracle->parsed()) {
            throw ConfigError("--config is required");
        }
        if (flags.seed) ctx.cfg.seed = flags.seed;
        if (!flags.out.empty()) ctx.cfg.out = flags.out;
        if (flags.jobs > 0) ctx.cfg.jobs = flags.jobs;
        ctx.only_events.insert(flags.events.begin(), flags.events.end());
        if (oracle->parsed()) {
            cmd_oracle(ctx, flags.toy);
            return 0;
        }
        for (const auto& [name, fn] : stages)
            if (subs[name]->parsed()) fn(ctx);
        return 0;
    } catch (const ConfigError& e) {
        return fail(3, "config", e.what());
    } catch (const MissingArtifactError& e) {
        return fail(2, "missing-artifact", e.what());
    } catch (const Error& e) {
        return fail(1, "analysis", e.what());
    } catch (const std::exception& e) {
        return fail(1, "internal", e.what());
    }
}
