#pragma once

// Flat "key = value" run configuration.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "polar/error.hpp"
#include "polar/embed.hpp"
#include "polar/oracle.hpp"
#include "polar/resources.hpp"

namespace polar {

/// Parsed key/value pairs. Lines are "key = value"; '#' starts a comment
/// line; blank lines are ignored. Repeated or unknown keys are errors.
class KeyValueFile {
public:
    KeyValueFile() = default;

    static KeyValueFile parse(std::istream& in, const std::set<std::string>& known, const std::string& source) {
        KeyValueFile kv;
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const std::string t = trim(line);
            if (t.empty() || t[0] == '#') continue;
            const auto eq = t.find('=');
            const std::string where = source + ":" + std::to_string(lineno);
            if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
            const std::string key = trim(std::string_view(t).substr(0, eq));
            const std::string value = trim(std::string_view(t).substr(eq + 1));
            if (key.empty()) throw ConfigError(where + ": empty key");
            if (!known.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
            if (!kv.values_.emplace(key, value).second) throw ConfigError(where + ": duplicate key '" + key + "'");
        }
        return kv;
    }

    bool has(const std::string& key) const { return values_.count(key) > 0; }
    const std::map<std::string, std::string>& values() const { return values_; }

    std::optional<std::string> get(const std::string& key) const {
        auto it = values_.find(key);
        if (it == values_.end()) return std::nullopt;
        return it->second;
    }

private:
    std::map<std::string, std::string> values_;
};

namespace detail {

template <class T>
T parse_number(const std::string& key, const std::string& v) {
    T out{};
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size())
        throw ConfigError("config key '" + key + "': cannot parse '" + v + "'");
    return out;
}

inline std::vector<std::string> split_list(const std::string& v, char sep) {
    std::vector<std::string> out;
    std::size_t b = 0;
    while (b <= v.size()) {
        const auto e = v.find(sep, b);
        std::string item = trim(std::string_view(v).substr(b, e == std::string::npos ? std::string::npos : e - b));
        if (!item.empty()) out.push_back(std::move(item));
        if (e == std::string::npos) break;
        b = e + 1;
    }
    return out;
}

}  // namespace detail

struct RunConfig {
    // inputs
    std::filesystem::path tweets;
    std::filesystem::path follows;
    std::filesystem::path labels;  // optional: precomputed user_id,party
    std::filesystem::path dem_handles = data_path("dem_handles.txt");
    std::filesystem::path rep_handles = data_path("rep_handles.txt");
    std::filesystem::path events = data_path("events.csv");
    std::filesystem::path context_events = data_path("context_events.csv");
    std::filesystem::path stopwords = data_path("stopwords.txt");
    std::filesystem::path lexicons = data_path("lexicons");
    std::filesystem::path embeddings;  // optional: pretrained, skips GloVe training
    std::filesystem::path pronouns;    // optional: pronoun categories
    std::filesystem::path out = "out";

    // hyperparameters
    std::vector<std::string> lemmas = default_lemmas();
    std::int64_t min_count = 50;
    std::int64_t joint_min_count = 10;
    std::size_t joint_min_events = 3;
    std::size_t sample_size = 10000;
    std::size_t k = 8;
    std::size_t kmeans_n_init = 1;
    std::size_t kmeans_max_iters = 100;
    double percentile = 75.0;
    std::size_t lexicon_size = 30;
    std::int64_t min_mentions = 100;
    double alpha = 0.01;
    int days = 10;
    int topic_days = 9;
    std::size_t baseline_trials = 20;
    std::size_t nearest_stems = 10;
    std::size_t word_intrusion_items = 0;
    std::size_t tweet_intrusion_items = 0;
    std::vector<std::string> tracked_tokens = {"terrorist", "crazy"};
    double collocation_z = 0.5;
    std::size_t collocation_min_events = 3;
    std::size_t glove_dim = 100;
    std::size_t glove_window = 5;
    double glove_x_max = 100.0;
    double glove_alpha = 0.75;
    std::size_t glove_iters = 25;
    double glove_learning_rate = 0.05;
    std::optional<std::uint64_t> seed;
    unsigned jobs = 1;

    // oracle
    std::optional<GenerativeSpec> oracle;

    static const std::set<std::string>& known_keys() {
        static const std::set<std::string> keys = {
            "tweets", "follows", "labels", "dem_handles", "rep_handles", "events", "context_events", "stopwords",
            "lexicons", "embeddings", "pronouns", "out", "lemmas", "min_count", "joint_min_count", "joint_min_events",
            "sample_size", "k", "kmeans_n_init", "kmeans_max_iters", "percentile", "lexicon_size", "min_mentions",
            "alpha", "days", "topic_days", "baseline_trials", "nearest_stems", "word_intrusion_items",
            "tweet_intrusion_items", "tracked_tokens", "collocation_z", "collocation_min_events", "glove_dim",
            "glove_window", "glove_x_max", "glove_alpha", "glove_iters", "glove_learning_rate", "seed", "jobs",
            "phi_dem", "phi_rep", "n_dem", "n_rep", "tokens_per_user", "tokens_per_tweet", "topic_of_token",
            "oracle_event_id"};
        return keys;
    }

    /// Seed for stochastic stages; a ConfigError when none was given.
    std::uint64_t require_seed(const std::string& stage) const {
        if (!seed) throw ConfigError(stage + ": a seed is required (config 'seed' or --seed)");
        return *seed;
    }

    GloveOptions glove(std::uint64_t s) const;
};

inline GloveOptions RunConfig::glove(std::uint64_t s) const {
    GloveOptions o;
    o.dim = glove_dim;
    o.window = glove_window;
    o.x_max = glove_x_max;
    o.alpha = glove_alpha;
    o.iters = glove_iters;
    o.learning_rate = glove_learning_rate;
    o.seed = s;
    o.jobs = 1;
    return o;
}

/// Parses a RunConfig. Relative paths are resolved against `base_dir`.
inline RunConfig parse_config(std::istream& in, const std::string& source, const std::filesystem::path& base_dir) {
    const auto kv = KeyValueFile::parse(in, RunConfig::known_keys(), source);
    RunConfig c;
    auto path = [&](const char* key, std::filesystem::path& dst) {
        if (auto v = kv.get(key)) {
            std::filesystem::path p(*v);
            dst = p.is_absolute() || base_dir.empty() ? p : base_dir / p;
        }
    };
    auto size = [&](const char* key, std::size_t& dst) {
        if (auto v = kv.get(key)) dst = detail::parse_number<std::size_t>(key, *v);
    };
    auto i64 = [&](const char* key, std::int64_t& dst) {
        if (auto v = kv.get(key)) dst = detail::parse_number<std::int64_t>(key, *v);
    };
    auto real = [&](const char* key, double& dst) {
        if (auto v = kv.get(key)) dst = detail::parse_number<double>(key, *v);
    };
    auto integer = [&](const char* key, int& dst) {
        if (auto v = kv.get(key)) dst = detail::parse_number<int>(key, *v);
    };
    path("tweets", c.tweets);
    path("follows", c.follows);
    path("labels", c.labels);
    path("dem_handles", c.dem_handles);
    path("rep_handles", c.rep_handles);
    path("events", c.events);
    path("context_events", c.context_events);
    path("stopwords", c.stopwords);
    path("lexicons", c.lexicons);
    path("embeddings", c.embeddings);
    path("pronouns", c.pronouns);
    path("out", c.out);
    if (auto v = kv.get("lemmas")) c.lemmas = detail::split_list(*v, ';');
    if (auto v = kv.get("tracked_tokens")) c.tracked_tokens = detail::split_list(*v, ';');
    i64("min_count", c.min_count);
    i64("joint_min_count", c.joint_min_count);
    size("joint_min_events", c.joint_min_events);
    size("sample_size", c.sample_size);
    size("k", c.k);
    size("kmeans_n_init", c.kmeans_n_init);
    size("kmeans_max_iters", c.kmeans_max_iters);
    real("percentile", c.percentile);
    size("lexicon_size", c.lexicon_size);
    i64("min_mentions", c.min_mentions);
    real("alpha", c.alpha);
    integer("days", c.days);
    integer("topic_days", c.topic_days);
    size("baseline_trials", c.baseline_trials);
    size("nearest_stems", c.nearest_stems);
    size("word_intrusion_items", c.word_intrusion_items);
    size("tweet_intrusion_items", c.tweet_intrusion_items);
    real("collocation_z", c.collocation_z);
    size("collocation_min_events", c.collocation_min_events);
    size("glove_dim", c.glove_dim);
    size("glove_window", c.glove_window);
    real("glove_x_max", c.glove_x_max);
    real("glove_alpha", c.glove_alpha);
    size("glove_iters", c.glove_iters);
    real("glove_learning_rate", c.glove_learning_rate);
    if (auto v = kv.get("seed")) c.seed = detail::parse_number<std::uint64_t>("seed", *v);
    if (auto v = kv.get("jobs")) c.jobs = detail::parse_number<unsigned>("jobs", *v);

    if (c.lemmas.empty()) throw ConfigError(source + ": 'lemmas' is empty");
    if (c.k < 2) throw ConfigError(source + ": 'k' must be at least 2");
    if (!(c.percentile >= 0.0 && c.percentile <= 100.0)) throw ConfigError(source + ": 'percentile' must be in [0, 100]");
    if (!(c.alpha > 0.0)) throw ConfigError(source + ": 'alpha' must be positive");
    if (c.jobs < 1) throw ConfigError(source + ": 'jobs' must be at least 1");

    if (kv.has("phi_dem") || kv.has("phi_rep")) {
        GenerativeSpec g;
        auto reals = [&](const char* key) {
            std::vector<double> out;
            for (const auto& s : detail::split_list(kv.get(key).value_or(""), ','))
                out.push_back(detail::parse_number<double>(key, s));
            return out;
        };
        g.phi_dem = reals("phi_dem");
        g.phi_rep = reals("phi_rep");
        size("n_dem", g.n_dem);
        size("n_rep", g.n_rep);
        size("tokens_per_user", g.tokens_per_user);
        size("tokens_per_tweet", g.tokens_per_tweet);
        if (auto v = kv.get("topic_of_token")) {
            std::vector<std::size_t> t;
            for (const auto& s : detail::split_list(*v, ',')) t.push_back(detail::parse_number<std::size_t>("topic_of_token", s));
            g.topic_of_token = std::move(t);
        }
        if (auto v = kv.get("oracle_event_id")) g.event_id = *v;
        g.seed = c.seed.value_or(0);
        try {
            g.validate();
        } catch (const PreconditionError& e) {
            throw ConfigError(source + ": " + e.what());
        }
        c.oracle = std::move(g);
    } else {
        for (const char* key : {"n_dem", "n_rep", "tokens_per_user", "tokens_per_tweet", "topic_of_token", "oracle_event_id"})
            if (kv.has(key)) throw ConfigError(source + ": '" + key + "' needs phi_dem and phi_rep");
    }
    return c;
}

inline RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    return parse_config(in, path.string(), path.parent_path());
}

}  // namespace polar
