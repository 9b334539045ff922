#pragma once

// Stemming + stopword pipeline, vocabularies and sparse user x token counts.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "polar/corpus.hpp"
#include "polar/csv.hpp"
#include "polar/error.hpp"
#include "polar/resources.hpp"
#include "polar/tokenize.hpp"

namespace polar {

/// Turns raw text into the stem sequence used for counting: tokenize, drop
/// stopwords (looked up on the token with apostrophes removed), stem.
class Preprocessor {
public:
    Preprocessor() = default;
    explicit Preprocessor(std::unordered_set<std::string> stopwords) : stopwords_(std::move(stopwords)) {}

    static Preprocessor bundled() { return Preprocessor(load_word_set(data_path("stopwords.txt"))); }

    bool is_stopword(std::string_view token) const {
        return !stopwords_.empty() && stopwords_.count(strip_apostrophes(token)) > 0;
    }

    std::vector<std::string> stems(std::string_view text) const {
        std::vector<std::string> out;
        for (auto& tok : tokenize(text)) {
            if (is_stopword(tok)) continue;
            out.push_back(stem(tok));
        }
        return out;
    }

    const std::unordered_set<std::string>& stopwords() const { return stopwords_; }

private:
    std::unordered_set<std::string> stopwords_;
};

/// Unigrams of `stems` followed by adjacent bigrams ("a b").
inline std::vector<std::string> doc_items(const std::vector<std::string>& stems, bool bigrams = true) {
    std::vector<std::string> out(stems);
    if (bigrams)
        for (std::size_t i = 0; i + 1 < stems.size(); ++i) out.push_back(stems[i] + ' ' + stems[i + 1]);
    return out;
}

/// Ordered token list (lexicographic) with a reverse index.
class Vocab {
public:
    Vocab() = default;

    /// Sorts and deduplicates.
    explicit Vocab(std::vector<std::string> entries) : entries_(std::move(entries)) {
        std::sort(entries_.begin(), entries_.end());
        entries_.erase(std::unique(entries_.begin(), entries_.end()), entries_.end());
        index_.reserve(entries_.size());
        for (std::size_t i = 0; i < entries_.size(); ++i) index_.emplace(entries_[i], i);
    }

    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    const std::vector<std::string>& entries() const { return entries_; }
    const std::string& operator[](std::size_t i) const { return entries_[i]; }

    std::optional<std::size_t> find(const std::string& token) const {
        auto it = index_.find(token);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    bool contains(const std::string& token) const { return index_.count(token) > 0; }

private:
    std::vector<std::string> entries_;
    std::unordered_map<std::string, std::size_t> index_;
};

/// Item counts over a set of tweets.
inline std::unordered_map<std::string, std::int64_t> count_items(const std::vector<TweetRecord>& tweets,
                                                                 const Preprocessor& pre, bool bigrams = true) {
    std::unordered_map<std::string, std::int64_t> counts;
    for (const auto& t : tweets)
        for (auto& item : doc_items(pre.stems(t.text), bigrams)) ++counts[item];
    return counts;
}

/// Unigrams and bigrams occurring at least `min_count` times in one event's tweets.
inline Vocab build_event_vocab(const std::vector<TweetRecord>& tweets, const Preprocessor& pre,
                               std::int64_t min_count = 50, bool bigrams = true) {
    for (const auto& t : tweets)
        if (t.event_id != tweets.front().event_id)
            throw PreconditionError("build_event_vocab: tweets span events '" + tweets.front().event_id + "' and '" +
                                    t.event_id + "'");
    std::vector<std::string> keep;
    for (auto& [item, c] : count_items(tweets, pre, bigrams))
        if (c >= min_count) keep.push_back(item);
    return Vocab(std::move(keep));
}

/// Stems (unigrams only) occurring at least `min_count` times in each of at
/// least `min_events` events.
inline Vocab build_joint_vocab(const std::map<std::string, std::vector<TweetRecord>>& samples,
                               const Preprocessor& pre, std::int64_t min_count = 10, std::size_t min_events = 3) {
    if (samples.size() < min_events)
        throw PreconditionError("build_joint_vocab: " + std::to_string(samples.size()) + " events present, " +
                                std::to_string(min_events) + " required");
    std::unordered_map<std::string, std::size_t> events_ok;
    for (const auto& [event, tweets] : samples)
        for (auto& [stem_, c] : count_items(tweets, pre, false))
            if (c >= min_count) ++events_ok[stem_];
    std::vector<std::string> keep;
    for (auto& [s, n] : events_ok)
        if (n >= min_events) keep.push_back(s);
    return Vocab(std::move(keep));
}

/// Sparse per-user count rows c_i over a vocabulary. Rows are sorted by
/// column index; users are sorted by id.
struct UserTokenCounts {
    using Entry = std::pair<std::uint32_t, std::int64_t>;

    std::vector<std::string> users;
    std::vector<Party> labels;
    std::vector<std::vector<Entry>> rows;
    std::vector<std::int64_t> totals;  // m_i
    std::size_t vocab_size = 0;

    std::size_t size() const { return users.size(); }

    std::size_t count(Party p) const { return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), p)); }
};

/// Builds counts from per-user item maps. Users with an Unassigned (or
/// missing) label, or with no counts, are dropped.
inline UserTokenCounts make_counts(const std::map<std::string, std::map<std::uint32_t, std::int64_t>>& per_user,
                                   const Labels& labels, std::size_t vocab_size) {
    UserTokenCounts out;
    out.vocab_size = vocab_size;
    for (const auto& [user, row] : per_user) {
        auto it = labels.find(user);
        if (it == labels.end() || it->second == Party::Unassigned) continue;
        std::vector<UserTokenCounts::Entry> entries;
        std::int64_t m = 0;
        for (const auto& [j, c] : row) {
            if (c < 0) throw PreconditionError("negative count for user '" + user + "'");
            if (j >= vocab_size) throw PreconditionError("token index out of range for user '" + user + "'");
            if (c == 0) continue;
            entries.emplace_back(j, c);
            m += c;
        }
        if (m == 0) continue;
        out.users.push_back(user);
        out.labels.push_back(it->second);
        out.rows.push_back(std::move(entries));
        out.totals.push_back(m);
    }
    return out;
}

/// Per-user summed counts of vocabulary items over the tweets.
inline UserTokenCounts count_user_tokens(const std::vector<TweetRecord>& tweets, const Vocab& vocab,
                                         const Preprocessor& pre, const Labels& labels) {
    std::map<std::string, std::map<std::uint32_t, std::int64_t>> per_user;
    for (const auto& t : tweets) {
        auto it = labels.find(t.user_id);
        if (it == labels.end() || it->second == Party::Unassigned) continue;
        auto& row = per_user[t.user_id];
        for (const auto& item : doc_items(pre.stems(t.text)))
            if (auto j = vocab.find(item)) ++row[static_cast<std::uint32_t>(*j)];
    }
    return make_counts(per_user, labels, vocab.size());
}

// ---------------------------------------------------------------------------
// Serialization: vocab.csv (index,token) and counts.csv (user_id,token_index,count)

inline void save_vocab(const std::filesystem::path& path, const Vocab& vocab) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    csv::Writer w(out);
    w.row("index", "token");
    for (std::size_t i = 0; i < vocab.size(); ++i) w.row(i, vocab[i]);
}

inline Vocab load_vocab(const std::filesystem::path& path) {
    auto t = csv::read_table(path.string());
    const std::size_t c_tok = t.require("token");
    std::vector<std::string> entries;
    for (const auto& r : t.rows) entries.push_back(r[c_tok]);
    return Vocab(std::move(entries));
}

inline void save_counts(const std::filesystem::path& path, const UserTokenCounts& counts) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    csv::Writer w(out);
    w.row("user_id", "token_index", "count");
    for (std::size_t i = 0; i < counts.size(); ++i)
        for (const auto& [j, c] : counts.rows[i]) w.row(counts.users[i], static_cast<std::size_t>(j), c);
}

inline UserTokenCounts load_counts(const std::filesystem::path& path, const Labels& labels, std::size_t vocab_size) {
    auto t = csv::read_table(path.string());
    const std::size_t c_user = t.require("user_id"), c_idx = t.require("token_index"), c_cnt = t.require("count");
    std::map<std::string, std::map<std::uint32_t, std::int64_t>> per_user;
    for (const auto& r : t.rows)
        per_user[r[c_user]][static_cast<std::uint32_t>(csv::parse_int(r[c_idx]))] += csv::parse_int(r[c_cnt]);
    return make_counts(per_user, labels, vocab_size);
}

}  // namespace polar
