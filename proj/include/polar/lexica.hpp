#pragma once

// Partisan log-odds with a symmetric Dirichlet prior, within-group
// standardization, lexicon induction by embedding proximity and lexical
// category log-odds.

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
#include <vector>

#include "polar/corpus.hpp"
#include "polar/csv.hpp"
#include "polar/embed.hpp"
#include "polar/error.hpp"
#include "polar/resources.hpp"
#include "polar/stats.hpp"
#include "polar/textprep.hpp"

namespace polar {

/// Sign convention: Democrat-leaning < 0 < Republican-leaning.
struct LogOddsEntry {
    std::string item;
    std::int64_t f_dem = 0;
    std::int64_t f_rep = 0;
    std::int64_t n_dem = 0;
    std::int64_t n_rep = 0;
    double delta = 0.0;
    double variance = 0.0;
    double z = 0.0;
    double raw_delta = 0.0;  // unsmoothed; may be infinite or nan
    double zscored = std::numeric_limits<double>::quiet_NaN();  // delta standardized within its group
};

struct LogOddsTable {
    std::vector<LogOddsEntry> entries;
    std::size_t vocab_size = 0;
    double alpha = 0.01;

    const LogOddsEntry* find(std::string_view item) const {
        for (const auto& e : entries)
            if (e.item == item) return &e;
        return nullptr;
    }
};

/// Log-odds of one item used f_dem of n_dem times by Democrats and f_rep of
/// n_rep times by Republicans, over a vocabulary of `vocab_size` items:
///   delta = log[(f_R + a) / (N_R + a|V| - f_R - a)] - log[(f_D + a) / (N_D + a|V| - f_D - a)]
///   variance = 1/(f_D + a) + 1/(f_R + a),  z = delta / sqrt(variance).
inline LogOddsEntry log_odds(std::string item, std::int64_t f_dem, std::int64_t f_rep, std::int64_t n_dem,
                             std::int64_t n_rep, std::size_t vocab_size, double alpha = 0.01) {
    if (!(alpha > 0.0)) throw PreconditionError("log_odds: prior alpha must be positive");
    if (n_dem <= 0 || n_rep <= 0) throw PreconditionError("log_odds: party totals must be positive");
    if (vocab_size < 1) throw PreconditionError("log_odds: empty vocabulary");
    if (f_dem < 0 || f_rep < 0 || f_dem > n_dem || f_rep > n_rep)
        throw PreconditionError("log_odds: counts for '" + item + "' outside [0, total]");
    const double a = alpha, v = static_cast<double>(vocab_size);
    const double fd = static_cast<double>(f_dem), fr = static_cast<double>(f_rep);
    const double nd = static_cast<double>(n_dem), nr = static_cast<double>(n_rep);
    const double rest_d = nd + a * v - fd - a, rest_r = nr + a * v - fr - a;
    if (!(rest_d > 0.0) || !(rest_r > 0.0))
        throw PreconditionError("log_odds: '" + item + "' takes the whole party total in a one-item vocabulary");
    LogOddsEntry e;
    e.item = std::move(item);
    e.f_dem = f_dem;
    e.f_rep = f_rep;
    e.n_dem = n_dem;
    e.n_rep = n_rep;
    e.delta = std::log((fr + a) / rest_r) - std::log((fd + a) / rest_d);
    e.variance = 1.0 / (fd + a) + 1.0 / (fr + a);
    e.z = e.delta / std::sqrt(e.variance);
    e.raw_delta = std::log(fr / (nr - fr)) - std::log(fd / (nd - fd));
    return e;
}

/// Log-odds of every item in either map; N is each map's total and |V| the
/// number of distinct items.
inline LogOddsTable token_log_odds(const std::map<std::string, std::int64_t>& counts_dem,
                                   const std::map<std::string, std::int64_t>& counts_rep, double alpha = 0.01) {
    std::set<std::string> items;
    std::int64_t nd = 0, nr = 0;
    for (const auto& [k, c] : counts_dem) {
        items.insert(k);
        nd += c;
    }
    for (const auto& [k, c] : counts_rep) {
        items.insert(k);
        nr += c;
    }
    LogOddsTable t;
    t.vocab_size = items.size();
    t.alpha = alpha;
    auto get = [](const auto& m, const std::string& k) {
        auto it = m.find(k);
        return it == m.end() ? std::int64_t{0} : it->second;
    };
    for (const auto& k : items)
        t.entries.push_back(log_odds(k, get(counts_dem, k), get(counts_rep, k), nd, nr, t.vocab_size, alpha));
    return t;
}

/// Per-token log-odds from user counts: f = party's summed count of the
/// token, N = party's total in-vocabulary count, |V| = vocabulary size.
/// Tokens no partisan user used are skipped.
inline LogOddsTable event_token_log_odds(const UserTokenCounts& counts, const Vocab& vocab, double alpha = 0.01) {
    std::vector<std::int64_t> fd(vocab.size(), 0), fr(vocab.size(), 0);
    std::int64_t nd = 0, nr = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const bool dem = counts.labels[i] == Party::Democrat;
        if (!dem && counts.labels[i] != Party::Republican) continue;
        for (const auto& [j, c] : counts.rows[i]) (dem ? fd : fr)[j] += c;
        (dem ? nd : nr) += counts.totals[i];
    }
    LogOddsTable t;
    t.vocab_size = vocab.size();
    t.alpha = alpha;
    for (std::size_t j = 0; j < vocab.size(); ++j)
        if (fd[j] + fr[j] > 0) t.entries.push_back(log_odds(vocab[j], fd[j], fr[j], nd, nr, vocab.size(), alpha));
    return t;
}

/// Standardizes delta within each table: zscored = (delta - mean) / sd with
/// the sample SD.
inline void zscore_within_group(std::map<std::string, LogOddsTable>& tables) {
    for (auto& [group, t] : tables) {
        if (t.entries.size() < 2)
            throw PreconditionError("zscore_within_group: group '" + group + "' has fewer than two items");
        std::vector<double> d;
        for (const auto& e : t.entries) d.push_back(e.delta);
        const double m = stats::mean(d), sd = stats::stddev(d);
        if (!(sd > 0.0)) throw NumericError("zscore_within_group: group '" + group + "' has zero spread");
        for (auto& e : t.entries) e.zscored = (e.delta - m) / sd;
    }
}

inline void save_log_odds(std::ostream& out, const LogOddsTable& t, bool header = true) {
    csv::Writer w(out);
    if (header) w.row("item", "f_dem", "f_rep", "n_dem", "n_rep", "delta", "variance", "z", "raw_delta", "zscored");
    for (const auto& e : t.entries)
        w.row(e.item, e.f_dem, e.f_rep, e.n_dem, e.n_rep, e.delta, e.variance, e.z, e.raw_delta, e.zscored);
}

// ---------------------------------------------------------------------------
// Lexicons

struct Lexicon {
    std::string category;
    std::vector<std::string> stems;  // sorted
    std::vector<std::string> seeds;  // sorted

    bool contains(const std::string& s) const { return std::binary_search(stems.begin(), stems.end(), s); }
};

/// Lexicon file: "category: NAME" on the first line, then one stem per line.
inline Lexicon load_lexicon(const std::filesystem::path& path, const std::filesystem::path& seeds_path = {}) {
    auto lines = load_word_list(path);
    if (lines.empty() || lines.front().rfind("category:", 0) != 0)
        throw IoError(path.string() + ": missing 'category:' header");
    Lexicon lex;
    lex.category = trim(std::string_view(lines.front()).substr(9));
    lex.stems.assign(lines.begin() + 1, lines.end());
    std::sort(lex.stems.begin(), lex.stems.end());
    lex.stems.erase(std::unique(lex.stems.begin(), lex.stems.end()), lex.stems.end());
    if (!seeds_path.empty()) {
        auto s = load_word_list(seeds_path);
        if (!s.empty() && s.front().rfind("category:", 0) == 0) s.erase(s.begin());
        std::sort(s.begin(), s.end());
        lex.seeds = std::move(s);
    }
    return lex;
}

inline void save_lexicon(const std::filesystem::path& path, const Lexicon& lex) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << "category: " << lex.category << '\n';
    for (const auto& s : lex.stems) out << s << '\n';
}

struct LexiconCandidate {
    std::string stem;
    double mean_distance = 0.0;
};

/// The `size` vocabulary stems with the lowest mean cosine distance to the
/// seed stems, ties broken lexicographically. `ranking`, when given,
/// receives the selected stems with their mean distances.
inline Lexicon induce_lexicon(std::vector<std::string> seeds, const std::string& category,
                              const EmbeddingTable& table, const std::vector<std::string>& vocab,
                              std::size_t size = 30, std::vector<LexiconCandidate>* ranking = nullptr) {
    if (seeds.empty()) throw PreconditionError("induce_lexicon: no seeds for '" + category + "'");
    std::sort(seeds.begin(), seeds.end());
    seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());
    for (const auto& s : seeds)
        if (!table.contains(s)) throw PreconditionError("induce_lexicon: seed '" + s + "' has no embedding");
    std::vector<std::string> pool(vocab);
    std::sort(pool.begin(), pool.end());
    pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
    std::vector<LexiconCandidate> cand;
    cand.reserve(pool.size());
    for (const auto& w : pool) {
        auto v = table.find(w);
        if (!v) throw PreconditionError("induce_lexicon: vocabulary stem '" + w + "' has no embedding");
        double s = 0.0;
        for (const auto& seed : seeds) s += cosine_distance(*v, table.at(seed));
        cand.push_back({w, s / static_cast<double>(seeds.size())});
    }
    std::stable_sort(cand.begin(), cand.end(), [](const auto& a, const auto& b) {
        return a.mean_distance < b.mean_distance;
    });
    if (cand.size() > size) cand.resize(size);
    Lexicon lex;
    lex.category = category;
    lex.seeds = seeds;
    for (const auto& c : cand) lex.stems.push_back(c.stem);
    std::sort(lex.stems.begin(), lex.stems.end());
    if (ranking) *ranking = std::move(cand);
    return lex;
}

/// Category log-odds for one event: f = the party's count of lexicon stems,
/// N = the party's count of in-vocabulary stems, |V| = vocabulary size.
inline LogOddsEntry category_log_odds(const std::vector<TweetRecord>& tweets, const Labels& labels,
                                      const Lexicon& lexicon, const Vocab& vocab, const Preprocessor& pre,
                                      double alpha = 0.01) {
    if (lexicon.stems.empty()) throw PreconditionError("category_log_odds: lexicon '" + lexicon.category + "' is empty");
    std::int64_t fd = 0, fr = 0, nd = 0, nr = 0;
    for (const auto& t : tweets) {
        auto it = labels.find(t.user_id);
        if (it == labels.end() || it->second == Party::Unassigned) continue;
        const bool dem = it->second == Party::Democrat;
        for (const auto& s : pre.stems(t.text)) {
            if (!vocab.contains(s)) continue;
            (dem ? nd : nr)++;
            if (lexicon.contains(s)) (dem ? fd : fr)++;
        }
    }
    return log_odds(lexicon.category, fd, fr, nd, nr, vocab.size(), alpha);
}

}  // namespace polar
