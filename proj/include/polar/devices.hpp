#pragma once

// Framing devices: tracked tokens grouped by shooter race, grounding through
// context events, modals and their topic representation, pronoun categories
// and modal collocations.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "polar/corpus.hpp"
#include "polar/csv.hpp"
#include "polar/error.hpp"
#include "polar/lexica.hpp"
#include "polar/resources.hpp"
#include "polar/tokenize.hpp"

namespace polar {

// ---------------------------------------------------------------------------
// Tracked tokens

struct TrackedTokenReport {
    std::string token;
    std::map<std::string, LogOddsEntry> per_event;
    std::map<std::string, std::vector<double>> groups;  // race -> deltas in event-id order
    std::map<std::string, std::pair<std::size_t, std::size_t>> sign_counts;  // race -> (#dem-leaning, #rep-leaning)
};

/// Collects the token's per-event log-odds (events where either party used
/// it) and groups the deltas by the event's shooter race.
inline TrackedTokenReport track_token(const std::string& token, const std::map<std::string, LogOddsTable>& per_event,
                                      const std::vector<EventMeta>& events) {
    TrackedTokenReport r;
    r.token = token;
    for (const auto& [event_id, table] : per_event) {
        const auto* e = table.find(token);
        if (!e || e->f_dem + e->f_rep == 0) continue;
        const auto& meta = find_event(events, event_id);
        const std::string race(race_name(meta.shooter_race));
        r.per_event.emplace(event_id, *e);
        r.groups[race].push_back(e->delta);
        auto& sc = r.sign_counts[race];
        if (e->delta < 0.0) ++sc.first;
        else if (e->delta > 0.0) ++sc.second;
    }
    if (r.per_event.empty()) throw PreconditionError("track_token: '" + token + "' does not occur in any event");
    return r;
}

// ---------------------------------------------------------------------------
// Grounding

struct ContextEvent {
    std::string name;
    std::string linked_event_id;  // focal event this context event is, if any
    std::vector<std::string> keywords;
};

/// CSV with columns name, linked_event_id, keywords (';'-separated).
inline std::vector<ContextEvent> load_context_events(const std::filesystem::path& path) {
    auto t = csv::read_table(path.string());
    const auto c_name = t.require("name"), c_kw = t.require("keywords");
    const auto c_link = t.column("linked_event_id");
    std::vector<ContextEvent> out;
    for (const auto& r : t.rows) {
        ContextEvent c;
        c.name = r[c_name];
        if (c_link) c.linked_event_id = r[*c_link];
        c.keywords = detail::split_keywords(r[c_kw]);
        if (c.keywords.empty()) throw IoError(path.string() + ": context event '" + c.name + "' has no keywords");
        out.push_back(std::move(c));
    }
    return out;
}

/// Names of the context events a text mentions (same matcher as the
/// relevance filter). Context events linked to `focal_event_id` are skipped.
inline std::vector<std::string> context_mentions(std::string_view text, const std::vector<ContextEvent>& contexts,
                                                 std::string_view focal_event_id = {}) {
    const MentionMatcher m(text);
    std::vector<std::string> out;
    for (const auto& c : contexts) {
        if (!focal_event_id.empty() && c.linked_event_id == focal_event_id) continue;
        if (m.matches_any(c.keywords)) out.push_back(c.name);
    }
    return out;
}

struct ContextEventReport {
    std::string context_event;
    std::int64_t mentions_dem = 0;
    std::int64_t mentions_rep = 0;
    double dem_share = 0.0;
    double rep_share = 0.0;
    LogOddsEntry log_odds;
};

/// Per context event: partisan tweets mentioning it (each tweet once), kept
/// when either party reaches `min_mentions`. Log-odds use N = the party's
/// tweet count and |V| = the number of context events.
inline std::vector<ContextEventReport> grounding_log_odds(const std::vector<TweetRecord>& tweets, const Labels& labels,
                                                          const std::vector<ContextEvent>& contexts,
                                                          std::string_view focal_event_id = {},
                                                          std::int64_t min_mentions = 100, double alpha = 0.01) {
    if (contexts.empty()) throw PreconditionError("grounding_log_odds: no context events");
    std::map<std::string, std::pair<std::int64_t, std::int64_t>> hits;
    std::int64_t nd = 0, nr = 0;
    for (const auto& t : tweets) {
        auto it = labels.find(t.user_id);
        if (it == labels.end() || it->second == Party::Unassigned) continue;
        const bool dem = it->second == Party::Democrat;
        (dem ? nd : nr)++;
        for (const auto& name : context_mentions(t.text, contexts, focal_event_id)) {
            auto& h = hits[name];
            (dem ? h.first : h.second)++;
        }
    }
    std::vector<ContextEventReport> out;
    if (nd == 0 || nr == 0) return out;
    for (const auto& c : contexts) {
        auto it = hits.find(c.name);
        if (it == hits.end()) continue;
        const auto [md, mr] = it->second;
        if (md < min_mentions && mr < min_mentions) continue;
        ContextEventReport r;
        r.context_event = c.name;
        r.mentions_dem = md;
        r.mentions_rep = mr;
        r.dem_share = static_cast<double>(md) / static_cast<double>(nd);
        r.rep_share = static_cast<double>(mr) / static_cast<double>(nr);
        r.log_odds = log_odds(c.name, md, mr, nd, nr, contexts.size(), alpha);
        out.push_back(std::move(r));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Modals

/// Expands negated and perfect contractions of should/must/need/have/has/had,
/// with or without the apostrophe ("shouldn't", "shouldnt" -> should not;
/// "should've" -> should have). Other tokens pass through.
inline std::vector<std::string> normalize_contractions(const std::vector<std::string>& tokens) {
    static const std::unordered_map<std::string, std::pair<std::string, std::string>> table = [] {
        std::unordered_map<std::string, std::pair<std::string, std::string>> t;
        for (const char* base : {"should", "must", "need", "have", "has", "had"}) {
            const std::string b(base);
            t[b + "n't"] = {b, "not"};
            t[b + "nt"] = {b, "not"};
        }
        for (const char* base : {"should", "must"}) {
            const std::string b(base);
            t[b + "'ve"] = {b, "have"};
            t[b + "ve"] = {b, "have"};
        }
        return t;
    }();
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (const auto& tok : tokens) {
        auto it = table.find(tok);
        if (it == table.end()) {
            out.push_back(tok);
        } else {
            out.push_back(it->second.first);
            out.push_back(it->second.second);
        }
    }
    return out;
}

/// Modal name -> surface patterns (each a token sequence).
using ModalForms = std::map<std::string, std::vector<std::vector<std::string>>>;

inline const ModalForms& default_modal_forms() {
    static const ModalForms forms = {
        {"have to", {{"have", "to"}, {"has", "to"}, {"had", "to"}, {"having", "to"}}},
        {"must", {{"must"}}},
        {"need to", {{"need", "to"}, {"needs", "to"}, {"needed", "to"}}},
        {"should", {{"should"}}},
        {"should have", {{"should", "have"}}},
    };
    return forms;
}

/// Tokens used for modal matching: tokenized text with contractions expanded.
inline std::vector<std::string> modal_tokens(std::string_view text) { return normalize_contractions(tokenize(text)); }

struct PatternMatch {
    std::size_t begin = 0;
    std::size_t end = 0;  // one past the last pattern token
};

inline std::vector<PatternMatch> find_patterns(const std::vector<std::string>& tokens,
                                               const std::vector<std::vector<std::string>>& patterns) {
    std::vector<PatternMatch> out;
    for (std::size_t i = 0; i < tokens.size(); ++i)
        for (const auto& p : patterns) {
            if (p.empty() || i + p.size() > tokens.size()) continue;
            if (std::equal(p.begin(), p.end(), tokens.begin() + static_cast<std::ptrdiff_t>(i))) {
                out.push_back({i, i + p.size()});
                break;
            }
        }
    return out;
}

/// Modals present in a tweet.
inline std::set<std::string> modal_hits(std::string_view text, const ModalForms& forms = default_modal_forms()) {
    const auto toks = modal_tokens(text);
    std::set<std::string> out;
    for (const auto& [name, patterns] : forms)
        if (!find_patterns(toks, patterns).empty()) out.insert(name);
    return out;
}

/// Modal log-odds for one event: f = the party's tweets containing the modal,
/// N = the party's tweets, |V| = number of modals.
inline LogOddsTable modal_partisanship(const std::vector<TweetRecord>& tweets, const Labels& labels,
                                       const ModalForms& forms = default_modal_forms(), double alpha = 0.01) {
    if (forms.empty()) throw PreconditionError("modal_partisanship: no modal forms");
    std::map<std::string, std::pair<std::int64_t, std::int64_t>> f;
    std::int64_t nd = 0, nr = 0;
    for (const auto& t : tweets) {
        auto it = labels.find(t.user_id);
        if (it == labels.end() || it->second == Party::Unassigned) continue;
        const bool dem = it->second == Party::Democrat;
        (dem ? nd : nr)++;
        for (const auto& m : modal_hits(t.text, forms)) (dem ? f[m].first : f[m].second)++;
    }
    LogOddsTable table;
    table.vocab_size = forms.size();
    table.alpha = alpha;
    for (const auto& [name, patterns] : forms) {
        const auto c = f[name];
        table.entries.push_back(log_odds(name, c.first, c.second, nd, nr, forms.size(), alpha));
    }
    return table;
}

struct ModalRepresentation {
    std::string modal;
    std::map<std::size_t, double> per_topic;  // p_x^m, topics with f_x > 0
    std::map<std::size_t, std::int64_t> f_x;
    std::map<std::size_t, std::int64_t> f_x_m;
};

/// p_x^m = (f_x^m / sum f^m) / (f_x / sum f) from per-topic tweet counts.
inline ModalRepresentation modal_representation(const std::string& modal, const std::map<std::size_t, std::int64_t>& f_x,
                                                const std::map<std::size_t, std::int64_t>& f_x_m) {
    std::int64_t total = 0, total_m = 0;
    for (const auto& [x, c] : f_x) total += c;
    for (const auto& [x, c] : f_x_m) {
        auto it = f_x.find(x);
        if (it == f_x.end() || c > it->second)
            throw PreconditionError("modal_representation: modal count exceeds topic count for topic " + std::to_string(x));
        total_m += c;
    }
    if (total_m == 0) throw PreconditionError("modal_representation: '" + modal + "' never occurs");
    ModalRepresentation r;
    r.modal = modal;
    for (const auto& [x, c] : f_x) {
        if (c == 0) continue;
        auto m = f_x_m.find(x);
        const std::int64_t cm = m == f_x_m.end() ? 0 : m->second;
        r.f_x[x] = c;
        r.f_x_m[x] = cm;
        r.per_topic[x] = (static_cast<double>(cm) / static_cast<double>(total_m)) /
                         (static_cast<double>(c) / static_cast<double>(total));
    }
    return r;
}

/// Representation of a modal across topics from tweet assignments and the
/// ids of tweets containing the modal.
inline ModalRepresentation modal_topic_representation(const std::map<std::string, std::size_t>& topic_of,
                                                      const std::set<std::string>& modal_tweets,
                                                      const std::string& modal) {
    std::map<std::size_t, std::int64_t> f, fm;
    for (const auto& [id, x] : topic_of) ++f[x];
    for (const auto& id : modal_tweets) {
        auto it = topic_of.find(id);
        if (it == topic_of.end())
            throw PreconditionError("modal_topic_representation: tweet '" + id + "' has no topic assignment");
        ++fm[it->second];
    }
    return modal_representation(modal, f, fm);
}

// ---------------------------------------------------------------------------
// Pronouns

using WordCategories = std::map<std::string, std::set<std::string>>;

/// Category file: one "name: word word ..." line per category.
inline WordCategories load_word_categories(const std::filesystem::path& path) {
    WordCategories out;
    for (const auto& line : load_word_list(path)) {
        const auto colon = line.find(':');
        if (colon == std::string::npos) throw IoError(path.string() + ": expected 'name: words' in '" + line + "'");
        const std::string name = trim(std::string_view(line).substr(0, colon));
        auto& set = out[name];
        for (const auto& w : tokenize(line.substr(colon + 1))) set.insert(w);
    }
    return out;
}

/// Category log-odds for one event over raw tokens (contractions expanded):
/// f = the party's tokens in the category, N = the party's tokens,
/// |V| = distinct tokens in the event.
inline LogOddsTable pronoun_partisanship(const std::vector<TweetRecord>& tweets, const Labels& labels,
                                         const WordCategories& categories, double alpha = 0.01) {
    if (categories.empty()) throw PreconditionError("pronoun_partisanship: no categories");
    for (const auto& [name, words] : categories)
        if (words.empty()) throw PreconditionError("pronoun_partisanship: category '" + name + "' is empty");
    std::map<std::string, std::pair<std::int64_t, std::int64_t>> f;
    std::set<std::string> distinct;
    std::int64_t nd = 0, nr = 0;
    for (const auto& t : tweets) {
        const auto toks = modal_tokens(t.text);
        distinct.insert(toks.begin(), toks.end());
        auto it = labels.find(t.user_id);
        if (it == labels.end() || it->second == Party::Unassigned) continue;
        const bool dem = it->second == Party::Democrat;
        for (const auto& tok : toks) {
            (dem ? nd : nr)++;
            for (const auto& [name, words] : categories)
                if (words.count(tok)) (dem ? f[name].first : f[name].second)++;
        }
    }
    LogOddsTable table;
    table.vocab_size = std::max<std::size_t>(distinct.size(), 1);
    table.alpha = alpha;
    for (const auto& [name, words] : categories) {
        const auto c = f[name];
        table.entries.push_back(log_odds(name, c.first, c.second, nd, nr, table.vocab_size, alpha));
    }
    return table;
}

// ---------------------------------------------------------------------------
// Collocations

/// Collocations around each occurrence of the modal in a tweet: the token
/// before, the matched modal tokens and one or two following tokens.
inline std::set<std::string> modal_collocations_in(const std::vector<std::string>& tokens,
                                                   const std::vector<std::vector<std::string>>& patterns) {
    std::set<std::string> out;
    for (const auto& m : find_patterns(tokens, patterns)) {
        if (m.begin == 0 || m.end >= tokens.size()) continue;
        std::string c = tokens[m.begin - 1];
        for (std::size_t i = m.begin; i < m.end; ++i) c += ' ' + tokens[i];
        c += ' ' + tokens[m.end];
        out.insert(c);
        if (m.end + 1 < tokens.size()) out.insert(c + ' ' + tokens[m.end + 1]);
    }
    return out;
}

struct CollocationResult {
    std::string collocation;
    Party side = Party::Unassigned;
    std::vector<std::string> events;  // events passing the threshold on this side
    double mean_zscored = 0.0;
};

struct CollocationReport {
    std::string modal;
    std::map<std::string, LogOddsTable> per_event;  // z-scored within event
    std::vector<CollocationResult> kept;
};

/// Partisan collocations of one modal. Per event, each collocation is counted
/// once per partisan tweet and scored by log-odds (N = the party's total
/// collocation count, |V| = distinct collocations), then standardized within
/// the event. A collocation is kept on a side when at least `min_events`
/// events have zscored beyond `z_threshold` in that direction and none beyond
/// it in the other. Events with fewer than two collocations, or no spread,
/// are skipped.
inline CollocationReport modal_collocations(const std::map<std::string, std::vector<TweetRecord>>& tweets_by_event,
                                            const Labels& labels, const std::string& modal,
                                            const ModalForms& forms = default_modal_forms(), double z_threshold = 0.5,
                                            std::size_t min_events = 3, double alpha = 0.01) {
    auto pf = forms.find(modal);
    if (pf == forms.end()) throw PreconditionError("modal_collocations: unknown modal '" + modal + "'");
    CollocationReport rep;
    rep.modal = modal;
    for (const auto& [event, tweets] : tweets_by_event) {
        std::map<std::string, std::int64_t> cd, cr;
        bool any_dem = false, any_rep = false;
        for (const auto& t : tweets) {
            auto it = labels.find(t.user_id);
            if (it == labels.end() || it->second == Party::Unassigned) continue;
            const bool dem = it->second == Party::Democrat;
            for (const auto& c : modal_collocations_in(modal_tokens(t.text), pf->second)) {
                (dem ? cd : cr)[c]++;
                (dem ? any_dem : any_rep) = true;
            }
        }
        if (!any_dem || !any_rep) continue;
        auto table = token_log_odds(cd, cr, alpha);
        if (table.entries.size() < 2) continue;
        std::map<std::string, LogOddsTable> one{{event, std::move(table)}};
        try {
            zscore_within_group(one);
        } catch (const NumericError&) {
            continue;
        }
        rep.per_event.emplace(event, std::move(one.begin()->second));
    }
    std::map<std::string, std::vector<std::pair<std::string, double>>> strong;
    for (const auto& [event, table] : rep.per_event)
        for (const auto& e : table.entries)
            if (std::abs(e.zscored) >= z_threshold) strong[e.item].emplace_back(event, e.zscored);
    for (const auto& [item, evs] : strong) {
        std::vector<std::string> neg, pos;
        double sn = 0.0, sp = 0.0;
        for (const auto& [event, z] : evs) {
            if (z < 0.0) {
                neg.push_back(event);
                sn += z;
            } else {
                pos.push_back(event);
                sp += z;
            }
        }
        if (neg.size() >= min_events && pos.empty())
            rep.kept.push_back({item, Party::Democrat, neg, sn / static_cast<double>(neg.size())});
        if (pos.size() >= min_events && neg.empty())
            rep.kept.push_back({item, Party::Republican, pos, sp / static_cast<double>(pos.size())});
    }
    return rep;
}

}  // namespace polar
