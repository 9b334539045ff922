#pragma once

// Tweet records, event metadata, party labels and follow edges, plus the
// relevance filter and the follow-count party assignment.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "polar/csv.hpp"
#include "polar/error.hpp"
#include "polar/resources.hpp"
#include "polar/tokenize.hpp"

namespace polar {

struct TweetRecord {
    std::string tweet_id;
    std::string user_id;
    std::string event_id;
    std::int64_t timestamp = 0;  // UTC seconds
    std::string text;

    bool operator==(const TweetRecord&) const = default;
};

struct TweetCollection {
    std::vector<TweetRecord> tweets;
    std::size_t skipped = 0;
    std::vector<std::string> warnings;
};

enum class Party { Democrat, Republican, Unassigned };

inline std::string_view party_name(Party p) {
    switch (p) {
        case Party::Democrat: return "D";
        case Party::Republican: return "R";
        default: return "U";
    }
}

inline Party parse_party(std::string_view s) {
    if (s == "D" || s == "Democrat" || s == "dem") return Party::Democrat;
    if (s == "R" || s == "Republican" || s == "rep") return Party::Republican;
    if (s == "U" || s == "Unassigned" || s.empty()) return Party::Unassigned;
    throw IoError("unknown party label '" + std::string(s) + "'");
}

inline Party opposite(Party p) {
    if (p == Party::Democrat) return Party::Republican;
    if (p == Party::Republican) return Party::Democrat;
    return p;
}

using Labels = std::map<std::string, Party>;

enum class ShooterRace { white, person_of_color, unknown };

inline std::string_view race_name(ShooterRace r) {
    switch (r) {
        case ShooterRace::white: return "white";
        case ShooterRace::person_of_color: return "person_of_color";
        default: return "unknown";
    }
}

/// Maps a race/ethnicity description to the two analysis groups: "White" is
/// white, any other named group (including "Mixed") is a person of color.
inline ShooterRace parse_race(std::string_view s) {
    std::string l;
    for (char c : s) l.push_back(ascii_lower(c));
    if (l.empty() || l == "unknown") return ShooterRace::unknown;
    if (l == "white") return ShooterRace::white;
    return ShooterRace::person_of_color;
}

/// Days since 1970-01-01 for an ISO "YYYY-MM-DD" date.
inline std::int64_t parse_iso_date(std::string_view s) {
    int y = 0;
    unsigned m = 0, d = 0;
    char dash1 = 0, dash2 = 0;
    std::istringstream in{std::string(s)};
    if (!(in >> y >> dash1 >> m >> dash2 >> d) || dash1 != '-' || dash2 != '-')
        throw IoError("bad date '" + std::string(s) + "'");
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
    if (!ymd.ok()) throw IoError("bad date '" + std::string(s) + "'");
    return std::chrono::sys_days{ymd}.time_since_epoch().count();
}

struct EventMeta {
    std::string event_id;
    std::string name;
    std::string date;           // ISO date
    std::int64_t day = 0;       // days since epoch
    std::vector<std::string> keywords;
    ShooterRace shooter_race = ShooterRace::unknown;
    std::string location_kind;

    std::int64_t start_seconds() const { return day * 86400; }

    /// Day bucket d covers [date + d, date + d + 1).
    std::int64_t day_of(std::int64_t timestamp) const {
        const std::int64_t rel = timestamp - start_seconds();
        return rel >= 0 ? rel / 86400 : -((-rel + 86399) / 86400);
    }
};

struct FollowEdge {
    std::string user_id;
    std::string politician_handle;
};

// ---------------------------------------------------------------------------
// Loading

enum class TweetFormat { jsonl, csv };

inline TweetFormat format_for(const std::filesystem::path& path) {
    return path.extension() == ".csv" ? TweetFormat::csv : TweetFormat::jsonl;
}

namespace detail {

inline std::optional<TweetRecord> tweet_from_json(const nlohmann::json& j) {
    if (!j.is_object()) return std::nullopt;
    TweetRecord t;
    for (auto [key, dst] : {std::pair{"tweet_id", &t.tweet_id}, std::pair{"user_id", &t.user_id},
                            std::pair{"event_id", &t.event_id}, std::pair{"text", &t.text}}) {
        auto it = j.find(key);
        if (it == j.end()) return std::nullopt;
        if (it->is_string()) {
            *dst = it->get<std::string>();
        } else if (it->is_number_integer() && std::string_view(key) != "text") {
            *dst = std::to_string(it->get<std::int64_t>());
        } else {
            return std::nullopt;
        }
    }
    auto ts = j.find("timestamp");
    if (ts == j.end()) return std::nullopt;
    if (ts->is_number_integer()) {
        t.timestamp = ts->get<std::int64_t>();
    } else if (ts->is_string()) {
        try {
            t.timestamp = csv::parse_int(ts->get<std::string>());
        } catch (const IoError&) {
            return std::nullopt;
        }
    } else {
        return std::nullopt;
    }
    return t;
}

}  // namespace detail

inline TweetCollection read_tweets(std::istream& in, TweetFormat format) {
    TweetCollection out;
    if (format == TweetFormat::jsonl) {
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (trim(line).empty()) continue;
            auto j = nlohmann::json::parse(line, nullptr, false);
            auto t = j.is_discarded() ? std::nullopt : detail::tweet_from_json(j);
            if (!t) {
                ++out.skipped;
                out.warnings.push_back("line " + std::to_string(lineno) + ": malformed tweet record skipped");
                continue;
            }
            out.tweets.push_back(std::move(*t));
        }
        return out;
    }
    csv::Row header, row;
    if (!csv::read_record(in, header)) return out;
    auto col = [&](std::string_view name) -> std::size_t {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        throw IoError("tweet CSV lacks column '" + std::string(name) + "'");
    };
    const std::size_t c_id = col("tweet_id"), c_user = col("user_id"), c_event = col("event_id"),
                      c_ts = col("timestamp"), c_text = col("text");
    std::size_t lineno = 1;
    while (csv::read_record(in, row)) {
        ++lineno;
        if (row.size() == 1 && row[0].empty()) continue;
        if (row.size() != header.size()) {
            ++out.skipped;
            out.warnings.push_back("record " + std::to_string(lineno) + ": wrong field count, skipped");
            continue;
        }
        TweetRecord t{row[c_id], row[c_user], row[c_event], 0, row[c_text]};
        try {
            t.timestamp = csv::parse_int(row[c_ts]);
        } catch (const IoError&) {
            ++out.skipped;
            out.warnings.push_back("record " + std::to_string(lineno) + ": bad timestamp, skipped");
            continue;
        }
        out.tweets.push_back(std::move(t));
    }
    return out;
}

/// Reads tweets from JSONL or CSV. Malformed records are skipped and counted.
inline TweetCollection load_tweets(const std::filesystem::path& path, TweetFormat format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return read_tweets(in, format);
}

inline TweetCollection load_tweets(const std::filesystem::path& path) { return load_tweets(path, format_for(path)); }

inline void write_tweets(std::ostream& out, const std::vector<TweetRecord>& tweets, TweetFormat format) {
    if (format == TweetFormat::jsonl) {
        for (const auto& t : tweets) {
            nlohmann::ordered_json j;
            j["tweet_id"] = t.tweet_id;
            j["user_id"] = t.user_id;
            j["event_id"] = t.event_id;
            j["timestamp"] = t.timestamp;
            j["text"] = t.text;
            out << j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) << '\n';
        }
        return;
    }
    csv::Writer w(out);
    w.row("tweet_id", "user_id", "event_id", "timestamp", "text");
    for (const auto& t : tweets) w.row(t.tweet_id, t.user_id, t.event_id, t.timestamp, t.text);
}

inline void save_tweets(const std::filesystem::path& path, const std::vector<TweetRecord>& tweets,
                        TweetFormat format) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    write_tweets(out, tweets, format);
}

namespace detail {

inline std::vector<std::string> split_keywords(std::string_view s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        auto end = s.find(';', start);
        if (end == std::string_view::npos) end = s.size();
        std::string k = normalize_text(trim(s.substr(start, end - start)));
        if (!k.empty()) out.push_back(std::move(k));
        start = end + 1;
    }
    return out;
}

}  // namespace detail

/// Event table: event_id, name, date, shooter_race (or shooter_race_raw),
/// location_kind, keywords (';'-separated). Other columns are ignored.
inline std::vector<EventMeta> load_events(const std::filesystem::path& path) {
    auto t = csv::read_table(path.string());
    const std::size_t c_id = t.require("event_id"), c_date = t.require("date"), c_kw = t.require("keywords");
    const auto c_name = t.column("name");
    const auto c_race = t.column("shooter_race");
    const auto c_kind = t.column("location_kind");
    std::vector<EventMeta> out;
    for (const auto& r : t.rows) {
        if (r.size() != t.header.size()) throw IoError(path.string() + ": ragged row for event '" + r[0] + "'");
        EventMeta e;
        e.event_id = r[c_id];
        e.name = c_name ? r[*c_name] : e.event_id;
        e.date = r[c_date];
        e.day = parse_iso_date(e.date);
        e.keywords = detail::split_keywords(r[c_kw]);
        if (e.keywords.empty()) throw IoError(path.string() + ": event '" + e.event_id + "' has no keywords");
        e.shooter_race = c_race ? parse_race(r[*c_race]) : ShooterRace::unknown;
        e.location_kind = c_kind ? r[*c_kind] : "";
        out.push_back(std::move(e));
    }
    return out;
}

inline const EventMeta& find_event(const std::vector<EventMeta>& events, std::string_view id) {
    for (const auto& e : events)
        if (e.event_id == id) return e;
    throw PreconditionError("unknown event '" + std::string(id) + "'");
}

/// Follow edges as CSV `user_id,handle`.
inline std::vector<FollowEdge> load_follow_edges(const std::filesystem::path& path) {
    auto t = csv::read_table(path.string());
    const std::size_t c_user = t.require("user_id"), c_handle = t.require("handle");
    std::vector<FollowEdge> out;
    out.reserve(t.rows.size());
    for (const auto& r : t.rows) {
        if (r.size() != t.header.size()) continue;
        out.push_back({r[c_user], r[c_handle]});
    }
    return out;
}

inline std::string normalize_handle(std::string_view h) {
    std::string out;
    for (char c : h) {
        if (c == '@') continue;
        out.push_back(ascii_lower(c));
    }
    return trim(out);
}

/// Handle list, one per line. Handles compare case-insensitively.
inline std::unordered_set<std::string> load_handles(const std::filesystem::path& path) {
    std::unordered_set<std::string> out;
    for (const auto& h : load_word_list(path)) out.insert(normalize_handle(h));
    return out;
}

inline Labels load_labels(const std::filesystem::path& path) {
    auto t = csv::read_table(path.string());
    const std::size_t c_user = t.require("user_id"), c_party = t.require("party");
    Labels out;
    for (const auto& r : t.rows) out[r[c_user]] = parse_party(r[c_party]);
    return out;
}

inline void save_labels(const std::filesystem::path& path, const Labels& labels) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    csv::Writer w(out);
    w.row("user_id", "party");
    for (const auto& [u, p] : labels) w.row(u, party_name(p));
}

// ---------------------------------------------------------------------------
// Party assignment

struct FollowCounts {
    std::size_t dem = 0;
    std::size_t rep = 0;
};

/// Per-user counts of followed handles from each list. Repeated edges count once.
inline std::map<std::string, FollowCounts> follow_counts(const std::vector<FollowEdge>& edges,
                                                         const std::unordered_set<std::string>& dem_handles,
                                                         const std::unordered_set<std::string>& rep_handles) {
    for (const auto& h : dem_handles)
        if (rep_handles.count(h)) throw PreconditionError("handle '" + h + "' is in both party lists");
    std::set<std::pair<std::string, std::string>> seen;
    std::map<std::string, FollowCounts> out;
    for (const auto& e : edges) {
        const std::string h = normalize_handle(e.politician_handle);
        auto& c = out[e.user_id];
        if (!seen.emplace(e.user_id, h).second) continue;
        if (dem_handles.count(h)) ++c.dem;
        else if (rep_handles.count(h)) ++c.rep;
    }
    return out;
}

/// Democrat if the user follows more Democratic than Republican handles,
/// Republican if the reverse, Unassigned on a tie (including none).
inline Labels assign_party(const std::vector<FollowEdge>& edges, const std::unordered_set<std::string>& dem_handles,
                           const std::unordered_set<std::string>& rep_handles) {
    Labels out;
    for (const auto& [user, c] : follow_counts(edges, dem_handles, rep_handles))
        out[user] = c.dem > c.rep ? Party::Democrat : c.rep > c.dem ? Party::Republican : Party::Unassigned;
    return out;
}

inline double partisan_coverage(const Labels& labels) {
    if (labels.empty()) throw PreconditionError("partisan_coverage: empty label map");
    std::size_t assigned = 0;
    for (const auto& [u, p] : labels)
        if (p != Party::Unassigned) ++assigned;
    return static_cast<double>(assigned) / static_cast<double>(labels.size());
}

// ---------------------------------------------------------------------------
// Keyword and lemma matching

/// Mention detector over one text. A keyword matches when it occurs as a
/// whole-word substring of the normalized text, or, with its spaces removed,
/// inside a hashtag ("vegas" in "#lasvegasshooting", "sandy hook" in
/// "#sandyhook").
class MentionMatcher {
public:
    explicit MentionMatcher(std::string_view text) : norm_(normalize_text(text)) {
        for (std::size_t i = 0; i < norm_.size(); ++i) {
            if (norm_[i] != '#') continue;
            std::size_t j = i + 1;
            while (j < norm_.size() && is_word_byte(static_cast<unsigned char>(norm_[j]))) ++j;
            if (j > i + 1) hashtags_.push_back(norm_.substr(i + 1, j - i - 1));
            i = j - 1;
        }
    }

    /// `keyword` must already be normalized (normalize_text).
    bool matches(std::string_view keyword) const {
        if (keyword.empty()) return false;
        for (std::size_t pos = norm_.find(keyword); pos != std::string::npos; pos = norm_.find(keyword, pos + 1)) {
            const bool left_ok = pos == 0 || !is_word_byte(static_cast<unsigned char>(norm_[pos - 1])) ||
                                 !is_word_byte(static_cast<unsigned char>(keyword.front()));
            const std::size_t end = pos + keyword.size();
            const bool right_ok = end == norm_.size() || !is_word_byte(static_cast<unsigned char>(norm_[end])) ||
                                  !is_word_byte(static_cast<unsigned char>(keyword.back()));
            if (left_ok && right_ok) return true;
        }
        if (!hashtags_.empty()) {
            std::string squashed;
            for (char c : keyword)
                if (c != ' ') squashed.push_back(c);
            for (const auto& h : hashtags_)
                if (h.find(squashed) != std::string::npos) return true;
        }
        return false;
    }

    bool matches_any(const std::vector<std::string>& keywords) const {
        for (const auto& k : keywords)
            if (matches(k)) return true;
        return false;
    }

    const std::string& normalized() const { return norm_; }

private:
    std::string norm_;
    std::vector<std::string> hashtags_;
};

/// Lemma detector: a plain token matches when its stem equals the lemma's
/// stem; a hashtag matches when its body contains the lemma.
class LemmaMatcher {
public:
    explicit LemmaMatcher(const std::vector<std::string>& lemmas) {
        if (lemmas.empty()) throw PreconditionError("lemma list is empty");
        for (const auto& l : lemmas) {
            std::string n = normalize_text(l);
            stems_.insert(stem(n));
            raw_.push_back(std::move(n));
        }
    }

    bool matches(std::string_view text) const {
        for (const auto& tok : tokenize(text)) {
            if (tok.front() == '#') {
                for (const auto& l : raw_)
                    if (tok.find(l) != std::string::npos) return true;
            } else if (stems_.count(stem(tok))) {
                return true;
            }
        }
        return false;
    }

private:
    std::unordered_set<std::string> stems_;
    std::vector<std::string> raw_;
};

/// Keeps tweets that mention one of the event's keywords and contain one of
/// the lemmas. Order is preserved.
inline TweetCollection filter_relevant(const TweetCollection& tweets, const EventMeta& event,
                                       const std::vector<std::string>& lemmas) {
    const LemmaMatcher lemma(lemmas);
    TweetCollection out;
    for (const auto& t : tweets.tweets) {
        if (!MentionMatcher(t.text).matches_any(event.keywords)) continue;
        if (!lemma.matches(t.text)) continue;
        out.tweets.push_back(t);
    }
    return out;
}

}  // namespace polar
