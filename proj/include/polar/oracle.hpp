#pragma once

// Synthetic corpora with known partisanship: bag-of-tokens generator, the
// closed-form true value, and the bundled English-like toy corpus.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "polar/corpus.hpp"
#include "polar/csv.hpp"
#include "polar/error.hpp"
#include "polar/resources.hpp"
#include "polar/rng.hpp"
#include "polar/textprep.hpp"

namespace polar {

struct GenerativeSpec {
    std::vector<double> phi_dem;
    std::vector<double> phi_rep;
    std::size_t n_dem = 0;
    std::size_t n_rep = 0;
    std::size_t tokens_per_user = 100;
    std::size_t tokens_per_tweet = 12;
    std::optional<std::vector<std::size_t>> topic_of_token;  // token -> topic
    std::uint64_t seed = 0;
    std::string event_id = "oracle";
    std::string user_prefix = "u";
    std::int64_t start_time = 0;

    std::size_t vocab_size() const { return phi_dem.size(); }

    void validate() const {
        if (phi_dem.empty() || phi_dem.size() != phi_rep.size())
            throw PreconditionError("GenerativeSpec: phi_dem and phi_rep must be non-empty and of equal length");
        for (const auto* phi : {&phi_dem, &phi_rep}) {
            double s = 0.0;
            for (double p : *phi) {
                if (!(p >= 0.0) || !std::isfinite(p)) throw PreconditionError("GenerativeSpec: negative probability");
                s += p;
            }
            if (std::abs(s - 1.0) > 1e-12) throw PreconditionError("GenerativeSpec: probabilities must sum to 1");
        }
        if (tokens_per_user < 1 || tokens_per_tweet < 1)
            throw PreconditionError("GenerativeSpec: tokens_per_user and tokens_per_tweet must be >= 1");
        if (topic_of_token && topic_of_token->size() != phi_dem.size())
            throw PreconditionError("GenerativeSpec: topic_of_token must cover every token");
    }
};

/// Token names "w0000", "w0001", ... (fixed width so they sort by index).
inline std::string oracle_token_name(std::size_t j) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "w%04zu", j);
    return buf;
}

struct GeneratedCorpus {
    UserTokenCounts counts;
    std::vector<TweetRecord> tweets;
    Labels labels;
    std::vector<std::size_t> tweet_topics;                 // empty without topic structure
    std::vector<std::vector<std::uint32_t>> tweet_tokens;  // token ids per tweet
    std::vector<std::string> token_names;
};

/// Draws every user's tokens i.i.d. from their party's distribution, in
/// tweets of tokens_per_tweet tokens (the last one shorter). With topic
/// structure, each tweet first draws a topic with probability equal to the
/// party's mass on it, then draws its tokens from phi restricted to that
/// topic. User u (Democrats first) draws from Rng(seed, u).
inline GeneratedCorpus generate(const GenerativeSpec& spec) {
    spec.validate();
    const std::size_t v = spec.vocab_size();
    GeneratedCorpus g;
    for (std::size_t j = 0; j < v; ++j) g.token_names.push_back(oracle_token_name(j));

    struct PartyModel {
        std::optional<DiscreteSampler> flat;
        std::optional<DiscreteSampler> topic;
        std::vector<std::optional<DiscreteSampler>> within;
        std::vector<std::vector<std::size_t>> members;
    };
    auto build = [&](const std::vector<double>& phi) {
        PartyModel m;
        if (!spec.topic_of_token) {
            m.flat.emplace(phi);
            return m;
        }
        const std::size_t k = *std::max_element(spec.topic_of_token->begin(), spec.topic_of_token->end()) + 1;
        std::vector<double> mass(k, 0.0);
        std::vector<std::vector<double>> w(k);
        m.members.resize(k);
        for (std::size_t j = 0; j < v; ++j) {
            const std::size_t x = (*spec.topic_of_token)[j];
            mass[x] += phi[j];
            w[x].push_back(phi[j]);
            m.members[x].push_back(j);
        }
        m.topic.emplace(mass);
        m.within.resize(k);
        for (std::size_t x = 0; x < k; ++x)
            if (mass[x] > 0.0) m.within[x].emplace(w[x]);
        return m;
    };
    const PartyModel dem = build(spec.phi_dem), rep = build(spec.phi_rep);

    std::map<std::string, std::map<std::uint32_t, std::int64_t>> per_user;
    const std::size_t n = spec.n_dem + spec.n_rep;
    const int width = std::max<int>(4, static_cast<int>(std::to_string(n).size()));
    std::size_t tweet_no = 0;
    for (std::size_t u = 0; u < n; ++u) {
        const bool is_dem = u < spec.n_dem;
        const PartyModel& m = is_dem ? dem : rep;
        std::string digits = std::to_string(u);
        if (digits.size() < static_cast<std::size_t>(width)) digits.insert(0, width - digits.size(), '0');
        const std::string user = spec.user_prefix + digits;
        g.labels[user] = is_dem ? Party::Democrat : Party::Republican;
        Rng rng(spec.seed, u);
        auto& row = per_user[user];
        std::size_t left = spec.tokens_per_user;
        while (left > 0) {
            const std::size_t len = std::min(left, spec.tokens_per_tweet);
            left -= len;
            std::vector<std::uint32_t> toks;
            std::optional<std::size_t> topic;
            if (m.topic) topic = (*m.topic)(rng);
            for (std::size_t t = 0; t < len; ++t) {
                const std::size_t j = topic ? m.members[*topic][(*m.within[*topic])(rng)] : (*m.flat)(rng);
                toks.push_back(static_cast<std::uint32_t>(j));
                ++row[static_cast<std::uint32_t>(j)];
            }
            TweetRecord rec;
            rec.tweet_id = spec.event_id + "-" + std::to_string(tweet_no++);
            rec.user_id = user;
            rec.event_id = spec.event_id;
            rec.timestamp = spec.start_time + static_cast<std::int64_t>(rng.below(86400));
            for (std::size_t t = 0; t < toks.size(); ++t) rec.text += (t ? " " : "") + g.token_names[toks[t]];
            g.tweets.push_back(std::move(rec));
            g.tweet_tokens.push_back(std::move(toks));
            if (topic) g.tweet_topics.push_back(*topic);
        }
    }
    g.counts = make_counts(per_user, g.labels, v);
    return g;
}

/// Expected posterior a neutral observer assigns to a speaker's true party
/// after one token: 1/2 [sum phi_D^2/(phi_D+phi_R) + sum phi_R^2/(phi_D+phi_R)].
inline double true_partisanship(const std::vector<double>& phi_dem, const std::vector<double>& phi_rep) {
    if (phi_dem.size() != phi_rep.size()) throw PreconditionError("true_partisanship: length mismatch");
    double s = 0.0;
    for (std::size_t j = 0; j < phi_dem.size(); ++j) {
        const double t = phi_dem[j] + phi_rep[j];
        if (t > 0.0) s += (phi_dem[j] * phi_dem[j] + phi_rep[j] * phi_rep[j]) / t;
    }
    return 0.5 * s;
}

inline double true_partisanship(const GenerativeSpec& spec) {
    spec.validate();
    return true_partisanship(spec.phi_dem, spec.phi_rep);
}

// ---------------------------------------------------------------------------
// Toy corpus

struct ToyCorpusInfo {
    std::size_t tweets = 0;
    std::size_t users = 0;
    std::vector<std::string> events;
};

namespace detail {

struct ToyWords {
    // Party-tilted fills: index 0 Democrat-leaning, 1 Republican-leaning.
    std::vector<std::string> adjective[2] = {
        {"senseless", "preventable", "horrific", "outrageous", "unacceptable", "sickening"},
        {"evil", "tragic", "cowardly", "heinous", "unspeakable", "wicked"}};
    std::vector<std::string> action[2] = {
        {"ban assault weapons", "pass universal background checks", "stand up to the nra",
         "end gun violence", "close the gun show loophole", "ban bump stocks", "vote them out"},
        {"protect the second amendment", "fix mental health care", "enforce existing laws",
         "secure our schools", "arm trained guards", "support law enforcement", "stop politicizing tragedy"}};
    std::vector<std::string> modal[2] = {{"must", "have to", "need to", "should", "must", "need to"},
                                         {"should", "must", "need to", "should", "have to"}};
    std::vector<std::string> pronoun[2] = {{"we", "we", "i", "you", "we"}, {"they", "i", "you", "they", "he"}};
    std::vector<std::string> hashtag[2] = {
        {"#guncontrolnow", "#neveragain", "#enoughisenough", "#gunreform", "#momsdemand"},
        {"#2a", "#maga", "#backtheblue", "#secondamendment", "#prayers"}};
    std::vector<std::string> context[2] = {{"#sandyhook", "charleston", "columbine", "sandy hook", "virginia tech"},
                                           {"9/11", "fort hood", "boston marathon", "columbine", "san bernardino"}};
    std::vector<std::string> clause = {
        "hug your kids tonight", "donate blood if you can", "first responders are heroes",
        "the community is strong", "so much grief in this country", "hospitals need blood donors",
        "the city will recover", "share this with friends", "stay safe everyone", "this is a dark day",
        "my family is safe", "local news has updates", "the police response was fast",
        "politicians keep failing us", "the media is shameful", "facts are still coming in",
        "thank the nurses and doctors", "we stand united", "candles and flowers at the memorial",
        "the vigil starts tonight", "words are not enough", "america is better than this",
        "the president spoke this morning", "the senate is silent", "keep the families in your heart"};
};

}  // namespace detail

/// Writes the toy corpus into `dir`: tweets.jsonl (two events plus off-topic
/// noise), follows.csv, events.csv, pronouns.txt and handles.
inline ToyCorpusInfo make_toy_corpus(const std::filesystem::path& dir, std::uint64_t seed = 7,
                                     std::size_t n_tweets = 5000, std::size_t n_users = 420) {
    std::filesystem::create_directories(dir);
    const detail::ToyWords W;
    Rng rng(seed);
    auto pick = [&](const std::vector<std::string>& v) -> const std::string& { return v[rng.below(v.size())]; };

    struct EventSpec {
        std::string id;
        std::int64_t day;
        bool white;
        std::vector<std::string> refs;
        std::string city_tag;
    };
    const std::vector<EventSpec> events = {
        {"las_vegas", parse_iso_date("2017-10-01"), true,
         {"vegas", "las vegas", "mandalay bay", "#vegasshooting", "#lasvegas", "the vegas concert"},
         "#prayforvegas"},
        {"orlando", parse_iso_date("2016-06-12"), false,
         {"orlando", "pulse nightclub", "#orlandoshooting", "#pulse", "orlando club", "#orlando"},
         "#prayfororlando"}};

    // users: lean 0 Democrat, 1 Republican, 2 neutral
    std::vector<int> lean(n_users);
    std::vector<std::vector<std::size_t>> active(events.size());
    std::vector<double> activity(n_users);
    std::vector<bool> multiday(n_users);
    for (std::size_t u = 0; u < n_users; ++u) {
        const double r = rng.uniform();
        lean[u] = r < 0.45 ? 0 : r < 0.9 ? 1 : 2;
        activity[u] = 0.3 + rng.uniform() * rng.uniform() * 4.0;
        multiday[u] = rng.uniform() < 0.15;
        const bool a = rng.uniform() < 0.8, b = rng.uniform() < 0.6;
        if (a || !b) active[0].push_back(u);
        if (b) active[1].push_back(u);
    }
    auto user_name = [](std::size_t u) {
        std::string digits = std::to_string(u);
        if (digits.size() < 4) digits.insert(0, 4 - digits.size(), '0');
        return "user" + digits;
    };

    std::vector<TweetRecord> tweets;
    std::vector<int> base_day(n_users * events.size());
    for (auto& d : base_day) d = static_cast<int>(std::min<std::uint64_t>(rng.below(4) + rng.below(4), 9));
    for (std::size_t i = 0; i < n_tweets; ++i) {
        const std::size_t e = i % events.size();
        const auto& ev = events[e];
        std::vector<double> w;
        for (std::size_t u : active[e]) w.push_back(activity[u]);
        const std::size_t u = active[e][DiscreteSampler(w)(rng)];
        const int party = lean[u] == 2 ? static_cast<int>(rng.below(2)) : (rng.uniform() < 0.8 ? lean[u] : 1 - lean[u]);
        const std::string& ref = pick(ev.refs);
        const bool dem = party == 0;
        // who gets called "terrorist" vs "crazy" depends on the shooter
        const bool terror_side = ev.white ? dem : !dem;
        const std::string label = rng.uniform() < 0.7 ? (terror_side ? "terrorist" : "crazy") : pick({"gunman", "coward", "monster"});

        std::string text;
        const double theme = rng.uniform();
        const double guns_p = dem ? 0.45 : 0.2;
        if (rng.uniform() < 0.04) {
            text = pick({"that " + ref + " trip last year was amazing", "traffic near " + ref + " is terrible today",
                         "cannot wait for the weekend in " + ref});
        } else if (theme < 0.25) {
            text = pick({"praying for the victims of the " + ref + " shooting. " + pick(W.adjective[party]) + " and heartbreaking",
                         "my heart goes out to the families of those killed in " + ref,
                         "thoughts and prayers for every victim in " + ref + " tonight",
                         "so many lives lost in the " + ref + " massacre. " + pick(W.pronoun[party]) + " will never forget",
                         "rest in peace to the victims. " + ref + " will heal"});
        } else if (theme < 0.25 + guns_p) {
            text = pick({ref + " shooting again. congress " + pick(W.modal[party]) + " " + pick(W.action[party]) + " now",
                         "another mass shooting in " + ref + ". " + pick(W.pronoun[party]) + " " + pick(W.modal[party]) + " " + pick(W.action[party]),
                         "how many more people will be killed before we " + pick(W.action[party]) + "? " + ref,
                         "the gunman in " + ref + " bought his guns legally. " + pick(W.adjective[party]),
                         pick(W.pronoun[party]) + " shouldn't have to fear being shot at a concert. " + ref,
                         "after " + ref + " we should have acted. " + pick(W.action[party])});
        } else if (theme < 0.85) {
            text = pick({"the " + ref + " shooter was a " + label + ". call it what it is",
                         "police say the " + ref + " gunman acted alone. motive still unknown",
                         "the " + label + " who attacked " + ref + " " + pick(W.modal[party]) + " face justice",
                         "fbi investigating the " + ref + " attack. the " + label + " is dead",
                         "the " + ref + " killer was a " + label + ". mental health matters",
                         pick(W.pronoun[party]) + " need to talk about mental illness after the " + ref + " shooting"});
        } else {
            text = pick({"breaking: death toll rises in " + ref + " shooting",
                         "live updates on the " + ref + " attack from local news",
                         "witnesses describe chaos during the " + ref + " shooting",
                         "officials confirm more victims in " + ref});
        }
        if (rng.uniform() < 0.6) text += ". " + pick(W.clause);
        if (rng.uniform() < (dem ? 0.18 : 0.08)) text += ". remember " + pick(W.context[party]);
        if (rng.uniform() < 0.5) text += " " + pick(W.hashtag[party]);
        if (rng.uniform() < 0.3) text += " " + ev.city_tag;
        if (rng.uniform() < 0.15) text += " https://t.co/x" + std::to_string(i);
        if (rng.uniform() < 0.1) text += " @" + pick({"cnn", "foxnews", "ap", "nytimes"});
        if (!text.empty() && rng.uniform() < 0.5) text[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(text[0])));

        int day = base_day[u * events.size() + e];
        if (multiday[u] && rng.uniform() < 0.5) day = static_cast<int>(rng.below(10));
        TweetRecord t;
        char id[32];
        std::snprintf(id, sizeof id, "t%05zu", i);
        t.tweet_id = id;
        t.user_id = user_name(u);
        t.event_id = ev.id;
        t.timestamp = ev.day * 86400 + static_cast<std::int64_t>(day) * 86400 + static_cast<std::int64_t>(rng.below(86400));
        t.text = std::move(text);
        tweets.push_back(std::move(t));
    }
    save_tweets(dir / "tweets.jsonl", tweets, TweetFormat::jsonl);

    // follow edges
    auto dem_h = load_word_list(data_path("dem_handles.txt"));
    auto rep_h = load_word_list(data_path("rep_handles.txt"));
    {
        std::ofstream out(dir / "follows.csv", std::ios::binary);
        csv::Writer w(out);
        w.row("user_id", "handle");
        for (std::size_t u = 0; u < n_users; ++u) {
            std::size_t nd = 0, nr = 0;
            if (lean[u] == 0) {
                nd = 1 + rng.below(5);
                nr = rng.below(nd);
            } else if (lean[u] == 1) {
                nr = 1 + rng.below(5);
                nd = rng.below(nr);
            } else {
                nd = nr = rng.below(3);
            }
            for (std::size_t i : rng.sample_without_replacement(dem_h.size(), nd)) w.row(user_name(u), dem_h[i]);
            for (std::size_t i : rng.sample_without_replacement(rep_h.size(), nr)) w.row(user_name(u), rep_h[i]);
        }
    }

    // event rows copied from the bundled table
    {
        std::ifstream in(data_path("events.csv"));
        if (!in) throw IoError("cannot open bundled events.csv");
        std::ofstream out(dir / "events.csv", std::ios::binary);
        csv::Writer w(out);
        csv::Row row;
        bool header = true;
        while (csv::read_record(in, row)) {
            if (header || (!row.empty() && (row[0] == events[0].id || row[0] == events[1].id))) w.row(row);
            header = false;
        }
    }
    {
        std::ofstream out(dir / "pronouns.txt", std::ios::binary);
        out << "I: i me my mine myself\n"
               "You: you your yours yourself yourselves\n"
               "We: we us our ours ourselves\n"
               "SheHe: she her hers herself he him his himself\n"
               "They: they them their theirs themselves\n";
    }
    ToyCorpusInfo info;
    info.tweets = tweets.size();
    info.users = n_users;
    for (const auto& e : events) info.events.push_back(e.id);
    return info;
}

}  // namespace polar
