#pragma once

// English Snowball (Porter2) stemmer, classic variant with the same region
// bookkeeping as NLTK's EnglishStemmer.
//
// R1 and R2 are carried as suffix strings of the word and edited alongside
// it, so a replacement that crosses a region boundary resets that region the
// same way NLTK does (e.g. "quantization" -> "quantize", not "quantiz").

#include <array>
#include <string>
#include <string_view>
#include <utility>

namespace polar::porter2 {

namespace detail {

inline bool is_vowel(char c) {
    return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u' || c == 'y';
}

inline bool ends_with(std::string_view w, std::string_view s) { return w.ends_with(s); }

// Python's s[:-n].
inline std::string cut(const std::string& s, std::size_t n) {
    return s.size() >= n ? s.substr(0, s.size() - n) : std::string();
}

inline bool is_double(const std::string& w) {
    if (w.size() < 2 || w[w.size() - 1] != w[w.size() - 2]) return false;
    switch (w.back()) {
        case 'b': case 'd': case 'f': case 'g': case 'm':
        case 'n': case 'p': case 'r': case 't':
            return true;
        default:
            return false;
    }
}

inline bool is_li_ending(char c) {
    switch (c) {
        case 'c': case 'd': case 'e': case 'g': case 'h':
        case 'k': case 'm': case 'n': case 'r': case 't':
            return true;
        default:
            return false;
    }
}

inline std::string region_after(const std::string& w) {
    for (std::size_t i = 1; i < w.size(); ++i)
        if (!is_vowel(w[i]) && is_vowel(w[i - 1])) return w.substr(i + 1);
    return {};
}

struct State {
    std::string w, r1, r2;

    // Drops n characters from the word and both regions.
    void drop(std::size_t n) {
        w = cut(w, n);
        r1 = cut(r1, n);
        r2 = cut(r2, n);
    }

    // Replaces `suf` by `rep`; a region shorter than `suf` becomes `r?_short`.
    void replace(std::string_view suf, std::string_view rep, std::string_view r1_short = "",
                 std::string_view r2_short = "") {
        w = cut(w, suf.size()) + std::string(rep);
        r1 = r1.size() >= suf.size() ? cut(r1, suf.size()) + std::string(rep) : std::string(r1_short);
        r2 = r2.size() >= suf.size() ? cut(r2, suf.size()) + std::string(rep) : std::string(r2_short);
    }

    // Replaces the final character by `c`; empty regions stay empty.
    void swap_last(char c) {
        w.back() = c;
        if (!r1.empty()) r1.back() = c;
        if (!r2.empty()) r2.back() = c;
    }

    bool vowel_before(std::size_t end) const {
        for (std::size_t i = 0; i < end && i < w.size(); ++i)
            if (is_vowel(w[i])) return true;
        return false;
    }

    void step0() {
        for (std::string_view s : {"'s'", "'s", "'"}) {
            if (ends_with(w, s)) {
                drop(s.size());
                return;
            }
        }
    }

    void step1a() {
        for (std::string_view s : {"sses", "ied", "ies", "us", "ss", "s"}) {
            if (!ends_with(w, s)) continue;
            if (s == "sses") {
                drop(2);
            } else if (s == "ied" || s == "ies") {
                drop(w.size() - s.size() > 1 ? 2 : 1);
            } else if (s == "s") {
                if (w.size() >= 2 && vowel_before(w.size() - 2)) drop(1);
            }
            return;
        }
    }

    void step1b() {
        for (std::string_view s : {"eedly", "ingly", "edly", "eed", "ing", "ed"}) {
            if (!ends_with(w, s)) continue;
            if (s == "eed" || s == "eedly") {
                if (ends_with(r1, s)) replace(s, "ee");
                return;
            }
            if (!vowel_before(w.size() - s.size())) return;
            drop(s.size());
            if (ends_with(w, "at") || ends_with(w, "bl") || ends_with(w, "iz")) {
                w += 'e';
                r1 += 'e';
                if (w.size() > 5 || r1.size() >= 3) r2 += 'e';
            } else if (is_double(w)) {
                drop(1);
            } else if (r1.empty() && short_syllable()) {
                w += 'e';
            }
            return;
        }
    }

    bool short_syllable() const {
        const std::size_t n = w.size();
        if (n >= 3) {
            const char c = w[n - 1];
            return !is_vowel(c) && c != 'w' && c != 'x' && c != 'Y' && is_vowel(w[n - 2]) && !is_vowel(w[n - 3]);
        }
        return n == 2 && is_vowel(w[0]) && !is_vowel(w[1]);
    }

    void step1c() {
        if (w.size() > 2 && (w.back() == 'y' || w.back() == 'Y') && !is_vowel(w[w.size() - 2])) swap_last('i');
    }

    void step2() {
        static constexpr std::array<std::string_view, 24> suffixes = {
            "ization", "ational", "fulness", "ousness", "iveness", "tional", "biliti", "lessli",
            "entli",   "ation",   "alism",   "aliti",   "ousli",   "iviti",  "fulli",  "enci",
            "anci",    "abli",    "izer",    "ator",    "alli",    "bli",    "ogi",    "li",
        };
        for (std::string_view s : suffixes) {
            if (!ends_with(w, s)) continue;
            if (!ends_with(r1, s)) return;
            if (s == "tional" || s == "entli" || s == "fulli" || s == "lessli") {
                drop(2);
            } else if (s == "enci" || s == "anci" || s == "abli") {
                swap_last('e');
            } else if (s == "izer" || s == "ization") {
                replace(s, "ize");
            } else if (s == "ational" || s == "ation" || s == "ator") {
                replace(s, "ate", "", "e");
            } else if (s == "alism" || s == "aliti" || s == "alli") {
                replace(s, "al");
            } else if (s == "fulness") {
                drop(4);
            } else if (s == "ousli" || s == "ousness") {
                replace(s, "ous");
            } else if (s == "iveness" || s == "iviti") {
                replace(s, "ive", "", "e");
            } else if (s == "biliti" || s == "bli") {
                replace(s, "ble");
            } else if (s == "ogi") {
                if (w.size() >= 4 && w[w.size() - 4] == 'l') drop(1);
            } else if (s == "li") {
                if (w.size() >= 3 && is_li_ending(w[w.size() - 3])) drop(2);
            }
            return;
        }
    }

    void step3() {
        static constexpr std::array<std::string_view, 9> suffixes = {
            "ational", "tional", "alize", "icate", "iciti", "ative", "ical", "ness", "ful",
        };
        for (std::string_view s : suffixes) {
            if (!ends_with(w, s)) continue;
            if (!ends_with(r1, s)) return;
            if (s == "tional") {
                drop(2);
            } else if (s == "ational") {
                replace(s, "ate");
            } else if (s == "alize") {
                drop(3);
            } else if (s == "icate" || s == "iciti" || s == "ical") {
                replace(s, "ic");
            } else if (s == "ful" || s == "ness") {
                drop(s.size());
            } else if (s == "ative") {
                if (ends_with(r2, s)) drop(5);
            }
            return;
        }
    }

    void step4() {
        static constexpr std::array<std::string_view, 18> suffixes = {
            "ement", "ance", "ence", "able", "ible", "ment", "ant", "ent", "ism",
            "ate",   "iti",  "ous",  "ive",  "ize",  "ion", "al",  "er",  "ic",
        };
        for (std::string_view s : suffixes) {
            if (!ends_with(w, s)) continue;
            if (!ends_with(r2, s)) return;
            if (s == "ion") {
                if (w.size() >= 4 && (w[w.size() - 4] == 's' || w[w.size() - 4] == 't')) drop(3);
            } else {
                drop(s.size());
            }
            return;
        }
    }

    void step5() {
        const std::size_t n = w.size();
        if (ends_with(r2, "l") && n >= 2 && w[n - 2] == 'l') {
            w.pop_back();
        } else if (ends_with(r2, "e")) {
            w.pop_back();
        } else if (ends_with(r1, "e")) {
            if (n >= 4 && (is_vowel(w[n - 2]) || w[n - 2] == 'w' || w[n - 2] == 'x' || w[n - 2] == 'Y' ||
                           !is_vowel(w[n - 3]) || is_vowel(w[n - 4])))
                w.pop_back();
        }
    }
};

inline const char* special_form(std::string_view w) {
    static constexpr std::array<std::pair<std::string_view, const char*>, 37> table = {{
        {"skis", "ski"},         {"skies", "sky"},         {"dying", "die"},
        {"lying", "lie"},        {"tying", "tie"},         {"idly", "idl"},
        {"gently", "gentl"},     {"ugly", "ugli"},         {"early", "earli"},
        {"only", "onli"},        {"singly", "singl"},      {"sky", "sky"},
        {"news", "news"},        {"howe", "howe"},         {"atlas", "atlas"},
        {"cosmos", "cosmos"},    {"bias", "bias"},         {"andes", "andes"},
        {"inning", "inning"},    {"innings", "inning"},    {"outing", "outing"},
        {"outings", "outing"},   {"canning", "canning"},   {"cannings", "canning"},
        {"herring", "herring"},  {"herrings", "herring"},  {"earring", "earring"},
        {"earrings", "earring"}, {"proceed", "proceed"},   {"proceeds", "proceed"},
        {"proceeded", "proceed"}, {"proceeding", "proceed"}, {"exceed", "exceed"},
        {"exceeds", "exceed"},   {"exceeded", "exceed"},   {"exceeding", "exceed"},
        {"succeed", "succeed"},
    }};
    for (auto [k, v] : table)
        if (k == w) return v;
    static constexpr std::array<std::string_view, 3> succeed_forms = {"succeeds", "succeeded", "succeeding"};
    for (auto k : succeed_forms)
        if (k == w) return "succeed";
    return nullptr;
}

}  // namespace detail

/// Stems one lowercase ASCII word.
inline std::string stem(std::string_view word) {
    using namespace detail;
    if (word.size() <= 2) return std::string(word);
    if (const char* e = special_form(word)) return e;

    State s;
    s.w.assign(word);
    if (s.w.front() == '\'') s.w.erase(0, 1);
    if (s.w.empty()) return s.w;
    if (s.w[0] == 'y') s.w[0] = 'Y';
    for (std::size_t i = 1; i < s.w.size(); ++i)
        if (s.w[i] == 'y' && is_vowel(s.w[i - 1])) s.w[i] = 'Y';

    if (s.w.starts_with("gener") || s.w.starts_with("arsen") || s.w.starts_with("commun")) {
        s.r1 = s.w.substr(s.w.starts_with("commun") ? 6 : 5);
        s.r2 = region_after(s.r1);
    } else {
        s.r1 = region_after(s.w);
        s.r2 = region_after(s.r1);
    }

    s.step0();
    s.step1a();
    s.step1b();
    s.step1c();
    s.step2();
    s.step3();
    s.step4();
    s.step5();
    for (char& c : s.w)
        if (c == 'Y') c = 'y';
    return s.w;
}

}  // namespace polar::porter2
