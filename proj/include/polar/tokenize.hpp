#pragma once

// Tweet tokenizer and the token-level stem wrapper.
//
// Bytes >= 0x80 count as word characters, so UTF-8 words survive intact.
// Right single quotes (U+2019, U+2018) are folded to ASCII apostrophes first.

#include <string>
#include <string_view>
#include <vector>

#include "polar/stemmer.hpp"

namespace polar {

inline bool is_word_byte(unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c >= 0x80;
}

inline char ascii_lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

/// Lowercases ASCII, folds curly single quotes to '\'' and collapses runs of
/// whitespace to one space.
inline std::string normalize_text(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const unsigned char c = static_cast<unsigned char>(text[i]);
        if (c == 0xE2 && i + 2 < text.size() && static_cast<unsigned char>(text[i + 1]) == 0x80 &&
            (static_cast<unsigned char>(text[i + 2]) == 0x98 || static_cast<unsigned char>(text[i + 2]) == 0x99)) {
            if (pending_space && !out.empty()) out.push_back(' ');
            pending_space = false;
            out.push_back('\'');
            i += 2;
            continue;
        }
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
            pending_space = true;
            continue;
        }
        if (pending_space && !out.empty()) out.push_back(' ');
        pending_space = false;
        out.push_back(ascii_lower(static_cast<char>(c)));
    }
    return out;
}

namespace detail {

inline bool starts_with_ci(std::string_view s, std::string_view prefix) {
    if (s.size() < prefix.size()) return false;
    for (std::size_t i = 0; i < prefix.size(); ++i)
        if (s[i] != prefix[i]) return false;
    return true;
}

}  // namespace detail

/// Splits a tweet into lowercase tokens.
///
/// URLs (http://, https://, www.) and @mentions are dropped. '#' is kept as
/// the first character of a hashtag. Apostrophes are kept only between two
/// word characters ("shouldn't", "nra's"); every other punctuation byte is a
/// separator.
inline std::vector<std::string> tokenize(std::string_view text) {
    const std::string s = normalize_text(text);
    std::vector<std::string> out;
    std::size_t i = 0;
    const std::size_t n = s.size();
    auto skip_nonspace = [&] {
        while (i < n && s[i] != ' ') ++i;
    };
    while (i < n) {
        const unsigned char c = static_cast<unsigned char>(s[i]);
        const bool at_boundary = i == 0 || !is_word_byte(static_cast<unsigned char>(s[i - 1]));
        if (at_boundary && (detail::starts_with_ci(s.substr(i), "http://") ||
                            detail::starts_with_ci(s.substr(i), "https://") ||
                            detail::starts_with_ci(s.substr(i), "www."))) {
            skip_nonspace();
            continue;
        }
        if (c == '@' && i + 1 < n && is_word_byte(static_cast<unsigned char>(s[i + 1]))) {
            ++i;
            while (i < n && is_word_byte(static_cast<unsigned char>(s[i]))) ++i;
            continue;
        }
        const bool hashtag = c == '#' && i + 1 < n && is_word_byte(static_cast<unsigned char>(s[i + 1]));
        if (!hashtag && !is_word_byte(c)) {
            ++i;
            continue;
        }
        std::string tok;
        if (hashtag) {
            tok.push_back('#');
            ++i;
        }
        while (i < n) {
            const unsigned char d = static_cast<unsigned char>(s[i]);
            if (is_word_byte(d)) {
                tok.push_back(static_cast<char>(d));
                ++i;
            } else if (d == '\'' && !hashtag && i + 1 < n && is_word_byte(static_cast<unsigned char>(s[i + 1])) &&
                       !tok.empty()) {
                tok.push_back('\'');
                ++i;
            } else {
                break;
            }
        }
        out.push_back(std::move(tok));
    }
    return out;
}

/// Snowball stem of one token. Hashtags and tokens containing non-ASCII bytes
/// are returned unchanged.
inline std::string stem(std::string_view token) {
    if (!token.empty() && token.front() == '#') return std::string(token);
    for (unsigned char c : token)
        if (c >= 0x80) return std::string(token);
    return porter2::stem(token);
}

/// Token with apostrophes removed ("don't" -> "dont"), used for stopword lookup.
inline std::string strip_apostrophes(std::string_view token) {
    std::string out;
    out.reserve(token.size());
    for (char c : token)
        if (c != '\'') out.push_back(c);
    return out;
}

}  // namespace polar
