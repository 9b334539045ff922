#pragma once

// Locating and reading the bundled word lists and tables under data/.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "polar/error.hpp"

#ifndef POLAR_DATA_DIR
#define POLAR_DATA_DIR "data"
#endif

namespace polar {

/// Directory holding the bundled data files. POLAR_DATA_DIR in the
/// environment overrides the compiled-in location.
inline std::filesystem::path data_dir() {
    if (const char* env = std::getenv("POLAR_DATA_DIR"); env && *env) return env;
    return POLAR_DATA_DIR;
}

inline std::filesystem::path data_path(const std::string& name) { return data_dir() / name; }

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

/// One entry per line; blank lines and lines starting with '#' are skipped.
inline std::vector<std::string> load_word_list(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        std::string w = trim(line);
        if (w.empty() || w[0] == '#') continue;
        out.push_back(std::move(w));
    }
    return out;
}

inline std::unordered_set<std::string> load_word_set(const std::filesystem::path& path) {
    auto list = load_word_list(path);
    return {list.begin(), list.end()};
}

/// Lemmas whose stems mark a tweet as being about a shooting.
inline const std::vector<std::string>& default_lemmas() {
    static const std::vector<std::string> lemmas = {"shoot", "gun", "kill", "attack", "massacre", "victim"};
    return lemmas;
}

}  // namespace polar
