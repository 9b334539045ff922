#pragma once

// Minimal RFC-4180 style CSV reading/writing plus number formatting shared by
// every file format the toolkit emits.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "polar/error.hpp"

namespace polar::csv {

using Row = std::vector<std::string>;

/// Splits one logical CSV record. Returns false at end of input. Quoted fields
/// may contain commas, doubled quotes and newlines.
inline bool read_record(std::istream& in, Row& out) {
    out.clear();
    std::string field;
    bool in_quotes = false;
    bool any = false;
    char c;
    while (in.get(c)) {
        any = true;
        if (in_quotes) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get(c);
                    field.push_back('"');
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(c);
            }
            continue;
        }
        if (c == '"') {
            in_quotes = true;
        } else if (c == ',') {
            out.push_back(std::move(field));
            field.clear();
        } else if (c == '\n') {
            out.push_back(std::move(field));
            return true;
        } else if (c != '\r') {
            field.push_back(c);
        }
    }
    if (!any) return false;
    out.push_back(std::move(field));
    return true;
}

inline std::string escape(std::string_view field) {
    const bool needs = field.find_first_of(",\"\n\r") != std::string_view::npos;
    if (!needs) return std::string(field);
    std::string s = "\"";
    for (char c : field) {
        if (c == '"') s.push_back('"');
        s.push_back(c);
    }
    s.push_back('"');
    return s;
}

/// Shortest decimal text that parses back to the same double.
inline std::string fmt(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    (void)ec;
    return std::string(buf, ptr);
}

inline std::string fmt(std::int64_t x) { return std::to_string(x); }
inline std::string fmt(std::size_t x) { return std::to_string(x); }
inline std::string fmt(int x) { return std::to_string(x); }

inline double parse_double(std::string_view s) {
    if (s == "nan" || s == "NA" || s.empty()) return std::nan("");
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw IoError("not a number: '" + std::string(s) + "'");
    return v;
}

inline std::int64_t parse_int(std::string_view s) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw IoError("not an integer: '" + std::string(s) + "'");
    return v;
}

class Writer {
public:
    explicit Writer(std::ostream& out) : out_(out) {}

    template <class... Fields>
    void row(const Fields&... fields) {
        bool first = true;
        ((write_field(fields, first)), ...);
        out_ << '\n';
    }

    void row(const Row& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) out_ << ',';
            out_ << escape(fields[i]);
        }
        out_ << '\n';
    }

private:
    template <class T>
    void write_field(const T& v, bool& first) {
        if (!first) out_ << ',';
        first = false;
        if constexpr (std::is_convertible_v<const T&, std::string_view>) {
            out_ << escape(std::string_view(v));
        } else if constexpr (std::is_floating_point_v<T>) {
            out_ << fmt(static_cast<double>(v));
        } else {
            out_ << v;
        }
    }

    std::ostream& out_;
};

/// A whole CSV file read into memory with a header index.
struct Table {
    Row header;
    std::vector<Row> rows;

    std::optional<std::size_t> column(std::string_view name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        return std::nullopt;
    }

    std::size_t require(std::string_view name) const {
        auto c = column(name);
        if (!c) throw IoError("missing CSV column '" + std::string(name) + "'");
        return *c;
    }
};

inline Table read_table(std::istream& in) {
    Table t;
    Row r;
    if (!read_record(in, t.header)) return t;
    while (read_record(in, r)) {
        if (r.size() == 1 && r[0].empty()) continue;
        t.rows.push_back(r);
    }
    return t;
}

inline Table read_table(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    return read_table(in);
}

}  // namespace polar::csv
