#pragma once

// Quote-aware line scanning shared by the normalizer and the tokenizer.
// Double and single quotes protect '#', '$', '&', and whitespace. A quote
// that never closes extends to the end of the line.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace lmplint {

inline bool is_ws(char c) { return c == ' ' || c == '\t'; }

inline std::string_view rtrim(std::string_view s) {
    while (!s.empty() && is_ws(s.back())) s.remove_suffix(1);
    return s;
}

inline std::string_view ltrim(std::string_view s) {
    while (!s.empty() && is_ws(s.front())) s.remove_prefix(1);
    return s;
}

inline std::string_view trim(std::string_view s) { return rtrim(ltrim(s)); }

inline bool is_quote(char c) { return c == '"' || c == '\''; }

// First position of `ch` that is outside any quoted run, or npos.
inline std::size_t find_unquoted(std::string_view line, char ch,
                                 std::size_t from = 0) {
    char open = 0;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (open != 0) {
            if (c == open) open = 0;
            continue;
        }
        if (is_quote(c)) {
            open = c;
            continue;
        }
        if (i >= from && c == ch) return i;
    }
    return std::string_view::npos;
}

// True when position `pos` sits inside a quoted run (quote chars included).
inline bool position_quoted(std::string_view line, std::size_t pos) {
    char open = 0;
    for (std::size_t i = 0; i < line.size() && i <= pos; ++i) {
        char c = line[i];
        if (open != 0) {
            if (i == pos) return true;
            if (c == open) open = 0;
            continue;
        }
        if (is_quote(c)) {
            if (i == pos) return true;
            open = c;
        }
    }
    return false;
}

struct Token {
    std::string text;
    std::size_t begin = 0;  // byte offset into the line
    std::size_t end = 0;    // one past the last byte
};

// Whitespace-separated tokens; a quoted run keeps its quotes and may span
// whitespace. Sets *unterminated when a quote never closes.
inline std::vector<Token> split_tokens(std::string_view line,
                                       bool* unterminated = nullptr) {
    if (unterminated) *unterminated = false;
    std::vector<Token> out;
    std::size_t i = 0;
    const std::size_t n = line.size();
    while (i < n) {
        while (i < n && is_ws(line[i])) ++i;
        if (i >= n) break;
        std::size_t begin = i;
        char open = 0;
        while (i < n) {
            char c = line[i];
            if (open != 0) {
                if (c == open) open = 0;
                ++i;
                continue;
            }
            if (is_quote(c)) {
                open = c;
                ++i;
                continue;
            }
            if (is_ws(c)) break;
            ++i;
        }
        if (open != 0 && unterminated) *unterminated = true;
        out.push_back(Token{std::string(line.substr(begin, i - begin)), begin, i});
    }
    return out;
}

inline std::string_view first_token(std::string_view line) {
    line = ltrim(line);
    std::size_t i = 0;
    while (i < line.size() && !is_ws(line[i])) ++i;
    return line.substr(0, i);
}

// Tokens re-joined with single spaces; quoted tokens keep inner spacing.
inline std::string collapse_whitespace(std::string_view line) {
    std::string out;
    for (const Token& t : split_tokens(line)) {
        if (!out.empty()) out += ' ';
        out += t.text;
    }
    return out;
}

inline bool is_quoted_token(std::string_view t) {
    return t.size() >= 2 && is_quote(t.front()) && t.back() == t.front();
}

inline std::string_view unquote(std::string_view t) {
    if (is_quoted_token(t)) return t.substr(1, t.size() - 2);
    return t;
}

}  // namespace lmplint
