#pragma once

// Strict numeric token parsing and deterministic rendering.
// Tokens are accepted only when the entire token is a number; "inf"/"nan"
// and partial matches are rejected so diagnostics stay precise.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <string>
#include <string_view>

namespace lmplint {

inline bool is_digit(char c) { return c >= '0' && c <= '9'; }

// [+-]? digits, nothing else.
inline bool is_int_token(std::string_view s) {
    if (s.empty()) return false;
    std::size_t i = (s[0] == '+' || s[0] == '-') ? 1 : 0;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i)
        if (!is_digit(s[i])) return false;
    return true;
}

inline std::optional<std::int64_t> parse_int(std::string_view s) {
    if (!is_int_token(s)) return std::nullopt;
    if (s[0] == '+') s.remove_prefix(1);
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
    return v;
}

// [+-]? ( digits [ '.' digits? ] | '.' digits ) [ (e|E) [+-]? digits ]
inline bool is_number_token(std::string_view s) {
    std::size_t i = 0;
    const std::size_t n = s.size();
    if (i < n && (s[i] == '+' || s[i] == '-')) ++i;
    bool mantissa = false;
    if (i < n && is_digit(s[i])) {
        mantissa = true;
        while (i < n && is_digit(s[i])) ++i;
        if (i < n && s[i] == '.') {
            ++i;
            while (i < n && is_digit(s[i])) ++i;
        }
    } else if (i < n && s[i] == '.') {
        ++i;
        if (i >= n || !is_digit(s[i])) return false;
        mantissa = true;
        while (i < n && is_digit(s[i])) ++i;
    }
    if (!mantissa) return false;
    if (i < n && (s[i] == 'e' || s[i] == 'E')) {
        ++i;
        if (i < n && (s[i] == '+' || s[i] == '-')) ++i;
        if (i >= n || !is_digit(s[i])) return false;
        while (i < n && is_digit(s[i])) ++i;
    }
    return i == n;
}

inline std::optional<double> parse_number(std::string_view s) {
    if (!is_number_token(s)) return std::nullopt;
    // from_chars(double) rejects a leading '+'.
    if (s[0] == '+') s.remove_prefix(1);
    double v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
    return v;
}

inline std::string render_int(std::int64_t v) { return std::to_string(v); }

// Integral values render without a decimal point; everything else uses the
// shortest round-trip form. Substituted numbers stay stable under
// re-normalization, which idempotence depends on.
inline std::string render_number(double v) {
    if (v == 0.0) return "0";
    if (std::isfinite(v) && std::nearbyint(v) == v &&
        std::fabs(v) <= 9007199254740992.0) {
        return render_int(static_cast<std::int64_t>(v));
    }
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, p);
}

}  // namespace lmplint
