#pragma once

// Typed AST and diagnostics. Spans carry the canonical line (1-based), the
// column range within it, and the raw-source provenance of that line.

#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "lmplint/signature.hpp"

namespace lmplint {

enum class Severity { Error, Warning };

inline std::string_view to_string(Severity s) {
    return s == Severity::Error ? "error" : "warning";
}

struct Span {
    std::size_t line = 0;       // 1-based canonical line
    std::size_t col_begin = 0;  // 1-based, inclusive
    std::size_t col_end = 0;    // 1-based, exclusive
    std::vector<std::size_t> provenance;
};

struct Diagnostic {
    Severity severity = Severity::Error;
    std::string code;  // P001..P006, S001..S004
    Span span;
    std::string message;
};

inline std::string format_diagnostic(const Diagnostic& d) {
    std::ostringstream out;
    out << to_string(d.severity) << ' ' << d.code << ' ' << d.span.line << ':'
        << d.span.col_begin << ' ' << d.message;
    return out.str();
}

namespace diag {
inline constexpr const char* unknown_command = "P001";
inline constexpr const char* arity_mismatch = "P002";
inline constexpr const char* type_mismatch = "P003";
inline constexpr const char* unknown_keyword = "P004";
inline constexpr const char* bad_enum_value = "P005";
inline constexpr const char* unterminated_quote = "P006";
inline constexpr const char* undefined_reference = "S001";
inline constexpr const char* duplicate_definition = "S002";
inline constexpr const char* dangling_unfix = "S003";
inline constexpr const char* reference_before_definition = "S004";
}  // namespace diag

struct TypedArg {
    std::string text;           // token exactly as written (quotes kept)
    SlotKind kind = SlotKind::Word;
    std::string slot_name;
    std::size_t col_begin = 0;
    std::size_t col_end = 0;
    std::optional<double> number;
};

struct AstCommand {
    std::string name;
    std::vector<TypedArg> args;
    std::vector<std::pair<std::string, std::vector<TypedArg>>> keywords;
    std::size_t line = 0;  // 1-based canonical line
    std::vector<std::size_t> provenance;
    std::optional<std::size_t> style_index;  // index into args, if dispatched

    const TypedArg* find_arg(std::string_view slot_name) const {
        for (const TypedArg& a : args)
            if (a.slot_name == slot_name) return &a;
        return nullptr;
    }

    const std::vector<TypedArg>* find_keyword(std::string_view word) const {
        for (const auto& [w, args] : keywords)
            if (w == word) return &args;
        return nullptr;
    }

    std::optional<std::string_view> style() const {
        if (!style_index || *style_index >= args.size()) return std::nullopt;
        return std::string_view(args[*style_index].text);
    }
};

struct AstScript {
    std::string origin;
    std::string registry_version;
    std::vector<AstCommand> commands;
};

inline bool structurally_equal(const TypedArg& a, const TypedArg& b) {
    return a.text == b.text && a.kind == b.kind && a.slot_name == b.slot_name;
}

inline bool structurally_equal(const AstCommand& a, const AstCommand& b) {
    if (a.name != b.name || a.args.size() != b.args.size() ||
        a.keywords.size() != b.keywords.size())
        return false;
    for (std::size_t i = 0; i < a.args.size(); ++i)
        if (!structurally_equal(a.args[i], b.args[i])) return false;
    for (std::size_t i = 0; i < a.keywords.size(); ++i) {
        if (a.keywords[i].first != b.keywords[i].first) return false;
        if (a.keywords[i].second.size() != b.keywords[i].second.size()) return false;
        for (std::size_t k = 0; k < a.keywords[i].second.size(); ++k)
            if (!structurally_equal(a.keywords[i].second[k], b.keywords[i].second[k]))
                return false;
    }
    return true;
}

// Span-independent equality: what round-trip preservation means.
inline bool structurally_equal(const AstScript& a, const AstScript& b) {
    if (a.commands.size() != b.commands.size()) return false;
    for (std::size_t i = 0; i < a.commands.size(); ++i)
        if (!structurally_equal(a.commands[i], b.commands[i])) return false;
    return true;
}

}  // namespace lmplint
