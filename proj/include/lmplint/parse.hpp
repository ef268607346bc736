#pragma once

// Registry-driven parser over canonical scripts. Each line either becomes a
// typed command or produces diagnostics and is excluded from the AST; the
// parser itself never throws. serialize() is the exact inverse on accepted
// scripts: one single-spaced line per command, tokens verbatim.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lmplint/ast.hpp"
#include "lmplint/numeric.hpp"
#include "lmplint/script.hpp"
#include "lmplint/signature.hpp"
#include "lmplint/text.hpp"

namespace lmplint {

struct ParseResult {
    AstScript ast;
    std::vector<Diagnostic> diagnostics;

    bool has_errors() const {
        for (const Diagnostic& d : diagnostics)
            if (d.severity == Severity::Error) return true;
        return false;
    }
};

namespace detail {

struct LineCtx {
    std::size_t line;
    const std::vector<std::size_t>* provenance;
    std::vector<Diagnostic>* diags;

    Span span_of(const Token& t) const {
        return Span{line, t.begin + 1, t.end + 1, *provenance};
    }
    Span span_at_end(const std::vector<Token>& toks) const {
        if (toks.empty()) return Span{line, 1, 1, *provenance};
        return Span{line, toks.back().end + 1, toks.back().end + 1, *provenance};
    }
    void emit(Severity sev, const char* code, Span span, std::string msg) {
        diags->push_back(Diagnostic{sev, code, std::move(span), std::move(msg)});
    }
};

inline TypedArg typed_arg(const Token& t, const ArgSlot& slot) {
    TypedArg a;
    a.text = t.text;
    a.kind = slot.kind;
    a.slot_name = slot.name;
    a.col_begin = t.begin + 1;
    a.col_end = t.end + 1;
    if (slot.kind == SlotKind::Int || slot.kind == SlotKind::Float ||
        slot.kind == SlotKind::NumberEither) {
        a.number = parse_number(t.text);
    }
    return a;
}

inline bool check_token(LineCtx& ctx, const Token& t, const ArgSlot& slot,
                        const std::string& owner) {
    if (token_matches_kind(t.text, slot)) return true;
    if (slot.kind == SlotKind::EnumOf) {
        std::string allowed;
        for (const std::string& v : slot.enum_values) {
            if (!allowed.empty()) allowed += ", ";
            allowed += v;
        }
        ctx.emit(Severity::Error, diag::bad_enum_value, ctx.span_of(t),
                 owner + ": '" + t.text + "' is not a valid " + slot.name +
                     " (expected one of: " + allowed + ")");
    } else {
        ctx.emit(Severity::Error, diag::type_mismatch, ctx.span_of(t),
                 owner + ": expected " + std::string(to_string(slot.kind)) +
                     " for '" + slot.name + "', got '" + t.text + "'");
    }
    return false;
}

inline bool keyword_registered(const std::vector<KeywordGroup>& kws,
                               std::string_view word) {
    for (const KeywordGroup& g : kws)
        if (g.word == word) return true;
    return false;
}

// Consumes positional slots starting at toks[ti]. Returns false on error.
inline bool match_positional(LineCtx& ctx, const std::vector<Token>& toks,
                             std::size_t& ti, const std::vector<ArgSlot>& slots,
                             std::size_t min_positional,
                             const std::vector<KeywordGroup>& keywords,
                             const std::string& owner, AstCommand& cmd) {
    std::size_t consumed = 0;
    for (std::size_t si = 0; si < slots.size(); ++si) {
        const ArgSlot& slot = slots[si];
        for (;;) {
            if (ti >= toks.size() || keyword_registered(keywords, toks[ti].text)) {
                if (consumed < min_positional) {
                    ctx.emit(Severity::Error, diag::arity_mismatch,
                             ctx.span_at_end(toks),
                             owner + " expects at least " +
                                 std::to_string(min_positional) +
                                 " positional argument(s), got " +
                                 std::to_string(consumed));
                    return false;
                }
                return true;  // optional remainder omitted
            }
            if (!check_token(ctx, toks[ti], slot, owner)) return false;
            cmd.args.push_back(typed_arg(toks[ti], slot));
            ++ti;
            ++consumed;
            if (!slot.variadic) break;
        }
    }
    return true;
}

inline bool match_keywords(LineCtx& ctx, const std::vector<Token>& toks,
                           std::size_t& ti, const std::vector<KeywordGroup>& kws,
                           const std::string& owner, AstCommand& cmd) {
    std::vector<std::string> used;
    while (ti < toks.size()) {
        const Token& word = toks[ti];
        const KeywordGroup* group = nullptr;
        for (const KeywordGroup& g : kws)
            if (g.word == word.text) group = &g;
        if (!group) {
            if (kws.empty()) {
                ctx.emit(Severity::Error, diag::arity_mismatch, ctx.span_of(word),
                         owner + ": unexpected trailing argument '" + word.text + "'");
            } else {
                ctx.emit(Severity::Error, diag::unknown_keyword, ctx.span_of(word),
                         owner + ": unknown keyword '" + word.text + "'");
            }
            return false;
        }
        bool repeated = false;
        for (const std::string& u : used) repeated |= (u == word.text);
        if (repeated && !group->repeatable) {
            ctx.emit(Severity::Error, diag::unknown_keyword, ctx.span_of(word),
                     owner + ": keyword '" + word.text + "' given more than once");
            return false;
        }
        used.push_back(word.text);
        ++ti;
        std::vector<TypedArg> kwargs;
        for (const ArgSlot& slot : group->args) {
            if (ti >= toks.size()) {
                ctx.emit(Severity::Error, diag::arity_mismatch,
                         ctx.span_at_end(toks),
                         owner + ": keyword '" + word.text + "' expects " +
                             std::to_string(group->args.size()) +
                             " argument(s)");
                return false;
            }
            if (!check_token(ctx, toks[ti], slot,
                             owner + " keyword '" + word.text + "'"))
                return false;
            kwargs.push_back(typed_arg(toks[ti], slot));
            ++ti;
        }
        cmd.keywords.emplace_back(word.text, std::move(kwargs));
    }
    return true;
}

}  // namespace detail

// Tokenizes one canonical line; emits P006 when a quote never closes.
inline std::vector<Token> tokenize(std::string_view line, std::size_t lineno,
                                   const std::vector<std::size_t>& provenance,
                                   std::vector<Diagnostic>* diags) {
    bool unterminated = false;
    auto toks = split_tokens(line, &unterminated);
    if (unterminated && diags) {
        const Token& last = toks.back();
        diags->push_back(Diagnostic{
            Severity::Error, diag::unterminated_quote,
            Span{lineno, last.begin + 1, last.end + 1, provenance},
            "unterminated quoted string"});
    }
    return toks;
}

class Parser {
public:
    explicit Parser(const SignatureRegistry& registry) : registry_(registry) {}

    ParseResult parse(const CanonicalScript& script) const {
        ParseResult out;
        out.ast.origin = script.origin;
        out.ast.registry_version = registry_.version();
        for (std::size_t i = 0; i < script.lines.size(); ++i) {
            parse_line(script.lines[i].text, i + 1, script.lines[i].provenance, out);
        }
        return out;
    }

    const SignatureRegistry& registry() const { return registry_; }

private:
    void parse_line(std::string_view text, std::size_t lineno,
                    const std::vector<std::size_t>& provenance,
                    ParseResult& out) const {
        std::size_t before = out.diagnostics.size();
        auto toks = tokenize(text, lineno, provenance, &out.diagnostics);
        if (toks.empty() || out.diagnostics.size() > before) return;

        detail::LineCtx ctx{lineno, &provenance, &out.diagnostics};
        const CommandSignature* sig = registry_.find(toks[0].text);
        if (!sig) {
            ctx.emit(Severity::Error, diag::unknown_command, ctx.span_of(toks[0]),
                     "unknown command '" + toks[0].text + "'");
            return;
        }

        AstCommand cmd;
        cmd.name = sig->name;
        cmd.line = lineno;
        cmd.provenance = provenance;

        std::size_t ti = 1;
        const std::string owner = "command '" + sig->name + "'";
        if (!detail::match_positional(ctx, toks, ti, sig->positional,
                                      sig->min_positional, sig->keywords, owner,
                                      cmd))
            return;

        const std::vector<KeywordGroup>* active_keywords = &sig->keywords;
        if (sig->styles) {
            if (ti >= toks.size()) {
                ctx.emit(Severity::Error, diag::arity_mismatch,
                         ctx.span_at_end(toks),
                         owner + " requires a style argument");
                return;
            }
            const Token& style_tok = toks[ti];
            auto it = sig->styles->map.find(style_tok.text);
            if (it == sig->styles->map.end()) {
                if (sig->styles->on_unknown == StyleDiagnostic::BadEnum) {
                    std::string allowed;
                    for (const auto& [k, v] : sig->styles->map) {
                        if (!allowed.empty()) allowed += ", ";
                        allowed += k;
                    }
                    ctx.emit(Severity::Error, diag::bad_enum_value,
                             ctx.span_of(style_tok),
                             owner + ": invalid style '" + style_tok.text +
                                 "' (expected one of: " + allowed + ")");
                } else {
                    ctx.emit(Severity::Error, diag::unknown_command,
                             ctx.span_of(style_tok),
                             "unknown " + sig->name + " style '" +
                                 style_tok.text + "'");
                }
                return;
            }
            ArgSlot style_slot;
            style_slot.name = sig->styles->slot_name;
            style_slot.kind = SlotKind::Word;
            cmd.style_index = cmd.args.size();
            cmd.args.push_back(detail::typed_arg(style_tok, style_slot));
            ++ti;

            const SubSignature& sub = it->second;
            const std::string sowner = owner + " style '" + style_tok.text + "'";
            if (!detail::match_positional(ctx, toks, ti, sub.positional,
                                          sub.min_positional, sub.keywords,
                                          sowner, cmd))
                return;
            active_keywords = &sub.keywords;
        }

        if (!detail::match_keywords(ctx, toks, ti, *active_keywords, owner, cmd))
            return;
        out.ast.commands.push_back(std::move(cmd));
    }

    const SignatureRegistry& registry_;
};

inline std::string render_command(const AstCommand& cmd) {
    std::string text = cmd.name;
    for (const TypedArg& a : cmd.args) {
        text += ' ';
        text += a.text;
    }
    for (const auto& [word, args] : cmd.keywords) {
        text += ' ';
        text += word;
        for (const TypedArg& a : args) {
            text += ' ';
            text += a.text;
        }
    }
    return text;
}

// One single-spaced line per command; tokens appear exactly as parsed.
inline CanonicalScript serialize(const AstScript& ast) {
    CanonicalScript out;
    out.origin = ast.origin;
    for (const AstCommand& cmd : ast.commands) {
        out.lines.push_back(CanonicalLine{render_command(cmd), cmd.provenance});
    }
    return out;
}

}  // namespace lmplint
