#pragma once

// Single-fault mutations of parsed commands. Each mutation rebuilds the
// command text with exactly one defect and carries the diagnostic code the
// parser must emit for it. The parser must also drop the command from the
// AST, so every mutation doubles as a soundness probe: no damaged command
// may survive into later stages.

#include <string>
#include <vector>

#include "generate.hpp"
#include "lmplint/ast.hpp"
#include "lmplint/parse.hpp"
#include "lmplint/signature.hpp"

namespace mut {

struct Mutation {
    std::string label;          // which defect was planted, for test output
    std::string line;           // full command text with the defect
    std::string expected_code;  // P001..P006
    bool kind_violation = false;  // true for slot-kind violations
};

namespace detail {

inline std::vector<std::string> violations_for(lmplint::SlotKind k) {
    using lmplint::SlotKind;
    switch (k) {
        case SlotKind::Int: return {"abc", "1.5", "2e"};
        case SlotKind::Float: return {"abc", "1.2.3", "12a"};
        case SlotKind::NumberEither: return {"abc", "1.2.3", "--7"};
        case SlotKind::EnumOf: return {"zzz_not_a_value"};
        case SlotKind::Star: return {"a*b", "1**2"};
        case SlotKind::Identifier: return {"bad@id", "no/slash", "wh?t"};
        case SlotKind::QuotedString: return {"unquoted_token"};
        case SlotKind::Word:
        case SlotKind::FilePath:
            return {};  // any non-empty token matches; cannot violate
    }
    return {};
}

// Full token count when every positional slot of the line's shape is filled
// exactly once, or nullopt when a variadic slot makes "full" unbounded.
inline std::optional<std::size_t> full_token_count(
    const lmplint::CommandSignature& sig, const lmplint::AstCommand& cmd) {
    std::size_t n = sig.positional.size();
    if (!sig.positional.empty() && sig.positional.back().variadic)
        return std::nullopt;
    if (sig.styles) {
        auto style = cmd.style();
        if (!style) return std::nullopt;
        auto it = sig.styles->map.find(std::string(*style));
        if (it == sig.styles->map.end()) return std::nullopt;
        const auto& sub = it->second.positional;
        if (!sub.empty() && sub.back().variadic) return std::nullopt;
        n += 1 + sub.size();
    }
    return n;
}

inline const std::vector<lmplint::KeywordGroup>* active_keywords(
    const lmplint::CommandSignature& sig, const lmplint::AstCommand& cmd) {
    if (!sig.styles) return &sig.keywords;
    auto style = cmd.style();
    if (!style) return nullptr;
    auto it = sig.styles->map.find(std::string(*style));
    if (it == sig.styles->map.end()) return nullptr;
    return &it->second.keywords;
}

}  // namespace detail

// All applicable single-fault mutations of one parsed command. `rng` picks
// among equivalent violating tokens so a corpus covers several shapes.
inline std::vector<Mutation> mutations_for(const lmplint::AstCommand& cmd,
                                           const lmplint::SignatureRegistry& reg,
                                           gen::Rng& rng) {
    std::vector<Mutation> out;
    const lmplint::CommandSignature* sig = reg.find(cmd.name);
    if (!sig) return out;

    // Slot-kind violations on positional args (the style word is handled
    // separately) and on keyword args.
    for (std::size_t i = 0; i < cmd.args.size(); ++i) {
        if (cmd.style_index && *cmd.style_index == i) continue;
        auto pool = detail::violations_for(cmd.args[i].kind);
        if (pool.empty()) continue;
        lmplint::AstCommand copy = cmd;
        copy.args[i].text = rng.pick(pool);
        out.push_back(Mutation{
            cmd.name + ".arg[" + std::to_string(i) + "]:" +
                std::string(lmplint::to_string(cmd.args[i].kind)),
            lmplint::render_command(copy),
            cmd.args[i].kind == lmplint::SlotKind::EnumOf ? "P005" : "P003",
            true});
    }
    for (std::size_t k = 0; k < cmd.keywords.size(); ++k) {
        for (std::size_t j = 0; j < cmd.keywords[k].second.size(); ++j) {
            auto pool =
                detail::violations_for(cmd.keywords[k].second[j].kind);
            if (pool.empty()) continue;
            lmplint::AstCommand copy = cmd;
            copy.keywords[k].second[j].text = rng.pick(pool);
            out.push_back(Mutation{
                cmd.name + ".kw[" + cmd.keywords[k].first + "][" +
                    std::to_string(j) + "]:" +
                    std::string(
                        lmplint::to_string(cmd.keywords[k].second[j].kind)),
                lmplint::render_command(copy),
                cmd.keywords[k].second[j].kind == lmplint::SlotKind::EnumOf
                    ? "P005"
                    : "P003",
                true});
        }
    }

    // Unknown style word.
    if (cmd.style_index) {
        lmplint::AstCommand copy = cmd;
        copy.args[*cmd.style_index].text = "zzz_bogus_style";
        const char* code =
            sig->styles &&
                    sig->styles->on_unknown == lmplint::StyleDiagnostic::BadEnum
                ? "P005"
                : "P001";
        out.push_back(Mutation{cmd.name + ".style",
                               lmplint::render_command(copy), code, false});
    }

    // Truncation below the positional minimum (or below the style word).
    if (sig->min_positional >= 1 || sig->styles) {
        out.push_back(
            Mutation{cmd.name + ".truncated", cmd.name, "P002", false});
    }

    // Trailing garbage. With keywords registered it reads as an unknown
    // keyword; with none it is a trailing-argument arity error. Either way
    // the append is only a reliable fault when no open positional slot could
    // swallow the token first: a keyword instance already present ends
    // positional matching, otherwise every slot must be filled and none
    // variadic.
    if (const auto* kws = detail::active_keywords(*sig, cmd)) {
        bool lands_after_positional = !cmd.keywords.empty();
        if (!lands_after_positional) {
            auto full = detail::full_token_count(*sig, cmd);
            lands_after_positional = full && cmd.args.size() == *full;
        }
        if (lands_after_positional) {
            if (!kws->empty()) {
                out.push_back(Mutation{cmd.name + ".unknown-keyword",
                                       lmplint::render_command(cmd) +
                                           " zzz_bogus_kw",
                                       "P004", false});
            } else {
                out.push_back(Mutation{cmd.name + ".trailing",
                                       lmplint::render_command(cmd) +
                                           " zzz_trailing",
                                       "P002", false});
            }
        }
    }

    // A keyword given twice when its group forbids repetition.
    if (const auto* kws = detail::active_keywords(*sig, cmd)) {
        for (const auto& [word, args] : cmd.keywords) {
            const lmplint::KeywordGroup* group = nullptr;
            for (const auto& g : *kws)
                if (g.word == word) group = &g;
            if (!group || group->repeatable) continue;
            std::string line = lmplint::render_command(cmd) + " " + word;
            for (const auto& a : args) line += " " + a.text;
            out.push_back(
                Mutation{cmd.name + ".repeated[" + word + "]", line, "P004",
                         false});
            break;
        }
    }

    // Unterminated quote and unknown command head.
    out.push_back(Mutation{cmd.name + ".unterminated-quote",
                           lmplint::render_command(cmd) + " \"broken",
                           "P006", false});
    {
        std::string line = lmplint::render_command(cmd);
        out.push_back(Mutation{cmd.name + ".unknown-command",
                               "zzz_cmd" + line.substr(cmd.name.size()),
                               "P001", false});
    }
    return out;
}

}  // namespace mut
