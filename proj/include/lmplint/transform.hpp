#pragma once

// AST rewrites used to bound evaluation cost: capping run lengths and
// swapping interatomic potentials for the zero pair style. Both rewrites
// preserve command count, are idempotent, and commute with each other;
// only commands whose rendered text actually changes are recorded as edits.

#include <cstdint>
#include <string>
#include <vector>

#include "lmplint/ast.hpp"
#include "lmplint/numeric.hpp"
#include "lmplint/parse.hpp"

namespace lmplint {

struct TransformEdit {
    std::size_t command_index;
    std::string before;
    std::string after;
};

enum class TransformWarningKind { NoPairStylePresent };

struct TransformWarning {
    TransformWarningKind kind;
    std::string message;
};

struct TransformReport {
    std::string name;
    std::vector<TransformEdit> edits;
    std::vector<TransformWarning> warnings;
};

struct TransformOutcome {
    AstScript script;
    TransformReport report;
};

namespace detail {

inline void recolumnize(AstCommand& cmd) {
    std::size_t col = cmd.name.size() + 1;  // 1-based column just past the name
    auto place = [&](TypedArg& a) {
        col += 1;
        a.col_begin = col;
        col += a.text.size();
        a.col_end = col;
    };
    for (TypedArg& a : cmd.args) place(a);
    for (auto& [word, args] : cmd.keywords) {
        col += 1 + word.size();
        for (TypedArg& a : args) place(a);
    }
}

inline TypedArg plain_arg(std::string text, SlotKind kind, std::string slot) {
    TypedArg a;
    a.text = std::move(text);
    a.kind = kind;
    a.slot_name = std::move(slot);
    return a;
}

// "10" would parse as an Int slot elsewhere; the zero style takes a float
// cutoff, so integral values keep an explicit fraction.
inline std::string render_cutoff(double cutoff) {
    std::string s = render_number(cutoff);
    if (s.find('.') == std::string::npos && s.find('e') == std::string::npos)
        s += ".0";
    return s;
}

inline AstCommand zero_pair_style(const AstCommand& old, double cutoff) {
    AstCommand cmd;
    cmd.name = "pair_style";
    cmd.line = old.line;
    cmd.provenance = old.provenance;
    cmd.args.push_back(plain_arg("zero", SlotKind::Word, "style"));
    cmd.args.push_back(plain_arg(render_cutoff(cutoff), SlotKind::Word, "params"));
    recolumnize(cmd);
    return cmd;
}

inline AstCommand star_pair_coeff(const AstCommand& old) {
    AstCommand cmd;
    cmd.name = "pair_coeff";
    cmd.line = old.line;
    cmd.provenance = old.provenance;
    cmd.args.push_back(plain_arg("*", SlotKind::Star, "i"));
    cmd.args.push_back(plain_arg("*", SlotKind::Star, "j"));
    recolumnize(cmd);
    return cmd;
}

inline void record_edit(TransformReport& report, std::size_t index,
                        const AstCommand& before, const AstCommand& after) {
    std::string b = render_command(before);
    std::string a = render_command(after);
    if (b != a)
        report.edits.push_back(TransformEdit{index, std::move(b), std::move(a)});
}

}  // namespace detail

inline TransformOutcome truncate_runs(const AstScript& ast,
                                      std::int64_t max_steps = 10) {
    TransformOutcome out;
    out.script = ast;
    out.report.name = "truncate_runs";
    for (std::size_t i = 0; i < out.script.commands.size(); ++i) {
        AstCommand& cmd = out.script.commands[i];
        if (cmd.name != "run") continue;
        TypedArg* steps = nullptr;
        for (TypedArg& a : cmd.args)
            if (a.slot_name == "steps") steps = &a;
        if (!steps || !steps->number) continue;
        if (*steps->number <= static_cast<double>(max_steps)) continue;
        AstCommand before = cmd;
        steps->text = render_int(max_steps);
        steps->number = static_cast<double>(max_steps);
        detail::recolumnize(cmd);
        detail::record_edit(out.report, i, before, cmd);
    }
    return out;
}

inline TransformOutcome apply_pair_style_zero(const AstScript& ast,
                                              double cutoff = 10.0) {
    TransformOutcome out;
    out.script = ast;
    out.report.name = "apply_pair_style_zero";
    bool saw_pair_style = false;
    bool defines_atoms = false;
    for (std::size_t i = 0; i < out.script.commands.size(); ++i) {
        AstCommand& cmd = out.script.commands[i];
        if (cmd.name == "create_atoms" || cmd.name == "read_data")
            defines_atoms = true;
        const bool kim_init =
            cmd.name == "kim_init" ||
            (cmd.name == "kim" && cmd.style() && *cmd.style() == "init");
        const bool kim_interactions =
            cmd.name == "kim_interactions" ||
            (cmd.name == "kim" && cmd.style() && *cmd.style() == "interactions");
        if (cmd.name == "pair_style" || kim_init) {
            saw_pair_style = true;
            AstCommand next = detail::zero_pair_style(cmd, cutoff);
            detail::record_edit(out.report, i, cmd, next);
            cmd = std::move(next);
        } else if (cmd.name == "pair_coeff" || kim_interactions) {
            AstCommand next = detail::star_pair_coeff(cmd);
            detail::record_edit(out.report, i, cmd, next);
            cmd = std::move(next);
        }
    }
    if (!saw_pair_style && defines_atoms) {
        out.report.warnings.push_back(TransformWarning{
            TransformWarningKind::NoPairStylePresent,
            "script creates atoms but defines no pair style; nothing to replace "
            "with pair_style zero"});
    }
    return out;
}

}  // namespace lmplint
