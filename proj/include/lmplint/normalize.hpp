#pragma once

// Normalization pipeline: strip comments and console noise, merge '&'
// continuations, unroll loop constructs, then resolve every variable
// reference to a literal. The output is canonical text: one command per
// line, single-spaced, with no variable/label/jump/next commands left.

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "lmplint/expression.hpp"
#include "lmplint/numeric.hpp"
#include "lmplint/result.hpp"
#include "lmplint/script.hpp"
#include "lmplint/text.hpp"

namespace lmplint {

enum class NormalizeErrorKind {
    UnresolvableVariable,
    MalformedExpression,
    UnterminatedLoop,
    LoopBudgetExceeded,
    UnknownContinuation,
};

inline std::string_view to_string(NormalizeErrorKind k) {
    switch (k) {
        case NormalizeErrorKind::UnresolvableVariable: return "UnresolvableVariable";
        case NormalizeErrorKind::MalformedExpression: return "MalformedExpression";
        case NormalizeErrorKind::UnterminatedLoop: return "UnterminatedLoop";
        case NormalizeErrorKind::LoopBudgetExceeded: return "LoopBudgetExceeded";
        case NormalizeErrorKind::UnknownContinuation: return "UnknownContinuation";
    }
    return "?";
}

struct NormalizeError {
    NormalizeErrorKind kind;
    std::size_t line = 0;  // 1-based raw source line
    std::string message;
    std::string pass;  // pass that raised the error

    std::string format() const {
        std::string out(to_string(kind));
        out += " at line " + std::to_string(line) + " (" + pass + "): " + message;
        return out;
    }
};

struct NormalizeOptions {
    std::vector<std::string> noise_commands = {"print", "log", "echo", "shell"};
    std::size_t loop_line_budget = 100000;
    std::size_t max_loop_depth = 2;
};

// ---------------------------------------------------------------- strip ----

inline RawScript strip_comments_and_noise(const RawScript& raw,
                                          const NormalizeOptions& opt = {}) {
    RawScript out;
    out.origin = raw.origin;
    for (const SourceLine& line : raw.lines) {
        std::string_view text = line.text;
        std::size_t hash = find_unquoted(text, '#');
        if (hash != std::string_view::npos) text = text.substr(0, hash);
        text = rtrim(text);
        if (text.empty()) continue;
        std::string_view head = first_token(text);
        bool noisy = false;
        for (const std::string& n : opt.noise_commands) {
            if (head == n) {
                noisy = true;
                break;
            }
        }
        if (noisy) continue;
        out.lines.push_back(SourceLine{std::string(text), line.provenance});
    }
    return out;
}

// ---------------------------------------------------------------- merge ----

namespace detail {

inline bool ends_with_continuation(std::string_view text) {
    if (text.empty() || text.back() != '&') return false;
    return !position_quoted(text, text.size() - 1);
}

inline std::vector<std::size_t> merge_provenance(std::vector<std::size_t> a,
                                                 const std::vector<std::size_t>& b) {
    a.insert(a.end(), b.begin(), b.end());
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    return a;
}

}  // namespace detail

inline result<RawScript, NormalizeError> merge_continuations(const RawScript& raw) {
    RawScript out;
    out.origin = raw.origin;
    std::size_t i = 0;
    const std::size_t n = raw.lines.size();
    while (i < n) {
        std::string text = raw.lines[i].text;
        std::vector<std::size_t> prov = raw.lines[i].provenance;
        std::size_t j = i;
        while (detail::ends_with_continuation(text)) {
            if (j + 1 >= n) {
                std::size_t at = raw.lines[j].provenance.empty()
                                     ? 0
                                     : raw.lines[j].provenance.front();
                return NormalizeError{NormalizeErrorKind::UnknownContinuation, at,
                                      "line ends with '&' but no line follows",
                                      "merge_continuations"};
            }
            ++j;
            std::string_view left = rtrim(std::string_view(text).substr(0, text.size() - 1));
            std::string_view right = ltrim(raw.lines[j].text);
            text = std::string(left) + " " + std::string(right);
            prov = detail::merge_provenance(std::move(prov), raw.lines[j].provenance);
        }
        out.lines.push_back(SourceLine{std::move(text), std::move(prov)});
        i = j + 1;
    }
    return out;
}

// --------------------------------------------------------------- expand ----

namespace detail {

inline std::size_t line_of(const SourceLine& l) {
    return l.provenance.empty() ? 0 : l.provenance.front();
}

struct LoopBudget {
    std::size_t budget;
    std::size_t max_depth;
};

struct LoopDecl {
    std::int64_t count = 0;
    std::vector<std::size_t> provenance;
};

// Declarations visible to sibling constructs whose `variable X loop N` line
// sits earlier in an enclosing segment. Never passed into loop bodies: a
// body construct must re-declare its variable inside the body, or real
// re-iteration semantics (exhaustion deletes the variable) would diverge.
using DeclMap = std::map<std::string, LoopDecl>;

inline result<LoopDecl, NormalizeError> parse_loop_decl(const SourceLine& line,
                                                        const std::vector<Token>& toks) {
    if (toks.size() != 4) {
        return NormalizeError{NormalizeErrorKind::MalformedExpression,
                              line_of(line),
                              "variable loop takes exactly one count",
                              "expand_loops"};
    }
    auto c = parse_int(toks[3].text);
    if (!c || *c < 1) {
        return NormalizeError{NormalizeErrorKind::MalformedExpression,
                              line_of(line),
                              "loop count must be a literal positive integer, got '" +
                                  toks[3].text + "'",
                              "expand_loops"};
    }
    return LoopDecl{*c, line.provenance};
}

// Unrolls the outermost loop construct in `lines`: the earliest `label L`
// that a later `jump SELF L` targets, paired with the first such jump.
// Bodies recurse for nesting; the tail recurses for sibling loops.
inline result<std::vector<SourceLine>, NormalizeError> expand_segment(
    const std::vector<SourceLine>& lines, std::size_t depth,
    const LoopBudget& limits, const DeclMap& inherited) {
    const std::size_t n = lines.size();

    auto command_of = [&](std::size_t i) { return first_token(lines[i].text); };

    std::size_t label_idx = n;
    std::size_t jump_idx = n;
    std::string label;
    for (std::size_t l = 0; l < n && label_idx == n; ++l) {
        if (command_of(l) != "label") continue;
        auto ltoks = split_tokens(lines[l].text);
        if (ltoks.size() != 2) {
            return NormalizeError{NormalizeErrorKind::MalformedExpression,
                                  line_of(lines[l]),
                                  "label takes exactly one name", "expand_loops"};
        }
        for (std::size_t j = l + 1; j < n; ++j) {
            if (command_of(j) != "jump") continue;
            auto jtoks = split_tokens(lines[j].text);
            if (jtoks.size() == 3 && jtoks[1].text == "SELF" &&
                jtoks[2].text == ltoks[1].text) {
                label_idx = l;
                jump_idx = j;
                label = ltoks[1].text;
                break;
            }
        }
    }

    if (label_idx == n) {
        // No construct. Any jump left is out of the supported subset.
        for (std::size_t j = 0; j < n; ++j) {
            if (command_of(j) != "jump") continue;
            auto jtoks = split_tokens(lines[j].text);
            const std::size_t at = line_of(lines[j]);
            if (jtoks.size() >= 2 && jtoks[1].text != "SELF") {
                return NormalizeError{NormalizeErrorKind::MalformedExpression, at,
                                      "jump targets other than SELF are not supported",
                                      "expand_loops"};
            }
            if (jtoks.size() != 3) {
                return NormalizeError{NormalizeErrorKind::MalformedExpression, at,
                                      "jump SELF requires a label", "expand_loops"};
            }
            bool forward = false;
            for (std::size_t l = j + 1; l < n; ++l) {
                auto ltoks = split_tokens(lines[l].text);
                if (ltoks.size() == 2 && ltoks[0].text == "label" &&
                    ltoks[1].text == jtoks[2].text) {
                    forward = true;
                    break;
                }
            }
            if (forward) {
                return NormalizeError{NormalizeErrorKind::MalformedExpression, at,
                                      "forward jump to label '" + jtoks[2].text +
                                          "' is not supported",
                                      "expand_loops"};
            }
            return NormalizeError{NormalizeErrorKind::UnterminatedLoop, at,
                                  "jump target label '" + jtoks[2].text +
                                      "' not found",
                                  "expand_loops"};
        }
        return lines;
    }

    const std::size_t jump_line = line_of(lines[jump_idx]);
    if (depth > limits.max_depth) {
        return NormalizeError{NormalizeErrorKind::MalformedExpression, jump_line,
                              "loop nesting deeper than " +
                                  std::to_string(limits.max_depth) +
                                  " is not supported",
                              "expand_loops"};
    }

    auto next_toks = split_tokens(lines[jump_idx - 1].text);
    if (jump_idx == label_idx + 1 || next_toks.empty() ||
        next_toks[0].text != "next") {
        return NormalizeError{NormalizeErrorKind::MalformedExpression, jump_line,
                              "jump SELF must be preceded by a next command",
                              "expand_loops"};
    }
    if (next_toks.size() != 2) {
        return NormalizeError{NormalizeErrorKind::MalformedExpression,
                              line_of(lines[jump_idx - 1]),
                              "next requires exactly one variable name",
                              "expand_loops"};
    }
    const std::string var = next_toks[1].text;
    const std::size_t next_idx = jump_idx - 1;

    // The declaration precedes the label, either in this segment or in an
    // enclosing one already emitted (sibling constructs sharing a preamble).
    std::size_t decl_idx = n;
    LoopDecl decl;
    for (std::size_t d = 0; d < label_idx; ++d) {
        auto toks = split_tokens(lines[d].text);
        if (toks.size() >= 3 && toks[0].text == "variable" &&
            toks[1].text == var && toks[2].text == "loop") {
            auto parsed = parse_loop_decl(lines[d], toks);
            if (!parsed) return parsed.error();
            decl_idx = d;
            decl = parsed.value();
        }
    }
    if (decl_idx == n) {
        auto it = inherited.find(var);
        if (it == inherited.end()) {
            return NormalizeError{NormalizeErrorKind::MalformedExpression,
                                  line_of(lines[next_idx]),
                                  "loop variable '" + var +
                                      "' has no preceding 'variable " + var +
                                      " loop N' declaration",
                                  "expand_loops"};
        }
        decl = it->second;
    }

    std::vector<SourceLine> body(lines.begin() + label_idx + 1,
                                 lines.begin() + next_idx);
    auto body_expanded = expand_segment(body, depth + 1, limits, DeclMap{});
    if (!body_expanded) return body_expanded.error();

    // Sibling constructs after this one may reuse declarations from the
    // shared preamble; the consumed variable is deleted on exhaustion.
    DeclMap tail_decls = inherited;
    for (std::size_t d = 0; d < label_idx; ++d) {
        auto toks = split_tokens(lines[d].text);
        if (toks.size() == 4 && toks[0].text == "variable" &&
            toks[2].text == "loop") {
            auto parsup = parse_loop_decl(lines[d], toks);
            if (parsup) tail_decls[toks[1].text] = parsup.value();
        }
    }
    tail_decls.erase(var);

    std::vector<SourceLine> tail(lines.begin() + jump_idx + 1, lines.end());
    auto tail_expanded = expand_segment(tail, depth, limits, tail_decls);
    if (!tail_expanded) return tail_expanded.error();

    auto bind_line = [&](std::int64_t k) {
        return SourceLine{"variable " + var + " equal " + render_int(k),
                          decl.provenance};
    };

    std::vector<SourceLine> out;
    if (decl_idx != n) {
        out.insert(out.end(), lines.begin(), lines.begin() + decl_idx);
        out.push_back(bind_line(1));
        out.insert(out.end(), lines.begin() + decl_idx + 1,
                   lines.begin() + label_idx);
    } else {
        out.insert(out.end(), lines.begin(), lines.begin() + label_idx);
    }
    for (std::int64_t k = 1; k <= decl.count; ++k) {
        out.push_back(bind_line(k));
        out.insert(out.end(), body_expanded.value().begin(),
                   body_expanded.value().end());
        if (out.size() > limits.budget) {
            return NormalizeError{NormalizeErrorKind::LoopBudgetExceeded,
                                  jump_line,
                                  "loop expansion exceeds the " +
                                      std::to_string(limits.budget) +
                                      "-line budget",
                                  "expand_loops"};
        }
    }
    out.insert(out.end(), tail_expanded.value().begin(),
               tail_expanded.value().end());
    if (out.size() > limits.budget) {
        return NormalizeError{NormalizeErrorKind::LoopBudgetExceeded, jump_line,
                              "loop expansion exceeds the " +
                                  std::to_string(limits.budget) + "-line budget",
                              "expand_loops"};
    }
    return out;
}

}  // namespace detail

inline result<RawScript, NormalizeError> expand_loops(
    const RawScript& raw, const NormalizeOptions& opt = {}) {
    detail::LoopBudget limits{opt.loop_line_budget, opt.max_loop_depth};
    auto expanded = detail::expand_segment(raw.lines, 1, limits,
                                           detail::DeclMap{});
    if (!expanded) return expanded.error();

    RawScript out;
    out.origin = raw.origin;
    for (SourceLine& line : expanded.value()) {
        auto toks = split_tokens(line.text);
        if (toks.empty()) continue;
        if (toks[0].text == "label") continue;  // stray labels are inert
        if (toks[0].text == "next") {
            return NormalizeError{NormalizeErrorKind::MalformedExpression,
                                  detail::line_of(line),
                                  "next outside a loop construct",
                                  "expand_loops"};
        }
        if (toks[0].text == "jump") {
            return NormalizeError{NormalizeErrorKind::MalformedExpression,
                                  detail::line_of(line),
                                  "jump outside a loop construct",
                                  "expand_loops"};
        }
        // A declaration no construct consumed still binds the initial value.
        if (toks.size() == 4 && toks[0].text == "variable" &&
            toks[2].text == "loop") {
            auto parsed = detail::parse_loop_decl(line, toks);
            if (!parsed) return parsed.error();
            out.lines.push_back(SourceLine{
                "variable " + toks[1].text + " equal 1", line.provenance});
            continue;
        }
        out.lines.push_back(std::move(line));
    }
    return out;
}

// -------------------------------------------------------------- resolve ----

namespace detail {

struct SubstError {
    NormalizeErrorKind kind;
    std::string message;
};

inline bool valid_variable_name(std::string_view name) {
    if (name.empty() || !(ident_start(name[0]))) return false;
    for (char c : name)
        if (!ident_char(c)) return false;
    return true;
}

// Replaces ${NAME}, $(EXPR) and $c references outside quotes. Substituted
// text is not rescanned.
inline result<std::string, SubstError> substitute_references(
    std::string_view text, const VariableEnvironment& env) {
    std::string out;
    out.reserve(text.size());
    char open = 0;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        char c = text[i];
        if (open != 0) {
            out += c;
            if (c == open) open = 0;
            ++i;
            continue;
        }
        if (is_quote(c)) {
            open = c;
            out += c;
            ++i;
            continue;
        }
        if (c != '$') {
            out += c;
            ++i;
            continue;
        }
        if (i + 1 >= n) {
            return SubstError{NormalizeErrorKind::MalformedExpression,
                              "dangling '$' at end of line"};
        }
        char next = text[i + 1];
        if (next == '{') {
            std::size_t close = text.find('}', i + 2);
            if (close == std::string_view::npos) {
                return SubstError{NormalizeErrorKind::MalformedExpression,
                                  "unterminated '${' reference"};
            }
            std::string name(text.substr(i + 2, close - (i + 2)));
            if (!valid_variable_name(name)) {
                return SubstError{NormalizeErrorKind::MalformedExpression,
                                  "invalid variable name '" + name + "'"};
            }
            const auto* b = env.find(name);
            if (!b) {
                return SubstError{NormalizeErrorKind::UnresolvableVariable,
                                  "undefined variable '" + name + "'"};
            }
            out += b->render();
            i = close + 1;
        } else if (next == '(') {
            std::size_t depth = 0;
            std::size_t close = std::string_view::npos;
            for (std::size_t k = i + 1; k < n; ++k) {
                if (text[k] == '(') ++depth;
                else if (text[k] == ')') {
                    if (--depth == 0) {
                        close = k;
                        break;
                    }
                }
            }
            if (close == std::string_view::npos) {
                return SubstError{NormalizeErrorKind::MalformedExpression,
                                  "unterminated '$(' expression"};
            }
            std::string_view expr = text.substr(i + 2, close - (i + 2));
            double v = 0;
            try {
                v = eval_expression(expr, env);
            } catch (const ExprError& e) {
                return SubstError{e.kind == ExprErrorKind::Unresolvable
                                      ? NormalizeErrorKind::UnresolvableVariable
                                      : NormalizeErrorKind::MalformedExpression,
                                  e.message};
            }
            if (!std::isfinite(v)) {
                return SubstError{NormalizeErrorKind::MalformedExpression,
                                  "expression '" + std::string(expr) +
                                      "' does not evaluate to a finite number"};
            }
            out += render_number(v);
            i = close + 1;
        } else if (ident_char(next)) {
            std::string name(1, next);
            const auto* b = env.find(name);
            if (!b) {
                return SubstError{NormalizeErrorKind::UnresolvableVariable,
                                  "undefined variable '" + name + "'"};
            }
            out += b->render();
            i += 2;
        } else {
            return SubstError{NormalizeErrorKind::MalformedExpression,
                              std::string("invalid variable reference '$") +
                                  next + "'"};
        }
    }
    return out;
}

inline const std::set<std::string>& rejected_variable_styles() {
    static const std::set<std::string> s = {
        "delete", "world",  "universe", "uloop",  "atom",   "vector",
        "python", "format", "getenv",   "file",   "atomfile", "internal",
        "equalarray", "timer"};
    return s;
}

}  // namespace detail

inline result<CanonicalScript, NormalizeError> resolve_variables(
    const RawScript& raw, const NormalizeOptions& opt = {},
    VariableEnvironment* env_out = nullptr) {
    (void)opt;
    VariableEnvironment env;
    CanonicalScript out;
    out.origin = raw.origin;
    out.steps_applied = {"resolve_variables"};

    for (const SourceLine& line : raw.lines) {
        const std::size_t at = detail::line_of(line);
        auto substituted = detail::substitute_references(line.text, env);
        if (!substituted) {
            return NormalizeError{substituted.error().kind, at,
                                  substituted.error().message,
                                  "resolve_variables"};
        }
        const std::string& text = substituted.value();
        auto toks = split_tokens(text);
        if (toks.empty()) continue;

        if (toks[0].text != "variable") {
            out.lines.push_back(CanonicalLine{collapse_whitespace(text),
                                              line.provenance});
            continue;
        }

        auto malformed = [&](std::string msg) -> NormalizeError {
            return NormalizeError{NormalizeErrorKind::MalformedExpression, at,
                                  std::move(msg), "resolve_variables"};
        };
        if (toks.size() < 3) return malformed("variable requires a name and a style");
        const std::string& name = toks[1].text;
        const std::string& style = toks[2].text;
        if (!detail::valid_variable_name(name))
            return malformed("invalid variable name '" + name + "'");

        if (style == "equal") {
            if (toks.size() < 4) return malformed("variable equal requires an expression");
            std::string_view expr_text =
                trim(std::string_view(text).substr(toks[3].begin));
            expr_text = unquote(expr_text);
            double v = 0;
            try {
                v = eval_expression(expr_text, env);
            } catch (const ExprError& e) {
                return NormalizeError{
                    e.kind == ExprErrorKind::Unresolvable
                        ? NormalizeErrorKind::UnresolvableVariable
                        : NormalizeErrorKind::MalformedExpression,
                    at, e.message, "resolve_variables"};
            }
            if (!std::isfinite(v))
                return malformed("expression for variable '" + name +
                                 "' does not evaluate to a finite number");
            env.bind_number(name, v, VariableEnvironment::Style::Equal, at);
        } else if (style == "string") {
            if (toks.size() != 4)
                return malformed("variable string takes exactly one value");
            env.bind_text(name, std::string(unquote(toks[3].text)),
                          VariableEnvironment::Style::String, at);
        } else if (style == "index") {
            if (toks.size() < 4)
                return malformed("variable index requires at least one value");
            env.bind_text(name, std::string(unquote(toks[3].text)),
                          VariableEnvironment::Style::Index, at);
        } else if (style == "loop") {
            if (toks.size() != 4)
                return malformed("variable loop takes exactly one count");
            auto c = parse_int(toks[3].text);
            if (!c || *c < 1)
                return malformed("loop count must be a literal positive integer, got '" +
                                 toks[3].text + "'");
            env.bind_number(name, 1.0, VariableEnvironment::Style::Loop, at);
        } else if (detail::rejected_variable_styles().count(style)) {
            return malformed("variable style '" + style + "' is not supported");
        } else {
            return malformed("unknown variable style '" + style + "'");
        }
    }
    if (env_out) *env_out = env;
    return out;
}

// ------------------------------------------------------------ normalize ----

inline result<CanonicalScript, NormalizeError> normalize(
    const RawScript& raw, const NormalizeOptions& opt = {}) {
    RawScript stripped = strip_comments_and_noise(raw, opt);
    auto merged = merge_continuations(stripped);
    if (!merged) return merged.error();
    auto expanded = expand_loops(merged.value(), opt);
    if (!expanded) return expanded.error();
    auto resolved = resolve_variables(expanded.value(), opt);
    if (!resolved) return resolved.error();
    CanonicalScript out = std::move(resolved.value());
    out.steps_applied = {"strip_comments_and_noise", "merge_continuations",
                         "expand_loops", "resolve_variables"};
    return out;
}

}  // namespace lmplint
