#pragma once

// Reference interpreter for the preprocessing subset. Where the library
// structurally unrolls label/next/jump constructs, this executes them with a
// program counter the way the target application replays its input file.
// Tokenizing, substitution, and arithmetic (shunting-yard over explicit
// stacks) are implemented from scratch here so that agreement with the
// library is evidence, not tautology. Number rendering is not re-derived:
// both sides follow the shared convention (integers without a point,
// otherwise the shortest round-tripping form), so it uses std::to_chars
// directly. Deliberately unsupported shapes (forward jumps, sibling loops
// recycling an exhausted variable) throw, so a generator that wanders
// outside the subset fails loudly.

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace oracle {

struct OracleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline bool space(char c) { return c == ' ' || c == '\t'; }
inline bool quote(char c) { return c == '"' || c == '\''; }
inline bool ident(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
           (c >= '0' && c <= '9') || c == '_';
}

// Quote-aware whitespace split; tokens keep their quote characters.
inline std::vector<std::string> tokens_of(const std::string& line) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < line.size()) {
        if (space(line[i])) {
            ++i;
            continue;
        }
        std::string tok;
        char open = 0;
        while (i < line.size() && (open != 0 || !space(line[i]))) {
            char c = line[i];
            if (open == 0 && quote(c)) open = c;
            else if (open != 0 && c == open) open = 0;
            tok += c;
            ++i;
        }
        out.push_back(std::move(tok));
    }
    return out;
}

inline std::string rtrim(const std::string& s) {
    std::size_t n = s.size();
    while (n > 0 && space(s[n - 1])) --n;
    return s.substr(0, n);
}

inline std::string ltrim(const std::string& s) {
    std::size_t i = 0;
    while (i < s.size() && space(s[i])) ++i;
    return s.substr(i);
}

// Position of the first unquoted occurrence of `c`, or npos.
inline std::size_t find_unquoted(const std::string& s, char c) {
    char open = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (open != 0) {
            if (s[i] == open) open = 0;
        } else if (quote(s[i])) {
            open = s[i];
        } else if (s[i] == c) {
            return i;
        }
    }
    return std::string::npos;
}

inline bool ends_with_unquoted_amp(const std::string& s) {
    if (s.empty() || s.back() != '&') return false;
    char open = 0;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        if (open != 0) {
            if (s[i] == open) open = 0;
        } else if (quote(s[i])) {
            open = s[i];
        }
    }
    return open == 0;
}

// Integers print without a decimal point; everything else is the shortest
// form that parses back exactly, as produced by std::to_chars.
inline std::string render_number(double v) {
    if (v == 0.0) return "0";
    if (std::isfinite(v) && std::nearbyint(v) == v &&
        std::fabs(v) <= 9007199254740992.0) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(v));
        return buf;
    }
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc()) throw OracleError("number does not render");
    return std::string(buf, end);
}

struct Variable {
    bool is_number = false;
    double number = 0.0;
    std::string text;
    bool is_loop = false;
    std::int64_t loop_count = 0;

    std::string render() const { return is_number ? render_number(number) : text; }
};

using Env = std::map<std::string, Variable>;

// ---------------------------------------------------------------------------
// Shunting-yard arithmetic: + - * / ^ (right-assoc), unary +/- (applied to the
// immediate operand, so -2^2 is (-2)^2 while 2^-3^2 is 2^((-3)^2)),
// sqrt/exp/ln/abs/floor/ceil, v_NAME lookups.

class Shunter {
public:
    Shunter(const std::string& src, const Env& env) : src_(src), env_(env) {}

    double run() {
        std::vector<double> values;
        std::vector<char> ops;  // '+','-','*','/','^','n' (unary negate)

        auto precedence = [](char op) {
            switch (op) {
                case 'n': return 4;
                case '^': return 3;
                case '*':
                case '/': return 2;
                default: return 1;
            }
        };
        auto right_assoc = [](char op) { return op == '^' || op == 'n'; };
        auto apply = [&](char op) {
            if (op == 'n') {
                if (values.empty()) throw OracleError("missing operand");
                values.back() = -values.back();
                return;
            }
            if (values.size() < 2) throw OracleError("missing operand");
            double b = values.back();
            values.pop_back();
            double a = values.back();
            values.pop_back();
            switch (op) {
                case '+': values.push_back(a + b); break;
                case '-': values.push_back(a - b); break;
                case '*': values.push_back(a * b); break;
                case '/': values.push_back(a / b); break;
                case '^': values.push_back(std::pow(a, b)); break;
            }
        };
        auto push_op = [&](char op) {
            while (!ops.empty() &&
                   (precedence(ops.back()) > precedence(op) ||
                    (precedence(ops.back()) == precedence(op) &&
                     !right_assoc(op)))) {
                apply(ops.back());
                ops.pop_back();
            }
            ops.push_back(op);
        };

        bool expect_operand = true;
        for (;;) {
            skip_ws();
            if (pos_ >= src_.size()) break;
            char c = src_[pos_];
            if (expect_operand) {
                if (c == '+') {
                    ++pos_;  // unary plus is a no-op
                } else if (c == '-') {
                    ++pos_;
                    push_op('n');
                } else if (c == '(') {
                    ++pos_;
                    values.push_back(subexpr(')'));
                    expect_operand = false;
                } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                           c == '.') {
                    values.push_back(number());
                    expect_operand = false;
                } else if (ident(c)) {
                    values.push_back(identifier());
                    expect_operand = false;
                } else {
                    throw OracleError(std::string("unexpected '") + c + "'");
                }
            } else {
                if (c == '+' || c == '-' || c == '*' || c == '/' || c == '^') {
                    ++pos_;
                    push_op(c);
                    expect_operand = true;
                } else {
                    throw OracleError(std::string("unexpected '") + c + "'");
                }
            }
        }
        if (expect_operand) throw OracleError("dangling operator");
        while (!ops.empty()) {
            apply(ops.back());
            ops.pop_back();
        }
        if (values.size() != 1) throw OracleError("bad expression");
        return values.front();
    }

private:
    void skip_ws() {
        while (pos_ < src_.size() && space(src_[pos_])) ++pos_;
    }

    // Consumes a parenthesized subexpression up to the matching `close`.
    double subexpr(char close) {
        std::size_t depth = 1;
        std::size_t start = pos_;
        while (pos_ < src_.size() && depth > 0) {
            if (src_[pos_] == '(') ++depth;
            else if (src_[pos_] == close) --depth;
            ++pos_;
        }
        if (depth != 0) throw OracleError("missing ')'");
        Shunter inner(src_.substr(start, pos_ - 1 - start), env_);
        return inner.run();
    }

    double number() {
        std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isdigit(static_cast<unsigned char>(src_[pos_])) ||
                src_[pos_] == '.'))
            ++pos_;
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t save = pos_++;
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-'))
                ++pos_;
            if (pos_ < src_.size() &&
                std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                while (pos_ < src_.size() &&
                       std::isdigit(static_cast<unsigned char>(src_[pos_])))
                    ++pos_;
            } else {
                pos_ = save;
            }
        }
        const std::string tok = src_.substr(start, pos_ - start);
        char* end = nullptr;
        double v = std::strtod(tok.c_str(), &end);
        if (end != tok.c_str() + tok.size())
            throw OracleError("bad number '" + tok + "'");
        return v;
    }

    double identifier() {
        std::size_t start = pos_;
        while (pos_ < src_.size() && ident(src_[pos_])) ++pos_;
        const std::string name = src_.substr(start, pos_ - start);
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == '(') {
            ++pos_;
            double a = subexpr(')');
            if (name == "sqrt") return std::sqrt(a);
            if (name == "exp") return std::exp(a);
            if (name == "ln") return std::log(a);
            if (name == "abs") return std::fabs(a);
            if (name == "floor") return std::floor(a);
            if (name == "ceil") return std::ceil(a);
            throw OracleError("unknown function '" + name + "'");
        }
        if (name.size() > 2 && name.rfind("v_", 0) == 0) {
            auto it = env_.find(name.substr(2));
            if (it == env_.end())
                throw OracleError("undefined variable '" + name + "'");
            if (!it->second.is_number)
                throw OracleError("string variable in arithmetic");
            return it->second.number;
        }
        throw OracleError("unknown identifier '" + name + "'");
    }

    std::string src_;
    const Env& env_;
    std::size_t pos_ = 0;
};

inline double eval(const std::string& expr, const Env& env) {
    return Shunter(expr, env).run();
}

// $-reference substitution outside quotes: ${NAME}, $(EXPR), $c.
inline std::string substitute(const std::string& text, const Env& env) {
    std::string out;
    char open = 0;
    std::size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        if (open != 0) {
            out += c;
            if (c == open) open = 0;
            ++i;
            continue;
        }
        if (quote(c)) {
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
        if (i + 1 >= text.size()) throw OracleError("dangling '$'");
        char next = text[i + 1];
        if (next == '{') {
            std::size_t close = text.find('}', i + 2);
            if (close == std::string::npos)
                throw OracleError("unterminated '${'");
            std::string name = text.substr(i + 2, close - (i + 2));
            auto it = env.find(name);
            if (it == env.end())
                throw OracleError("undefined variable '" + name + "'");
            out += it->second.render();
            i = close + 1;
        } else if (next == '(') {
            std::size_t depth = 0, close = std::string::npos;
            for (std::size_t k = i + 1; k < text.size(); ++k) {
                if (text[k] == '(') ++depth;
                else if (text[k] == ')' && --depth == 0) {
                    close = k;
                    break;
                }
            }
            if (close == std::string::npos)
                throw OracleError("unterminated '$('");
            out += render_number(eval(text.substr(i + 2, close - (i + 2)), env));
            i = close + 1;
        } else if (ident(next)) {
            auto it = env.find(std::string(1, next));
            if (it == env.end())
                throw OracleError(std::string("undefined variable '") + next +
                                  "'");
            out += it->second.render();
            i += 2;
        } else {
            throw OracleError(std::string("invalid reference '$") + next + "'");
        }
    }
    return out;
}

inline std::string unquote(const std::string& s) {
    if (s.size() >= 2 && quote(s.front()) && s.back() == s.front())
        return s.substr(1, s.size() - 2);
    return s;
}

}  // namespace detail

// Runs the interpreter over raw source text and returns the emitted command
// stream, one line each, newline-terminated.
inline std::string run(const std::string& source) {
    using namespace detail;

    // Physical lines, \r stripped.
    std::vector<std::string> physical;
    std::string cur;
    for (char c : source) {
        if (c == '\n') {
            physical.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    if (!cur.empty()) physical.push_back(cur);

    // Comment/noise strip, then continuation merge, same order as the library.
    static const std::set<std::string> noise = {"print", "log", "echo", "shell"};
    std::vector<std::string> stripped;
    for (const std::string& raw : physical) {
        std::string text = raw;
        std::size_t hash = find_unquoted(text, '#');
        if (hash != std::string::npos) text = text.substr(0, hash);
        text = rtrim(text);
        if (text.empty()) continue;
        auto toks = tokens_of(text);
        if (!toks.empty() && noise.count(toks[0])) continue;
        stripped.push_back(std::move(text));
    }
    std::vector<std::string> lines;
    for (std::size_t i = 0; i < stripped.size();) {
        std::string text = stripped[i];
        std::size_t j = i;
        while (ends_with_unquoted_amp(text)) {
            if (j + 1 >= stripped.size())
                throw OracleError("continuation at end of input");
            ++j;
            text = rtrim(text.substr(0, text.size() - 1)) + " " +
                   ltrim(stripped[j]);
        }
        lines.push_back(std::move(text));
        i = j + 1;
    }

    // Label positions: a jump re-scans from the top, so first wins.
    std::map<std::string, std::size_t> labels;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        auto toks = tokens_of(lines[i]);
        if (toks.size() == 2 && toks[0] == "label" && !labels.count(toks[1]))
            labels[toks[1]] = i;
    }

    Env env;
    std::string out;
    bool skip_next_jump = false;
    std::size_t emitted = 0;
    std::size_t steps = 0;
    std::size_t pc = 0;
    while (pc < lines.size()) {
        if (++steps > 2000000) throw OracleError("step budget exceeded");
        const std::string& line = lines[pc];
        auto raw_toks = tokens_of(line);
        const std::string& head = raw_toks[0];

        if (head == "label") {
            if (raw_toks.size() != 2) throw OracleError("label takes one name");
            ++pc;
            continue;
        }
        if (head == "next") {
            if (raw_toks.size() != 2)
                throw OracleError("next takes one variable");
            auto it = env.find(raw_toks[1]);
            if (it == env.end() || !it->second.is_loop)
                throw OracleError("next on non-loop variable '" + raw_toks[1] +
                                  "'");
            it->second.number += 1.0;
            if (static_cast<std::int64_t>(it->second.number) >
                it->second.loop_count) {
                env.erase(it);
                skip_next_jump = true;
            }
            ++pc;
            continue;
        }
        if (head == "jump") {
            if (raw_toks.size() != 3 || raw_toks[1] != "SELF")
                throw OracleError("only 'jump SELF <label>' is supported");
            if (skip_next_jump) {
                skip_next_jump = false;
                ++pc;
                continue;
            }
            auto it = labels.find(raw_toks[2]);
            if (it == labels.end())
                throw OracleError("missing label '" + raw_toks[2] + "'");
            if (it->second > pc)
                throw OracleError("forward jump is outside the subset");
            pc = it->second;
            continue;
        }
        if (head == "variable") {
            std::string text = substitute(line, env);
            auto toks = tokens_of(text);
            if (toks.size() < 3) throw OracleError("short variable command");
            const std::string& name = toks[1];
            const std::string& style = toks[2];
            if (style == "loop") {
                if (toks.size() != 4) throw OracleError("variable loop arity");
                char* end = nullptr;
                long long count = std::strtoll(toks[3].c_str(), &end, 10);
                if (end != toks[3].c_str() + toks[3].size() || count < 1)
                    throw OracleError("bad loop count '" + toks[3] + "'");
                if (!env.count(name)) {
                    Variable v;
                    v.is_number = true;
                    v.number = 1.0;
                    v.is_loop = true;
                    v.loop_count = count;
                    env[name] = v;
                }
            } else if (style == "equal") {
                if (toks.size() < 4) throw OracleError("variable equal arity");
                // Expression spans from the start of the fourth token to the
                // end of the line; walk past three tokens to find it.
                std::size_t at = 0;
                for (int skip = 0; skip < 3; ++skip) {
                    while (at < text.size() && space(text[at])) ++at;
                    char open = 0;
                    while (at < text.size() && (open != 0 || !space(text[at]))) {
                        if (open == 0 && quote(text[at])) open = text[at];
                        else if (open != 0 && text[at] == open) open = 0;
                        ++at;
                    }
                }
                while (at < text.size() && space(text[at])) ++at;
                std::string expr = unquote(rtrim(text.substr(at)));
                Variable v;
                v.is_number = true;
                v.number = eval(expr, env);
                if (!std::isfinite(v.number))
                    throw OracleError("non-finite variable value");
                env[name] = v;
            } else if (style == "string") {
                if (toks.size() != 4) throw OracleError("variable string arity");
                Variable v;
                v.text = unquote(toks[3]);
                env[name] = v;
            } else if (style == "index") {
                if (toks.size() < 4) throw OracleError("variable index arity");
                if (!env.count(name)) {
                    Variable v;
                    v.text = unquote(toks[3]);
                    env[name] = v;
                }
            } else {
                throw OracleError("variable style '" + style +
                                  "' is outside the subset");
            }
            ++pc;
            continue;
        }

        // Plain command: substitute, collapse whitespace, emit.
        std::string text = substitute(line, env);
        auto toks = tokens_of(text);
        std::string joined;
        for (const std::string& t : toks) {
            if (!joined.empty()) joined += ' ';
            joined += t;
        }
        if (!joined.empty()) {
            out += joined;
            out += '\n';
            if (++emitted > 100000) throw OracleError("emit budget exceeded");
        }
        ++pc;
    }
    return out;
}

}  // namespace oracle
