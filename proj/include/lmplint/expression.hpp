#pragma once

// Arithmetic over the supported expression subset: + - * / ^, parentheses,
// unary minus, sqrt/exp/ln/abs/floor/ceil, v_NAME references, and literal
// numbers. Thermo keywords that only exist at runtime are rejected so that
// scripts depending on them fail normalization up front.

#include <cmath>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "lmplint/numeric.hpp"
#include "lmplint/text.hpp"

namespace lmplint {

enum class ExprErrorKind { Unresolvable, Malformed };

struct ExprError {
    ExprErrorKind kind;
    std::string message;
};

inline const std::set<std::string>& runtime_thermo_keywords() {
    static const std::set<std::string> kw = {
        "step", "elapsed", "dt",   "time",    "temp", "press",
        "pe",   "ke",      "etotal", "enthalpy", "vol",  "density",
        "lx",   "ly",      "lz",   "atoms"};
    return kw;
}

class VariableEnvironment {
public:
    enum class Style { Equal, String, Index, Loop };

    struct Binding {
        Style style = Style::Equal;
        bool is_number = false;
        double number = 0.0;
        std::string text;  // verbatim value for string/index styles

        std::string render() const {
            return is_number ? render_number(number) : text;
        }
    };

    struct AuditEntry {
        std::string name;
        std::size_t line = 0;  // raw line of the redefinition
        std::string note;
    };

    void bind_number(const std::string& name, double value, Style style,
                     std::size_t line) {
        record_redefinition(name, line);
        Binding b;
        b.style = style;
        b.is_number = true;
        b.number = value;
        bindings_[name] = b;
    }

    void bind_text(const std::string& name, std::string value, Style style,
                   std::size_t line) {
        record_redefinition(name, line);
        Binding b;
        b.style = style;
        b.is_number = false;
        b.text = std::move(value);
        bindings_[name] = b;
    }

    const Binding* find(std::string_view name) const {
        auto it = bindings_.find(std::string(name));
        return it == bindings_.end() ? nullptr : &it->second;
    }

    const std::map<std::string, Binding>& bindings() const { return bindings_; }
    const std::vector<AuditEntry>& audit() const { return audit_; }

private:
    void record_redefinition(const std::string& name, std::size_t line) {
        if (bindings_.count(name)) {
            audit_.push_back(AuditEntry{name, line, "redefinition replaces prior binding"});
        }
    }

    std::map<std::string, Binding> bindings_;
    std::vector<AuditEntry> audit_;
};

namespace detail {

inline bool ident_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}
inline bool ident_char(char c) { return ident_start(c) || is_digit(c); }

// Recursive-descent evaluator. Throws ExprError.
class ExprParser {
public:
    ExprParser(std::string_view src, const VariableEnvironment& env)
        : src_(src), env_(env) {}

    double run() {
        double v = expr();
        skip_ws();
        if (pos_ != src_.size())
            fail_malformed("unexpected trailing text '" +
                           std::string(src_.substr(pos_)) + "'");
        return v;
    }

private:
    [[noreturn]] void fail_malformed(const std::string& msg) {
        throw ExprError{ExprErrorKind::Malformed, msg};
    }
    [[noreturn]] void fail_unresolvable(const std::string& msg) {
        throw ExprError{ExprErrorKind::Unresolvable, msg};
    }

    void skip_ws() {
        while (pos_ < src_.size() && is_ws(src_[pos_])) ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos_ < src_.size() ? src_[pos_] : '\0';
    }

    double expr() {
        double v = term();
        for (;;) {
            if (eat('+')) v += term();
            else if (eat('-')) v -= term();
            else return v;
        }
    }

    double term() {
        double v = factor();
        for (;;) {
            if (eat('*')) v *= factor();
            else if (eat('/')) v /= factor();
            else return v;
        }
    }

    // '^' binds tighter than unary minus and associates right.
    double factor() {
        double v = unary();
        if (eat('^')) v = std::pow(v, factor());
        return v;
    }

    double unary() {
        if (eat('-')) return -unary();
        if (eat('+')) return unary();
        return primary();
    }

    double primary() {
        skip_ws();
        if (pos_ >= src_.size()) fail_malformed("unexpected end of expression");
        char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            double v = expr();
            if (!eat(')')) fail_malformed("missing ')'");
            return v;
        }
        if (is_digit(c) || c == '.') return number();
        if (detail::ident_start(c)) return identifier();
        fail_malformed(std::string("unexpected character '") + c + "'");
    }

    double number() {
        std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (is_digit(src_[pos_]) || src_[pos_] == '.'))
            ++pos_;
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t save = pos_;
            ++pos_;
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-'))
                ++pos_;
            if (pos_ < src_.size() && is_digit(src_[pos_])) {
                while (pos_ < src_.size() && is_digit(src_[pos_])) ++pos_;
            } else {
                pos_ = save;  // the e/E belongs to something else; reject below
            }
        }
        auto tok = src_.substr(start, pos_ - start);
        auto v = parse_number(tok);
        if (!v) fail_malformed("bad numeric literal '" + std::string(tok) + "'");
        return *v;
    }

    double identifier() {
        std::size_t start = pos_;
        while (pos_ < src_.size() && detail::ident_char(src_[pos_])) ++pos_;
        std::string name(src_.substr(start, pos_ - start));
        if (peek() == '(') {
            return call(name);
        }
        if (name.size() > 2 && name.rfind("v_", 0) == 0) {
            std::string var = name.substr(2);
            const auto* b = env_.find(var);
            if (!b)
                fail_unresolvable("undefined variable 'v_" + var + "'");
            if (!b->is_number)
                fail_malformed("variable '" + var +
                               "' holds a string and cannot be used in arithmetic");
            return b->number;
        }
        if (runtime_thermo_keywords().count(name))
            fail_unresolvable("thermo keyword '" + name +
                              "' is only defined at runtime");
        fail_unresolvable("unknown identifier '" + name + "'");
    }

    double call(const std::string& fn) {
        if (!eat('(')) fail_malformed("expected '(' after '" + fn + "'");
        double a = expr();
        if (!eat(')')) fail_malformed("missing ')' in call to '" + fn + "'");
        if (fn == "sqrt") return std::sqrt(a);
        if (fn == "exp") return std::exp(a);
        if (fn == "ln") return std::log(a);
        if (fn == "abs") return std::fabs(a);
        if (fn == "floor") return std::floor(a);
        if (fn == "ceil") return std::ceil(a);
        fail_malformed("unknown function '" + fn + "'");
    }

    std::string_view src_;
    const VariableEnvironment& env_;
    std::size_t pos_ = 0;
};

}  // namespace detail

// Evaluates the full string as one expression. Throws ExprError. The result
// is checked for finiteness by callers that bind it.
inline double eval_expression(std::string_view src,
                              const VariableEnvironment& env) {
    return detail::ExprParser(src, env).run();
}

}  // namespace lmplint
