#pragma once

// Declarative command signatures. Grammars live in a JSON data file so the
// registry can evolve without recompiling; this header defines the schema,
// validation, and lookup. Slot names double as cross-reference roles: slots
// named "id" define symbols, slots named "group"/"region"/"fix_id" reference
// them (see analyze.hpp).

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "lmplint/numeric.hpp"
#include "lmplint/text.hpp"

namespace lmplint {

enum class SlotKind {
    Int,
    Float,
    NumberEither,
    Word,
    QuotedString,
    Identifier,
    EnumOf,
    Star,
    FilePath,
};

inline std::string_view to_string(SlotKind k) {
    switch (k) {
        case SlotKind::Int: return "int";
        case SlotKind::Float: return "float";
        case SlotKind::NumberEither: return "number";
        case SlotKind::Word: return "word";
        case SlotKind::QuotedString: return "quoted";
        case SlotKind::Identifier: return "identifier";
        case SlotKind::EnumOf: return "enum";
        case SlotKind::Star: return "star";
        case SlotKind::FilePath: return "path";
    }
    return "?";
}

inline std::optional<SlotKind> slot_kind_from(std::string_view s) {
    if (s == "int") return SlotKind::Int;
    if (s == "float") return SlotKind::Float;
    if (s == "number") return SlotKind::NumberEither;
    if (s == "word") return SlotKind::Word;
    if (s == "quoted") return SlotKind::QuotedString;
    if (s == "identifier") return SlotKind::Identifier;
    if (s == "enum") return SlotKind::EnumOf;
    if (s == "star") return SlotKind::Star;
    if (s == "path") return SlotKind::FilePath;
    return std::nullopt;
}

struct ArgSlot {
    std::string name;
    SlotKind kind = SlotKind::Word;
    std::vector<std::string> enum_values;  // EnumOf only
    bool variadic = false;                 // last positional slot only
};

struct KeywordGroup {
    std::string word;
    std::vector<ArgSlot> args;
    bool repeatable = false;
};

struct SubSignature {
    std::vector<ArgSlot> positional;
    std::size_t min_positional = 0;
    std::vector<KeywordGroup> keywords;
};

// What to report when the dispatch token matches no registered style:
// UnknownStyle for open families (fix), BadEnum for closed ones (velocity).
enum class StyleDiagnostic { UnknownStyle, BadEnum };

struct StyleDispatch {
    StyleDiagnostic on_unknown = StyleDiagnostic::UnknownStyle;
    std::string slot_name = "style";
    std::map<std::string, SubSignature> map;
};

struct CommandSignature {
    std::string name;
    std::vector<ArgSlot> positional;
    std::size_t min_positional = 0;
    std::vector<KeywordGroup> keywords;
    std::optional<StyleDispatch> styles;
    std::string doc_ref;
};

struct RegistryError : std::runtime_error {
    explicit RegistryError(const std::string& msg) : std::runtime_error(msg) {}
};

namespace detail {

inline void validate_slots(const std::vector<ArgSlot>& slots,
                           const std::string& where) {
    std::set<std::string> names;
    for (std::size_t i = 0; i < slots.size(); ++i) {
        const ArgSlot& s = slots[i];
        if (s.name.empty())
            throw RegistryError(where + ": slot " + std::to_string(i) +
                                " has an empty name");
        if (!names.insert(s.name).second)
            throw RegistryError(where + ": duplicate slot name '" + s.name + "'");
        if (s.kind == SlotKind::EnumOf && s.enum_values.empty())
            throw RegistryError(where + ": enum slot '" + s.name +
                                "' has no values");
        if (s.variadic && i + 1 != slots.size())
            throw RegistryError(where + ": variadic slot '" + s.name +
                                "' must be last");
    }
}

inline void validate_keywords(const std::vector<KeywordGroup>& kws,
                              const std::string& where) {
    std::set<std::string> words;
    for (const KeywordGroup& k : kws) {
        if (k.word.empty()) throw RegistryError(where + ": empty keyword word");
        if (!words.insert(k.word).second)
            throw RegistryError(where + ": duplicate keyword '" + k.word + "'");
        validate_slots(k.args, where + ".keyword '" + k.word + "'");
        for (const ArgSlot& s : k.args)
            if (s.variadic)
                throw RegistryError(where + ".keyword '" + k.word +
                                    "': keyword args cannot be variadic");
    }
}

// A trailing variadic slot accepts unbounded tokens, so min_positional (a
// token-count lower bound) may then exceed the slot count.
inline bool min_positional_fits(std::size_t min_positional,
                                const std::vector<ArgSlot>& slots) {
    if (min_positional <= slots.size()) return true;
    return !slots.empty() && slots.back().variadic;
}

}  // namespace detail

class SignatureRegistry {
public:
    // Throws RegistryError on duplicates unless overwrite is set.
    void register_signature(CommandSignature sig, bool overwrite = false) {
        const std::string where = "command '" + sig.name + "'";
        if (sig.name.empty()) throw RegistryError("command with empty name");
        detail::validate_slots(sig.positional, where);
        detail::validate_keywords(sig.keywords, where);
        if (!detail::min_positional_fits(sig.min_positional, sig.positional))
            throw RegistryError(where + ": min_positional exceeds slot count");
        if (sig.styles) {
            for (const auto& [style, sub] : sig.styles->map) {
                const std::string swhere = where + ".style '" + style + "'";
                detail::validate_slots(sub.positional, swhere);
                detail::validate_keywords(sub.keywords, swhere);
                if (!detail::min_positional_fits(sub.min_positional, sub.positional))
                    throw RegistryError(swhere + ": min_positional exceeds slot count");
            }
        }
        if (!overwrite && commands_.count(sig.name))
            throw RegistryError(where + " registered twice");
        commands_[sig.name] = std::move(sig);
    }

    const CommandSignature* find(std::string_view name) const {
        auto it = commands_.find(std::string(name));
        return it == commands_.end() ? nullptr : &it->second;
    }

    const std::map<std::string, CommandSignature>& commands() const {
        return commands_;
    }

    const std::string& version() const { return version_; }
    void set_version(std::string v) { version_ = std::move(v); }

    static SignatureRegistry from_json(const nlohmann::json& doc);
    static SignatureRegistry from_json_text(std::string_view text) {
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(text);
        } catch (const nlohmann::json::exception& e) {
            throw RegistryError(std::string("signature file is not valid JSON: ") +
                                e.what());
        }
        return from_json(doc);
    }

private:
    std::map<std::string, CommandSignature> commands_;
    std::string version_;
};

namespace detail {

inline ArgSlot slot_from_json(const nlohmann::json& j, const std::string& where) {
    if (!j.is_object()) throw RegistryError(where + ": slot must be an object");
    ArgSlot s;
    if (!j.contains("name") || !j["name"].is_string())
        throw RegistryError(where + ": slot requires a string 'name'");
    s.name = j["name"].get<std::string>();
    if (!j.contains("kind") || !j["kind"].is_string())
        throw RegistryError(where + ": slot '" + s.name +
                            "' requires a string 'kind'");
    auto kind = slot_kind_from(j["kind"].get<std::string>());
    if (!kind)
        throw RegistryError(where + ": slot '" + s.name + "' has unknown kind '" +
                            j["kind"].get<std::string>() + "'");
    s.kind = *kind;
    if (j.contains("values")) {
        for (const auto& v : j["values"]) {
            if (!v.is_string())
                throw RegistryError(where + ": enum values must be strings");
            s.enum_values.push_back(v.get<std::string>());
        }
    }
    s.variadic = j.value("variadic", false);
    return s;
}

inline std::vector<ArgSlot> slots_from_json(const nlohmann::json& j,
                                            const std::string& where) {
    std::vector<ArgSlot> out;
    if (j.is_null()) return out;
    if (!j.is_array()) throw RegistryError(where + ": expected an array of slots");
    for (const auto& e : j) out.push_back(slot_from_json(e, where));
    return out;
}

inline std::vector<KeywordGroup> keywords_from_json(const nlohmann::json& j,
                                                    const std::string& where) {
    std::vector<KeywordGroup> out;
    if (j.is_null()) return out;
    if (!j.is_object())
        throw RegistryError(where + ": 'keywords' must be an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        KeywordGroup g;
        g.word = it.key();
        const auto& body = it.value();
        if (!body.is_object())
            throw RegistryError(where + ": keyword '" + g.word +
                                "' must map to an object");
        g.args = slots_from_json(body.value("args", nlohmann::json::array()),
                                 where + ".keyword '" + g.word + "'");
        g.repeatable = body.value("repeatable", false);
        out.push_back(std::move(g));
    }
    return out;
}

inline SubSignature sub_from_json(const nlohmann::json& j, const std::string& where) {
    SubSignature sub;
    sub.positional = slots_from_json(j.value("positional", nlohmann::json::array()), where);
    sub.min_positional = j.value("min_positional", sub.positional.size());
    sub.keywords = keywords_from_json(j.value("keywords", nlohmann::json()), where);
    return sub;
}

}  // namespace detail

inline SignatureRegistry SignatureRegistry::from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw RegistryError("signature document must be an object");
    SignatureRegistry reg;
    reg.set_version(doc.value("version", std::string("unversioned")));
    if (!doc.contains("commands") || !doc["commands"].is_array())
        throw RegistryError("signature document requires a 'commands' array");
    for (const auto& c : doc["commands"]) {
        if (!c.is_object() || !c.contains("name") || !c["name"].is_string())
            throw RegistryError("every command requires a string 'name'");
        CommandSignature sig;
        sig.name = c["name"].get<std::string>();
        const std::string where = "command '" + sig.name + "'";
        sig.positional = detail::slots_from_json(
            c.value("positional", nlohmann::json::array()), where);
        sig.min_positional = c.value("min_positional", sig.positional.size());
        sig.keywords = detail::keywords_from_json(
            c.value("keywords", nlohmann::json()), where);
        sig.doc_ref = c.value("doc", std::string());
        if (c.contains("styles")) {
            const auto& st = c["styles"];
            if (!st.is_object())
                throw RegistryError(where + ": 'styles' must be an object");
            StyleDispatch d;
            std::string diag = st.value("on_unknown", std::string("unknown_style"));
            if (diag == "unknown_style") d.on_unknown = StyleDiagnostic::UnknownStyle;
            else if (diag == "bad_enum") d.on_unknown = StyleDiagnostic::BadEnum;
            else
                throw RegistryError(where + ": styles.on_unknown must be "
                                            "'unknown_style' or 'bad_enum'");
            d.slot_name = st.value("slot_name", std::string("style"));
            if (!st.contains("map") || !st["map"].is_object())
                throw RegistryError(where + ": styles requires a 'map' object");
            for (auto it = st["map"].begin(); it != st["map"].end(); ++it) {
                d.map[it.key()] = detail::sub_from_json(
                    it.value(), where + ".style '" + it.key() + "'");
            }
            sig.styles = std::move(d);
        }
        reg.register_signature(std::move(sig));
    }
    return reg;
}

// Token/kind agreement used by both the parser and generators.
inline bool token_matches_kind(std::string_view token, const ArgSlot& slot) {
    switch (slot.kind) {
        case SlotKind::Int:
            return is_int_token(token);
        case SlotKind::Float:
        case SlotKind::NumberEither:
            return is_number_token(token);
        case SlotKind::Word:
        case SlotKind::FilePath:
            return !token.empty();
        case SlotKind::QuotedString:
            return is_quoted_token(token);
        case SlotKind::Identifier: {
            if (token.empty()) return false;
            for (char c : token) {
                bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                          is_digit(c) || c == '_' || c == '-' || c == '.';
                if (!ok) return false;
            }
            return true;
        }
        case SlotKind::EnumOf: {
            for (const std::string& v : slot.enum_values)
                if (token == v) return true;
            return false;
        }
        case SlotKind::Star: {
            if (token == "*") return true;
            if (is_int_token(token)) return true;
            std::size_t star = token.find('*');
            if (star == std::string_view::npos) return false;
            std::string_view lo = token.substr(0, star);
            std::string_view hi = token.substr(star + 1);
            if (hi.find('*') != std::string_view::npos) return false;
            bool lo_ok = lo.empty() || is_int_token(lo);
            bool hi_ok = hi.empty() || is_int_token(hi);
            return lo_ok && hi_ok && !(lo.empty() && hi.empty());
        }
    }
    return false;
}

}  // namespace lmplint
