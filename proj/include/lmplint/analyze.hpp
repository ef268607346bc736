#pragma once

// Cross-reference checker over a typed AST. Identifiers live in five
// namespaces (region, group, fix, compute, dump); a command's slot named
// "id" defines into the namespace matching the command, while slots named
// "group", "region", or "fix_id" are uses. The group "all" is predefined.

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "lmplint/ast.hpp"

namespace lmplint {

enum class SymbolNamespace { Region, Group, Fix, Compute, Dump };

inline const char* to_string(SymbolNamespace ns) {
    switch (ns) {
        case SymbolNamespace::Region: return "region";
        case SymbolNamespace::Group: return "group";
        case SymbolNamespace::Fix: return "fix";
        case SymbolNamespace::Compute: return "compute";
        case SymbolNamespace::Dump: return "dump";
    }
    return "?";
}

inline std::optional<SymbolNamespace> definition_namespace(std::string_view command) {
    if (command == "region") return SymbolNamespace::Region;
    if (command == "group") return SymbolNamespace::Group;
    if (command == "fix") return SymbolNamespace::Fix;
    if (command == "compute") return SymbolNamespace::Compute;
    if (command == "dump") return SymbolNamespace::Dump;
    return std::nullopt;
}

inline std::optional<SymbolNamespace> reference_namespace(std::string_view slot_name) {
    if (slot_name == "group") return SymbolNamespace::Group;
    if (slot_name == "region") return SymbolNamespace::Region;
    if (slot_name == "fix_id") return SymbolNamespace::Fix;
    return std::nullopt;
}

struct Definition {
    SymbolNamespace ns;
    std::string id;
    std::size_t line;           // 0 for predefined symbols
    std::size_t command_index;  // predefined_index for built-ins
};

class SymbolTable {
public:
    static constexpr std::size_t predefined_index = static_cast<std::size_t>(-1);

    void add(SymbolNamespace ns, std::string id, std::size_t line,
             std::size_t command_index) {
        auto& slot = first_[ns];
        slot.emplace(id, command_index);  // keeps the first definition
        all_[ns][id].push_back(ordered_.size());
        ordered_.push_back(Definition{ns, std::move(id), line, command_index});
    }

    void add_predefined(SymbolNamespace ns, std::string id) {
        add(ns, std::move(id), 0, predefined_index);
    }

    bool contains(SymbolNamespace ns, const std::string& id) const {
        auto nit = first_.find(ns);
        return nit != first_.end() && nit->second.count(id) != 0;
    }

    // Command index of the first definition, or nullopt.
    std::optional<std::size_t> defining_command(SymbolNamespace ns,
                                                const std::string& id) const {
        auto nit = first_.find(ns);
        if (nit == first_.end()) return std::nullopt;
        auto it = nit->second.find(id);
        if (it == nit->second.end()) return std::nullopt;
        return it->second;
    }

    // All definitions of an id, in command order (includes duplicates).
    std::vector<Definition> definitions_of(SymbolNamespace ns,
                                           const std::string& id) const {
        std::vector<Definition> out;
        auto nit = all_.find(ns);
        if (nit == all_.end()) return out;
        auto it = nit->second.find(id);
        if (it == nit->second.end()) return out;
        for (std::size_t idx : it->second) out.push_back(ordered_[idx]);
        return out;
    }

    const std::vector<Definition>& definitions() const { return ordered_; }

private:
    std::map<SymbolNamespace, std::map<std::string, std::size_t>> first_;
    std::map<SymbolNamespace, std::map<std::string, std::vector<std::size_t>>> all_;
    std::vector<Definition> ordered_;
};

inline SymbolTable build_symbol_table(const AstScript& ast) {
    SymbolTable table;
    table.add_predefined(SymbolNamespace::Group, "all");
    for (std::size_t i = 0; i < ast.commands.size(); ++i) {
        const AstCommand& cmd = ast.commands[i];
        auto ns = definition_namespace(cmd.name);
        if (!ns) continue;
        if (cmd.name == "group" && cmd.style() && *cmd.style() == "delete") continue;
        const TypedArg* id = cmd.find_arg("id");
        if (id) table.add(*ns, id->text, cmd.line, i);
    }
    return table;
}

inline std::vector<Diagnostic> check_references(const AstScript& ast,
                                                const SymbolTable& table) {
    std::vector<Diagnostic> diags;

    std::map<SymbolNamespace, std::set<std::string>> active;
    for (const Definition& d : table.definitions())
        if (d.command_index == SymbolTable::predefined_index)
            active[d.ns].insert(d.id);

    auto span_of = [](const AstCommand& cmd, const TypedArg& arg) {
        return Span{cmd.line, arg.col_begin, arg.col_end, cmd.provenance};
    };

    auto check_use = [&](const AstCommand& cmd, const TypedArg& arg,
                         SymbolNamespace ns) {
        if (arg.text == "NULL") return;  // placeholder accepted where LAMMPS allows it
        if (active[ns].count(arg.text)) return;
        std::size_t later = 0;
        for (const Definition& d : table.definitions_of(ns, arg.text))
            if (d.line > cmd.line && (later == 0 || d.line < later)) later = d.line;
        if (later != 0) {
            diags.push_back(Diagnostic{
                Severity::Warning, diag::reference_before_definition,
                span_of(cmd, arg),
                std::string(to_string(ns)) + " '" + arg.text +
                    "' is used before its definition at line " +
                    std::to_string(later)});
        } else {
            diags.push_back(Diagnostic{
                Severity::Error, diag::undefined_reference, span_of(cmd, arg),
                "reference to undefined " + std::string(to_string(ns)) + " '" +
                    arg.text + "'"});
        }
    };

    for (const AstCommand& cmd : ast.commands) {
        const bool is_unfix = (cmd.name == "unfix");
        const bool group_delete =
            (cmd.name == "group" && cmd.style() && *cmd.style() == "delete");

        for (const TypedArg& arg : cmd.args) {
            auto rns = reference_namespace(arg.slot_name);
            if (!rns) continue;
            if (is_unfix && *rns == SymbolNamespace::Fix) {
                if (active[SymbolNamespace::Fix].count(arg.text)) {
                    active[SymbolNamespace::Fix].erase(arg.text);
                } else {
                    diags.push_back(Diagnostic{
                        Severity::Error, diag::dangling_unfix, span_of(cmd, arg),
                        "unfix '" + arg.text + "' does not match any active fix"});
                }
                continue;
            }
            check_use(cmd, arg, *rns);
        }
        for (const auto& [word, args] : cmd.keywords) {
            (void)word;
            for (const TypedArg& arg : args) {
                auto rns = reference_namespace(arg.slot_name);
                if (rns) check_use(cmd, arg, *rns);
            }
        }

        if (group_delete) {
            const TypedArg* id = cmd.find_arg("id");
            if (id) {
                if (active[SymbolNamespace::Group].count(id->text)) {
                    active[SymbolNamespace::Group].erase(id->text);
                } else {
                    diags.push_back(Diagnostic{
                        Severity::Error, diag::undefined_reference,
                        span_of(cmd, *id),
                        "reference to undefined group '" + id->text + "'"});
                }
            }
            continue;
        }

        auto dns = definition_namespace(cmd.name);
        if (dns) {
            const TypedArg* id = cmd.find_arg("id");
            if (id) {
                if (active[*dns].count(id->text)) {
                    std::string prior = "predefined";
                    std::size_t best = 0;
                    for (const Definition& d : table.definitions_of(*dns, id->text))
                        if (d.line != 0 && d.line < cmd.line && d.line > best)
                            best = d.line;
                    if (best != 0)
                        prior = "first defined at line " + std::to_string(best);
                    diags.push_back(Diagnostic{
                        Severity::Warning, diag::duplicate_definition,
                        span_of(cmd, *id),
                        "redefinition of " + std::string(to_string(*dns)) + " '" +
                            id->text + "' (" + prior + ")"});
                }
                active[*dns].insert(id->text);
            }
        }
    }

    std::stable_sort(diags.begin(), diags.end(),
                     [](const Diagnostic& a, const Diagnostic& b) {
                         if (a.span.line != b.span.line) return a.span.line < b.span.line;
                         int c = a.code.compare(b.code);
                         if (c != 0) return c < 0;
                         return a.span.col_begin < b.span.col_begin;
                     });
    return diags;
}

struct AnalysisResult {
    SymbolTable symbols;
    std::vector<Diagnostic> diagnostics;

    bool has_errors() const {
        for (const Diagnostic& d : diagnostics)
            if (d.severity == Severity::Error) return true;
        return false;
    }
};

inline AnalysisResult analyze(const AstScript& ast) {
    AnalysisResult res;
    res.symbols = build_symbol_table(ast);
    res.diagnostics = check_references(ast, res.symbols);
    return res;
}

}  // namespace lmplint
