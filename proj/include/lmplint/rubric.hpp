#pragma once

// Data-driven scoring of physical parameters against per-prompt checklists.
// A rubric is JSON; extraction walks the AST with fixed pattern rules and
// never invents defaults (absence is reported as NotFound); evaluation
// compares with inclusive tolerance bands. Unit conversion is supported for
// pressure only (1 atm = 1.01325 bar).

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "lmplint/ast.hpp"
#include "lmplint/numeric.hpp"
#include "lmplint/result.hpp"

namespace lmplint {

enum class Category { SystemDefinition, Thermodynamics, Dynamics, Execution };

inline const char* to_string(Category c) {
    switch (c) {
        case Category::SystemDefinition: return "SystemDefinition";
        case Category::Thermodynamics: return "Thermodynamics";
        case Category::Dynamics: return "Dynamics";
        case Category::Execution: return "Execution";
    }
    return "?";
}

inline std::optional<Category> category_from(std::string_view s) {
    if (s == "SystemDefinition") return Category::SystemDefinition;
    if (s == "Thermodynamics") return Category::Thermodynamics;
    if (s == "Dynamics") return Category::Dynamics;
    if (s == "Execution") return Category::Execution;
    return std::nullopt;
}

enum class ToleranceKind { Rel, Abs };

struct Tolerance {
    ToleranceKind kind = ToleranceKind::Rel;
    double value = 0.0;
};

struct ExpectedValue {
    enum class Kind { Number, Interval, Word, Words, NumberTuple };
    Kind kind = Kind::Number;
    double number = 0.0;
    double min = 0.0, max = 0.0;       // Interval
    std::string word;                  // Word
    std::vector<std::vector<std::string>> words;  // Words: per-position alternatives
    std::vector<double> tuple;         // NumberTuple
};

struct Criterion {
    std::string id;
    Category category = Category::SystemDefinition;
    std::string extractor;
    ExpectedValue expected;
    std::optional<Tolerance> tolerance;
    std::string units;
};

struct Rubric {
    std::string id;
    std::vector<Criterion> criteria;
};

struct SchemaError {
    std::string path;
    std::string message;

    std::string format() const { return path + ": " + message; }
};

inline const std::vector<std::string>& known_extractor_keys() {
    static const std::vector<std::string> keys = {
        "lattice_style",       "lattice_constant", "replication",
        "boundary",            "ensemble_sequence", "temp_start",
        "temp_stop",           "pressure",          "tdamp",
        "pdamp",               "timestep",          "run_steps",
        "total_sim_time",      "heating_rate",      "equilibration_time",
        "velocity_create_temp", "velocity_set_vector", "velocity_set_sum",
        "pair_style_word",     "gap_distance",      "projectile_cells",
        "target_cells",        "region_extents",
    };
    return keys;
}

inline bool is_known_extractor(std::string_view key) {
    for (const std::string& k : known_extractor_keys())
        if (k == key) return true;
    return false;
}

namespace detail {

inline bool json_is_number(const nlohmann::json& j) {
    return j.is_number_integer() || j.is_number_unsigned() || j.is_number_float();
}

inline result<ExpectedValue, SchemaError> parse_expected(const nlohmann::json& j,
                                                         const std::string& path) {
    ExpectedValue e;
    if (json_is_number(j)) {
        e.kind = ExpectedValue::Kind::Number;
        e.number = j.get<double>();
        return e;
    }
    if (j.is_string()) {
        e.kind = ExpectedValue::Kind::Word;
        e.word = j.get<std::string>();
        return e;
    }
    if (j.is_object()) {
        if (!j.contains("min") || !j.contains("max") || !json_is_number(j["min"]) ||
            !json_is_number(j["max"]))
            return SchemaError{path, "interval requires numeric 'min' and 'max'"};
        e.kind = ExpectedValue::Kind::Interval;
        e.min = j["min"].get<double>();
        e.max = j["max"].get<double>();
        if (e.min > e.max) return SchemaError{path, "interval min exceeds max"};
        return e;
    }
    if (j.is_array()) {
        if (j.empty()) return SchemaError{path, "expected array must be non-empty"};
        bool all_numbers = true;
        for (const auto& el : j) all_numbers = all_numbers && json_is_number(el);
        if (all_numbers) {
            e.kind = ExpectedValue::Kind::NumberTuple;
            for (const auto& el : j) e.tuple.push_back(el.get<double>());
            return e;
        }
        e.kind = ExpectedValue::Kind::Words;
        for (std::size_t i = 0; i < j.size(); ++i) {
            const auto& el = j[i];
            std::vector<std::string> alts;
            if (el.is_string()) {
                alts.push_back(el.get<std::string>());
            } else if (el.is_array() && !el.empty()) {
                for (const auto& alt : el) {
                    if (!alt.is_string())
                        return SchemaError{path + "[" + std::to_string(i) + "]",
                                           "alternatives must be strings"};
                    alts.push_back(alt.get<std::string>());
                }
            } else {
                return SchemaError{path + "[" + std::to_string(i) + "]",
                                   "array elements must be strings, string arrays, "
                                   "or all numbers"};
            }
            e.words.push_back(std::move(alts));
        }
        return e;
    }
    return SchemaError{path, "expected must be a number, string, interval object, "
                             "or array"};
}

}  // namespace detail

inline result<Rubric, SchemaError> load_rubric(const nlohmann::json& doc) {
    if (!doc.is_object()) return SchemaError{"$", "rubric must be a JSON object"};
    if (!doc.contains("id") || !doc["id"].is_string())
        return SchemaError{"id", "rubric requires a string 'id'"};
    if (!doc.contains("criteria") || !doc["criteria"].is_array())
        return SchemaError{"criteria", "rubric requires a 'criteria' array"};

    Rubric rubric;
    rubric.id = doc["id"].get<std::string>();
    std::set<std::string> seen_ids;

    const auto& arr = doc["criteria"];
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string path = "criteria[" + std::to_string(i) + "]";
        const auto& cj = arr[i];
        if (!cj.is_object()) return SchemaError{path, "criterion must be an object"};

        Criterion c;
        if (!cj.contains("id") || !cj["id"].is_string())
            return SchemaError{path + ".id", "criterion requires a string 'id'"};
        c.id = cj["id"].get<std::string>();
        if (!seen_ids.insert(c.id).second)
            return SchemaError{path + ".id", "duplicate criterion id '" + c.id + "'"};

        if (!cj.contains("category") || !cj["category"].is_string())
            return SchemaError{path + ".category", "criterion requires a 'category'"};
        auto cat = category_from(cj["category"].get<std::string>());
        if (!cat)
            return SchemaError{path + ".category",
                               "unknown category '" +
                                   cj["category"].get<std::string>() + "'"};
        c.category = *cat;

        if (!cj.contains("extractor") || !cj["extractor"].is_string())
            return SchemaError{path + ".extractor", "criterion requires an 'extractor'"};
        c.extractor = cj["extractor"].get<std::string>();
        if (!is_known_extractor(c.extractor))
            return SchemaError{path + ".extractor",
                               "unknown extractor key '" + c.extractor + "'"};

        if (!cj.contains("expected"))
            return SchemaError{path + ".expected", "criterion requires 'expected'"};
        auto exp = detail::parse_expected(cj["expected"], path + ".expected");
        if (!exp.ok()) return exp.error();
        c.expected = exp.value();

        const bool numeric = c.expected.kind == ExpectedValue::Kind::Number ||
                             c.expected.kind == ExpectedValue::Kind::NumberTuple;
        if (cj.contains("tolerance")) {
            const auto& tj = cj["tolerance"];
            if (!tj.is_object() || !tj.contains("kind") || !tj.contains("value") ||
                !tj["kind"].is_string() || !detail::json_is_number(tj["value"]))
                return SchemaError{path + ".tolerance",
                                   "tolerance requires 'kind' (rel|abs) and numeric "
                                   "'value'"};
            const std::string kind = tj["kind"].get<std::string>();
            Tolerance tol;
            if (kind == "rel") tol.kind = ToleranceKind::Rel;
            else if (kind == "abs") tol.kind = ToleranceKind::Abs;
            else return SchemaError{path + ".tolerance.kind",
                                    "tolerance kind must be 'rel' or 'abs'"};
            tol.value = tj["value"].get<double>();
            if (!(tol.value >= 0.0))
                return SchemaError{path + ".tolerance.value",
                                   "tolerance value must be non-negative"};
            if (!numeric)
                return SchemaError{path + ".tolerance",
                                   "tolerance applies only to numeric expected values"};
            c.tolerance = tol;
        } else if (numeric) {
            return SchemaError{path + ".tolerance",
                               "numeric criterion requires a tolerance"};
        }

        if (cj.contains("units")) {
            if (!cj["units"].is_string())
                return SchemaError{path + ".units", "units must be a string"};
            c.units = cj["units"].get<std::string>();
        }
        rubric.criteria.push_back(std::move(c));
    }
    return rubric;
}

inline result<Rubric, SchemaError> load_rubric_text(std::string_view text) {
    nlohmann::json doc = nlohmann::json::parse(text, nullptr, false);
    if (doc.is_discarded()) return SchemaError{"$", "rubric is not valid JSON"};
    return load_rubric(doc);
}

inline result<Rubric, SchemaError> load_rubric_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return SchemaError{"$", "cannot open rubric file '" + path + "'"};
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_rubric_text(buf.str());
}

// ---------------------------------------------------------------------------
// Parameter extraction

struct ExtractedValue {
    enum class Kind { NotFound, Number, Tuple, Word, Words };
    Kind kind = Kind::NotFound;
    double number = 0.0;
    std::vector<double> tuple;
    std::string word;
    std::vector<std::string> words;
    std::string unit;  // set for pressure ("bar", "atm", ...)
    std::string note;  // absence reason or derivation note
    std::vector<std::size_t> source_lines;

    bool found() const { return kind != Kind::NotFound; }
};

inline std::string render(const ExtractedValue& v) {
    std::ostringstream out;
    switch (v.kind) {
        case ExtractedValue::Kind::NotFound:
            out << "not found";
            if (!v.note.empty()) out << " (" << v.note << ")";
            break;
        case ExtractedValue::Kind::Number:
            out << render_number(v.number);
            if (!v.unit.empty()) out << ' ' << v.unit;
            break;
        case ExtractedValue::Kind::Tuple: {
            out << '(';
            for (std::size_t i = 0; i < v.tuple.size(); ++i) {
                if (i) out << ", ";
                out << render_number(v.tuple[i]);
            }
            out << ')';
            break;
        }
        case ExtractedValue::Kind::Word:
            out << v.word;
            break;
        case ExtractedValue::Kind::Words: {
            out << '[';
            for (std::size_t i = 0; i < v.words.size(); ++i) {
                if (i) out << ", ";
                out << v.words[i];
            }
            out << ']';
            break;
        }
    }
    return out.str();
}

struct ParameterSet {
    std::map<std::string, ExtractedValue> values;

    const ExtractedValue& at(const std::string& key) const {
        static const ExtractedValue absent{};
        auto it = values.find(key);
        return it == values.end() ? absent : it->second;
    }
};

namespace detail {

inline const AstCommand* first_command(const AstScript& ast, std::string_view name) {
    for (const AstCommand& cmd : ast.commands)
        if (cmd.name == name) return &cmd;
    return nullptr;
}

inline std::vector<const AstCommand*> all_commands(const AstScript& ast,
                                                   std::string_view name) {
    std::vector<const AstCommand*> out;
    for (const AstCommand& cmd : ast.commands)
        if (cmd.name == name) out.push_back(&cmd);
    return out;
}

// Searches positional and keyword arguments for a slot by name.
inline const TypedArg* find_slot(const AstCommand& cmd, std::string_view slot) {
    for (const TypedArg& a : cmd.args)
        if (a.slot_name == slot) return &a;
    for (const auto& [w, args] : cmd.keywords) {
        (void)w;
        for (const TypedArg& a : args)
            if (a.slot_name == slot) return &a;
    }
    return nullptr;
}

inline ExtractedValue not_found(std::string note) {
    ExtractedValue v;
    v.note = std::move(note);
    return v;
}

inline ExtractedValue number_value(double x, std::vector<std::size_t> lines,
                                   std::string unit = "", std::string note = "") {
    ExtractedValue v;
    v.kind = ExtractedValue::Kind::Number;
    v.number = x;
    v.unit = std::move(unit);
    v.note = std::move(note);
    v.source_lines = std::move(lines);
    return v;
}

inline ExtractedValue tuple_value(std::vector<double> xs,
                                  std::vector<std::size_t> lines,
                                  std::string note = "") {
    ExtractedValue v;
    v.kind = ExtractedValue::Kind::Tuple;
    v.tuple = std::move(xs);
    v.note = std::move(note);
    v.source_lines = std::move(lines);
    return v;
}

inline ExtractedValue word_value(std::string w, std::vector<std::size_t> lines,
                                 std::string note = "") {
    ExtractedValue v;
    v.kind = ExtractedValue::Kind::Word;
    v.word = std::move(w);
    v.note = std::move(note);
    v.source_lines = std::move(lines);
    return v;
}

inline ExtractedValue words_value(std::vector<std::string> ws,
                                  std::vector<std::size_t> lines,
                                  std::string note = "") {
    ExtractedValue v;
    v.kind = ExtractedValue::Kind::Words;
    v.words = std::move(ws);
    v.note = std::move(note);
    v.source_lines = std::move(lines);
    return v;
}

inline std::string lowercase(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

// Unit system of the script, from the first `units` command ("lj" when absent
// per LAMMPS defaults; absence itself is a LAMMPS warning, not our concern).
inline std::string unit_system(const AstScript& ast) {
    const AstCommand* u = first_command(ast, "units");
    if (!u || u->args.empty()) return "lj";
    return u->args[0].text;
}

inline std::string pressure_unit(const AstScript& ast) {
    const std::string sys = unit_system(ast);
    if (sys == "metal") return "bar";
    if (sys == "real") return "atm";
    if (sys == "si") return "Pa";
    return sys;  // lj and friends: dimensionless, compare raw
}

struct ThermostatInfo {
    const AstCommand* fix = nullptr;
    double tstart = 0.0, tstop = 0.0;
    std::optional<double> tdamp;
};

// Prefers the first ramping thermostat (tstart != tstop); otherwise the first
// thermostat of any kind. nvt/npt carry temps in the `temp` keyword; langevin
// and berendsen-style fixes carry them positionally under the same slot names.
inline std::optional<ThermostatInfo> find_thermostat(const AstScript& ast) {
    std::optional<ThermostatInfo> first;
    for (const AstCommand& cmd : ast.commands) {
        if (cmd.name != "fix") continue;
        const TypedArg* a = find_slot(cmd, "tstart");
        const TypedArg* b = find_slot(cmd, "tstop");
        if (!a || !b || !a->number || !b->number) continue;
        ThermostatInfo info;
        info.fix = &cmd;
        info.tstart = *a->number;
        info.tstop = *b->number;
        const TypedArg* d = find_slot(cmd, "tdamp");
        if (d && d->number) info.tdamp = *d->number;
        if (info.tstart != info.tstop) return info;
        if (!first) first = info;
    }
    return first;
}

struct BarostatInfo {
    const AstCommand* fix = nullptr;
    double pstart = 0.0, pstop = 0.0;
    std::optional<double> pdamp;
};

inline std::optional<BarostatInfo> find_barostat(const AstScript& ast) {
    for (const AstCommand& cmd : ast.commands) {
        if (cmd.name != "fix") continue;
        const TypedArg* a = find_slot(cmd, "pstart");
        const TypedArg* b = find_slot(cmd, "pstop");
        if (!a || !b || !a->number || !b->number) continue;
        BarostatInfo info;
        info.fix = &cmd;
        info.pstart = *a->number;
        info.pstop = *b->number;
        const TypedArg* d = find_slot(cmd, "pdamp");
        if (d && d->number) info.pdamp = *d->number;
        return info;
    }
    return std::nullopt;
}

struct BlockRegion {
    const AstCommand* cmd = nullptr;
    double lo[3] = {0, 0, 0};
    double hi[3] = {0, 0, 0};
    bool units_box = false;
};

inline std::optional<BlockRegion> block_region(const AstCommand& cmd) {
    if (cmd.name != "region" || !cmd.style() || *cmd.style() != "block")
        return std::nullopt;
    static const char* slots[6] = {"xlo", "xhi", "ylo", "yhi", "zlo", "zhi"};
    BlockRegion r;
    r.cmd = &cmd;
    for (int i = 0; i < 6; ++i) {
        const TypedArg* a = cmd.find_arg(slots[i]);
        if (!a || !a->number) return std::nullopt;
        if (i % 2 == 0) r.lo[i / 2] = *a->number;
        else r.hi[i / 2] = *a->number;
    }
    const std::vector<TypedArg>* units = cmd.find_keyword("units");
    r.units_box = units && !units->empty() && (*units)[0].text == "box";
    return r;
}

inline std::optional<BlockRegion> block_region_by_id(const AstScript& ast,
                                                     std::string_view id) {
    for (const AstCommand& cmd : ast.commands) {
        if (cmd.name != "region") continue;
        const TypedArg* rid = cmd.find_arg("id");
        if (!rid || rid->text != id) continue;
        return block_region(cmd);
    }
    return std::nullopt;
}

inline std::optional<BlockRegion> block_region_by_substring(const AstScript& ast,
                                                            std::string_view sub) {
    for (const AstCommand& cmd : ast.commands) {
        if (cmd.name != "region") continue;
        const TypedArg* rid = cmd.find_arg("id");
        if (!rid || lowercase(rid->text).find(sub) == std::string::npos) continue;
        auto r = block_region(cmd);
        if (r) return r;
    }
    return std::nullopt;
}

inline std::optional<double> lattice_constant_of(const AstScript& ast) {
    const AstCommand* lat = first_command(ast, "lattice");
    if (!lat) return std::nullopt;
    const TypedArg* scale = lat->find_arg("scale");
    if (!scale || !scale->number) return std::nullopt;
    return *scale->number;
}

// Per-axis extent in multiples of the lattice constant.
inline ExtractedValue cells_of(const AstScript& ast, const BlockRegion& r) {
    std::vector<double> cells(3);
    std::vector<std::size_t> lines{r.cmd->line};
    if (r.units_box) {
        auto a = lattice_constant_of(ast);
        if (!a || *a == 0.0)
            return not_found("region uses box units but no usable lattice constant");
        for (int i = 0; i < 3; ++i) cells[i] = (r.hi[i] - r.lo[i]) / *a;
        lines.push_back(first_command(ast, "lattice")->line);
    } else {
        for (int i = 0; i < 3; ++i) cells[i] = r.hi[i] - r.lo[i];
    }
    return tuple_value(std::move(cells), std::move(lines));
}

// z coordinate in angstroms (lattice-unit regions are scaled by the lattice
// constant; box-unit regions are read verbatim).
inline std::optional<double> z_in_angstroms(const AstScript& ast,
                                            const BlockRegion& r, double z) {
    if (r.units_box) return z;
    auto a = lattice_constant_of(ast);
    if (!a) return std::nullopt;
    return z * *a;
}

}  // namespace detail

inline ParameterSet extract_parameters(const AstScript& ast) {
    using namespace detail;
    ParameterSet out;
    auto& v = out.values;

    // lattice_style / lattice_constant
    if (const AstCommand* lat = first_command(ast, "lattice")) {
        const TypedArg* style = lat->find_arg("style");
        if (style) v["lattice_style"] = word_value(style->text, {lat->line});
        else v["lattice_style"] = not_found("lattice command has no style");
        const TypedArg* scale = lat->find_arg("scale");
        if (scale && scale->number)
            v["lattice_constant"] = number_value(*scale->number, {lat->line});
        else
            v["lattice_constant"] = not_found("lattice command has no numeric scale");
    } else {
        v["lattice_style"] = not_found("no lattice command");
        v["lattice_constant"] = not_found("no lattice command");
    }

    // replication: replicate command, else create_box region extents in cells
    if (const AstCommand* rep = first_command(ast, "replicate")) {
        std::vector<double> n;
        for (const char* slot : {"nx", "ny", "nz"}) {
            const TypedArg* a = rep->find_arg(slot);
            if (a && a->number) n.push_back(*a->number);
        }
        if (n.size() == 3) v["replication"] = tuple_value(std::move(n), {rep->line});
        else v["replication"] = not_found("replicate command lacks numeric counts");
    } else if (const AstCommand* cb = first_command(ast, "create_box")) {
        const TypedArg* rid = cb->find_arg("region");
        if (!rid) {
            v["replication"] = not_found("create_box names no region");
        } else if (auto r = block_region_by_id(ast, rid->text)) {
            ExtractedValue cells = cells_of(ast, *r);
            if (cells.found()) cells.source_lines.push_back(cb->line);
            v["replication"] = std::move(cells);
        } else {
            v["replication"] =
                not_found("create_box region '" + rid->text +
                          "' is not a block region with numeric extents");
        }
    } else {
        v["replication"] = not_found("no replicate or create_box command");
    }

    // boundary
    if (const AstCommand* b = first_command(ast, "boundary")) {
        std::vector<std::string> words;
        for (const TypedArg& a : b->args) words.push_back(a.text);
        if (words.size() == 3) v["boundary"] = words_value(std::move(words), {b->line});
        else v["boundary"] = not_found("boundary command does not have 3 flags");
    } else {
        v["boundary"] = not_found("no boundary command");
    }

    // ensemble_sequence: ordered "style@group" over integrator fixes
    {
        static const std::set<std::string> ensembles = {"nve", "nvt", "npt", "nph"};
        std::vector<std::string> seq;
        std::vector<std::size_t> lines;
        for (const AstCommand& cmd : ast.commands) {
            if (cmd.name != "fix" || !cmd.style()) continue;
            std::string style(*cmd.style());
            if (!ensembles.count(style)) continue;
            const TypedArg* grp = cmd.find_arg("group");
            seq.push_back(style + "@" + (grp ? grp->text : "?"));
            lines.push_back(cmd.line);
        }
        if (!seq.empty())
            v["ensemble_sequence"] = words_value(std::move(seq), std::move(lines));
        else
            v["ensemble_sequence"] = not_found("no nve/nvt/npt/nph fix");
    }

    // thermostat-derived values
    auto thermo = find_thermostat(ast);
    if (thermo) {
        v["temp_start"] = number_value(thermo->tstart, {thermo->fix->line});
        v["temp_stop"] = number_value(thermo->tstop, {thermo->fix->line});
        if (thermo->tdamp)
            v["tdamp"] = number_value(*thermo->tdamp, {thermo->fix->line});
        else
            v["tdamp"] = not_found("thermostat fix has no damping slot");
    } else {
        v["temp_start"] = not_found("no thermostatted fix");
        v["temp_stop"] = not_found("no thermostatted fix");
        v["tdamp"] = not_found("no thermostatted fix");
    }

    // barostat-derived values
    auto baro = find_barostat(ast);
    const std::string punit = pressure_unit(ast);
    if (baro) {
        v["pressure"] = number_value(baro->pstart, {baro->fix->line}, punit);
        if (baro->pdamp)
            v["pdamp"] = number_value(*baro->pdamp, {baro->fix->line});
        else
            v["pdamp"] = not_found("barostat fix has no damping slot");
    } else {
        v["pressure"] = not_found("no barostatted fix");
        v["pdamp"] = not_found("no barostatted fix");
    }

    // timestep
    std::optional<double> dt;
    if (const AstCommand* ts = first_command(ast, "timestep")) {
        const TypedArg* a = ts->find_arg("dt");
        if (a && a->number) {
            dt = *a->number;
            v["timestep"] = number_value(*dt, {ts->line});
        } else {
            v["timestep"] = not_found("timestep command has no numeric value");
        }
    } else {
        v["timestep"] = not_found("no timestep command");
    }

    // run-derived values
    auto runs = all_commands(ast, "run");
    std::vector<double> run_steps;
    std::vector<std::size_t> run_lines;
    for (const AstCommand* r : runs) {
        const TypedArg* a = r->find_arg("steps");
        if (a && a->number) {
            run_steps.push_back(*a->number);
            run_lines.push_back(r->line);
        }
    }
    if (!run_steps.empty()) {
        v["run_steps"] = tuple_value(run_steps, run_lines);
        if (dt) {
            double total = 0.0;
            for (double s : run_steps) total += s;
            std::vector<std::size_t> lines = run_lines;
            lines.push_back(first_command(ast, "timestep")->line);
            v["total_sim_time"] = number_value(total * *dt, std::move(lines));
            std::vector<std::size_t> eq_lines{run_lines[0],
                                              first_command(ast, "timestep")->line};
            v["equilibration_time"] =
                number_value(run_steps[0] * *dt, std::move(eq_lines),
                             "", "first run command");
        } else {
            v["total_sim_time"] = not_found("no timestep to convert steps to time");
            v["equilibration_time"] = not_found("no timestep to convert steps to time");
        }
    } else {
        v["run_steps"] = not_found("no run command with numeric steps");
        v["total_sim_time"] = not_found("no run command with numeric steps");
        v["equilibration_time"] = not_found("no run command with numeric steps");
    }

    // heating_rate over the ramp fix's active run (first run after the fix)
    if (thermo && thermo->tstart != thermo->tstop) {
        const AstCommand* active = nullptr;
        for (const AstCommand* r : runs)
            if (r->line > thermo->fix->line) { active = r; break; }
        const TypedArg* steps = active ? active->find_arg("steps") : nullptr;
        if (!active || !steps || !steps->number) {
            v["heating_rate"] = not_found("no run command follows the ramp fix");
        } else if (!dt) {
            v["heating_rate"] = not_found("no timestep to convert steps to time");
        } else if (*steps->number <= 0.0 || *dt <= 0.0) {
            v["heating_rate"] = not_found("ramp run has no positive duration");
        } else {
            double rate = (thermo->tstop - thermo->tstart) / (*steps->number * *dt);
            v["heating_rate"] = number_value(
                rate, {thermo->fix->line, active->line,
                       first_command(ast, "timestep")->line},
                "", "(tstop - tstart) / (steps * dt)");
        }
    } else {
        v["heating_rate"] = not_found("no temperature ramp fix");
    }

    // velocity create / set
    {
        const AstCommand* create = nullptr;
        const AstCommand* set = nullptr;
        for (const AstCommand& cmd : ast.commands) {
            if (cmd.name != "velocity" || !cmd.style()) continue;
            if (!create && *cmd.style() == "create") create = &cmd;
            if (!set && *cmd.style() == "set") set = &cmd;
        }
        if (create) {
            const TypedArg* t = create->find_arg("temp");
            if (t && t->number)
                v["velocity_create_temp"] = number_value(*t->number, {create->line});
            else
                v["velocity_create_temp"] =
                    not_found("velocity create has no numeric temperature");
        } else {
            v["velocity_create_temp"] = not_found("no velocity create command");
        }
        if (set) {
            std::vector<double> vec;
            for (const char* slot : {"vx", "vy", "vz"}) {
                const TypedArg* a = set->find_arg(slot);
                if (a && a->number) vec.push_back(*a->number);
            }
            if (vec.size() == 3)
                v["velocity_set_vector"] = tuple_value(std::move(vec), {set->line});
            else
                v["velocity_set_vector"] =
                    not_found("velocity set components are not all numeric");
            const std::vector<TypedArg>* sum = set->find_keyword("sum");
            if (sum && !sum->empty())
                v["velocity_set_sum"] = word_value((*sum)[0].text, {set->line});
            else
                v["velocity_set_sum"] = not_found("velocity set has no sum keyword");
        } else {
            v["velocity_set_vector"] = not_found("no velocity set command");
            v["velocity_set_sum"] = not_found("no velocity set command");
        }
    }

    // pair_style_word
    if (const AstCommand* ps = first_command(ast, "pair_style")) {
        const TypedArg* style = ps->find_arg("style");
        if (style) v["pair_style_word"] = word_value(style->text, {ps->line});
        else v["pair_style_word"] = not_found("pair_style command has no style");
    } else {
        const AstCommand* kim = nullptr;
        for (const AstCommand& cmd : ast.commands) {
            if (cmd.name == "kim_init" ||
                (cmd.name == "kim" && cmd.style() && *cmd.style() == "init")) {
                kim = &cmd;
                break;
            }
        }
        if (kim)
            v["pair_style_word"] =
                word_value("kim", {kim->line}, "potential selected via kim init");
        else
            v["pair_style_word"] = not_found("no pair_style or kim init command");
    }

    // prompt-3 geometry: projectile/target block regions matched by id substring
    {
        auto proj = block_region_by_substring(ast, "proj");
        auto targ = block_region_by_substring(ast, "targ");
        if (proj) v["projectile_cells"] = cells_of(ast, *proj);
        else v["projectile_cells"] = not_found("no block region with id matching 'proj'");
        if (targ) v["target_cells"] = cells_of(ast, *targ);
        else v["target_cells"] = not_found("no block region with id matching 'targ'");
        if (proj && targ) {
            auto p_lo = z_in_angstroms(ast, *proj, proj->lo[2]);
            auto p_hi = z_in_angstroms(ast, *proj, proj->hi[2]);
            auto t_lo = z_in_angstroms(ast, *targ, targ->lo[2]);
            auto t_hi = z_in_angstroms(ast, *targ, targ->hi[2]);
            if (p_lo && p_hi && t_lo && t_hi) {
                double gap = std::max(*p_lo - *t_hi, *t_lo - *p_hi);
                v["gap_distance"] = number_value(
                    gap, {proj->cmd->line, targ->cmd->line}, "",
                    "z separation of projectile and target regions");
            } else {
                v["gap_distance"] =
                    not_found("regions use lattice units but no lattice constant");
            }
        } else {
            v["gap_distance"] = not_found("projectile or target region missing");
        }
    }

    // region_extents: raw bounds of the create_box region as written
    if (const AstCommand* cb = first_command(ast, "create_box")) {
        const TypedArg* rid = cb->find_arg("region");
        std::optional<detail::BlockRegion> r;
        if (rid) r = block_region_by_id(ast, rid->text);
        if (r) {
            std::vector<double> ext = {r->lo[0], r->hi[0], r->lo[1],
                                       r->hi[1], r->lo[2], r->hi[2]};
            v["region_extents"] = tuple_value(std::move(ext), {r->cmd->line, cb->line});
        } else {
            v["region_extents"] =
                not_found("create_box region is not a numeric block region");
        }
    } else {
        v["region_extents"] = not_found("no create_box command");
    }

    return out;
}

// ---------------------------------------------------------------------------
// Evaluation

enum class Verdict { Pass, Fail, NotFound };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "Pass";
        case Verdict::Fail: return "Fail";
        case Verdict::NotFound: return "NotFound";
    }
    return "?";
}

struct CriterionResult {
    std::string id;
    Category category = Category::SystemDefinition;
    std::string extractor;
    Verdict verdict = Verdict::NotFound;
    bool ignored = false;  // excluded from the overall verdict
    std::string expected_text;
    std::string extracted_text;
    std::string detail;
};

struct RubricResult {
    std::string rubric_id;
    std::vector<CriterionResult> criteria;
    bool overall = false;  // all non-ignored criteria Pass
    std::size_t passed = 0, failed = 0, not_found = 0;  // non-ignored only

    std::vector<std::string> failing_criteria() const {
        std::vector<std::string> out;
        for (const CriterionResult& c : criteria)
            if (!c.ignored && c.verdict != Verdict::Pass) out.push_back(c.id);
        return out;
    }
};

namespace detail {

// Pressure is the only unit-bearing extraction; atm and bar interconvert,
// anything else compares raw.
inline double to_extracted_units(double expected, const std::string& expected_unit,
                                 const std::string& extracted_unit) {
    if (expected_unit.empty() || extracted_unit.empty() ||
        expected_unit == extracted_unit)
        return expected;
    if (expected_unit == "atm" && extracted_unit == "bar")
        return expected * 1.01325;
    if (expected_unit == "bar" && extracted_unit == "atm")
        return expected / 1.01325;
    return expected;
}

inline double band_of(const Tolerance& tol, double expected) {
    return tol.kind == ToleranceKind::Abs ? tol.value
                                          : tol.value * std::abs(expected);
}

inline bool within(double x, double expected, const Tolerance& tol) {
    return std::abs(x - expected) <= band_of(tol, expected);
}

inline std::string render_expected(const Criterion& c) {
    std::ostringstream out;
    const ExpectedValue& e = c.expected;
    switch (e.kind) {
        case ExpectedValue::Kind::Number:
            out << render_number(e.number);
            break;
        case ExpectedValue::Kind::Interval:
            out << '[' << render_number(e.min) << ", " << render_number(e.max) << ']';
            break;
        case ExpectedValue::Kind::Word:
            out << e.word;
            break;
        case ExpectedValue::Kind::Words: {
            out << '[';
            for (std::size_t i = 0; i < e.words.size(); ++i) {
                if (i) out << ", ";
                if (e.words[i].size() == 1) {
                    out << e.words[i][0];
                } else {
                    out << '(';
                    for (std::size_t k = 0; k < e.words[i].size(); ++k) {
                        if (k) out << '|';
                        out << e.words[i][k];
                    }
                    out << ')';
                }
            }
            out << ']';
            break;
        }
        case ExpectedValue::Kind::NumberTuple: {
            out << '(';
            for (std::size_t i = 0; i < e.tuple.size(); ++i) {
                if (i) out << ", ";
                out << render_number(e.tuple[i]);
            }
            out << ')';
            break;
        }
    }
    if (c.tolerance) {
        out << (c.tolerance->kind == ToleranceKind::Rel ? " ±" : " ±")
            << render_number(c.tolerance->value)
            << (c.tolerance->kind == ToleranceKind::Rel ? " rel" : " abs");
    }
    if (!c.units.empty()) out << ' ' << c.units;
    return out.str();
}

inline bool word_in(const std::vector<std::string>& alts, const std::string& w) {
    for (const std::string& a : alts)
        if (a == w) return true;
    return false;
}

}  // namespace detail

inline CriterionResult evaluate_criterion(const ParameterSet& params,
                                          const Criterion& c) {
    using detail::to_extracted_units;
    CriterionResult r;
    r.id = c.id;
    r.category = c.category;
    r.extractor = c.extractor;
    r.expected_text = detail::render_expected(c);

    const ExtractedValue& v = params.at(c.extractor);
    r.extracted_text = render(v);
    if (!v.found()) {
        r.verdict = Verdict::NotFound;
        r.detail = v.note;
        return r;
    }

    const ExpectedValue& e = c.expected;
    auto fail = [&](std::string why) {
        r.verdict = Verdict::Fail;
        r.detail = std::move(why);
    };
    auto pass = [&](std::string why = "") {
        r.verdict = Verdict::Pass;
        r.detail = std::move(why);
    };

    switch (e.kind) {
        case ExpectedValue::Kind::Number: {
            if (v.kind != ExtractedValue::Kind::Number)
                return fail("expected a single number, extracted " + render(v)), r;
            double target = to_extracted_units(e.number, c.units, v.unit);
            if (detail::within(v.number, target, *c.tolerance))
                pass();
            else
                fail("extracted " + render_number(v.number) + " outside " +
                     render_number(target) + " ± " +
                     render_number(detail::band_of(*c.tolerance, target)));
            break;
        }
        case ExpectedValue::Kind::Interval: {
            if (v.kind != ExtractedValue::Kind::Number)
                return fail("expected a single number, extracted " + render(v)), r;
            double lo = to_extracted_units(e.min, c.units, v.unit);
            double hi = to_extracted_units(e.max, c.units, v.unit);
            if (v.number >= lo && v.number <= hi)
                pass();
            else
                fail("extracted " + render_number(v.number) + " outside [" +
                     render_number(lo) + ", " + render_number(hi) + "]");
            break;
        }
        case ExpectedValue::Kind::Word: {
            if (v.kind != ExtractedValue::Kind::Word)
                return fail("expected a word, extracted " + render(v)), r;
            if (v.word == e.word) pass();
            else fail("extracted '" + v.word + "' != '" + e.word + "'");
            break;
        }
        case ExpectedValue::Kind::Words: {
            if (v.kind == ExtractedValue::Kind::Word) {
                // membership in the admissible set (any position's alternatives)
                for (const auto& alts : e.words)
                    if (detail::word_in(alts, v.word)) return pass(), r;
                fail("extracted '" + v.word + "' not in admissible set");
            } else if (v.kind == ExtractedValue::Kind::Words) {
                if (v.words.size() != e.words.size())
                    return fail("expected " + std::to_string(e.words.size()) +
                                " components, extracted " +
                                std::to_string(v.words.size())),
                           r;
                for (std::size_t i = 0; i < v.words.size(); ++i) {
                    if (!detail::word_in(e.words[i], v.words[i]))
                        return fail("component " + std::to_string(i + 1) + " '" +
                                    v.words[i] + "' not admissible"),
                               r;
                }
                pass();
            } else {
                fail("expected words, extracted " + render(v));
            }
            break;
        }
        case ExpectedValue::Kind::NumberTuple: {
            if (v.kind != ExtractedValue::Kind::Tuple)
                return fail("expected a tuple, extracted " + render(v)), r;
            if (v.tuple.size() != e.tuple.size())
                return fail("expected " + std::to_string(e.tuple.size()) +
                            " components, extracted " +
                            std::to_string(v.tuple.size())),
                       r;
            for (std::size_t i = 0; i < e.tuple.size(); ++i) {
                double target = to_extracted_units(e.tuple[i], c.units, v.unit);
                if (!detail::within(v.tuple[i], target, *c.tolerance))
                    return fail("component " + std::to_string(i + 1) + ": " +
                                render_number(v.tuple[i]) + " outside " +
                                render_number(target) + " ± " +
                                render_number(
                                    detail::band_of(*c.tolerance, target))),
                           r;
            }
            pass();
            break;
        }
    }
    return r;
}

inline RubricResult evaluate_rubric(const ParameterSet& params, const Rubric& rubric,
                                    const std::set<std::string>& ignore_extractors = {}) {
    RubricResult out;
    out.rubric_id = rubric.id;
    out.overall = true;
    for (const Criterion& c : rubric.criteria) {
        CriterionResult r = evaluate_criterion(params, c);
        r.ignored = ignore_extractors.count(c.extractor) != 0;
        if (!r.ignored) {
            switch (r.verdict) {
                case Verdict::Pass: ++out.passed; break;
                case Verdict::Fail: ++out.failed; break;
                case Verdict::NotFound: ++out.not_found; break;
            }
            if (r.verdict != Verdict::Pass) out.overall = false;
        }
        out.criteria.push_back(std::move(r));
    }
    return out;
}

}  // namespace lmplint
