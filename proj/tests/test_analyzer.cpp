#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <sstream>
#include <string>

#include "lmplint/analyze.hpp"
#include "lmplint/normalize.hpp"
#include "lmplint/parse.hpp"
#include "lmplint/signature.hpp"

using namespace lmplint;

namespace {

std::string read_file(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

const SignatureRegistry& registry() {
    static SignatureRegistry reg =
        SignatureRegistry::from_json_text(read_file(LMPLINT_SIGNATURES));
    return reg;
}

AstScript parse_clean(const std::string& text) {
    auto canon = normalize(RawScript::from_text(text));
    REQUIRE(canon.ok());
    ParseResult r = Parser(registry()).parse(canon.value());
    for (const Diagnostic& d : r.diagnostics)
        INFO("parse diagnostic: " << format_diagnostic(d));
    REQUIRE(r.diagnostics.empty());
    return r.ast;
}

AnalysisResult analyze_fixture(const char* name) {
    std::string path = std::string(LMPLINT_FIXTURE_DIR) + "/adversarial/" + name;
    return analyze(parse_clean(read_file(path)));
}

}  // namespace

TEST_CASE("clean scripts produce no cross-reference findings") {
    std::string path = std::string(LMPLINT_FIXTURE_DIR) + "/exemplars/prompt1.in";
    AnalysisResult res = analyze(parse_clean(read_file(path)));
    for (const Diagnostic& d : res.diagnostics)
        INFO("finding: " << format_diagnostic(d));
    CHECK(res.diagnostics.empty());
    CHECK_FALSE(res.has_errors());
}

TEST_CASE("the group 'all' is predefined") {
    AstScript ast = parse_clean(
        "velocity all create 300.0 887723\n"
        "fix 1 all nve\n");
    AnalysisResult res = analyze(ast);
    CHECK(res.diagnostics.empty());
    CHECK(res.symbols.contains(SymbolNamespace::Group, "all"));
    CHECK(res.symbols.defining_command(SymbolNamespace::Group, "all") ==
          SymbolTable::predefined_index);
}

TEST_CASE("symbol table records definitions by namespace and order") {
    AstScript ast = parse_clean(
        "region box block 0 5 0 5 0 5\n"
        "fix 1 all nve\n"
        "compute ke all ke/atom\n"
        "dump d1 all atom 100 traj.xyz\n");
    SymbolTable table = build_symbol_table(ast);
    CHECK(table.contains(SymbolNamespace::Region, "box"));
    CHECK(table.contains(SymbolNamespace::Fix, "1"));
    CHECK(table.contains(SymbolNamespace::Compute, "ke"));
    CHECK(table.contains(SymbolNamespace::Dump, "d1"));
    CHECK_FALSE(table.contains(SymbolNamespace::Group, "box"));
    CHECK(table.defining_command(SymbolNamespace::Region, "box") == 0u);
    CHECK(table.defining_command(SymbolNamespace::Dump, "d1") == 3u);
    // Predefined group 'all' is the first recorded definition.
    REQUIRE_FALSE(table.definitions().empty());
    CHECK(table.definitions().front().ns == SymbolNamespace::Group);
    CHECK(table.definitions().front().id == "all");
    CHECK(table.definitions().front().line == 0u);
}

TEST_CASE("fix on an undefined group is an error") {
    AnalysisResult res = analyze_fixture("undefined_group.in");
    REQUIRE(res.diagnostics.size() == 1);
    const Diagnostic& d = res.diagnostics[0];
    CHECK(d.code == diag::undefined_reference);
    CHECK(d.severity == Severity::Error);
    CHECK(d.span.line == 8);
    CHECK(d.span.col_begin == 7);
    CHECK(d.message == "reference to undefined group 'mobile'");
    CHECK(res.has_errors());
}

TEST_CASE("unfix without a matching active fix is an error") {
    AnalysisResult res = analyze_fixture("dangling_unfix.in");
    REQUIRE(res.diagnostics.size() == 1);
    const Diagnostic& d = res.diagnostics[0];
    CHECK(d.code == diag::dangling_unfix);
    CHECK(d.severity == Severity::Error);
    CHECK(d.span.line == 10);
    CHECK(d.message == "unfix '99' does not match any active fix");
}

TEST_CASE("redefining an id in the same namespace is a warning") {
    AnalysisResult res = analyze_fixture("duplicate_definition.in");
    REQUIRE(res.diagnostics.size() == 1);
    const Diagnostic& d = res.diagnostics[0];
    CHECK(d.code == diag::duplicate_definition);
    CHECK(d.severity == Severity::Warning);
    CHECK(d.span.line == 5);
    CHECK(d.message ==
          "redefinition of region 'box' (first defined at line 4)");
    CHECK_FALSE(res.has_errors());
}

TEST_CASE("using an id before its later definition is a warning") {
    AnalysisResult res = analyze_fixture("ref_before_def.in");
    REQUIRE(res.diagnostics.size() == 1);
    const Diagnostic& d = res.diagnostics[0];
    CHECK(d.code == diag::reference_before_definition);
    CHECK(d.severity == Severity::Warning);
    CHECK(d.span.line == 6);
    CHECK(d.message ==
          "region 'base' is used before its definition at line 7");
    CHECK_FALSE(res.has_errors());
}

TEST_CASE("unfix deactivates the id so it can be redefined cleanly") {
    AstScript ast = parse_clean(
        "fix 1 all nve\n"
        "unfix 1\n"
        "fix 1 all nve\n");
    AnalysisResult res = analyze(ast);
    CHECK(res.diagnostics.empty());
    CHECK(res.symbols.definitions_of(SymbolNamespace::Fix, "1").size() == 2);
}

TEST_CASE("a second unfix of the same id dangles") {
    AstScript ast = parse_clean(
        "fix 1 all nve\n"
        "unfix 1\n"
        "unfix 1\n");
    AnalysisResult res = analyze(ast);
    REQUIRE(res.diagnostics.size() == 1);
    CHECK(res.diagnostics[0].code == diag::dangling_unfix);
    CHECK(res.diagnostics[0].span.line == 3);
}

TEST_CASE("group delete removes the group from scope") {
    AstScript ast = parse_clean(
        "region box block 0 1 0 1 0 1\n"
        "group g region box\n"
        "group g delete\n"
        "velocity g create 300.0 1\n");
    AnalysisResult res = analyze(ast);
    REQUIRE(res.diagnostics.size() == 1);
    CHECK(res.diagnostics[0].code == diag::undefined_reference);
    CHECK(res.diagnostics[0].span.line == 4);
    CHECK(res.diagnostics[0].message ==
          "reference to undefined group 'g'");
    // delete is not a definition: only the real one is recorded
    CHECK(res.symbols.definitions_of(SymbolNamespace::Group, "g").size() == 1);
}

TEST_CASE("deleting a group that was never defined is an error") {
    AstScript ast = parse_clean("group ghost delete\n");
    AnalysisResult res = analyze(ast);
    REQUIRE(res.diagnostics.size() == 1);
    CHECK(res.diagnostics[0].code == diag::undefined_reference);
    CHECK(res.diagnostics[0].message ==
          "reference to undefined group 'ghost'");
}

TEST_CASE("redefining the predefined group names its origin") {
    AstScript ast = parse_clean(
        "region box block 0 1 0 1 0 1\n"
        "group all region box\n");
    AnalysisResult res = analyze(ast);
    REQUIRE(res.diagnostics.size() == 1);
    CHECK(res.diagnostics[0].code == diag::duplicate_definition);
    CHECK(res.diagnostics[0].message ==
          "redefinition of group 'all' (predefined)");
}

TEST_CASE("NULL is accepted where a region placeholder is allowed") {
    AstScript ast = parse_clean("create_atoms 2 random 50 4321 NULL\n");
    AnalysisResult res = analyze(ast);
    CHECK(res.diagnostics.empty());
}

TEST_CASE("group set operations check every operand") {
    AstScript ast = parse_clean("group gx union miss1 miss2\n");
    AnalysisResult res = analyze(ast);
    REQUIRE(res.diagnostics.size() == 2);
    CHECK(res.diagnostics[0].message ==
          "reference to undefined group 'miss1'");
    CHECK(res.diagnostics[1].message ==
          "reference to undefined group 'miss2'");
    // same line and code: ordered by column
    CHECK(res.diagnostics[0].span.col_begin <
          res.diagnostics[1].span.col_begin);
}

TEST_CASE("findings are ordered by line then code") {
    AstScript ast = parse_clean(
        "velocity ghost create 300.0 1\n"
        "region r1 block 0 1 0 1 0 1\n"
        "region r1 block 0 2 0 2 0 2\n"
        "unfix 7\n"
        "group g2 region later\n"
        "region later block 0 1 0 1 0 1\n");
    AnalysisResult res = analyze(ast);
    REQUIRE(res.diagnostics.size() == 4);
    CHECK(res.diagnostics[0].code == diag::undefined_reference);
    CHECK(res.diagnostics[0].span.line == 1);
    CHECK(res.diagnostics[1].code == diag::duplicate_definition);
    CHECK(res.diagnostics[1].span.line == 3);
    CHECK(res.diagnostics[2].code == diag::dangling_unfix);
    CHECK(res.diagnostics[2].span.line == 4);
    CHECK(res.diagnostics[3].code == diag::reference_before_definition);
    CHECK(res.diagnostics[3].span.line == 5);
    CHECK(res.has_errors());
}
