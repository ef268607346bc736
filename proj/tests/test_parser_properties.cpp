#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "lmplint/normalize.hpp"
#include "lmplint/parse.hpp"
#include "lmplint/signature.hpp"
#include "support/generate.hpp"
#include "support/mutate.hpp"

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

ParseResult parse_text(const std::string& text) {
    auto canon = normalize(RawScript::from_text(text));
    REQUIRE(canon.ok());
    return Parser(registry()).parse(canon.value());
}

}  // namespace

TEST_CASE("generated scripts parse clean and round-trip structurally") {
    for (std::uint64_t seed = 1; seed <= 60; ++seed) {
        gen::ValidLineGen vg(registry(), seed);
        std::string script = vg.script(5, 15);
        INFO("seed " << seed << "\n" << script);

        ParseResult first = parse_text(script);
        for (const Diagnostic& d : first.diagnostics)
            INFO("diagnostic: " << format_diagnostic(d));
        REQUIRE(first.diagnostics.empty());
        REQUIRE_FALSE(first.ast.commands.empty());

        std::string rendered;
        for (const AstCommand& cmd : first.ast.commands) {
            rendered += render_command(cmd);
            rendered += '\n';
        }
        ParseResult second = parse_text(rendered);
        REQUIRE(second.diagnostics.empty());
        REQUIRE(structurally_equal(first.ast, second.ast));
    }
}

TEST_CASE("single-fault mutations always surface the planted code") {
    gen::Rng rng(99);
    std::size_t total = 0, kind_violations = 0;
    std::map<std::string, std::size_t> by_code;

    for (std::uint64_t seed = 100; seed <= 140; ++seed) {
        gen::ValidLineGen vg(registry(), seed);
        std::string script = vg.script(6, 12);
        ParseResult base = parse_text(script);
        REQUIRE(base.diagnostics.empty());

        for (const AstCommand& cmd : base.ast.commands) {
            for (const mut::Mutation& m :
                 mut::mutations_for(cmd, registry(), rng)) {
                INFO("mutation " << m.label << ": " << m.line);
                ParseResult r = parse_text(m.line + "\n");
                bool code_seen = false;
                bool any_error = false;
                for (const Diagnostic& d : r.diagnostics) {
                    if (d.severity == Severity::Error) any_error = true;
                    if (d.code == m.expected_code) code_seen = true;
                }
                REQUIRE(any_error);
                REQUIRE(code_seen);
                // Soundness: the damaged command may not reach the AST.
                REQUIRE(r.ast.commands.empty());
                ++total;
                if (m.kind_violation) ++kind_violations;
                ++by_code[m.expected_code];
            }
        }
    }

    INFO("mutation corpus: " << total << " total, " << kind_violations
                             << " kind violations");
    REQUIRE(total >= 700);
    REQUIRE(kind_violations >= 500);
    // Every diagnostic family appears.
    for (const char* code : {"P001", "P002", "P003", "P004", "P005", "P006"}) {
        INFO("code " << code);
        REQUIRE(by_code[code] > 0);
    }
}

TEST_CASE("parsing is deterministic across repeated runs") {
    gen::ValidLineGen vg(registry(), 7);
    std::string script = vg.script(10, 10);
    ParseResult a = parse_text(script);
    ParseResult b = parse_text(script);
    REQUIRE(structurally_equal(a.ast, b.ast));
    REQUIRE(a.diagnostics.size() == b.diagnostics.size());
}
