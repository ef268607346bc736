// Shows the execution-probe rewrites: run truncation and the pair_style zero
// substitution, with the exact edits each one made.
//
//   ./transform_demo <signatures.json> <script.in>

#include <fstream>
#include <iostream>
#include <sstream>

#include "lmplint/lmplint.hpp"

int main(int argc, char** argv) {
    if (argc != 3) {
        std::cerr << "usage: " << argv[0] << " <signatures.json> <script.in>\n";
        return 2;
    }
    auto slurp = [](const char* path) {
        std::ifstream in(path, std::ios::binary);
        std::ostringstream buf;
        buf << in.rdbuf();
        return buf.str();
    };

    using namespace lmplint;
    SignatureRegistry registry = SignatureRegistry::from_json_text(slurp(argv[1]));

    auto canonical = normalize(RawScript::from_text(slurp(argv[2]), argv[2]));
    if (!canonical.ok()) {
        std::cerr << canonical.error().format() << "\n";
        return 1;
    }
    Parser parser(registry);
    ParseResult parsed = parser.parse(canonical.value());
    if (parsed.has_errors()) {
        for (const Diagnostic& d : parsed.diagnostics)
            std::cerr << format_diagnostic(d) << "\n";
        return 1;
    }

    TransformOutcome truncated = truncate_runs(parsed.ast);
    TransformOutcome zeroed = apply_pair_style_zero(truncated.script);

    auto show = [](const TransformReport& report) {
        for (const TransformEdit& e : report.edits)
            std::cout << "  #" << e.command_index << ": " << e.before << "  =>  "
                      << e.after << "\n";
        for (const TransformWarning& w : report.warnings)
            std::cout << "  warning: " << w.message << "\n";
    };
    std::cout << "truncate_runs edits:\n";
    show(truncated.report);
    std::cout << "apply_pair_style_zero edits:\n";
    show(zeroed.report);

    std::cout << "\n" << serialize(zeroed.script).text();
    return 0;
}
