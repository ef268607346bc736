// Minimal library walkthrough: normalize a script, parse it, run the
// cross-reference checks, and print every extracted physical parameter.
//
//   ./extract_parameters_demo <signatures.json> <script.in>

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
    AnalysisResult semantic = analyze(parsed.ast);
    for (const Diagnostic& d : parsed.diagnostics)
        std::cout << format_diagnostic(d) << "\n";
    for (const Diagnostic& d : semantic.diagnostics)
        std::cout << format_diagnostic(d) << "\n";

    ParameterSet params = extract_parameters(parsed.ast);
    for (const std::string& key : known_extractor_keys())
        std::cout << key << " = " << render(params.at(key)) << "\n";
    return 0;
}
