// Command-line front end: normalize, parse, lint, transform, evaluate, batch,
// report. Exit codes: 0 success, 1 findings/failures, 2 usage or config error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "lmplint/lmplint.hpp"

#ifndef LMPLINT_DEFAULT_SIGNATURES
#define LMPLINT_DEFAULT_SIGNATURES "signatures/lammps-core.json"
#endif

namespace {

using namespace lmplint;

std::string read_file_or_die(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        std::cerr << "error: cannot read '" << path << "'\n";
        std::exit(2);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_output(const std::string& out_path, const std::string& text) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
        std::cerr << "error: cannot write '" << out_path << "'\n";
        std::exit(2);
    }
    out << text;
}

SignatureRegistry load_registry_or_die(const std::string& path) {
    try {
        return SignatureRegistry::from_json_text(read_file_or_die(path));
    } catch (const RegistryError& e) {
        std::cerr << "error: " << path << ": " << e.what() << "\n";
        std::exit(2);
    }
}

void print_diagnostics(const std::vector<Diagnostic>& diags, bool as_json) {
    if (as_json) {
        auto arr = nlohmann::ordered_json::array();
        for (const Diagnostic& d : diags) arr.push_back(diagnostic_to_json(d));
        std::cout << arr.dump(2) << "\n";
        return;
    }
    for (const Diagnostic& d : diags) std::cout << format_diagnostic(d) << "\n";
}

struct StaticAnalysis {
    CanonicalScript canonical;
    ParseResult parsed;
    std::vector<Diagnostic> all_diagnostics;
    bool parse_ok = false;
};

// Shared front half of every subcommand: normalize (exit 2 on failure when
// `die_on_normalize`), parse, cross-reference.
StaticAnalysis analyze_file_or_die(const std::string& path,
                                   const SignatureRegistry& registry) {
    auto raw = RawScript::from_text(read_file_or_die(path), path);
    auto canonical = normalize(raw);
    if (!canonical.ok()) {
        std::cerr << "error: " << canonical.error().format() << "\n";
        std::exit(2);
    }
    StaticAnalysis out{std::move(canonical.value()), {}, {}, false};
    Parser parser(registry);
    out.parsed = parser.parse(out.canonical);
    AnalysisResult semantic = analyze(out.parsed.ast);
    bool errors = false;
    for (const Diagnostic& d : out.parsed.diagnostics)
        errors = errors || d.severity == Severity::Error;
    for (const Diagnostic& d : semantic.diagnostics)
        errors = errors || d.severity == Severity::Error;
    out.all_diagnostics = out.parsed.diagnostics;
    out.all_diagnostics.insert(out.all_diagnostics.end(),
                               semantic.diagnostics.begin(),
                               semantic.diagnostics.end());
    std::stable_sort(out.all_diagnostics.begin(), out.all_diagnostics.end(),
                     [](const Diagnostic& a, const Diagnostic& b) {
                         if (a.span.line != b.span.line)
                             return a.span.line < b.span.line;
                         int c = a.code.compare(b.code);
                         if (c != 0) return c < 0;
                         return a.span.col_begin < b.span.col_begin;
                     });
    out.parse_ok = !errors;
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Static analysis and evaluation toolkit for LAMMPS input scripts"};
    app.require_subcommand(1);

    std::string signatures_path = LMPLINT_DEFAULT_SIGNATURES;
    app.add_option("--signatures", signatures_path,
                   "command signature registry (JSON)")
        ->envname("LAMMPS_LINT_SIGNATURES");

    // normalize
    auto* cmd_normalize = app.add_subcommand(
        "normalize", "expand loops/variables, strip noise, print canonical text");
    std::string norm_in, norm_out;
    cmd_normalize->add_option("script", norm_in, "input script")->required();
    cmd_normalize->add_option("--out", norm_out, "write result here");

    // parse
    auto* cmd_parse =
        app.add_subcommand("parse", "parse against the signature registry");
    std::string parse_in;
    bool parse_json = false;
    cmd_parse->add_option("script", parse_in, "input script")->required();
    cmd_parse->add_flag("--json", parse_json, "emit diagnostics as JSON");

    // lint
    auto* cmd_lint = app.add_subcommand(
        "lint", "parse plus cross-reference checks (full static gate)");
    std::string lint_in;
    bool lint_json = false;
    cmd_lint->add_option("script", lint_in, "input script")->required();
    cmd_lint->add_flag("--json", lint_json, "emit diagnostics as JSON");

    // transform
    auto* cmd_transform = app.add_subcommand(
        "transform", "rewrite the script for cheap execution probes");
    std::string tr_in, tr_out;
    long long tr_steps = 10;
    bool tr_psz = false;
    double tr_cutoff = 10.0;
    cmd_transform->add_option("script", tr_in, "input script")->required();
    cmd_transform->add_option("--truncate-runs", tr_steps,
                              "cap run commands at this many steps");
    cmd_transform->add_flag("--psz", tr_psz,
                            "replace the interaction model with pair_style zero");
    cmd_transform->add_option("--psz-cutoff", tr_cutoff,
                              "cutoff for pair_style zero");
    cmd_transform->add_option("--out", tr_out, "write result here");

    // evaluate
    auto* cmd_evaluate = app.add_subcommand(
        "evaluate", "score one script against a rubric (static extraction)");
    std::string ev_in, ev_rubric;
    bool ev_json = false;
    cmd_evaluate->add_option("script", ev_in, "input script")->required();
    cmd_evaluate->add_option("--rubric", ev_rubric, "rubric JSON file")
        ->required();
    cmd_evaluate->add_flag("--json", ev_json, "emit results as JSON");

    // batch
    auto* cmd_batch = app.add_subcommand(
        "batch", "evaluate a corpus tree and aggregate funnel metrics");
    std::string ba_corpus, ba_rubric, ba_runner, ba_out, ba_scratch = "work";
    std::string ba_potentials;
    unsigned ba_jobs = 1;
    double ba_timeout = 60.0;
    bool ba_psz_pair_only = false, ba_text = false;
    cmd_batch->add_option("--corpus", ba_corpus, "corpus root: model/prompt/k.in")
        ->required();
    cmd_batch
        ->add_option("--rubric", ba_rubric,
                     "rubric file, or directory of <prompt>.rubric.json")
        ->required();
    cmd_batch->add_option("--runner", ba_runner,
                          "LAMMPS executable; omit for static-only analysis");
    cmd_batch->add_option("--jobs", ba_jobs, "parallel evaluations");
    cmd_batch->add_option("--out", ba_out, "write the JSON report here");
    cmd_batch->add_option("--scratch", ba_scratch, "working directory for runs");
    cmd_batch->add_option("--potentials", ba_potentials,
                          "directory symlinked as <scratch>/potentials");
    cmd_batch->add_option("--timeout", ba_timeout, "per-run wall clock limit (s)");
    cmd_batch->add_flag("--psz-on-pair-error", ba_psz_pair_only,
                        "retry with pair_style zero only when the failure "
                        "mentions the interaction model");
    cmd_batch->add_flag("--text", ba_text, "also print text tables");

    // report
    auto* cmd_report =
        app.add_subcommand("report", "render text tables from a batch report");
    std::string rp_in;
    cmd_report->add_option("report", rp_in, "report JSON from batch")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (cmd_normalize->parsed()) {
        auto raw = RawScript::from_text(read_file_or_die(norm_in), norm_in);
        auto canonical = normalize(raw);
        if (!canonical.ok()) {
            std::cerr << "error: " << canonical.error().format() << "\n";
            return 2;
        }
        write_output(norm_out, canonical.value().text());
        return 0;
    }

    SignatureRegistry registry = load_registry_or_die(signatures_path);

    if (cmd_parse->parsed()) {
        StaticAnalysis a = analyze_file_or_die(parse_in, registry);
        print_diagnostics(a.parsed.diagnostics, parse_json);
        for (const Diagnostic& d : a.parsed.diagnostics)
            if (d.severity == Severity::Error) return 1;
        return 0;
    }

    if (cmd_lint->parsed()) {
        StaticAnalysis a = analyze_file_or_die(lint_in, registry);
        print_diagnostics(a.all_diagnostics, lint_json);
        return a.parse_ok ? 0 : 1;
    }

    if (cmd_transform->parsed()) {
        StaticAnalysis a = analyze_file_or_die(tr_in, registry);
        if (!a.parse_ok) {
            print_diagnostics(a.all_diagnostics, false);
            return 1;
        }
        TransformOutcome t = truncate_runs(a.parsed.ast, tr_steps);
        if (tr_psz) {
            TransformOutcome z = apply_pair_style_zero(t.script, tr_cutoff);
            for (const TransformWarning& w : z.report.warnings)
                std::cerr << "warning: " << w.message << "\n";
            t.script = std::move(z.script);
        }
        write_output(tr_out, serialize(t.script).text());
        return 0;
    }

    if (cmd_evaluate->parsed()) {
        auto rubric = load_rubric_file(ev_rubric);
        if (!rubric.ok()) {
            std::cerr << "error: " << ev_rubric << ": "
                      << rubric.error().format() << "\n";
            return 2;
        }
        StaticAnalysis a = analyze_file_or_die(ev_in, registry);
        if (!a.parse_ok) {
            print_diagnostics(a.all_diagnostics, false);
            return 1;
        }
        ParameterSet params = extract_parameters(a.parsed.ast);
        RubricResult rr = evaluate_rubric(params, rubric.value());
        if (ev_json) {
            nlohmann::ordered_json j;
            j["rubric"] = rr.rubric_id;
            j["overall"] = rr.overall ? "pass" : "fail";
            auto arr = nlohmann::ordered_json::array();
            for (const CriterionResult& c : rr.criteria) {
                nlohmann::ordered_json cj;
                cj["id"] = c.id;
                cj["category"] = to_string(c.category);
                cj["extractor"] = c.extractor;
                cj["verdict"] = to_string(c.verdict);
                cj["expected"] = c.expected_text;
                cj["extracted"] = c.extracted_text;
                if (!c.detail.empty()) cj["detail"] = c.detail;
                arr.push_back(std::move(cj));
            }
            j["criteria"] = std::move(arr);
            std::cout << j.dump(2) << "\n";
        } else {
            for (const CriterionResult& c : rr.criteria) {
                std::cout << "[" << to_string(c.verdict) << "] " << c.id
                          << ": expected " << c.expected_text << ", extracted "
                          << c.extracted_text;
                if (!c.detail.empty()) std::cout << " (" << c.detail << ")";
                std::cout << "\n";
            }
            std::cout << "overall: " << (rr.overall ? "pass" : "fail") << "\n";
        }
        return rr.overall ? 0 : 1;
    }

    if (cmd_batch->parsed()) {
        auto rubrics = load_rubrics(ba_rubric);
        if (!rubrics.ok()) {
            std::cerr << "error: " << rubrics.error().format() << "\n";
            return 2;
        }
        PipelineConfig config;
        config.registry = &registry;
        config.rubrics = &rubrics.value();
        config.runner_executable = effective_runner(ba_runner);
        config.scratch_dir = ba_scratch;
        config.potentials_dir = ba_potentials;
        config.timeout_seconds = ba_timeout;
        config.psz_on_pair_error_only = ba_psz_pair_only;

        std::vector<CorpusEntry> entries = scan_corpus(ba_corpus);
        if (entries.empty()) {
            std::cerr << "error: no *.in scripts under '" << ba_corpus << "'\n";
            return 2;
        }
        auto records = evaluate_corpus(entries, config, ba_jobs);
        if (!records.ok()) {
            std::cerr << "error: " << records.error().message << "\n";
            return 2;
        }
        Report rep = aggregate(std::move(records.value()));
        ReportMetadata meta;
        meta.corpus = ba_corpus;
        meta.rubric = ba_rubric;
        meta.runner = config.runner_executable;
        meta.static_mode = config.runner_executable.empty();
        const std::string json_text = report_to_json(rep, meta).dump(2) + "\n";
        if (!ba_out.empty())
            write_output(ba_out, json_text);
        else
            std::cout << json_text;
        if (ba_text) std::cout << report_to_text(rep);

        SliceCounts t = rep.totals();
        const std::size_t failures =
            t[FinalClass::Acc_F] + t[FinalClass::PSZ_Acc_F] +
            t[FinalClass::PSZ_Exec_F] + t[FinalClass::Parser_F] +
            t[FinalClass::Sanitizer_F];
        return failures > 0 ? 1 : 0;
    }

    if (cmd_report->parsed()) {
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(read_file_or_die(rp_in));
        } catch (const nlohmann::json::parse_error& e) {
            std::cerr << "error: " << rp_in << ": " << e.what() << "\n";
            return 2;
        }
        if (!doc.contains("slices") || !doc["slices"].is_array()) {
            std::cerr << "error: " << rp_in << " has no 'slices' array\n";
            return 2;
        }
        Report rep;
        for (const auto& s : doc["slices"]) {
            SliceKey key{s.value("model", std::string()),
                         s.value("prompt", std::string())};
            SliceCounts counts;
            const auto& cj = s["counts"];
            for (std::size_t i = 0; i < final_class_count; ++i) {
                FinalClass c = static_cast<FinalClass>(i);
                counts[c] = cj.value(to_string(c), std::size_t{0});
            }
            rep.slices[key] = counts;
        }
        std::cout << report_to_text(rep);
        return 0;
    }

    return 2;
}
