#pragma once

// Staged evaluation funnel: normalize, parse and cross-reference, truncated
// execution, pair-style-zero retry, rubric scoring. Each script yields one
// StageRecord; the final class is a pure, total function of stage outcomes.
// With no runner configured the funnel stops after the static stages.

#include <atomic>
#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "lmplint/analyze.hpp"
#include "lmplint/normalize.hpp"
#include "lmplint/parse.hpp"
#include "lmplint/rubric.hpp"
#include "lmplint/runner.hpp"
#include "lmplint/script.hpp"
#include "lmplint/signature.hpp"
#include "lmplint/transform.hpp"

namespace lmplint {

enum class FinalClass {
    Acc_C,
    Acc_F,
    PSZ_Acc_C,
    PSZ_Acc_F,
    PSZ_Exec_F,
    Parser_F,
    Sanitizer_F,
    StaticPass,
};

inline constexpr std::size_t final_class_count = 8;

inline const char* to_string(FinalClass c) {
    switch (c) {
        case FinalClass::Acc_C: return "Acc_C";
        case FinalClass::Acc_F: return "Acc_F";
        case FinalClass::PSZ_Acc_C: return "PSZ_Acc_C";
        case FinalClass::PSZ_Acc_F: return "PSZ_Acc_F";
        case FinalClass::PSZ_Exec_F: return "PSZ_Exec_F";
        case FinalClass::Parser_F: return "Parser_F";
        case FinalClass::Sanitizer_F: return "Sanitizer_F";
        case FinalClass::StaticPass: return "StaticPass";
    }
    return "?";
}

inline std::optional<FinalClass> final_class_from(std::string_view s) {
    for (std::size_t i = 0; i < final_class_count; ++i) {
        FinalClass c = static_cast<FinalClass>(i);
        if (s == to_string(c)) return c;
    }
    return std::nullopt;
}

enum class StageStatus { Ok, Fail, Skipped, NotNeeded };

inline const char* to_string(StageStatus s) {
    switch (s) {
        case StageStatus::Ok: return "ok";
        case StageStatus::Fail: return "fail";
        case StageStatus::Skipped: return "skipped";
        case StageStatus::NotNeeded: return "not_needed";
    }
    return "?";
}

enum class RubricStage { Pass, Fail, Skipped };

inline const char* to_string(RubricStage s) {
    switch (s) {
        case RubricStage::Pass: return "pass";
        case RubricStage::Fail: return "fail";
        case RubricStage::Skipped: return "skipped";
    }
    return "?";
}

struct StageRecord {
    std::string origin;
    std::string model;
    std::string prompt;
    std::string sample;
    bool static_mode = false;

    StageStatus normalize_status = StageStatus::Skipped;
    std::string normalize_reason;

    StageStatus parse_status = StageStatus::Skipped;
    std::vector<Diagnostic> diagnostics;  // parser + semantic, (line, code) order

    StageStatus exec_status = StageStatus::Skipped;
    std::string exec_log_line;

    StageStatus psz_status = StageStatus::Skipped;  // NotNeeded when exec passed
    std::string psz_log_line;

    RubricStage rubric_status = RubricStage::Skipped;
    std::vector<std::string> failed_criteria;

    FinalClass final_class = FinalClass::Sanitizer_F;
};

// Pure priority cascade; total over every status combination so contradictory
// records (never produced by evaluate_script) still classify deterministically.
inline FinalClass classify(const StageRecord& r) {
    if (r.normalize_status != StageStatus::Ok) return FinalClass::Sanitizer_F;
    if (r.parse_status != StageStatus::Ok) return FinalClass::Parser_F;
    if (r.exec_status == StageStatus::Skipped ||
        r.exec_status == StageStatus::NotNeeded)
        return FinalClass::StaticPass;
    if (r.exec_status == StageStatus::Ok)
        return r.rubric_status == RubricStage::Pass ? FinalClass::Acc_C
                                                    : FinalClass::Acc_F;
    if (r.psz_status == StageStatus::Ok)
        return r.rubric_status == RubricStage::Pass ? FinalClass::PSZ_Acc_C
                                                    : FinalClass::PSZ_Acc_F;
    return FinalClass::PSZ_Exec_F;
}

struct RubricSet {
    std::map<std::string, Rubric> by_prompt;
    std::optional<Rubric> fallback;

    const Rubric* for_prompt(const std::string& prompt) const {
        auto it = by_prompt.find(prompt);
        if (it != by_prompt.end()) return &it->second;
        if (fallback) return &*fallback;
        return nullptr;
    }

    bool empty() const { return by_prompt.empty() && !fallback; }
};

// Loads a single rubric file, or a directory of `<prompt>.rubric.json` files
// keyed by prompt tag.
inline result<RubricSet, SchemaError> load_rubrics(const std::string& path) {
    namespace fs = std::filesystem;
    RubricSet set;
    if (fs::is_directory(path)) {
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(path)) {
            if (!entry.is_regular_file()) continue;
            const std::string name = entry.path().filename().string();
            const std::string suffix = ".rubric.json";
            if (name.size() > suffix.size() &&
                name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0)
                files.push_back(entry.path());
        }
        std::sort(files.begin(), files.end());
        for (const fs::path& f : files) {
            auto loaded = load_rubric_file(f.string());
            if (!loaded.ok()) {
                SchemaError e = loaded.error();
                e.path = f.filename().string() + ":" + e.path;
                return e;
            }
            std::string name = f.filename().string();
            name.resize(name.size() - std::string(".rubric.json").size());
            set.by_prompt.emplace(std::move(name), std::move(loaded.value()));
        }
        if (set.by_prompt.empty())
            return SchemaError{path, "directory contains no *.rubric.json files"};
        return set;
    }
    auto loaded = load_rubric_file(path);
    if (!loaded.ok()) return loaded.error();
    set.fallback = std::move(loaded.value());
    return set;
}

struct PipelineConfig {
    const SignatureRegistry* registry = nullptr;
    const RubricSet* rubrics = nullptr;
    std::string runner_executable;  // empty selects static-only mode
    std::string scratch_dir = "work";
    std::string potentials_dir;
    double timeout_seconds = 60.0;
    std::int64_t truncate_steps = 10;
    double psz_cutoff = 10.0;
    bool psz_on_pair_error_only = false;
    std::set<std::string> psz_ignored_extractors = {"pair_style_word"};
    NormalizeOptions normalize_options;
};

struct ConfigError {
    std::string message;
};

struct ScriptJob {
    RawScript raw;
    std::string model = "adhoc";
    std::string prompt = "script";
    std::string sample = "0";
};

inline std::string effective_runner(const std::string& configured) {
    const char* env = std::getenv("LAMMPS_LINT_RUNNER");
    if (env && *env) return env;
    return configured;
}

namespace detail {

inline bool pair_attributable(const std::string& log_line) {
    std::string lower = lowercase(log_line);
    return lower.find("pair") != std::string::npos ||
           lower.find("potential") != std::string::npos ||
           lower.find("kim") != std::string::npos;
}

// Scripts reference potential files as ../../../potentials/<name> relative to
// their scratch dir three levels below the scratch root.
inline void prepare_scratch(const PipelineConfig& config) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(config.scratch_dir, ec);
    if (config.potentials_dir.empty()) return;
    fs::path link = fs::path(config.scratch_dir) / "potentials";
    if (fs::exists(link)) return;
    fs::create_directory_symlink(fs::absolute(config.potentials_dir), link, ec);
}

inline std::vector<Diagnostic> merged_diagnostics(std::vector<Diagnostic> a,
                                                  std::vector<Diagnostic> b) {
    a.insert(a.end(), std::make_move_iterator(b.begin()),
             std::make_move_iterator(b.end()));
    std::stable_sort(a.begin(), a.end(),
                     [](const Diagnostic& x, const Diagnostic& y) {
                         if (x.span.line != y.span.line)
                             return x.span.line < y.span.line;
                         int c = x.code.compare(y.code);
                         if (c != 0) return c < 0;
                         return x.span.col_begin < y.span.col_begin;
                     });
    return a;
}

inline bool has_errors(const std::vector<Diagnostic>& diags) {
    for (const Diagnostic& d : diags)
        if (d.severity == Severity::Error) return true;
    return false;
}

}  // namespace detail

inline result<StageRecord, ConfigError> evaluate_script(
    const ScriptJob& job, const PipelineConfig& config) {
    if (!config.registry)
        return ConfigError{"no signature registry configured"};
    if (!config.rubrics || config.rubrics->empty())
        return ConfigError{"no rubric configured"};
    const Rubric* rubric = config.rubrics->for_prompt(job.prompt);
    if (!rubric)
        return ConfigError{"no rubric for prompt '" + job.prompt + "'"};

    StageRecord rec;
    rec.origin = job.raw.origin;
    rec.model = job.model;
    rec.prompt = job.prompt;
    rec.sample = job.sample;
    rec.static_mode = config.runner_executable.empty();

    auto canonical = normalize(job.raw, config.normalize_options);
    if (!canonical.ok()) {
        rec.normalize_status = StageStatus::Fail;
        rec.normalize_reason = canonical.error().format();
        rec.final_class = classify(rec);
        return rec;
    }
    rec.normalize_status = StageStatus::Ok;

    Parser parser(*config.registry);
    ParseResult parsed = parser.parse(canonical.value());
    AnalysisResult semantic = analyze(parsed.ast);
    const bool parse_failed =
        detail::has_errors(parsed.diagnostics) ||
        detail::has_errors(semantic.diagnostics);
    rec.diagnostics = detail::merged_diagnostics(std::move(parsed.diagnostics),
                                                 std::move(semantic.diagnostics));
    rec.parse_status = parse_failed ? StageStatus::Fail : StageStatus::Ok;
    if (parse_failed) {
        rec.final_class = classify(rec);
        return rec;
    }

    if (rec.static_mode) {
        rec.final_class = classify(rec);
        return rec;
    }

    detail::prepare_scratch(config);
    const std::string work = config.scratch_dir + "/" + job.model + "/" +
                             job.prompt + "/" + job.sample;

    TransformOutcome truncated = truncate_runs(parsed.ast, config.truncate_steps);

    RunnerConfig plain;
    plain.executable = config.runner_executable;
    plain.work_dir = work;
    plain.timeout_seconds = config.timeout_seconds;
    plain.script_filename = "input.plain.in";
    plain.log_filename = "log.plain.lammps";
    plain.console_filename = "console.plain.out";
    auto exec = run_external(serialize(truncated.script).text(), plain);
    if (!exec.ok()) return ConfigError{exec.error().message};
    rec.exec_status = exec.value().ok ? StageStatus::Ok : StageStatus::Fail;
    rec.exec_log_line = exec.value().last_log_line;

    // Rubric inputs come from the pre-transform AST: scoring judges what was
    // generated, not what the harness rewrote.
    ParameterSet params = extract_parameters(parsed.ast);

    if (rec.exec_status == StageStatus::Ok) {
        rec.psz_status = StageStatus::NotNeeded;
        RubricResult rr = evaluate_rubric(params, *rubric);
        rec.rubric_status = rr.overall ? RubricStage::Pass : RubricStage::Fail;
        rec.failed_criteria = rr.failing_criteria();
    } else {
        const bool trigger = !config.psz_on_pair_error_only ||
                             detail::pair_attributable(rec.exec_log_line);
        if (trigger) {
            TransformOutcome psz =
                apply_pair_style_zero(truncated.script, config.psz_cutoff);
            RunnerConfig again = plain;
            again.script_filename = "input.psz.in";
            again.log_filename = "log.psz.lammps";
            again.console_filename = "console.psz.out";
            auto psz_exec = run_external(serialize(psz.script).text(), again);
            if (!psz_exec.ok()) return ConfigError{psz_exec.error().message};
            rec.psz_status =
                psz_exec.value().ok ? StageStatus::Ok : StageStatus::Fail;
            rec.psz_log_line = psz_exec.value().last_log_line;
            if (rec.psz_status == StageStatus::Ok) {
                RubricResult rr =
                    evaluate_rubric(params, *rubric, config.psz_ignored_extractors);
                rec.rubric_status =
                    rr.overall ? RubricStage::Pass : RubricStage::Fail;
                rec.failed_criteria = rr.failing_criteria();
            }
        }
    }
    rec.final_class = classify(rec);
    return rec;
}

// ---------------------------------------------------------------------------
// Corpus scanning and batch evaluation

struct CorpusEntry {
    std::string path;
    std::string model;
    std::string prompt;
    std::string sample;  // file stem
};

// Layout: DIR/<model>/<prompt>/<k>.in; entries sorted by (model, prompt,
// numeric-aware sample) for deterministic processing and reports.
inline std::vector<CorpusEntry> scan_corpus(const std::string& dir) {
    namespace fs = std::filesystem;
    std::vector<CorpusEntry> out;
    if (!fs::is_directory(dir)) return out;
    for (const auto& model : fs::directory_iterator(dir)) {
        if (!model.is_directory()) continue;
        for (const auto& prompt : fs::directory_iterator(model.path())) {
            if (!prompt.is_directory()) continue;
            for (const auto& file : fs::directory_iterator(prompt.path())) {
                if (!file.is_regular_file()) continue;
                if (file.path().extension() != ".in") continue;
                out.push_back(CorpusEntry{file.path().string(),
                                          model.path().filename().string(),
                                          prompt.path().filename().string(),
                                          file.path().stem().string()});
            }
        }
    }
    auto sample_key = [](const std::string& s) {
        bool numeric = !s.empty();
        for (char c : s) numeric = numeric && std::isdigit(static_cast<unsigned char>(c));
        return std::pair<int, std::string>(
            numeric ? std::stoi(s) : std::numeric_limits<int>::max(), s);
    };
    std::sort(out.begin(), out.end(),
              [&](const CorpusEntry& a, const CorpusEntry& b) {
                  if (a.model != b.model) return a.model < b.model;
                  if (a.prompt != b.prompt) return a.prompt < b.prompt;
                  return sample_key(a.sample) < sample_key(b.sample);
              });
    return out;
}

inline result<RawScript, ConfigError> read_raw_script(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return ConfigError{"cannot read script '" + path + "'"};
    std::ostringstream buf;
    buf << in.rdbuf();
    return RawScript::from_text(buf.str(), path);
}

// Evaluates entries with a bounded worker pool; result order matches input
// order regardless of job count.
inline result<std::vector<StageRecord>, ConfigError> evaluate_corpus(
    const std::vector<CorpusEntry>& entries, const PipelineConfig& config,
    unsigned jobs = 1) {
    if (!config.runner_executable.empty()) detail::prepare_scratch(config);
    std::vector<StageRecord> records(entries.size());
    std::optional<ConfigError> first_error;
    std::mutex error_mutex;
    std::atomic<std::size_t> next{0};

    auto worker = [&]() {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= entries.size()) return;
            auto raw = read_raw_script(entries[i].path);
            if (!raw.ok()) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = raw.error();
                return;
            }
            ScriptJob job;
            job.raw = std::move(raw.value());
            job.model = entries[i].model;
            job.prompt = entries[i].prompt;
            job.sample = entries[i].sample;
            auto rec = evaluate_script(job, config);
            if (!rec.ok()) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = rec.error();
                return;
            }
            records[i] = std::move(rec.value());
        }
    };

    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }
    if (first_error) return *first_error;
    return records;
}

}  // namespace lmplint
