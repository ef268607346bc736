#pragma once

// Aggregates StageRecords into per-(model, prompt) funnel counts and renders
// them as JSON or fixed-width text tables. Emission is fully deterministic:
// no timestamps or wall times, records and slices in sorted order, so two
// runs over the same corpus produce byte-identical output.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lmplint/pipeline.hpp"

namespace lmplint {

struct SliceKey {
    std::string model;
    std::string prompt;

    bool operator<(const SliceKey& o) const {
        if (model != o.model) return model < o.model;
        return prompt < o.prompt;
    }
    bool operator==(const SliceKey& o) const {
        return model == o.model && prompt == o.prompt;
    }
};

struct SliceCounts {
    std::array<std::size_t, final_class_count> by_class{};

    std::size_t& operator[](FinalClass c) {
        return by_class[static_cast<std::size_t>(c)];
    }
    std::size_t operator[](FinalClass c) const {
        return by_class[static_cast<std::size_t>(c)];
    }

    std::size_t total() const {
        std::size_t n = 0;
        for (std::size_t v : by_class) n += v;
        return n;
    }
    // Scripts surviving both static gates.
    std::size_t parser_pass() const {
        return total() - (*this)[FinalClass::Parser_F] -
               (*this)[FinalClass::Sanitizer_F];
    }
    // Scripts that ran to completion, directly or after pair-style-zero.
    std::size_t exec_success() const {
        return (*this)[FinalClass::Acc_C] + (*this)[FinalClass::Acc_F] +
               (*this)[FinalClass::PSZ_Acc_C] + (*this)[FinalClass::PSZ_Acc_F];
    }
    // Scripts correct under the original physics, not the zeroed retry.
    std::size_t accuracy() const { return (*this)[FinalClass::Acc_C]; }

    SliceCounts& operator+=(const SliceCounts& o) {
        for (std::size_t i = 0; i < by_class.size(); ++i)
            by_class[i] += o.by_class[i];
        return *this;
    }
};

struct Report {
    std::map<SliceKey, SliceCounts> slices;
    std::vector<StageRecord> records;

    SliceCounts totals() const {
        SliceCounts t;
        for (const auto& [key, counts] : slices) t += counts;
        return t;
    }
    SliceCounts by_model(const std::string& model) const {
        SliceCounts t;
        for (const auto& [key, counts] : slices)
            if (key.model == model) t += counts;
        return t;
    }
    SliceCounts by_prompt(const std::string& prompt) const {
        SliceCounts t;
        for (const auto& [key, counts] : slices)
            if (key.prompt == prompt) t += counts;
        return t;
    }
    std::vector<std::string> models() const {
        std::vector<std::string> out;
        for (const auto& [key, counts] : slices)
            if (out.empty() || out.back() != key.model) out.push_back(key.model);
        return out;
    }
    std::vector<std::string> prompts() const {
        std::vector<std::string> out;
        for (const auto& [key, counts] : slices) {
            bool seen = false;
            for (const std::string& p : out) seen = seen || p == key.prompt;
            if (!seen) out.push_back(key.prompt);
        }
        return out;
    }
};

namespace detail {

inline std::pair<int, std::string> sample_sort_key(const std::string& s) {
    bool numeric = !s.empty();
    for (char c : s)
        numeric = numeric && std::isdigit(static_cast<unsigned char>(c));
    return {numeric ? std::stoi(s) : std::numeric_limits<int>::max(), s};
}

inline bool record_less(const StageRecord& a, const StageRecord& b) {
    if (a.model != b.model) return a.model < b.model;
    if (a.prompt != b.prompt) return a.prompt < b.prompt;
    if (a.sample != b.sample)
        return sample_sort_key(a.sample) < sample_sort_key(b.sample);
    return a.origin < b.origin;
}

}  // namespace detail

inline Report aggregate(std::vector<StageRecord> records) {
    std::stable_sort(records.begin(), records.end(), detail::record_less);
    Report rep;
    for (const StageRecord& r : records)
        rep.slices[SliceKey{r.model, r.prompt}][r.final_class] += 1;
    rep.records = std::move(records);
    return rep;
}

inline Report merge(const Report& a, const Report& b) {
    std::vector<StageRecord> all = a.records;
    all.insert(all.end(), b.records.begin(), b.records.end());
    return aggregate(std::move(all));
}

// Renders "n/d (p%)" with the percentage rounded half away from zero.
inline std::string ratio_cell(std::size_t n, std::size_t d) {
    std::ostringstream out;
    out << n << "/" << d;
    if (d > 0)
        out << " (" << std::lround(100.0 * static_cast<double>(n) /
                                   static_cast<double>(d))
            << "%)";
    return out.str();
}

// ---------------------------------------------------------------------------
// JSON emission

inline nlohmann::ordered_json diagnostic_to_json(const Diagnostic& d) {
    nlohmann::ordered_json j;
    j["severity"] = d.severity == Severity::Error ? "error" : "warning";
    j["code"] = d.code;
    j["line"] = d.span.line;
    j["col"] = d.span.col_begin;
    j["message"] = d.message;
    return j;
}

inline nlohmann::ordered_json record_to_json(const StageRecord& r) {
    nlohmann::ordered_json j;
    j["origin"] = r.origin;
    j["model"] = r.model;
    j["prompt"] = r.prompt;
    j["sample"] = r.sample;
    j["final_class"] = to_string(r.final_class);
    j["stages"]["normalize"]["status"] = to_string(r.normalize_status);
    if (!r.normalize_reason.empty())
        j["stages"]["normalize"]["reason"] = r.normalize_reason;
    j["stages"]["parse"]["status"] = to_string(r.parse_status);
    auto diags = nlohmann::ordered_json::array();
    for (const Diagnostic& d : r.diagnostics) diags.push_back(diagnostic_to_json(d));
    j["stages"]["parse"]["diagnostics"] = std::move(diags);
    j["stages"]["exec"]["status"] = to_string(r.exec_status);
    if (!r.exec_log_line.empty())
        j["stages"]["exec"]["last_log_line"] = r.exec_log_line;
    j["stages"]["pair_style_zero"]["status"] = to_string(r.psz_status);
    if (!r.psz_log_line.empty())
        j["stages"]["pair_style_zero"]["last_log_line"] = r.psz_log_line;
    j["stages"]["rubric"]["status"] = to_string(r.rubric_status);
    if (!r.failed_criteria.empty())
        j["stages"]["rubric"]["failed_criteria"] = r.failed_criteria;
    return j;
}

inline nlohmann::ordered_json counts_to_json(const SliceCounts& c) {
    nlohmann::ordered_json j;
    for (std::size_t i = 0; i < final_class_count; ++i)
        j[to_string(static_cast<FinalClass>(i))] = c.by_class[i];
    j["total"] = c.total();
    j["parser_pass"] = c.parser_pass();
    j["exec_success"] = c.exec_success();
    j["accuracy"] = c.accuracy();
    return j;
}

struct ReportMetadata {
    std::string corpus;
    std::string rubric;
    std::string runner;  // empty in static mode
    bool static_mode = false;
};

inline nlohmann::ordered_json report_to_json(const Report& rep,
                                             const ReportMetadata& meta = {}) {
    nlohmann::ordered_json j;
    j["metadata"]["corpus"] = meta.corpus;
    j["metadata"]["rubric"] = meta.rubric;
    j["metadata"]["runner"] = meta.runner;
    j["metadata"]["static_mode"] = meta.static_mode;
    auto slices = nlohmann::ordered_json::array();
    for (const auto& [key, counts] : rep.slices) {
        nlohmann::ordered_json s;
        s["model"] = key.model;
        s["prompt"] = key.prompt;
        s["counts"] = counts_to_json(counts);
        slices.push_back(std::move(s));
    }
    j["slices"] = std::move(slices);
    j["totals"] = counts_to_json(rep.totals());
    auto records = nlohmann::ordered_json::array();
    for (const StageRecord& r : rep.records) records.push_back(record_to_json(r));
    j["records"] = std::move(records);
    return j;
}

// ---------------------------------------------------------------------------
// Text emission

namespace detail {

inline void emit_row(std::ostringstream& out, const std::string& label,
                     std::size_t width, const std::vector<std::string>& cells) {
    out << label;
    for (std::size_t i = label.size(); i < width; ++i) out << ' ';
    for (const std::string& c : cells) {
        out << "  " << c;
        for (std::size_t i = c.size(); i < 16; ++i) out << ' ';
    }
    out << '\n';
}

}  // namespace detail

inline std::string report_to_text(const Report& rep) {
    std::ostringstream out;
    const std::vector<std::string> header = {"parser", "exec", "accuracy"};

    auto table = [&](const std::string& title,
                     const std::vector<std::string>& groups, auto counts_of) {
        out << title << '\n';
        std::size_t width = 5;
        for (const std::string& g : groups) width = std::max(width, g.size());
        detail::emit_row(out, "", width, header);
        for (const std::string& g : groups) {
            SliceCounts c = counts_of(g);
            std::size_t n = c.total();
            detail::emit_row(out, g, width,
                             {ratio_cell(c.parser_pass(), n),
                              ratio_cell(c.exec_success(), n),
                              ratio_cell(c.accuracy(), n)});
        }
        SliceCounts t = rep.totals();
        std::size_t n = t.total();
        detail::emit_row(out, "all", width,
                         {ratio_cell(t.parser_pass(), n),
                          ratio_cell(t.exec_success(), n),
                          ratio_cell(t.accuracy(), n)});
        out << '\n';
    };

    table("Per-model funnel", rep.models(),
          [&](const std::string& m) { return rep.by_model(m); });
    table("Per-prompt funnel", rep.prompts(),
          [&](const std::string& p) { return rep.by_prompt(p); });

    out << "Final classes\n";
    SliceCounts t = rep.totals();
    std::size_t width = 0;
    for (std::size_t i = 0; i < final_class_count; ++i)
        width = std::max(width, std::string(to_string(static_cast<FinalClass>(i))).size());
    for (std::size_t i = 0; i < final_class_count; ++i) {
        FinalClass c = static_cast<FinalClass>(i);
        detail::emit_row(out, to_string(c), width, {std::to_string(t[c])});
    }
    detail::emit_row(out, "total", width, {std::to_string(t.total())});
    return out.str();
}

}  // namespace lmplint
