#pragma once

// Script representations. Raw lines keep 1-based source line numbers as
// provenance; every later stage carries those numbers forward so diagnostics
// can always point back into the original file.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace lmplint {

struct SourceLine {
    std::string text;
    std::vector<std::size_t> provenance;  // sorted, 1-based raw line numbers
};

struct RawScript {
    std::string origin;  // file path or "<memory>"
    std::vector<SourceLine> lines;

    static RawScript from_text(std::string_view source,
                               std::string origin = "<memory>") {
        RawScript out;
        out.origin = std::move(origin);
        std::size_t lineno = 1;
        std::size_t start = 0;
        for (std::size_t i = 0; i <= source.size(); ++i) {
            if (i == source.size() || source[i] == '\n') {
                if (i == source.size() && i == start) break;  // no trailing ghost line
                std::string_view line = source.substr(start, i - start);
                if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
                out.lines.push_back(SourceLine{std::string(line), {lineno}});
                ++lineno;
                start = i + 1;
            }
        }
        return out;
    }

    std::string text() const {
        std::string out;
        for (const SourceLine& l : lines) {
            out += l.text;
            out += '\n';
        }
        return out;
    }
};

struct CanonicalLine {
    std::string text;
    std::vector<std::size_t> provenance;
};

struct CanonicalScript {
    std::string origin;
    std::vector<CanonicalLine> lines;
    std::vector<std::string> steps_applied;

    std::string text() const {
        std::string out;
        for (const CanonicalLine& l : lines) {
            out += l.text;
            out += '\n';
        }
        return out;
    }
};

}  // namespace lmplint
