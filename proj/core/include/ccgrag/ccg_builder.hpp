#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "ccgrag/types.hpp"

namespace ccgrag {

namespace detail {
struct SourceStructure;
}

/// Parse result: the extracted statements plus the construct structure the
/// CFG wiring consumes. Immutable once built.
struct ParsedSource {
  Language language = Language::python;
  std::string file_path;
  std::vector<Statement> statements;
  std::shared_ptr<const detail::SourceStructure> structure;
};

/// Replaces invalid UTF-8 sequences with U+FFFD and normalizes CRLF to LF.
/// All line/byte arithmetic downstream refers to the sanitized text.
std::string sanitize_source(std::string_view raw);

ParsedSource parse_source(std::string file_path, std::string_view source, Language lang);

std::vector<Statement> extract_statements(std::string_view source, Language lang);

/// Function/method names defined in the parsed file (API-level task
/// eligibility feeds on these).
const std::vector<std::string>& defined_callables(const ParsedSource& parsed);

std::vector<Edge> build_cfg(const ParsedSource& parsed);

// Postdominance-based control dependence over the CF layer. CD sources are
// always predicate statements; loop predicates may depend on themselves.
std::vector<Edge> build_cdg(const std::vector<Statement>& statements,
                            const std::vector<Edge>& cf_edges);

// Reaching-definitions data dependence: one DD edge per (def, use) statement
// pair, no self-loops.
std::vector<Edge> build_ddg(const std::vector<Statement>& statements,
                            const std::vector<Edge>& cf_edges);

CodeContextGraph build_ccg(std::string file_path, std::string_view source, Language lang);

}  // namespace ccgrag
