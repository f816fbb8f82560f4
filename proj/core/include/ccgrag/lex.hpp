#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "ccgrag/types.hpp"

namespace ccgrag::lex {

/// Lexical tokens of a code fragment: identifiers, keywords, numbers,
/// string literals (atomic, quotes included) and operator/punctuation
/// symbols. Comments and whitespace are dropped.
std::vector<std::string> tokenize(std::string_view text, Language lang);

/// Ordered identifier occurrences, language keywords excluded.
std::vector<std::string> identifiers(std::string_view text, Language lang);

bool is_keyword(std::string_view word, Language lang);

/// True when the line holds nothing but whitespace and/or a comment.
bool is_blank_or_comment_line(std::string_view line, Language lang);

/// Cheap token-count approximation for prompt budgeting: alphanumeric runs
/// count one token each, every other printable character counts one.
int approx_token_count(std::string_view text);

/// Strip outer whitespace and collapse internal whitespace runs to single
/// spaces (the normalization applied before EM/ES scoring).
std::string normalize_ws(std::string_view text);

}  // namespace ccgrag::lex
