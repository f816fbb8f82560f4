#include "ccgrag/lex.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <unordered_set>

namespace ccgrag::lex {
namespace {

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

const std::unordered_set<std::string_view>& python_keywords() {
  static const std::unordered_set<std::string_view> kw = {
      "False", "None",   "True",  "and",    "as",     "assert", "async", "await",
      "break", "class",  "continue", "def", "del",    "elif",   "else",  "except",
      "finally", "for",  "from",  "global", "if",     "import", "in",    "is",
      "lambda", "nonlocal", "not", "or",    "pass",   "raise",  "return", "try",
      "while", "with",   "yield"};
  return kw;
}

const std::unordered_set<std::string_view>& java_keywords() {
  static const std::unordered_set<std::string_view> kw = {
      "abstract", "assert", "boolean", "break", "byte", "case", "catch", "char",
      "class", "const", "continue", "default", "do", "double", "else", "enum",
      "extends", "final", "finally", "float", "for", "goto", "if", "implements",
      "import", "instanceof", "int", "interface", "long", "native", "new",
      "package", "private", "protected", "public", "return", "short", "static",
      "strictfp", "super", "switch", "synchronized", "this", "throw", "throws",
      "transient", "try", "void", "volatile", "while", "true", "false", "null",
      "var", "record", "yield", "sealed", "permits"};
  return kw;
}

// Multi-char operators, longest first within each table.
constexpr std::array<std::string_view, 12> kOps3 = {
    "**=", "//=", ">>=", "<<=", "...", ">>>", "<<<", "!==", "===", "->*", "&&=", "||="};
constexpr std::array<std::string_view, 25> kOps2 = {
    "**", "//", ">>", "<<", "<=", ">=", "==", "!=", "+=", "-=", "*=", "/=", "%=",
    "&=", "|=", "^=", "->", ":=", "&&", "||", "++", "--", "::", "@=", "~="};

size_t match_operator(std::string_view text, size_t pos) {
  for (auto op : kOps3) {
    if (text.compare(pos, op.size(), op) == 0) return op.size();
  }
  for (auto op : kOps2) {
    if (text.compare(pos, op.size(), op) == 0) return op.size();
  }
  return 1;
}

bool is_py_string_prefix(std::string_view word) {
  if (word.size() > 3) return false;
  for (char c : word) {
    char l = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (l != 'r' && l != 'b' && l != 'f' && l != 'u') return false;
  }
  return !word.empty();
}

// Consumes a quoted literal starting at `pos` (which points at the quote).
// Returns one past the closing quote; unterminated literals run to the end.
size_t scan_string(std::string_view text, size_t pos, bool allow_triple) {
  const char quote = text[pos];
  if (allow_triple && text.compare(pos, 3, std::string(3, quote)) == 0) {
    size_t i = pos + 3;
    while (i + 2 < text.size()) {
      if (text[i] == '\\') {
        i += 2;
        continue;
      }
      if (text[i] == quote && text[i + 1] == quote && text[i + 2] == quote) return i + 3;
      ++i;
    }
    return text.size();
  }
  size_t i = pos + 1;
  while (i < text.size()) {
    if (text[i] == '\\' && i + 1 < text.size()) {
      i += 2;
      continue;
    }
    if (text[i] == quote) return i + 1;
    if (text[i] == '\n') return i;  // single-quoted strings do not span lines
    ++i;
  }
  return text.size();
}

struct RawToken {
  enum class Kind { identifier, keyword, number, string, op };
  Kind kind;
  std::string text;
};

std::vector<RawToken> scan(std::string_view text, Language lang) {
  std::vector<RawToken> out;
  const bool python = lang == Language::python;
  size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (python && c == '\\' && i + 1 < text.size() && text[i + 1] == '\n') {
      i += 2;  // line continuation
      continue;
    }
    // Comments.
    if (python && c == '#') {
      while (i < text.size() && text[i] != '\n') ++i;
      continue;
    }
    if (!python && c == '/' && i + 1 < text.size()) {
      if (text[i + 1] == '/') {
        while (i < text.size() && text[i] != '\n') ++i;
        continue;
      }
      if (text[i + 1] == '*') {
        size_t end = text.find("*/", i + 2);
        i = end == std::string_view::npos ? text.size() : end + 2;
        continue;
      }
    }
    // Strings (python triple quotes and java text blocks included).
    if (c == '"' || c == '\'') {
      size_t end = scan_string(text, i, python || c == '"');
      out.push_back({RawToken::Kind::string, std::string(text.substr(i, end - i))});
      i = end;
      continue;
    }
    if (is_ident_start(c)) {
      size_t j = i + 1;
      while (j < text.size() && is_ident_char(text[j])) ++j;
      std::string word(text.substr(i, j - i));
      // Python string prefixes: r"..." f'...' etc. lex as one string token.
      if (python && j < text.size() && (text[j] == '"' || text[j] == '\'') &&
          is_py_string_prefix(word)) {
        size_t end = scan_string(text, j, true);
        out.push_back({RawToken::Kind::string, std::string(text.substr(i, end - i))});
        i = end;
        continue;
      }
      const bool kw = python ? python_keywords().count(word) > 0 : java_keywords().count(word) > 0;
      out.push_back({kw ? RawToken::Kind::keyword : RawToken::Kind::identifier, std::move(word)});
      i = j;
      continue;
    }
    if (is_digit(c) || (c == '.' && i + 1 < text.size() && is_digit(text[i + 1]))) {
      size_t j = i;
      while (j < text.size() &&
             (is_ident_char(text[j]) || text[j] == '.' ||
              ((text[j] == '+' || text[j] == '-') && j > i &&
               (text[j - 1] == 'e' || text[j - 1] == 'E')))) {
        ++j;
      }
      out.push_back({RawToken::Kind::number, std::string(text.substr(i, j - i))});
      i = j;
      continue;
    }
    size_t n = match_operator(text, i);
    out.push_back({RawToken::Kind::op, std::string(text.substr(i, n))});
    i += n;
  }
  return out;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text, Language lang) {
  std::vector<std::string> out;
  for (auto& t : scan(text, lang)) out.push_back(std::move(t.text));
  return out;
}

std::vector<std::string> identifiers(std::string_view text, Language lang) {
  std::vector<std::string> out;
  for (auto& t : scan(text, lang)) {
    if (t.kind == RawToken::Kind::identifier) out.push_back(std::move(t.text));
  }
  return out;
}

bool is_keyword(std::string_view word, Language lang) {
  return lang == Language::python ? python_keywords().count(word) > 0
                                  : java_keywords().count(word) > 0;
}

bool is_blank_or_comment_line(std::string_view line, Language lang) {
  return scan(line, lang).empty();
}

int approx_token_count(std::string_view text) {
  int count = 0;
  size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (is_ident_char(c)) {
      while (i < text.size() && is_ident_char(text[i])) ++i;
    } else {
      ++i;
    }
    ++count;
  }
  return count;
}

std::string normalize_ws(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool in_run = false;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      in_run = true;
      continue;
    }
    if (in_run && !out.empty()) out.push_back(' ');
    in_run = false;
    out.push_back(c);
  }
  return out;
}

}  // namespace ccgrag::lex
