#pragma once

// Internal helpers over the tree-sitter C API shared by the language
// adapters. Not installed.

#include <tree_sitter/api.h>

#include <cstring>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "ccgrag/types.hpp"

extern "C" {
const TSLanguage* tree_sitter_python(void);
const TSLanguage* tree_sitter_java(void);
}

namespace ccgrag::detail {

struct TreeDeleter {
  void operator()(TSTree* t) const {
    if (t) ts_tree_delete(t);
  }
};
using TreePtr = std::unique_ptr<TSTree, TreeDeleter>;

struct ParserDeleter {
  void operator()(TSParser* p) const {
    if (p) ts_parser_delete(p);
  }
};
using ParserPtr = std::unique_ptr<TSParser, ParserDeleter>;

inline TreePtr parse_tree(const TSLanguage* lang, std::string_view src) {
  thread_local ParserPtr parser{ts_parser_new()};
  ts_parser_set_language(parser.get(), lang);
  ts_parser_reset(parser.get());
  return TreePtr(
      ts_parser_parse_string(parser.get(), nullptr, src.data(), static_cast<uint32_t>(src.size())));
}

inline bool node_is(TSNode n, const char* kind) {
  return std::strcmp(ts_node_type(n), kind) == 0;
}

inline std::string_view node_text(TSNode n, std::string_view src) {
  const uint32_t s = ts_node_start_byte(n);
  const uint32_t e = ts_node_end_byte(n);
  return src.substr(s, e - s);
}

inline TSNode field(TSNode n, const char* name) {
  return ts_node_child_by_field_name(n, name, static_cast<uint32_t>(std::strlen(name)));
}

inline bool is_comment_node(TSNode n) {
  const char* k = ts_node_type(n);
  return std::strcmp(k, "comment") == 0 || std::strcmp(k, "line_comment") == 0 ||
         std::strcmp(k, "block_comment") == 0;
}

// String-ish nodes are lexed as one atomic token.
inline bool is_atomic_string_node(TSNode n) {
  const char* k = ts_node_type(n);
  return std::strcmp(k, "string") == 0 || std::strcmp(k, "string_literal") == 0 ||
         std::strcmp(k, "character_literal") == 0 || std::strcmp(k, "text_block") == 0;
}

// Emits Statements out of byte ranges of the syntax tree. Text and token
// list come from the non-comment leaves inside the range; the span covers
// the first through last such leaf.
class StatementBuilder {
 public:
  StatementBuilder(std::string file_path, std::string_view src, Language lang)
      : file_path_(std::move(file_path)), src_(src), lang_(lang) {}

  // Returns the new statement id, or -1 when the range holds no tokens.
  int emit(TSNode scope, uint32_t start_byte, uint32_t end_byte, StatementKind kind) {
    Leaves l;
    gather(scope, start_byte, end_byte, l);
    if (l.tokens.empty()) return -1;
    Statement st;
    st.id = static_cast<int>(statements_.size());
    st.file_path = file_path_;
    st.kind = kind;
    st.line_start = static_cast<int>(l.first_row) + 1;
    st.line_end = static_cast<int>(l.last_row) + 1;
    st.text = std::string(src_.substr(l.first_byte, l.last_byte - l.first_byte));
    st.tokens = std::move(l.tokens);
    statements_.push_back(std::move(st));
    return statements_.back().id;
  }

  int emit(TSNode node, StatementKind kind) {
    return emit(node, ts_node_start_byte(node), ts_node_end_byte(node), kind);
  }

  Statement& at(int id) { return statements_.at(static_cast<size_t>(id)); }
  std::vector<Statement> take() { return std::move(statements_); }
  std::string_view source() const { return src_; }
  Language language() const { return lang_; }

 private:
  struct Leaves {
    std::vector<std::string> tokens;
    uint32_t first_byte = 0;
    uint32_t last_byte = 0;
    uint32_t first_row = 0;
    uint32_t last_row = 0;
  };

  void gather(TSNode n, uint32_t start, uint32_t end, Leaves& out) {
    const uint32_t s = ts_node_start_byte(n);
    const uint32_t e = ts_node_end_byte(n);
    if (e <= start || s >= end) return;
    if (is_comment_node(n)) return;
    const uint32_t count = ts_node_child_count(n);
    if (count == 0 || is_atomic_string_node(n)) {
      if (s < start || e > end) return;  // partially clipped token: skip
      if (out.tokens.empty()) {
        out.first_byte = s;
        out.first_row = ts_node_start_point(n).row;
      }
      out.last_byte = e;
      out.last_row = ts_node_end_point(n).row;
      out.tokens.emplace_back(node_text(n, src_));
      return;
    }
    for (uint32_t i = 0; i < count; ++i) gather(ts_node_child(n, i), start, end, out);
  }

  std::string file_path_;
  std::string_view src_;
  Language lang_;
  std::vector<Statement> statements_;
};

}  // namespace ccgrag::detail
