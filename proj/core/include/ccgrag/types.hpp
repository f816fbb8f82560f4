#pragma once

#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace ccgrag {

enum class Language { python, java };

Language language_from_string(const std::string& name);
std::string to_string(Language lang);
const char* line_comment_marker(Language lang);
// Maps a path to a language by extension (.py/.java). Returns false for
// anything else.
bool language_of_path(const std::string& path, Language& out);

enum class StatementKind { simple, predicate, dummy };

std::string to_string(StatementKind kind);
StatementKind statement_kind_from_string(const std::string& name);

/// One executable statement or predicate. Compound constructs contribute
/// their header only; the span covers the header line(s), never the body.
struct Statement {
  int id = -1;
  std::string file_path;
  int line_start = 0;
  int line_end = 0;
  std::string text;
  StatementKind kind = StatementKind::simple;
  std::vector<std::string> tokens;  // ordered lexical tokens, comments excluded
  std::set<std::string> defs;
  std::set<std::string> uses;

  bool operator==(const Statement&) const = default;
};

enum class EdgeType : std::uint8_t { CF, CD, DD };

std::string to_string(EdgeType type);
EdgeType edge_type_from_string(const std::string& name);

struct Edge {
  int src = -1;
  EdgeType type = EdgeType::CF;
  int dst = -1;

  auto operator<=>(const Edge&) const = default;
};

/// Directed multigraph over statements: parallel edges allowed only when the
/// type differs, vertex ids are dense and equal to their index.
struct CodeContextGraph {
  Language language = Language::python;
  std::vector<Statement> vertices;
  std::vector<Edge> edges;  // sorted, unique triples

  const Statement& vertex(int id) const { return vertices.at(static_cast<size_t>(id)); }
  bool has_vertex(int id) const {
    return id >= 0 && static_cast<size_t>(id) < vertices.size();
  }

  bool operator==(const CodeContextGraph&) const = default;
};

// In-neighbor lookup built once per graph; neighbor ids ascending.
class InEdgeIndex {
 public:
  explicit InEdgeIndex(const CodeContextGraph& graph);

  std::span<const int> in(EdgeType type, int id) const;

 private:
  std::vector<std::vector<int>> cf_;
  std::vector<std::vector<int>> cd_;
  std::vector<std::vector<int>> dd_;
};

// Sorted-unique token bag over a set of statements.
std::vector<std::string> collect_token_bag(std::span<const Statement> statements);

void sort_and_dedup_edges(std::vector<Edge>& edges);

}  // namespace ccgrag
