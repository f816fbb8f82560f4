#include "ccgrag/types.hpp"

#include <algorithm>

#include "ccgrag/errors.hpp"

namespace ccgrag {

Language language_from_string(const std::string& name) {
  if (name == "python") return Language::python;
  if (name == "java") return Language::java;
  throw UnsupportedLanguage("unsupported language: " + name);
}

std::string to_string(Language lang) {
  switch (lang) {
    case Language::python: return "python";
    case Language::java: return "java";
  }
  return "?";
}

const char* line_comment_marker(Language lang) {
  return lang == Language::python ? "#" : "//";
}

bool language_of_path(const std::string& path, Language& out) {
  auto ends_with = [&](std::string_view suffix) {
    return path.size() >= suffix.size() &&
           path.compare(path.size() - suffix.size(), suffix.size(), suffix) == 0;
  };
  if (ends_with(".py")) {
    out = Language::python;
    return true;
  }
  if (ends_with(".java")) {
    out = Language::java;
    return true;
  }
  return false;
}

std::string to_string(StatementKind kind) {
  switch (kind) {
    case StatementKind::simple: return "simple";
    case StatementKind::predicate: return "predicate";
    case StatementKind::dummy: return "dummy";
  }
  return "?";
}

StatementKind statement_kind_from_string(const std::string& name) {
  if (name == "simple") return StatementKind::simple;
  if (name == "predicate") return StatementKind::predicate;
  if (name == "dummy") return StatementKind::dummy;
  throw Error("unknown statement kind: " + name);
}

std::string to_string(EdgeType type) {
  switch (type) {
    case EdgeType::CF: return "CF";
    case EdgeType::CD: return "CD";
    case EdgeType::DD: return "DD";
  }
  return "?";
}

EdgeType edge_type_from_string(const std::string& name) {
  if (name == "CF") return EdgeType::CF;
  if (name == "CD") return EdgeType::CD;
  if (name == "DD") return EdgeType::DD;
  throw Error("unknown edge type: " + name);
}

InEdgeIndex::InEdgeIndex(const CodeContextGraph& graph) {
  const size_t n = graph.vertices.size();
  cf_.resize(n);
  cd_.resize(n);
  dd_.resize(n);
  for (const Edge& e : graph.edges) {
    auto& lists = e.type == EdgeType::CF ? cf_ : (e.type == EdgeType::CD ? cd_ : dd_);
    lists[static_cast<size_t>(e.dst)].push_back(e.src);
  }
  for (auto* lists : {&cf_, &cd_, &dd_}) {
    for (auto& l : *lists) std::sort(l.begin(), l.end());
  }
}

std::span<const int> InEdgeIndex::in(EdgeType type, int id) const {
  const auto& lists = type == EdgeType::CF ? cf_ : (type == EdgeType::CD ? cd_ : dd_);
  const auto& l = lists.at(static_cast<size_t>(id));
  return {l.data(), l.size()};
}

std::vector<std::string> collect_token_bag(std::span<const Statement> statements) {
  std::vector<std::string> bag;
  for (const Statement& s : statements) {
    bag.insert(bag.end(), s.tokens.begin(), s.tokens.end());
  }
  std::sort(bag.begin(), bag.end());
  bag.erase(std::unique(bag.begin(), bag.end()), bag.end());
  return bag;
}

void sort_and_dedup_edges(std::vector<Edge>& edges) {
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
}

}  // namespace ccgrag
