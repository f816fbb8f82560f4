#include "support/random_graphs.hpp"

#include <algorithm>

namespace ccgrag::testing {

namespace {

const std::vector<std::string>& vocabulary() {
  static const std::vector<std::string> words = {
      "result", "value",  "total", "index", "count", "buffer", "item",  "node",
      "append", "update", "parse", "check", "run",   "load",   "write", "close",
      "(",      ")",      "=",     "+",     "if",    "for",    "return", ":",
  };
  return words;
}

std::vector<std::string> some_tokens(Rng& rng, int count) {
  std::uniform_int_distribution<size_t> pick(0, vocabulary().size() - 1);
  std::vector<std::string> tokens;
  tokens.reserve(static_cast<size_t>(count));
  for (int i = 0; i < count; ++i) tokens.push_back(vocabulary()[pick(rng)]);
  return tokens;
}

Statement make_statement(Rng& rng, int id, int line, StatementKind kind) {
  Statement s;
  s.id = id;
  s.file_path = "synthetic.py";
  s.line_start = s.line_end = line;
  s.kind = kind;
  if (kind != StatementKind::dummy) {
    std::uniform_int_distribution<int> ntok(1, 6);
    s.tokens = some_tokens(rng, ntok(rng));
    std::string text;
    for (const auto& t : s.tokens) {
      if (!text.empty()) text.push_back(' ');
      text += t;
    }
    s.text = text;
  }
  return s;
}

}  // namespace

std::vector<std::string> random_token_bag(Rng& rng) {
  std::uniform_int_distribution<int> ntok(1, 8);
  std::vector<std::string> bag = some_tokens(rng, ntok(rng));
  std::sort(bag.begin(), bag.end());
  bag.erase(std::unique(bag.begin(), bag.end()), bag.end());
  return bag;
}

CodeContextGraph random_ccg(Rng& rng, int max_vertices) {
  std::uniform_int_distribution<int> size_dist(1, max_vertices);
  const int n = size_dist(rng);
  CodeContextGraph g;
  g.language = Language::python;
  std::uniform_int_distribution<int> kind_dist(0, 3);
  for (int i = 0; i < n; ++i) {
    const StatementKind kind =
        kind_dist(rng) == 0 ? StatementKind::predicate : StatementKind::simple;
    g.vertices.push_back(make_statement(rng, i, i + 1, kind));
  }

  std::vector<Edge> edges;
  std::uniform_int_distribution<int> coin(0, 99);
  // Backbone: mostly sequential flow with occasional skips and back edges.
  for (int i = 1; i < n; ++i) {
    edges.push_back(Edge{i - 1, EdgeType::CF, i});
    if (i >= 2 && coin(rng) < 25) {
      std::uniform_int_distribution<int> src(0, i - 2);
      edges.push_back(Edge{src(rng), EdgeType::CF, i});  // branch/merge
    }
    if (coin(rng) < 10) {
      std::uniform_int_distribution<int> dst(0, i - 1);
      edges.push_back(Edge{i, EdgeType::CF, dst(rng)});  // back edge
    }
  }
  // Sparse DD/CD edges between arbitrary distinct vertices.
  const int extras = n / 2;
  std::uniform_int_distribution<int> any(0, n - 1);
  for (int i = 0; i < extras; ++i) {
    const int a = any(rng);
    const int b = any(rng);
    if (a == b) continue;
    edges.push_back(Edge{a, coin(rng) < 50 ? EdgeType::DD : EdgeType::CD, b});
  }
  sort_and_dedup_edges(edges);
  g.edges = std::move(edges);
  return g;
}

CcgSlice random_slice(Rng& rng, int max_vertices, bool dummy_anchor) {
  std::uniform_int_distribution<int> size_dist(1, max_vertices);
  const int n = size_dist(rng);
  CcgSlice s;
  s.h = 5;
  s.l = 20;
  std::uniform_int_distribution<int> hop_dist(1, 4);
  for (int i = 0; i < n; ++i) {
    const bool is_anchor = i == 0;
    const StatementKind kind = is_anchor && dummy_anchor
                                   ? StatementKind::dummy
                                   : StatementKind::simple;
    SliceVertex v;
    v.stmt = make_statement(rng, i, n - i, kind);  // descending lines, unique
    v.hop = is_anchor ? 0 : hop_dist(rng);
    v.via_cf = true;
    s.vertices.push_back(std::move(v));
  }
  s.anchor_id = 0;
  std::sort(s.vertices.begin(), s.vertices.end(),
            [](const SliceVertex& a, const SliceVertex& b) { return a.stmt.id < b.stmt.id; });

  std::uniform_int_distribution<int> any(0, n - 1);
  std::uniform_int_distribution<int> type_dist(0, 2);
  std::vector<Edge> edges;
  const int m = n + n / 2;
  for (int i = 0; i < m; ++i) {
    const int a = any(rng);
    const int b = any(rng);
    if (a == b) continue;
    const int draw = type_dist(rng);
    const EdgeType t = draw == 0 ? EdgeType::CD : (draw == 1 ? EdgeType::DD : EdgeType::CF);
    edges.push_back(Edge{a, t, b});
  }
  sort_and_dedup_edges(edges);
  s.edges = std::move(edges);
  return s;
}

Database random_database(Rng& rng, int entries) {
  Database db;
  db.params.h = 5;
  db.params.l = 20;
  db.params.languages = {Language::python};
  std::uniform_int_distribution<int> file_dist(0, 9);
  std::uniform_int_distribution<int> line_dist(1, 400);
  for (int i = 0; i < entries; ++i) {
    IndexEntry e;
    e.key = random_slice(rng, 6, false);
    e.key_sequence = sequence_slice(e.key);
    e.file_path = "src/f" + std::to_string(file_dist(rng)) + ".py";
    e.anchor_line = line_dist(rng);
    e.window_start = std::max(1, e.anchor_line - 10);
    e.window_end = e.anchor_line + 10;
    e.value = "line a\nline b";
    db.entries.push_back(std::move(e));
  }
  std::sort(db.entries.begin(), db.entries.end(), [](const IndexEntry& a, const IndexEntry& b) {
    return std::tie(a.file_path, a.anchor_line) < std::tie(b.file_path, b.anchor_line);
  });
  db.stats.entry_count = static_cast<std::int64_t>(db.entries.size());
  db.stats.file_count = 10;
  return db;
}

}  // namespace ccgrag::testing
