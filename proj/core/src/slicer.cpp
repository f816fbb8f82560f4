#include "ccgrag/slicer.hpp"

#include <algorithm>
#include <deque>
#include <map>

#include "ccgrag/errors.hpp"

namespace ccgrag {

const SliceVertex* CcgSlice::find(int id) const {
  auto it = std::lower_bound(vertices.begin(), vertices.end(), id,
                             [](const SliceVertex& v, int key) { return v.stmt.id < key; });
  if (it == vertices.end() || it->stmt.id != id) return nullptr;
  return &*it;
}

namespace {

struct Picked {
  int hop = 0;
  bool via_cf = false;
  bool via_dd = false;
  bool via_cd = false;
};

}  // namespace

CcgSlice slice(const CodeContextGraph& graph, const InEdgeIndex& index, int anchor_id, int h,
               int l, DepHopRule rule) {
  if (!graph.has_vertex(anchor_id)) {
    throw AnchorNotFound("anchor " + std::to_string(anchor_id) + " not in graph");
  }

  // Backward BFS over CF in-edges; every popped vertex within the hop bound
  // joins the CF set and donates its DD/CD in-neighbors; the size check
  // fires after insertion, so the last batch may overshoot l.
  std::map<int, Picked> picked;
  std::deque<std::pair<int, int>> queue;  // (vertex, cf hop)
  std::vector<char> enqueued(graph.vertices.size(), 0);
  queue.emplace_back(anchor_id, 0);
  enqueued[static_cast<size_t>(anchor_id)] = 1;

  auto admit = [&](int id, int hop, bool cf, bool dd, bool cd) {
    auto [it, inserted] = picked.try_emplace(id);
    Picked& p = it->second;
    if (inserted || hop < p.hop) p.hop = hop;
    p.via_cf |= cf;
    p.via_dd |= dd;
    p.via_cd |= cd;
  };

  while (!queue.empty()) {
    const auto [x, hop] = queue.front();
    queue.pop_front();
    if (hop > h) break;
    admit(x, hop, true, false, false);
    const int dep_hop = rule == DepHopRule::attach ? hop : hop + 1;
    for (int z : index.in(EdgeType::DD, x)) admit(z, dep_hop, false, true, false);
    for (int z : index.in(EdgeType::CD, x)) admit(z, dep_hop, false, false, true);
    if (static_cast<int>(picked.size()) >= l) break;
    for (int z : index.in(EdgeType::CF, x)) {
      if (picked.count(z) != 0 && picked[z].via_cf) continue;
      if (enqueued[static_cast<size_t>(z)]) continue;
      enqueued[static_cast<size_t>(z)] = 1;
      queue.emplace_back(z, hop + 1);
    }
  }

  CcgSlice out;
  out.anchor_id = anchor_id;
  out.h = h;
  out.l = l;
  out.vertices.reserve(picked.size());
  for (const auto& [id, p] : picked) {
    out.vertices.push_back(SliceVertex{graph.vertex(id), p.hop, p.via_cf, p.via_dd, p.via_cd});
  }
  for (const Edge& e : graph.edges) {
    if (picked.count(e.src) != 0 && picked.count(e.dst) != 0) out.edges.push_back(e);
  }
  return out;
}

CcgSlice slice(const CodeContextGraph& graph, int anchor_id, int h, int l, DepHopRule rule) {
  InEdgeIndex index(graph);
  return slice(graph, index, anchor_id, h, l, rule);
}

SequenceSlice sequence_slice(const CcgSlice& s) {
  SequenceSlice out;
  out.statements.reserve(s.vertices.size());
  for (const SliceVertex& v : s.vertices) out.statements.push_back(v.stmt);
  std::sort(out.statements.begin(), out.statements.end(),
            [](const Statement& a, const Statement& b) {
              if (a.line_start != b.line_start) return a.line_start < b.line_start;
              return a.id < b.id;
            });
  out.token_bag = collect_token_bag(out.statements);
  return out;
}

CcgSlice query_ccg(std::string_view context_text, Language lang, int h, int l, DepHopRule rule) {
  CodeContextGraph graph;
  try {
    graph = build_ccg("<context>", context_text, lang);
  } catch (const ParseFailure&) {
    throw EmptyContext("no statement could be extracted from the completion context");
  }
  if (graph.vertices.empty()) {
    throw EmptyContext("no statement could be extracted from the completion context");
  }

  // Dummy vertex for the statement to predict, control-flowing out of the
  // last context statement.
  const int last_id = static_cast<int>(graph.vertices.size()) - 1;
  Statement dummy;
  dummy.id = last_id + 1;
  dummy.file_path = graph.vertices.back().file_path;
  dummy.kind = StatementKind::dummy;
  dummy.line_start = dummy.line_end = graph.vertices[static_cast<size_t>(last_id)].line_end + 1;
  graph.vertices.push_back(std::move(dummy));
  graph.edges.push_back(Edge{last_id, EdgeType::CF, last_id + 1});
  sort_and_dedup_edges(graph.edges);

  return slice(graph, last_id + 1, h, l, rule);
}

}  // namespace ccgrag
