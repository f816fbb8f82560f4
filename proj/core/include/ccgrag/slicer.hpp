#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "ccgrag/ccg_builder.hpp"
#include "ccgrag/types.hpp"

namespace ccgrag {

struct SliceVertex {
  Statement stmt;
  int hop = 0;
  // Which slicing sets the vertex landed in (a vertex may be in several).
  bool via_cf = false;
  bool via_dd = false;
  bool via_cd = false;

  bool operator==(const SliceVertex&) const = default;
};

/// Induced subgraph around an anchor: the anchor's backward control-flow
/// neighborhood within h hops plus one-step DD/CD in-neighbors, capped at
/// roughly l vertices (the final batch may overshoot).
struct CcgSlice {
  int anchor_id = -1;
  std::vector<SliceVertex> vertices;  // ascending statement id
  std::vector<Edge> edges;            // induced edge set, sorted
  int h = 0;
  int l = 0;

  const SliceVertex* find(int id) const;
  bool contains(int id) const { return find(id) != nullptr; }

  bool operator==(const CcgSlice&) const = default;
};

// Hop assigned to DD/CD in-neighbors discovered while processing a vertex at
// hop d: the attachment hop d itself, or d+1.
enum class DepHopRule { attach, attach_plus_one };

CcgSlice slice(const CodeContextGraph& graph, int anchor_id, int h, int l,
               DepHopRule rule = DepHopRule::attach);

// Index-reusing overload for callers slicing one graph many times.
CcgSlice slice(const CodeContextGraph& graph, const InEdgeIndex& index, int anchor_id, int h,
               int l, DepHopRule rule = DepHopRule::attach);

/// Slice statements flattened in line order; the coarse retrieval view.
struct SequenceSlice {
  std::vector<Statement> statements;
  std::vector<std::string> token_bag;  // sorted unique

  bool operator==(const SequenceSlice&) const = default;
};

SequenceSlice sequence_slice(const CcgSlice& s);

/// Builds the query slice for a completion context: parses the context,
/// appends a dummy vertex for the statement to predict, links it after the
/// last context statement and slices from it.
CcgSlice query_ccg(std::string_view context_text, Language lang, int h, int l,
                   DepHopRule rule = DepHopRule::attach);

}  // namespace ccgrag
