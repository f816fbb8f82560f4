#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ccgrag/index_store.hpp"
#include "ccgrag/slicer.hpp"

namespace ccgrag {

/// Jaccard index of two sorted-unique token bags. Empty-vs-empty is 0; the
/// dummy-vs-anything case is handled by the vertex cost, not here.
double jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b);

struct Candidate {
  const IndexEntry* entry = nullptr;
  double coarse_score = 0.0;
  std::optional<double> fine_cost;
  int rank = 0;
};

struct RetrievalStats {
  std::int64_t coarse_scored = 0;
  std::int64_t fine_scored = 0;
  double coarse_ms = 0.0;
  double fine_ms = 0.0;
};

/// Top-k entries by token-bag Jaccard against the query's sequence slice.
/// Ties break by (file_path, anchor_line) ascending.
std::vector<Candidate> coarse_retrieve(const Database& db, const CcgSlice& query, int k,
                                       const ExclusionFilter* exclude = nullptr,
                                       RetrievalStats* stats = nullptr);

/// Injective partial map from query vertices to candidate vertices.
struct Alignment {
  std::vector<std::pair<int, int>> pairs;  // (query id, candidate id)
  std::vector<int> unmatched_query;

  // Candidate id for a query vertex, or nullptr.
  const int* mapped(int query_id) const;
};

/// Greedy assignment: query vertices in (hop asc, line asc) order each take
/// the unmatched candidate vertex of minimum substitution cost; the dummy
/// goes first and takes the candidate's anchor at cost 0. A vertex whose
/// best available cost is >= 1 stays unmatched.
Alignment greedy_align(const CcgSlice& query, const CcgSlice& cand);

/// Decay-with-distance subgraph edit distance under a fixed alignment: each
/// vertex/edge edit cost is weighted by gamma^hop of the (source) vertex.
double decay_sed(const CcgSlice& query, const CcgSlice& cand, const Alignment& alignment,
                 double gamma);

/// Re-ranks coarse candidates by decay-SED ascending, keeping top_m.
std::vector<Candidate> rerank(std::vector<Candidate> candidates, const CcgSlice& query,
                              double gamma, int top_m, RetrievalStats* stats = nullptr);

/// Serializes ranked results: array of {file_path, anchor_line, snippet,
/// coarse_score, fine_cost, rank}.
std::string candidates_to_json(const std::vector<Candidate>& candidates);

}  // namespace ccgrag
