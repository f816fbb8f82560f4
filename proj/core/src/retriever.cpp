#include "ccgrag/retriever.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <nlohmann/json.hpp>

#include "ccgrag/errors.hpp"

namespace ccgrag {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

// Substitution cost c(v, u) = 1 - sim(v, u); pairing the dummy costs 0.
double vertex_cost(const SliceVertex& v, const SliceVertex& u) {
  if (v.stmt.kind == StatementKind::dummy || u.stmt.kind == StatementKind::dummy) return 0.0;
  return 1.0 - jaccard(collect_token_bag({&v.stmt, 1}), collect_token_bag({&u.stmt, 1}));
}

}  // namespace

double jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  if (a.empty() && b.empty()) return 0.0;
  size_t i = 0, j = 0, both = 0;
  while (i < a.size() && j < b.size()) {
    const int cmp = a[i].compare(b[j]);
    if (cmp == 0) {
      ++both;
      ++i;
      ++j;
    } else if (cmp < 0) {
      ++i;
    } else {
      ++j;
    }
  }
  const size_t unions = a.size() + b.size() - both;
  return unions == 0 ? 0.0 : static_cast<double>(both) / static_cast<double>(unions);
}

std::vector<Candidate> coarse_retrieve(const Database& db, const CcgSlice& query, int k,
                                       const ExclusionFilter* exclude, RetrievalStats* stats) {
  if (db.entries.empty()) throw EmptyDatabase("retrieval database holds no entries");
  const auto start = Clock::now();

  const std::vector<std::string> query_bag = sequence_slice(query).token_bag;
  std::vector<Candidate> scored;
  scored.reserve(db.entries.size());
  for (const IndexEntry& e : db.entries) {
    if (exclude != nullptr && exclude->excludes(e)) continue;
    Candidate c;
    c.entry = &e;
    c.coarse_score = jaccard(query_bag, e.key_sequence.token_bag);
    scored.push_back(c);
  }
  if (stats != nullptr) stats->coarse_scored += static_cast<std::int64_t>(scored.size());

  auto better = [](const Candidate& a, const Candidate& b) {
    if (a.coarse_score != b.coarse_score) return a.coarse_score > b.coarse_score;
    if (a.entry->file_path != b.entry->file_path) return a.entry->file_path < b.entry->file_path;
    if (a.entry->anchor_line != b.entry->anchor_line) {
      return a.entry->anchor_line < b.entry->anchor_line;
    }
    return a.entry < b.entry;  // same-line anchors: database order
  };
  const size_t keep = std::min<size_t>(static_cast<size_t>(std::max(k, 0)), scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep),
                    scored.end(), better);
  scored.resize(keep);
  for (size_t i = 0; i < scored.size(); ++i) scored[i].rank = static_cast<int>(i) + 1;

  if (stats != nullptr) stats->coarse_ms += ms_since(start);
  return scored;
}

const int* Alignment::mapped(int query_id) const {
  for (const auto& [q, c] : pairs) {
    if (q == query_id) return &c;
  }
  return nullptr;
}

Alignment greedy_align(const CcgSlice& query, const CcgSlice& cand) {
  // Fixed iteration order: dummy first, then hop ascending, line ascending.
  std::vector<const SliceVertex*> order;
  order.reserve(query.vertices.size());
  for (const SliceVertex& v : query.vertices) order.push_back(&v);
  std::stable_sort(order.begin(), order.end(), [](const SliceVertex* a, const SliceVertex* b) {
    const bool da = a->stmt.kind == StatementKind::dummy;
    const bool db = b->stmt.kind == StatementKind::dummy;
    if (da != db) return da;
    if (a->hop != b->hop) return a->hop < b->hop;
    if (a->stmt.line_start != b->stmt.line_start) return a->stmt.line_start < b->stmt.line_start;
    return a->stmt.id < b->stmt.id;
  });

  std::vector<char> taken(cand.vertices.size(), 0);
  Alignment out;
  for (const SliceVertex* v : order) {
    int best_idx = -1;
    double best_cost = std::numeric_limits<double>::infinity();
    if (v->stmt.kind == StatementKind::dummy) {
      // The dummy stands for the statement to predict; it pairs with the
      // candidate's anchor for free.
      for (size_t i = 0; i < cand.vertices.size(); ++i) {
        if (cand.vertices[i].stmt.id == cand.anchor_id && !taken[i]) {
          best_idx = static_cast<int>(i);
          best_cost = 0.0;
          break;
        }
      }
    }
    if (best_idx < 0) {
      for (size_t i = 0; i < cand.vertices.size(); ++i) {
        if (taken[i]) continue;
        const SliceVertex& u = cand.vertices[i];
        const double cost = vertex_cost(*v, u);
        bool wins = cost < best_cost;
        if (!wins && cost == best_cost && best_idx >= 0) {
          // Deterministic tie-break: nearest hop, nearest line, smallest id.
          const SliceVertex& cur = cand.vertices[static_cast<size_t>(best_idx)];
          const auto key = [&](const SliceVertex& c) {
            return std::tuple(std::abs(c.hop - v->hop),
                              std::abs(c.stmt.line_start - v->stmt.line_start), c.stmt.id);
          };
          wins = key(u) < key(cur);
        }
        if (wins) {
          best_cost = cost;
          best_idx = static_cast<int>(i);
        }
      }
    }
    if (best_idx >= 0 && best_cost < 1.0) {
      taken[static_cast<size_t>(best_idx)] = 1;
      out.pairs.emplace_back(v->stmt.id, cand.vertices[static_cast<size_t>(best_idx)].stmt.id);
    } else {
      out.unmatched_query.push_back(v->stmt.id);
    }
  }
  std::sort(out.pairs.begin(), out.pairs.end());
  std::sort(out.unmatched_query.begin(), out.unmatched_query.end());
  return out;
}

double decay_sed(const CcgSlice& query, const CcgSlice& cand, const Alignment& alignment,
                 double gamma) {
  if (!(gamma > 0.0) || gamma > 1.0) {
    throw InvalidGamma("gamma must be in (0, 1], got " + std::to_string(gamma));
  }

  auto hop_weight = [&](int id) {
    const SliceVertex* v = query.find(id);
    return std::pow(gamma, v != nullptr ? v->hop : 0);
  };

  double sed = 0.0;
  // Matched vertices: substitution cost, decayed.
  for (const auto& [qid, cid] : alignment.pairs) {
    const SliceVertex* v = query.find(qid);
    const SliceVertex* u = cand.find(cid);
    if (v == nullptr || u == nullptr) continue;
    sed += hop_weight(qid) * vertex_cost(*v, *u);
  }
  // Unmatched query vertices: deletion cost 1.
  for (int qid : alignment.unmatched_query) {
    sed += hop_weight(qid) * 1.0;
  }
  // Query edges: substitution when the aligned endpoints are connected in
  // the candidate (direction preserved), deletion otherwise. Parallel
  // candidate edges substitute at the cheapest type cost.
  for (const Edge& e : query.edges) {
    const double weight = hop_weight(e.src);
    const int* ms = alignment.mapped(e.src);
    const int* md = alignment.mapped(e.dst);
    bool in_ea = false;
    double subst = 1.0;
    if (ms != nullptr && md != nullptr) {
      for (const Edge& ce : cand.edges) {
        if (ce.src == *ms && ce.dst == *md) {
          in_ea = true;
          subst = std::min(subst, ce.type == e.type ? 0.0 : 1.0);
        }
      }
    }
    sed += weight * (in_ea ? subst : 1.0);
  }
  return sed;
}

std::vector<Candidate> rerank(std::vector<Candidate> candidates, const CcgSlice& query,
                              double gamma, int top_m, RetrievalStats* stats) {
  const auto start = Clock::now();
  for (Candidate& c : candidates) {
    const Alignment a = greedy_align(query, c.entry->key);
    c.fine_cost = decay_sed(query, c.entry->key, a, gamma);
  }
  if (stats != nullptr) stats->fine_scored += static_cast<std::int64_t>(candidates.size());

  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (*a.fine_cost != *b.fine_cost) return *a.fine_cost < *b.fine_cost;
    if (a.coarse_score != b.coarse_score) return a.coarse_score > b.coarse_score;
    if (a.entry->file_path != b.entry->file_path) return a.entry->file_path < b.entry->file_path;
    if (a.entry->anchor_line != b.entry->anchor_line) {
      return a.entry->anchor_line < b.entry->anchor_line;
    }
    return a.entry < b.entry;
  });
  if (top_m >= 0 && candidates.size() > static_cast<size_t>(top_m)) {
    candidates.resize(static_cast<size_t>(top_m));
  }
  for (size_t i = 0; i < candidates.size(); ++i) candidates[i].rank = static_cast<int>(i) + 1;
  if (stats != nullptr) stats->fine_ms += ms_since(start);
  return candidates;
}

std::string candidates_to_json(const std::vector<Candidate>& candidates) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const Candidate& c : candidates) {
    nlohmann::ordered_json j;
    j["file_path"] = c.entry->file_path;
    j["anchor_line"] = c.entry->anchor_line;
    j["snippet"] = c.entry->value;
    j["coarse_score"] = c.coarse_score;
    if (c.fine_cost.has_value()) {
      j["fine_cost"] = *c.fine_cost;
    } else {
      j["fine_cost"] = nullptr;
    }
    j["rank"] = c.rank;
    arr.push_back(std::move(j));
  }
  return arr.dump();
}

}  // namespace ccgrag
