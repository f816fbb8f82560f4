#pragma once

#include <random>
#include <string>
#include <vector>

#include "ccgrag/index_store.hpp"
#include "ccgrag/slicer.hpp"
#include "ccgrag/types.hpp"

namespace ccgrag::testing {

using Rng = std::mt19937_64;

// Synthetic CCG: a control-flow backbone (chains with random branch/merge
// and back edges) plus random DD/CD edges. Vertex tokens come from a small
// vocabulary; lines are unique and ascending.
CodeContextGraph random_ccg(Rng& rng, int max_vertices);

// Synthetic slice: anchor at hop 0 (optionally a dummy), other vertices at
// random hops <= h, unique lines, random typed edges.
CcgSlice random_slice(Rng& rng, int max_vertices, bool dummy_anchor);

// Database of synthetic entries with random token bags; key slices are
// fully populated so fine re-ranking is exercisable.
Database random_database(Rng& rng, int entries);

std::vector<std::string> random_token_bag(Rng& rng);

}  // namespace ccgrag::testing
