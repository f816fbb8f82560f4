#pragma once

#include <string>
#include <string_view>

#include "ccgrag/slicer.hpp"
#include "ccgrag/types.hpp"

namespace ccgrag {

// One JSON document per file: {"language", "vertices": [...], "edges":
// [[src, type, dst], ...]} with statement fields spelled exactly as in the
// Statement struct.
std::string graph_to_json(const CodeContextGraph& graph, bool pretty = false);
CodeContextGraph graph_from_json(std::string_view text);

std::string slice_to_json(const CcgSlice& s);
CcgSlice slice_from_json(std::string_view text);

}  // namespace ccgrag
