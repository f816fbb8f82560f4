#pragma once

// Internal JSON helpers shared between json_io.cpp and index_store.cpp.

#include <nlohmann/json.hpp>

#include "ccgrag/slicer.hpp"
#include "ccgrag/types.hpp"

namespace ccgrag::jio {

nlohmann::ordered_json statement_to_json(const Statement& s);
Statement statement_from_json(const nlohmann::json& j);
nlohmann::ordered_json edge_to_json(const Edge& e);
Edge edge_from_json(const nlohmann::json& j);
nlohmann::ordered_json slice_to_json_obj(const CcgSlice& s);
CcgSlice slice_from_json_obj(const nlohmann::json& j);

}  // namespace ccgrag::jio
