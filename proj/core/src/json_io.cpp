#include "ccgrag/json_io.hpp"

#include <nlohmann/json.hpp>

#include "ccgrag/errors.hpp"
#include "json_io_detail.hpp"

namespace ccgrag {

using nlohmann::json;
using nlohmann::ordered_json;

namespace jio {

ordered_json statement_to_json(const Statement& s) {
  ordered_json j;
  j["id"] = s.id;
  j["file_path"] = s.file_path;
  j["line_start"] = s.line_start;
  j["line_end"] = s.line_end;
  j["text"] = s.text;
  j["kind"] = to_string(s.kind);
  j["tokens"] = s.tokens;
  j["defs"] = s.defs;
  j["uses"] = s.uses;
  return j;
}

Statement statement_from_json(const json& j) {
  Statement s;
  s.id = j.at("id").get<int>();
  s.file_path = j.at("file_path").get<std::string>();
  s.line_start = j.at("line_start").get<int>();
  s.line_end = j.at("line_end").get<int>();
  s.text = j.at("text").get<std::string>();
  s.kind = statement_kind_from_string(j.at("kind").get<std::string>());
  s.tokens = j.at("tokens").get<std::vector<std::string>>();
  s.defs = j.at("defs").get<std::set<std::string>>();
  s.uses = j.at("uses").get<std::set<std::string>>();
  return s;
}

ordered_json edge_to_json(const Edge& e) {
  return ordered_json::array({e.src, to_string(e.type), e.dst});
}

Edge edge_from_json(const json& j) {
  return Edge{j.at(0).get<int>(), edge_type_from_string(j.at(1).get<std::string>()),
              j.at(2).get<int>()};
}

ordered_json slice_to_json_obj(const CcgSlice& s) {
  ordered_json j;
  j["anchor_id"] = s.anchor_id;
  j["h"] = s.h;
  j["l"] = s.l;
  ordered_json verts = ordered_json::array();
  for (const SliceVertex& v : s.vertices) {
    ordered_json jv = statement_to_json(v.stmt);
    jv["hop"] = v.hop;
    ordered_json prov = ordered_json::array();
    if (v.via_cf) prov.push_back("CF");
    if (v.via_dd) prov.push_back("DD");
    if (v.via_cd) prov.push_back("CD");
    jv["sets"] = prov;
    verts.push_back(std::move(jv));
  }
  j["vertices"] = std::move(verts);
  ordered_json edges = ordered_json::array();
  for (const Edge& e : s.edges) edges.push_back(edge_to_json(e));
  j["edges"] = std::move(edges);
  return j;
}

CcgSlice slice_from_json_obj(const json& j) {
  CcgSlice s;
  s.anchor_id = j.at("anchor_id").get<int>();
  s.h = j.at("h").get<int>();
  s.l = j.at("l").get<int>();
  for (const json& jv : j.at("vertices")) {
    SliceVertex v;
    v.stmt = statement_from_json(jv);
    v.hop = jv.at("hop").get<int>();
    for (const json& p : jv.at("sets")) {
      const std::string name = p.get<std::string>();
      v.via_cf |= name == "CF";
      v.via_dd |= name == "DD";
      v.via_cd |= name == "CD";
    }
    s.vertices.push_back(std::move(v));
  }
  for (const json& je : j.at("edges")) s.edges.push_back(edge_from_json(je));
  return s;
}

}  // namespace jio

std::string graph_to_json(const CodeContextGraph& graph, bool pretty) {
  ordered_json j;
  j["language"] = to_string(graph.language);
  ordered_json verts = ordered_json::array();
  for (const Statement& s : graph.vertices) verts.push_back(jio::statement_to_json(s));
  j["vertices"] = std::move(verts);
  ordered_json edges = ordered_json::array();
  for (const Edge& e : graph.edges) edges.push_back(jio::edge_to_json(e));
  j["edges"] = std::move(edges);
  return pretty ? j.dump(2) : j.dump();
}

CodeContextGraph graph_from_json(std::string_view text) {
  json j = json::parse(text);
  CodeContextGraph g;
  g.language = language_from_string(j.at("language").get<std::string>());
  for (const json& jv : j.at("vertices")) g.vertices.push_back(jio::statement_from_json(jv));
  for (const json& je : j.at("edges")) g.edges.push_back(jio::edge_from_json(je));
  return g;
}

std::string slice_to_json(const CcgSlice& s) { return jio::slice_to_json_obj(s).dump(); }

CcgSlice slice_from_json(std::string_view text) {
  return jio::slice_from_json_obj(json::parse(text));
}

}  // namespace ccgrag
