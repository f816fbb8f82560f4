#pragma once

// Internal bridge between the tree-sitter adapters and the CFG wiring.
// Each language adapter lowers the syntax tree to a vector of Statements
// plus a construct tree of StmtNodes referencing them by id.

#include <string>
#include <string_view>
#include <vector>

#include "ccgrag/types.hpp"

namespace ccgrag::detail {

enum class Construct {
  simple,
  if_branch,       // body = then arm, orelse = else arm (elif chains nest here)
  loop_pretest,    // while / for / enhanced for; orelse = python loop-else
  loop_posttest,   // java do-while; stmt_id is the trailing condition vertex
  try_block,       // body, handlers (except/catch), orelse (try-else), finally_body
  with_block,      // python with / java synchronized; header + body
  func_def,        // def / method / constructor / initializer; body is a new scope
  class_def,       // class header; body statements stay in the enclosing scope
  switch_dispatch, // java switch / python match; handlers are the case arms
  jump_break,
  jump_continue,
  jump_return,
  jump_raise,      // python raise / java throw
};

struct StmtNode {
  int stmt_id = -1;  // -1 only for headerless containers (try blocks, do-while shells)
  Construct kind = Construct::simple;
  std::vector<StmtNode> body;
  std::vector<StmtNode> orelse;
  struct Guarded {
    int header_id = -1;  // -1 for an arm with no header vertex
    bool is_default = false;
    std::vector<StmtNode> body;
  };
  std::vector<Guarded> handlers;
  std::vector<StmtNode> finally_body;
  bool fallthrough_cases = false;  // java classic switch groups
  bool captures_break = false;     // java switch: break binds here, not the loop
};

struct SourceStructure {
  std::vector<StmtNode> roots;
  std::vector<std::string> callables;  // function/method names defined here
};

struct AdapterResult {
  std::vector<Statement> statements;
  std::vector<StmtNode> roots;
  std::vector<std::string> callables;
};

AdapterResult parse_python_source(const std::string& file_path, std::string_view source);
AdapterResult parse_java_source(const std::string& file_path, std::string_view source);

}  // namespace ccgrag::detail
