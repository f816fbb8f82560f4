// Lowers tree-sitter python trees to Statements + construct structure.
// Statement granularity: compound headers are one vertex each, `else`,
// `try` and `finally` keyword lines contribute no vertex.

#include <string>
#include <string_view>
#include <vector>

#include "adapter.hpp"
#include "ts_util.hpp"

namespace ccgrag::detail {
namespace {

class PyWalker {
 public:
  PyWalker(const std::string& file_path, std::string_view src)
      : b_(file_path, src, Language::python) {}

  AdapterResult run(TSNode root) {
    AdapterResult result;
    walk_block(root, result.roots);
    result.statements = b_.take();
    result.callables = std::move(callables_);
    return result;
  }

 private:
  StatementBuilder b_;
  std::vector<std::string> callables_;

  // ---- defs / uses ------------------------------------------------------

  void use(TSNode id_node, Statement& st) { st.uses.insert(std::string(node_text(id_node, b_.source()))); }
  void def(TSNode id_node, Statement& st) { st.defs.insert(std::string(node_text(id_node, b_.source()))); }

  void collect_children(TSNode n, Statement& st, bool target) {
    const uint32_t count = ts_node_named_child_count(n);
    for (uint32_t i = 0; i < count; ++i) collect(ts_node_named_child(n, i), st, target);
  }

  // target=true when the node sits in an assignment-target position.
  void collect(TSNode n, Statement& st, bool target) {
    if (ts_node_is_null(n) || is_comment_node(n)) return;
    const char* k = ts_node_type(n);
    auto is = [&](const char* kind) { return std::strcmp(k, kind) == 0; };

    if (is("identifier")) {
      target ? def(n, st) : use(n, st);
      return;
    }
    if (is("attribute")) {
      // a.b defines/uses the base name only.
      collect(field(n, "object"), st, target);
      return;
    }
    if (is("subscript")) {
      collect(field(n, "value"), st, target);
      const uint32_t count = ts_node_named_child_count(n);
      for (uint32_t i = 1; i < count; ++i) collect(ts_node_named_child(n, i), st, false);
      return;
    }
    if (is("call")) {
      TSNode fn = field(n, "function");
      if (!ts_node_is_null(fn) && node_is(fn, "identifier")) {
        use(fn, st);
      } else {
        collect(fn, st, false);
      }
      collect(field(n, "arguments"), st, false);
      return;
    }
    if (is("assignment")) {
      collect(field(n, "left"), st, true);
      TSNode right = field(n, "right");
      if (!ts_node_is_null(right)) collect(right, st, false);
      TSNode type = field(n, "type");
      if (!ts_node_is_null(type)) collect(type, st, false);
      return;
    }
    if (is("augmented_assignment")) {
      collect(field(n, "left"), st, true);
      collect(field(n, "left"), st, false);
      collect(field(n, "right"), st, false);
      return;
    }
    if (is("named_expression")) {  // walrus
      collect(field(n, "name"), st, true);
      collect(field(n, "value"), st, false);
      return;
    }
    if (is("pattern_list") || is("tuple_pattern") || is("list_pattern") || is("tuple") ||
        is("list") || is("expression_list") || is("parenthesized_expression") ||
        is("list_splat_pattern") || is("list_splat") || is("dictionary_splat_pattern")) {
      collect_children(n, st, target);
      return;
    }
    if (is("keyword_argument")) {
      collect(field(n, "value"), st, false);
      return;
    }
    if (is("lambda")) {
      // Lambda parameters are local; only the body contributes reads.
      TSNode body = field(n, "body");
      if (!ts_node_is_null(body)) collect(body, st, false);
      return;
    }
    if (is("list_comprehension") || is("set_comprehension") || is("dictionary_comprehension") ||
        is("generator_expression")) {
      const uint32_t count = ts_node_named_child_count(n);
      for (uint32_t i = 0; i < count; ++i) {
        TSNode c = ts_node_named_child(n, i);
        if (node_is(c, "for_in_clause")) {
          collect(field(c, "right"), st, false);  // comprehension vars stay local
        } else {
          collect(c, st, false);
        }
      }
      return;
    }
    if (is("string")) {  // f-string interpolations hold real reads
      const uint32_t count = ts_node_named_child_count(n);
      for (uint32_t i = 0; i < count; ++i) {
        TSNode c = ts_node_named_child(n, i);
        if (node_is(c, "interpolation")) collect_children(c, st, false);
      }
      return;
    }
    collect_children(n, st, false);
  }

  void collect_parameters(TSNode params, Statement& st) {
    if (ts_node_is_null(params)) return;
    const uint32_t count = ts_node_named_child_count(params);
    for (uint32_t i = 0; i < count; ++i) {
      TSNode p = ts_node_named_child(params, i);
      const char* k = ts_node_type(p);
      if (std::strcmp(k, "identifier") == 0) {
        def(p, st);
      } else if (std::strcmp(k, "default_parameter") == 0 ||
                 std::strcmp(k, "typed_default_parameter") == 0) {
        TSNode name = field(p, "name");
        if (!ts_node_is_null(name)) collect(name, st, true);
        TSNode value = field(p, "value");
        if (!ts_node_is_null(value)) collect(value, st, false);
        TSNode type = field(p, "type");
        if (!ts_node_is_null(type)) collect(type, st, false);
      } else if (std::strcmp(k, "typed_parameter") == 0) {
        if (ts_node_named_child_count(p) > 0) collect(ts_node_named_child(p, 0), st, true);
        TSNode type = field(p, "type");
        if (!ts_node_is_null(type)) collect(type, st, false);
      } else if (std::strcmp(k, "list_splat_pattern") == 0 ||
                 std::strcmp(k, "dictionary_splat_pattern") == 0) {
        collect_children(p, st, true);
      }
    }
  }

  // Pattern identifiers are captures (defs); dotted class names are reads.
  void collect_case_pattern(TSNode n, Statement& st) {
    const char* k = ts_node_type(n);
    if (std::strcmp(k, "identifier") == 0) {
      if (node_text(n, b_.source()) != "_") def(n, st);
      return;
    }
    if (std::strcmp(k, "dotted_name") == 0) {
      if (ts_node_named_child_count(n) > 0) use(ts_node_named_child(n, 0), st);
      return;
    }
    if (std::strcmp(k, "keyword_pattern") == 0) {
      const uint32_t count = ts_node_named_child_count(n);
      if (count > 1) collect_case_pattern(ts_node_named_child(n, 1), st);
      return;
    }
    const uint32_t count = ts_node_named_child_count(n);
    for (uint32_t i = 0; i < count; ++i) collect_case_pattern(ts_node_named_child(n, i), st);
  }

  // ---- statement walk ---------------------------------------------------

  uint32_t body_start(TSNode node, const char* field_name) {
    TSNode body = field(node, field_name);
    return ts_node_is_null(body) ? ts_node_end_byte(node) : ts_node_start_byte(body);
  }

  void walk_block(TSNode node, std::vector<StmtNode>& out) {
    const uint32_t count = ts_node_named_child_count(node);
    for (uint32_t i = 0; i < count; ++i) walk_stmt(ts_node_named_child(node, i), out);
  }

  void append_simple(TSNode node, std::vector<StmtNode>& out, Construct kind,
                     StatementKind stkind = StatementKind::simple) {
    const int id = b_.emit(node, stkind);
    if (id < 0) return;
    collect(node, b_.at(id), false);
    out.push_back(StmtNode{.stmt_id = id, .kind = kind});
  }

  void walk_stmt(TSNode node, std::vector<StmtNode>& out) {
    const char* k = ts_node_type(node);
    auto is = [&](const char* kind) { return std::strcmp(k, kind) == 0; };

    if (is_comment_node(node)) return;

    if (is("if_statement")) {
      walk_if(node, field(node, "condition"), field(node, "consequence"), 1, out);
      return;
    }
    if (is("while_statement")) {
      const int id = b_.emit(node, ts_node_start_byte(node), body_start(node, "body"),
                             StatementKind::predicate);
      StmtNode sn{.stmt_id = id, .kind = Construct::loop_pretest};
      collect(field(node, "condition"), b_.at(id), false);
      walk_block(field(node, "body"), sn.body);
      TSNode alt = field(node, "alternative");
      if (!ts_node_is_null(alt)) walk_block(field(alt, "body"), sn.orelse);
      out.push_back(std::move(sn));
      return;
    }
    if (is("for_statement")) {
      const int id = b_.emit(node, ts_node_start_byte(node), body_start(node, "body"),
                             StatementKind::predicate);
      StmtNode sn{.stmt_id = id, .kind = Construct::loop_pretest};
      collect(field(node, "left"), b_.at(id), true);
      collect(field(node, "right"), b_.at(id), false);
      walk_block(field(node, "body"), sn.body);
      TSNode alt = field(node, "alternative");
      if (!ts_node_is_null(alt)) walk_block(field(alt, "body"), sn.orelse);
      out.push_back(std::move(sn));
      return;
    }
    if (is("try_statement")) {
      StmtNode sn{.stmt_id = -1, .kind = Construct::try_block};
      walk_block(field(node, "body"), sn.body);
      const uint32_t count = ts_node_named_child_count(node);
      for (uint32_t i = 0; i < count; ++i) {
        TSNode c = ts_node_named_child(node, i);
        if (node_is(c, "except_clause") || node_is(c, "except_group_clause")) {
          TSNode handler_block{};
          const uint32_t cc = ts_node_named_child_count(c);
          for (uint32_t j = 0; j < cc; ++j) {
            TSNode hc = ts_node_named_child(c, j);
            if (node_is(hc, "block")) handler_block = hc;
          }
          const uint32_t head_end =
              ts_node_is_null(handler_block) ? ts_node_end_byte(c) : ts_node_start_byte(handler_block);
          const int hid = b_.emit(c, ts_node_start_byte(c), head_end, StatementKind::predicate);
          StmtNode::Guarded g{.header_id = hid};
          if (hid >= 0) {
            for (uint32_t j = 0; j < cc; ++j) {
              TSNode hc = ts_node_named_child(c, j);
              if (node_is(hc, "block")) continue;
              if (node_is(hc, "as_pattern")) {
                collect(ts_node_named_child(hc, 0), b_.at(hid), false);
                TSNode alias = field(hc, "alias");
                if (!ts_node_is_null(alias)) collect_children(alias, b_.at(hid), true);
              } else {
                collect(hc, b_.at(hid), false);
              }
            }
          }
          if (!ts_node_is_null(handler_block)) walk_block(handler_block, g.body);
          sn.handlers.push_back(std::move(g));
        } else if (node_is(c, "else_clause")) {
          walk_block(field(c, "body"), sn.orelse);
        } else if (node_is(c, "finally_clause")) {
          for (uint32_t j = 0; j < ts_node_named_child_count(c); ++j) {
            TSNode fc = ts_node_named_child(c, j);
            if (node_is(fc, "block")) walk_block(fc, sn.finally_body);
          }
        }
      }
      out.push_back(std::move(sn));
      return;
    }
    if (is("with_statement")) {
      const int id = b_.emit(node, ts_node_start_byte(node), body_start(node, "body"),
                             StatementKind::simple);
      StmtNode sn{.stmt_id = id, .kind = Construct::with_block};
      const uint32_t count = ts_node_child_count(node);
      for (uint32_t i = 0; i < count; ++i) {
        TSNode c = ts_node_child(node, i);
        if (!node_is(c, "with_clause")) continue;
        for (uint32_t j = 0; j < ts_node_named_child_count(c); ++j) {
          TSNode item = field(ts_node_named_child(c, j), "value");
          if (ts_node_is_null(item)) continue;
          if (node_is(item, "as_pattern")) {
            collect(ts_node_named_child(item, 0), b_.at(id), false);
            TSNode alias = field(item, "alias");
            if (!ts_node_is_null(alias)) collect_children(alias, b_.at(id), true);
          } else {
            collect(item, b_.at(id), false);
          }
        }
      }
      walk_block(field(node, "body"), sn.body);
      out.push_back(std::move(sn));
      return;
    }
    if (is("function_definition")) {
      walk_function(node, node, out);
      return;
    }
    if (is("class_definition")) {
      const int id = b_.emit(node, ts_node_start_byte(node), body_start(node, "body"),
                             StatementKind::simple);
      StmtNode sn{.stmt_id = id, .kind = Construct::class_def};
      collect(field(node, "name"), b_.at(id), true);
      TSNode supers = field(node, "superclasses");
      if (!ts_node_is_null(supers)) collect(supers, b_.at(id), false);
      walk_block(field(node, "body"), sn.body);
      out.push_back(std::move(sn));
      return;
    }
    if (is("decorated_definition")) {
      TSNode def_node = field(node, "definition");
      if (ts_node_is_null(def_node)) return;
      const size_t before = out.size();
      walk_stmt(def_node, out);
      if (out.size() == before) return;
      // Decorator names/args read at definition time.
      const int id = out.back().stmt_id;
      if (id >= 0) {
        for (uint32_t i = 0; i < ts_node_named_child_count(node); ++i) {
          TSNode c = ts_node_named_child(node, i);
          if (node_is(c, "decorator")) collect_children(c, b_.at(id), false);
        }
      }
      return;
    }
    if (is("match_statement")) {
      const int id = b_.emit(node, ts_node_start_byte(node), body_start(node, "body"),
                             StatementKind::predicate);
      StmtNode sn{.stmt_id = id, .kind = Construct::switch_dispatch};
      collect(field(node, "subject"), b_.at(id), false);
      TSNode body = field(node, "body");
      for (uint32_t i = 0; i < ts_node_named_child_count(body); ++i) {
        TSNode c = ts_node_named_child(body, i);
        if (!node_is(c, "case_clause")) continue;
        TSNode consequence = field(c, "consequence");
        const uint32_t head_end =
            ts_node_is_null(consequence) ? ts_node_end_byte(c) : ts_node_start_byte(consequence);
        const int hid = b_.emit(c, ts_node_start_byte(c), head_end, StatementKind::predicate);
        StmtNode::Guarded g{.header_id = hid};
        if (hid >= 0) {
          for (uint32_t j = 0; j < ts_node_named_child_count(c); ++j) {
            TSNode cc = ts_node_named_child(c, j);
            if (node_is(cc, "case_pattern")) collect_case_pattern(cc, b_.at(hid));
          }
          TSNode guard = field(c, "guard");
          if (!ts_node_is_null(guard)) collect(guard, b_.at(hid), false);
        }
        if (!ts_node_is_null(consequence)) walk_block(consequence, g.body);
        sn.handlers.push_back(std::move(g));
      }
      out.push_back(std::move(sn));
      return;
    }
    if (is("return_statement")) {
      append_simple(node, out, Construct::jump_return);
      return;
    }
    if (is("raise_statement")) {
      append_simple(node, out, Construct::jump_raise);
      return;
    }
    if (is("break_statement")) {
      append_simple(node, out, Construct::jump_break);
      return;
    }
    if (is("continue_statement")) {
      append_simple(node, out, Construct::jump_continue);
      return;
    }
    if (is("import_statement") || is("import_from_statement") || is("future_import_statement")) {
      const int id = b_.emit(node, StatementKind::simple);
      if (id < 0) return;
      collect_import(node, b_.at(id));
      out.push_back(StmtNode{.stmt_id = id, .kind = Construct::simple});
      return;
    }
    if (is("global_statement") || is("nonlocal_statement") || is("pass_statement")) {
      const int id = b_.emit(node, StatementKind::simple);
      if (id >= 0) out.push_back(StmtNode{.stmt_id = id, .kind = Construct::simple});
      return;
    }
    if (is("delete_statement")) {
      const int id = b_.emit(node, StatementKind::simple);
      if (id < 0) return;
      collect(node, b_.at(id), false);
      for (const auto& name : b_.at(id).uses) b_.at(id).defs.insert(name);
      out.push_back(StmtNode{.stmt_id = id, .kind = Construct::simple});
      return;
    }
    if (is("expression_statement") || is("assert_statement") || is("exec_statement") ||
        is("print_statement")) {
      append_simple(node, out, Construct::simple);
      return;
    }
    if (is("block") || is("module")) {
      walk_block(node, out);
      return;
    }
    // Unknown/ERROR nodes: recover any recognizable statements underneath.
    if (ts_node_named_child_count(node) > 0) {
      walk_block(node, out);
    }
  }

  // Normalizes if/elif/else chains: elif clauses become nested if nodes in
  // the orelse arm. `clause_index` scans the alternative children.
  void walk_if(TSNode if_node, TSNode condition, TSNode consequence, uint32_t next_child,
               std::vector<StmtNode>& out) {
    const uint32_t head_end = ts_node_is_null(consequence) ? ts_node_end_byte(if_node)
                                                           : ts_node_start_byte(consequence);
    uint32_t head_start = ts_node_start_byte(if_node);
    if (!ts_node_is_null(condition)) {
      // elif clauses pass their own clause node as if_node.
      head_start = std::min(head_start, ts_node_start_byte(condition));
    }
    const int id = b_.emit(if_node, head_start, head_end, StatementKind::predicate);
    StmtNode sn{.stmt_id = id, .kind = Construct::if_branch};
    if (id >= 0 && !ts_node_is_null(condition)) collect(condition, b_.at(id), false);
    if (!ts_node_is_null(consequence)) walk_block(consequence, sn.body);

    // Remaining alternatives of the *outermost* statement node.
    const uint32_t count = ts_node_named_child_count(if_node);
    for (uint32_t i = next_child; i < count; ++i) {
      TSNode c = ts_node_named_child(if_node, i);
      if (node_is(c, "elif_clause")) {
        // The elif and everything after it forms the orelse chain.
        walk_elif_chain(if_node, i, sn.orelse);
        break;
      }
      if (node_is(c, "else_clause")) {
        walk_block(field(c, "body"), sn.orelse);
        break;
      }
    }
    out.push_back(std::move(sn));
  }

  void walk_elif_chain(TSNode if_node, uint32_t start_index, std::vector<StmtNode>& out) {
    TSNode clause = ts_node_named_child(if_node, start_index);
    TSNode condition = field(clause, "condition");
    TSNode consequence = field(clause, "consequence");
    const uint32_t head_end = ts_node_is_null(consequence) ? ts_node_end_byte(clause)
                                                           : ts_node_start_byte(consequence);
    const int id = b_.emit(clause, ts_node_start_byte(clause), head_end, StatementKind::predicate);
    StmtNode sn{.stmt_id = id, .kind = Construct::if_branch};
    if (id >= 0 && !ts_node_is_null(condition)) collect(condition, b_.at(id), false);
    if (!ts_node_is_null(consequence)) walk_block(consequence, sn.body);

    const uint32_t count = ts_node_named_child_count(if_node);
    for (uint32_t i = start_index + 1; i < count; ++i) {
      TSNode c = ts_node_named_child(if_node, i);
      if (node_is(c, "elif_clause")) {
        walk_elif_chain(if_node, i, sn.orelse);
        break;
      }
      if (node_is(c, "else_clause")) {
        walk_block(field(c, "body"), sn.orelse);
        break;
      }
    }
    out.push_back(std::move(sn));
  }

  void walk_function(TSNode def_node, TSNode span_node, std::vector<StmtNode>& out) {
    const int id = b_.emit(span_node, ts_node_start_byte(span_node), body_start(def_node, "body"),
                           StatementKind::simple);
    StmtNode sn{.stmt_id = id, .kind = Construct::func_def};
    TSNode name = field(def_node, "name");
    if (!ts_node_is_null(name)) callables_.emplace_back(node_text(name, b_.source()));
    if (id >= 0) {
      collect(field(def_node, "name"), b_.at(id), true);
      collect_parameters(field(def_node, "parameters"), b_.at(id));
      TSNode ret = field(def_node, "return_type");
      if (!ts_node_is_null(ret)) collect(ret, b_.at(id), false);
    }
    walk_block(field(def_node, "body"), sn.body);
    out.push_back(std::move(sn));
  }

  void collect_import(TSNode node, Statement& st) {
    const bool from_import = node_is(node, "import_from_statement") ||
                             node_is(node, "future_import_statement");
    const uint32_t count = ts_node_child_count(node);
    for (uint32_t i = 0; i < count; ++i) {
      TSNode c = ts_node_child(node, i);
      const char* fname = ts_node_field_name_for_child(node, i);
      const bool is_name = fname != nullptr && std::strcmp(fname, "name") == 0;
      if (!is_name) continue;
      if (node_is(c, "aliased_import")) {
        TSNode alias = field(c, "alias");
        if (!ts_node_is_null(alias)) def(alias, st);
      } else if (node_is(c, "dotted_name") && ts_node_named_child_count(c) > 0) {
        // `import a.b` binds a; `from m import a` binds a.
        TSNode bind = ts_node_named_child(c, from_import ? ts_node_named_child_count(c) - 1 : 0);
        def(bind, st);
      }
    }
  }
};

}  // namespace

AdapterResult parse_python_source(const std::string& file_path, std::string_view source) {
  TreePtr tree = parse_tree(tree_sitter_python(), source);
  PyWalker walker(file_path, source);
  return walker.run(ts_tree_root_node(tree.get()));
}

}  // namespace ccgrag::detail
