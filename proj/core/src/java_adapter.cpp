// Lowers tree-sitter java trees to Statements + construct structure.
// Class bodies contribute a reading-order member chain; method bodies are
// separate control-flow scopes entered from their header.

#include <algorithm>
#include <string>
#include <string_view>
#include <vector>

#include "adapter.hpp"
#include "ts_util.hpp"

namespace ccgrag::detail {
namespace {

class JavaWalker {
 public:
  JavaWalker(const std::string& file_path, std::string_view src)
      : b_(file_path, src, Language::java) {}

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

  void use(TSNode n, Statement& st) { st.uses.insert(std::string(node_text(n, b_.source()))); }
  void def(TSNode n, Statement& st) { st.defs.insert(std::string(node_text(n, b_.source()))); }

  void collect_children(TSNode n, Statement& st, bool target) {
    const uint32_t count = ts_node_named_child_count(n);
    for (uint32_t i = 0; i < count; ++i) collect(ts_node_named_child(n, i), st, target);
  }

  void collect(TSNode n, Statement& st, bool target) {
    if (ts_node_is_null(n) || is_comment_node(n)) return;
    const char* k = ts_node_type(n);
    auto is = [&](const char* kind) { return std::strcmp(k, kind) == 0; };

    if (is("identifier")) {
      target ? def(n, st) : use(n, st);
      return;
    }
    if (is("type_identifier")) {
      use(n, st);
      return;
    }
    if (is("this")) {
      target ? st.defs.insert("this") : st.uses.insert("this");
      return;
    }
    if (is("field_access")) {
      collect(field(n, "object"), st, target);  // a.b = ... defines base a
      return;
    }
    if (is("array_access")) {
      collect(field(n, "array"), st, target);
      collect(field(n, "index"), st, false);
      return;
    }
    if (is("assignment_expression")) {
      collect(field(n, "left"), st, true);
      TSNode op = field(n, "operator");
      if (!ts_node_is_null(op) && node_text(op, b_.source()) != "=") {
        collect(field(n, "left"), st, false);  // compound assignment reads too
      }
      collect(field(n, "right"), st, false);
      return;
    }
    if (is("update_expression")) {  // x++ / --x
      collect_children(n, st, true);
      collect_children(n, st, false);
      return;
    }
    if (is("method_invocation")) {
      TSNode object = field(n, "object");
      if (ts_node_is_null(object)) {
        TSNode name = field(n, "name");
        if (!ts_node_is_null(name)) use(name, st);
      } else {
        collect(object, st, false);
      }
      collect(field(n, "arguments"), st, false);
      return;
    }
    if (is("lambda_expression")) {
      TSNode body = field(n, "body");
      if (!ts_node_is_null(body)) collect(body, st, false);
      return;
    }
    if (is("instanceof_expression")) {
      collect(field(n, "left"), st, false);
      collect(field(n, "right"), st, false);
      TSNode name = field(n, "name");
      if (!ts_node_is_null(name)) collect(name, st, true);  // pattern variable
      return;
    }
    if (is("variable_declarator")) {
      collect(field(n, "name"), st, true);
      TSNode value = field(n, "value");
      if (!ts_node_is_null(value)) collect(value, st, false);
      return;
    }
    collect_children(n, st, false);
  }

  // ---- header spans -----------------------------------------------------

  // Declaration headers start at the first leaf outside any annotation so
  // annotation lines stay span-free, like comments.
  uint32_t header_start(TSNode decl) {
    uint32_t best = ts_node_end_byte(decl);
    find_first_plain_leaf(decl, best);
    return best == ts_node_end_byte(decl) ? ts_node_start_byte(decl) : best;
  }

  bool find_first_plain_leaf(TSNode n, uint32_t& best) {
    const char* k = ts_node_type(n);
    if (is_comment_node(n)) return false;
    if (std::strcmp(k, "marker_annotation") == 0 || std::strcmp(k, "annotation") == 0) return false;
    const uint32_t count = ts_node_child_count(n);
    if (count == 0) {
      best = ts_node_start_byte(n);
      return true;
    }
    for (uint32_t i = 0; i < count; ++i) {
      if (find_first_plain_leaf(ts_node_child(n, i), best)) return true;
    }
    return false;
  }

  void collect_annotations(TSNode decl, Statement& st) {
    TSNode mods{};
    for (uint32_t i = 0; i < ts_node_named_child_count(decl); ++i) {
      TSNode c = ts_node_named_child(decl, i);
      if (node_is(c, "modifiers")) mods = c;
    }
    if (ts_node_is_null(mods)) return;
    for (uint32_t i = 0; i < ts_node_named_child_count(mods); ++i) {
      TSNode c = ts_node_named_child(mods, i);
      if (node_is(c, "marker_annotation") || node_is(c, "annotation")) {
        collect_children(c, st, false);
      }
    }
  }

  uint32_t body_start_or_end(TSNode node, const char* field_name) {
    TSNode body = field(node, field_name);
    return ts_node_is_null(body) ? ts_node_end_byte(node) : ts_node_start_byte(body);
  }

  // ---- statement walk ---------------------------------------------------

  void walk_block(TSNode node, std::vector<StmtNode>& out) {
    const uint32_t count = ts_node_named_child_count(node);
    for (uint32_t i = 0; i < count; ++i) walk_stmt(ts_node_named_child(node, i), out);
  }

  void append_simple(TSNode node, std::vector<StmtNode>& out, Construct kind) {
    const int id = b_.emit(node, StatementKind::simple);
    if (id < 0) return;
    collect(node, b_.at(id), false);
    out.push_back(StmtNode{.stmt_id = id, .kind = kind});
  }

  void walk_stmt(TSNode node, std::vector<StmtNode>& out) {
    const char* k = ts_node_type(node);
    auto is = [&](const char* kind) { return std::strcmp(k, kind) == 0; };

    if (is_comment_node(node)) return;

    if (is("package_declaration") || is("import_declaration")) {
      const int id = b_.emit(node, StatementKind::simple);
      if (id >= 0) out.push_back(StmtNode{.stmt_id = id, .kind = Construct::simple});
      return;
    }
    if (is("class_declaration") || is("interface_declaration") || is("enum_declaration") ||
        is("record_declaration") || is("annotation_type_declaration")) {
      walk_type_declaration(node, out);
      return;
    }
    if (is("method_declaration") || is("constructor_declaration") ||
        is("compact_constructor_declaration")) {
      walk_callable(node, out);
      return;
    }
    if (is("field_declaration") || is("constant_declaration")) {
      const int id = b_.emit(node, header_start(node), ts_node_end_byte(node),
                             StatementKind::simple);
      if (id < 0) return;
      collect_annotations(node, b_.at(id));
      collect(field(node, "type"), b_.at(id), false);
      for (uint32_t i = 0; i < ts_node_named_child_count(node); ++i) {
        TSNode c = ts_node_named_child(node, i);
        if (node_is(c, "variable_declarator")) collect(c, b_.at(id), false);
      }
      out.push_back(StmtNode{.stmt_id = id, .kind = Construct::simple});
      return;
    }
    if (is("static_initializer")) {
      StmtNode sn{.stmt_id = -1, .kind = Construct::func_def};
      for (uint32_t i = 0; i < ts_node_named_child_count(node); ++i) {
        TSNode c = ts_node_named_child(node, i);
        if (node_is(c, "block")) walk_block(c, sn.body);
      }
      out.push_back(std::move(sn));
      return;
    }
    if (is("enum_constant")) {
      const int id = b_.emit(node, StatementKind::simple);
      if (id < 0) return;
      collect(field(node, "name"), b_.at(id), true);
      TSNode args = field(node, "arguments");
      if (!ts_node_is_null(args)) collect(args, b_.at(id), false);
      out.push_back(StmtNode{.stmt_id = id, .kind = Construct::simple});
      return;
    }
    if (is("local_variable_declaration")) {
      const int id = b_.emit(node, header_start(node), ts_node_end_byte(node),
                             StatementKind::simple);
      if (id < 0) return;
      collect(field(node, "type"), b_.at(id), false);
      for (uint32_t i = 0; i < ts_node_named_child_count(node); ++i) {
        TSNode c = ts_node_named_child(node, i);
        if (node_is(c, "variable_declarator")) collect(c, b_.at(id), false);
      }
      out.push_back(StmtNode{.stmt_id = id, .kind = Construct::simple});
      return;
    }
    if (is("expression_statement") || is("assert_statement") || is("yield_statement")) {
      append_simple(node, out, Construct::simple);
      return;
    }
    if (is("if_statement")) {
      const int id = b_.emit(node, ts_node_start_byte(node),
                             body_start_or_end(node, "consequence"), StatementKind::predicate);
      StmtNode sn{.stmt_id = id, .kind = Construct::if_branch};
      if (id >= 0) collect(field(node, "condition"), b_.at(id), false);
      TSNode consequence = field(node, "consequence");
      if (!ts_node_is_null(consequence)) walk_stmt_or_block(consequence, sn.body);
      TSNode alternative = field(node, "alternative");
      if (!ts_node_is_null(alternative)) walk_stmt_or_block(alternative, sn.orelse);
      out.push_back(std::move(sn));
      return;
    }
    if (is("while_statement")) {
      const int id = b_.emit(node, ts_node_start_byte(node), body_start_or_end(node, "body"),
                             StatementKind::predicate);
      StmtNode sn{.stmt_id = id, .kind = Construct::loop_pretest};
      if (id >= 0) collect(field(node, "condition"), b_.at(id), false);
      walk_stmt_or_block(field(node, "body"), sn.body);
      out.push_back(std::move(sn));
      return;
    }
    if (is("do_statement")) {
      StmtNode sn{.stmt_id = -1, .kind = Construct::loop_posttest};
      walk_stmt_or_block(field(node, "body"), sn.body);
      // Trailing `while (cond);` is the loop's predicate vertex.
      uint32_t cond_start = ts_node_start_byte(node);
      for (uint32_t i = 0; i < ts_node_child_count(node); ++i) {
        TSNode c = ts_node_child(node, i);
        if (!ts_node_is_named(c) && node_text(c, b_.source()) == "while") {
          cond_start = ts_node_start_byte(c);
          break;
        }
      }
      const int id = b_.emit(node, cond_start, ts_node_end_byte(node), StatementKind::predicate);
      sn.stmt_id = id;
      if (id >= 0) collect(field(node, "condition"), b_.at(id), false);
      out.push_back(std::move(sn));
      return;
    }
    if (is("for_statement")) {
      const int id = b_.emit(node, ts_node_start_byte(node), body_start_or_end(node, "body"),
                             StatementKind::predicate);
      StmtNode sn{.stmt_id = id, .kind = Construct::loop_pretest};
      if (id >= 0) {
        for (const char* f : {"init", "condition", "update"}) {
          TSNode c = field(node, f);
          if (!ts_node_is_null(c)) {
            if (node_is(c, "local_variable_declaration")) {
              collect(field(c, "type"), b_.at(id), false);
              collect_children(c, b_.at(id), false);
            } else {
              collect(c, b_.at(id), false);
            }
          }
        }
      }
      walk_stmt_or_block(field(node, "body"), sn.body);
      out.push_back(std::move(sn));
      return;
    }
    if (is("enhanced_for_statement")) {
      const int id = b_.emit(node, ts_node_start_byte(node), body_start_or_end(node, "body"),
                             StatementKind::predicate);
      StmtNode sn{.stmt_id = id, .kind = Construct::loop_pretest};
      if (id >= 0) {
        collect(field(node, "name"), b_.at(id), true);
        collect(field(node, "type"), b_.at(id), false);
        collect(field(node, "value"), b_.at(id), false);
      }
      walk_stmt_or_block(field(node, "body"), sn.body);
      out.push_back(std::move(sn));
      return;
    }
    if (is("switch_expression") || is("switch_statement")) {
      walk_switch(node, out);
      return;
    }
    if (is("try_statement") || is("try_with_resources_statement")) {
      walk_try(node, out);
      return;
    }
    if (is("synchronized_statement")) {
      const int id = b_.emit(node, ts_node_start_byte(node), body_start_or_end(node, "body"),
                             StatementKind::simple);
      StmtNode sn{.stmt_id = id, .kind = Construct::with_block};
      if (id >= 0) {
        for (uint32_t i = 0; i < ts_node_named_child_count(node); ++i) {
          TSNode c = ts_node_named_child(node, i);
          if (node_is(c, "parenthesized_expression")) collect(c, b_.at(id), false);
        }
      }
      walk_stmt_or_block(field(node, "body"), sn.body);
      out.push_back(std::move(sn));
      return;
    }
    if (is("labeled_statement")) {
      // Label ignored; labeled break/continue degrade to plain ones.
      for (uint32_t i = 0; i < ts_node_named_child_count(node); ++i) {
        TSNode c = ts_node_named_child(node, i);
        if (!node_is(c, "identifier")) walk_stmt(c, out);
      }
      return;
    }
    if (is("return_statement")) {
      append_simple(node, out, Construct::jump_return);
      return;
    }
    if (is("throw_statement")) {
      append_simple(node, out, Construct::jump_raise);
      return;
    }
    if (is("break_statement")) {
      const int id = b_.emit(node, StatementKind::simple);
      if (id >= 0) out.push_back(StmtNode{.stmt_id = id, .kind = Construct::jump_break});
      return;
    }
    if (is("continue_statement")) {
      const int id = b_.emit(node, StatementKind::simple);
      if (id >= 0) out.push_back(StmtNode{.stmt_id = id, .kind = Construct::jump_continue});
      return;
    }
    if (is("block")) {
      walk_block(node, out);
      return;
    }
    if (is("line_comment") || is("block_comment")) return;
    if (ts_node_named_child_count(node) > 0) {
      walk_block(node, out);  // ERROR recovery
    }
  }

  // Java allows single statements where blocks are expected.
  void walk_stmt_or_block(TSNode node, std::vector<StmtNode>& out) {
    if (ts_node_is_null(node)) return;
    if (node_is(node, "block")) {
      walk_block(node, out);
    } else {
      walk_stmt(node, out);
    }
  }

  void walk_type_declaration(TSNode node, std::vector<StmtNode>& out) {
    const int id = b_.emit(node, header_start(node), body_start_or_end(node, "body"),
                           StatementKind::simple);
    StmtNode sn{.stmt_id = id, .kind = Construct::class_def};
    if (id >= 0) {
      collect_annotations(node, b_.at(id));
      collect(field(node, "name"), b_.at(id), true);
      for (const char* f : {"superclass", "interfaces", "parameters", "type_parameters"}) {
        TSNode c = field(node, f);
        if (!ts_node_is_null(c)) collect(c, b_.at(id), false);
      }
    }
    TSNode body = field(node, "body");
    if (!ts_node_is_null(body)) {
      for (uint32_t i = 0; i < ts_node_named_child_count(body); ++i) {
        TSNode member = ts_node_named_child(body, i);
        if (node_is(member, "enum_body_declarations")) {
          walk_block(member, sn.body);
        } else {
          walk_stmt(member, sn.body);
        }
      }
    }
    out.push_back(std::move(sn));
  }

  void walk_callable(TSNode node, std::vector<StmtNode>& out) {
    const int id = b_.emit(node, header_start(node), body_start_or_end(node, "body"),
                           StatementKind::simple);
    StmtNode sn{.stmt_id = id, .kind = Construct::func_def};
    TSNode name = field(node, "name");
    if (!ts_node_is_null(name)) callables_.emplace_back(node_text(name, b_.source()));
    if (id >= 0) {
      collect_annotations(node, b_.at(id));
      collect(field(node, "name"), b_.at(id), true);
      collect(field(node, "type"), b_.at(id), false);
      TSNode params = field(node, "parameters");
      if (!ts_node_is_null(params)) {
        for (uint32_t i = 0; i < ts_node_named_child_count(params); ++i) {
          TSNode p = ts_node_named_child(params, i);
          if (node_is(p, "formal_parameter") || node_is(p, "spread_parameter")) {
            collect(field(p, "name"), b_.at(id), true);
            collect(field(p, "type"), b_.at(id), false);
          }
        }
      }
    }
    TSNode body = field(node, "body");
    if (!ts_node_is_null(body)) walk_block(body, sn.body);
    out.push_back(std::move(sn));
  }

  void walk_switch(TSNode node, std::vector<StmtNode>& out) {
    const int id = b_.emit(node, ts_node_start_byte(node), body_start_or_end(node, "body"),
                           StatementKind::predicate);
    StmtNode sn{.stmt_id = id, .kind = Construct::switch_dispatch, .captures_break = true};
    if (id >= 0) collect(field(node, "condition"), b_.at(id), false);
    TSNode body = field(node, "body");
    if (ts_node_is_null(body)) {
      out.push_back(std::move(sn));
      return;
    }
    for (uint32_t i = 0; i < ts_node_named_child_count(body); ++i) {
      TSNode part = ts_node_named_child(body, i);
      if (node_is(part, "switch_block_statement_group")) {
        sn.fallthrough_cases = true;
        // One arm per label; statements attach to the group's last label.
        std::vector<StmtNode::Guarded> labels;
        for (uint32_t j = 0; j < ts_node_named_child_count(part); ++j) {
          TSNode c = ts_node_named_child(part, j);
          if (node_is(c, "switch_label")) {
            labels.push_back(make_label(c));
          }
        }
        if (labels.empty()) labels.push_back(StmtNode::Guarded{});
        for (uint32_t j = 0; j < ts_node_named_child_count(part); ++j) {
          TSNode c = ts_node_named_child(part, j);
          if (!node_is(c, "switch_label")) walk_stmt(c, labels.back().body);
        }
        for (auto& g : labels) sn.handlers.push_back(std::move(g));
      } else if (node_is(part, "switch_rule")) {
        StmtNode::Guarded g;
        for (uint32_t j = 0; j < ts_node_named_child_count(part); ++j) {
          TSNode c = ts_node_named_child(part, j);
          if (node_is(c, "switch_label")) {
            g = make_label(c);
          } else {
            walk_stmt_or_block(c, g.body);
          }
        }
        sn.handlers.push_back(std::move(g));
      }
    }
    out.push_back(std::move(sn));
  }

  StmtNode::Guarded make_label(TSNode label) {
    StmtNode::Guarded g;
    g.is_default = node_text(label, b_.source()).starts_with("default");
    const int hid = b_.emit(label, g.is_default ? StatementKind::simple : StatementKind::predicate);
    g.header_id = hid;
    if (hid >= 0 && !g.is_default) collect_children(label, b_.at(hid), false);
    return g;
  }

  void walk_try(TSNode node, std::vector<StmtNode>& out) {
    StmtNode sn{.stmt_id = -1, .kind = Construct::try_block};
    TSNode resources = field(node, "resources");
    if (!ts_node_is_null(resources)) {
      // Each resource acquisition is its own vertex ahead of the body.
      for (uint32_t i = 0; i < ts_node_named_child_count(resources); ++i) {
        TSNode r = ts_node_named_child(resources, i);
        if (!node_is(r, "resource")) continue;
        const int rid = b_.emit(r, StatementKind::simple);
        if (rid < 0) continue;
        collect(field(r, "name"), b_.at(rid), true);
        collect(field(r, "type"), b_.at(rid), false);
        collect(field(r, "value"), b_.at(rid), false);
        out.push_back(StmtNode{.stmt_id = rid, .kind = Construct::simple});
      }
    }
    TSNode body = field(node, "body");
    if (!ts_node_is_null(body)) walk_block(body, sn.body);
    for (uint32_t i = 0; i < ts_node_named_child_count(node); ++i) {
      TSNode c = ts_node_named_child(node, i);
      if (node_is(c, "catch_clause")) {
        TSNode cbody = field(c, "body");
        const uint32_t head_end =
            ts_node_is_null(cbody) ? ts_node_end_byte(c) : ts_node_start_byte(cbody);
        const int hid = b_.emit(c, ts_node_start_byte(c), head_end, StatementKind::predicate);
        StmtNode::Guarded g{.header_id = hid};
        if (hid >= 0) {
          for (uint32_t j = 0; j < ts_node_named_child_count(c); ++j) {
            TSNode p = ts_node_named_child(c, j);
            if (node_is(p, "catch_formal_parameter")) {
              collect(field(p, "name"), b_.at(hid), true);
              for (uint32_t m = 0; m < ts_node_named_child_count(p); ++m) {
                TSNode t = ts_node_named_child(p, m);
                if (node_is(t, "catch_type")) collect(t, b_.at(hid), false);
              }
            }
          }
        }
        if (!ts_node_is_null(cbody)) walk_block(cbody, g.body);
        sn.handlers.push_back(std::move(g));
      } else if (node_is(c, "finally_clause")) {
        for (uint32_t j = 0; j < ts_node_named_child_count(c); ++j) {
          TSNode fb = ts_node_named_child(c, j);
          if (node_is(fb, "block")) walk_block(fb, sn.finally_body);
        }
      }
    }
    out.push_back(std::move(sn));
  }
};

}  // namespace

AdapterResult parse_java_source(const std::string& file_path, std::string_view source) {
  TreePtr tree = parse_tree(tree_sitter_java(), source);
  JavaWalker walker(file_path, source);
  return walker.run(ts_tree_root_node(tree.get()));
}

}  // namespace ccgrag::detail
