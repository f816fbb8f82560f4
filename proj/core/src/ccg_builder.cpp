#include "ccgrag/ccg_builder.hpp"

#include <algorithm>
#include <cstring>
#include <deque>
#include <map>
#include <set>

#include "adapter.hpp"
#include "ccgrag/errors.hpp"
#include "ccgrag/lex.hpp"

namespace ccgrag {

using detail::Construct;
using detail::StmtNode;

std::string sanitize_source(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  size_t i = 0;
  auto cont = [&](size_t j) {
    return j < raw.size() && (static_cast<unsigned char>(raw[j]) & 0xC0) == 0x80;
  };
  while (i < raw.size()) {
    const unsigned char c = static_cast<unsigned char>(raw[i]);
    if (c == '\r') {
      if (i + 1 >= raw.size() || raw[i + 1] != '\n') out.push_back('\n');
      ++i;
      continue;
    }
    size_t len = 0;
    if (c < 0x80) {
      len = 1;
    } else if ((c & 0xE0) == 0xC0 && cont(i + 1)) {
      len = 2;
    } else if ((c & 0xF0) == 0xE0 && cont(i + 1) && cont(i + 2)) {
      len = 3;
    } else if ((c & 0xF8) == 0xF0 && cont(i + 1) && cont(i + 2) && cont(i + 3)) {
      len = 4;
    }
    if (len == 0) {
      out += "\xEF\xBF\xBD";  // U+FFFD
      ++i;
    } else {
      out.append(raw.substr(i, len));
      i += len;
    }
  }
  return out;
}

namespace {

// ---------------------------------------------------------------------------
// Control flow wiring over the construct tree.
// ---------------------------------------------------------------------------

class CfgWirer {
 public:
  explicit CfgWirer(std::vector<Edge>& edges) : edges_(edges) {}

  void wire_roots(const std::vector<StmtNode>& roots) {
    std::vector<int> incoming;
    Ctx ctx;
    wire_block(roots, std::move(incoming), ctx);
  }

 private:
  struct Ctx {
    std::vector<int>* break_sink = nullptr;
    int continue_target = -1;
  };

  std::vector<Edge>& edges_;

  void add(int src, int dst) {
    if (src < 0 || dst < 0 || src == dst) return;  // no CF self-loops
    edges_.push_back(Edge{src, EdgeType::CF, dst});
  }

  void add_all(const std::vector<int>& srcs, int dst) {
    for (int s : srcs) add(s, dst);
  }

  // First vertex control reaches when entering a node; -1 if the node (and
  // its fallthrough chain) contains no vertex at all.
  int entry_of(const StmtNode& n) const {
    switch (n.kind) {
      case Construct::loop_posttest: {
        int e = entry_of_block(n.body);
        return e >= 0 ? e : n.stmt_id;
      }
      case Construct::try_block: {
        int e = entry_of_block(n.body);
        if (e >= 0) return e;
        for (const auto& h : n.handlers) {
          if (h.header_id >= 0) return h.header_id;
        }
        return entry_of_block(n.finally_body);
      }
      default:
        if (n.stmt_id >= 0) return n.stmt_id;
        return entry_of_block(n.body);
    }
  }

  int entry_of_block(const std::vector<StmtNode>& blk) const {
    for (const auto& n : blk) {
      int e = entry_of(n);
      if (e >= 0) return e;
    }
    return -1;
  }

  std::vector<int> wire_block(const std::vector<StmtNode>& blk, std::vector<int> incoming,
                              Ctx& ctx) {
    for (const auto& n : blk) incoming = wire_node(n, std::move(incoming), ctx);
    return incoming;
  }

  std::vector<int> wire_node(const StmtNode& n, std::vector<int> incoming, Ctx& ctx) {
    switch (n.kind) {
      case Construct::simple:
        if (n.stmt_id < 0) return incoming;
        add_all(incoming, n.stmt_id);
        return {n.stmt_id};

      case Construct::jump_return:
      case Construct::jump_raise:
        if (n.stmt_id >= 0) add_all(incoming, n.stmt_id);
        return {};  // control leaves the scope

      case Construct::jump_break:
        if (n.stmt_id >= 0) {
          add_all(incoming, n.stmt_id);
          if (ctx.break_sink) ctx.break_sink->push_back(n.stmt_id);
        }
        return {};

      case Construct::jump_continue:
        if (n.stmt_id >= 0) {
          add_all(incoming, n.stmt_id);
          if (ctx.continue_target >= 0) add(n.stmt_id, ctx.continue_target);
        }
        return {};

      case Construct::if_branch: {
        add_all(incoming, n.stmt_id);
        std::vector<int> exits = wire_block(n.body, {n.stmt_id}, ctx);
        if (n.orelse.empty()) {
          exits.push_back(n.stmt_id);  // false arm falls through
        } else {
          auto else_exits = wire_block(n.orelse, {n.stmt_id}, ctx);
          exits.insert(exits.end(), else_exits.begin(), else_exits.end());
        }
        return exits;
      }

      case Construct::loop_pretest: {
        add_all(incoming, n.stmt_id);
        std::vector<int> breaks;
        Ctx inner{&breaks, n.stmt_id};
        auto body_exits = wire_block(n.body, {n.stmt_id}, inner);
        add_all(body_exits, n.stmt_id);  // back edges
        std::vector<int> exits;
        if (n.orelse.empty()) {
          exits.push_back(n.stmt_id);
        } else {
          exits = wire_block(n.orelse, {n.stmt_id}, ctx);  // loop-else on normal exit
        }
        exits.insert(exits.end(), breaks.begin(), breaks.end());
        return exits;
      }

      case Construct::loop_posttest: {
        std::vector<int> breaks;
        Ctx inner{&breaks, n.stmt_id};
        auto body_exits = wire_block(n.body, std::move(incoming), inner);
        add_all(body_exits, n.stmt_id);
        int body_entry = entry_of_block(n.body);
        if (body_entry >= 0) add(n.stmt_id, body_entry);  // back edge
        std::vector<int> exits{n.stmt_id};
        exits.insert(exits.end(), breaks.begin(), breaks.end());
        return exits;
      }

      case Construct::with_block: {
        add_all(incoming, n.stmt_id);
        return wire_block(n.body, {n.stmt_id}, ctx);
      }

      case Construct::func_def: {
        // Header joins the enclosing flow; the body is its own scope,
        // entered from the header. Body exits fall off the function.
        std::vector<int> entry;
        if (n.stmt_id >= 0) {
          add_all(incoming, n.stmt_id);
          entry.push_back(n.stmt_id);
        }
        Ctx inner;
        wire_block(n.body, std::move(entry), inner);
        return n.stmt_id >= 0 ? std::vector<int>{n.stmt_id} : incoming;
      }

      case Construct::class_def: {
        add_all(incoming, n.stmt_id);
        auto exits = wire_block(n.body, {n.stmt_id}, ctx);
        return exits.empty() ? std::vector<int>{n.stmt_id} : exits;
      }

      case Construct::try_block: {
        auto body_exits = wire_block(n.body, incoming, ctx);
        // Exception dispatch chain: each direct try statement may divert to
        // the first handler head; a head that fails to match tries the next.
        std::vector<int> direct;
        for (const auto& b : n.body) {
          if (b.stmt_id >= 0) direct.push_back(b.stmt_id);
        }
        int first_head = -1;
        int prev_head = -1;
        std::vector<int> exits;
        for (const auto& h : n.handlers) {
          if (h.header_id < 0) continue;
          if (first_head < 0) first_head = h.header_id;
          if (prev_head >= 0) add(prev_head, h.header_id);
          prev_head = h.header_id;
          auto handler_exits = wire_block(h.body, {h.header_id}, ctx);
          exits.insert(exits.end(), handler_exits.begin(), handler_exits.end());
        }
        if (first_head >= 0) add_all(direct, first_head);
        if (!n.orelse.empty()) {
          body_exits = wire_block(n.orelse, std::move(body_exits), ctx);
        }
        exits.insert(exits.end(), body_exits.begin(), body_exits.end());
        if (!n.finally_body.empty()) {
          exits = wire_block(n.finally_body, std::move(exits), ctx);
        }
        return exits;
      }

      case Construct::switch_dispatch: {
        add_all(incoming, n.stmt_id);
        std::vector<int> breaks;
        Ctx arm_ctx = ctx;
        if (n.captures_break) arm_ctx.break_sink = &breaks;

        std::vector<int> exits;
        int prev_label = n.stmt_id;
        bool has_default = false;
        // Exits of a fallthrough arm, and headers of label-only arms whose
        // match continues at the next non-empty body.
        std::vector<int> pending;
        for (const auto& arm : n.handlers) {
          has_default = has_default || arm.is_default;
          if (arm.header_id >= 0) {
            add(prev_label, arm.header_id);  // dispatch chain (no-match path)
            prev_label = arm.header_id;
          }
          if (entry_of_block(arm.body) < 0) {
            if (arm.header_id < 0) continue;
            if (n.fallthrough_cases) {
              pending.push_back(arm.header_id);
            } else {
              exits.push_back(arm.header_id);  // arrow arm with empty body
            }
            continue;
          }
          std::vector<int> arm_incoming = std::move(pending);
          pending.clear();
          if (arm.header_id >= 0) arm_incoming.push_back(arm.header_id);
          auto arm_exits = wire_block(arm.body, std::move(arm_incoming), arm_ctx);
          if (n.fallthrough_cases) {
            pending = std::move(arm_exits);
          } else {
            exits.insert(exits.end(), arm_exits.begin(), arm_exits.end());
          }
        }
        exits.insert(exits.end(), pending.begin(), pending.end());
        if (!has_default && prev_label >= 0) exits.push_back(prev_label);
        exits.insert(exits.end(), breaks.begin(), breaks.end());
        return exits;
      }
    }
    return incoming;
  }
};

// ---------------------------------------------------------------------------
// Control dependence: postdominator tree + edge walk.
// ---------------------------------------------------------------------------

struct PostDom {
  // ipdom[v] over vertices 0..n-1 plus virtual exit n; -1 when undefined.
  std::vector<int> ipdom;
  int exit;
  // Successor lists augmented with the virtual exit edges the relation was
  // computed over; the control-dependence walk must see the same graph.
  std::vector<std::vector<int>> succ;
};

PostDom compute_postdominators(int n, const std::vector<std::vector<int>>& succ) {
  const int exit = n;
  std::vector<std::vector<int>> succ_x(static_cast<size_t>(n) + 1);
  for (int v = 0; v < n; ++v) succ_x[static_cast<size_t>(v)] = succ[static_cast<size_t>(v)];

  // Terminal vertices flow to the virtual exit.
  for (int v = 0; v < n; ++v) {
    if (succ_x[static_cast<size_t>(v)].empty()) succ_x[static_cast<size_t>(v)].push_back(exit);
  }
  // Vertices trapped in infinite loops get a virtual exit edge so the
  // postdominance relation stays defined.
  {
    std::vector<char> reaches(static_cast<size_t>(n) + 1, 0);
    std::vector<std::vector<int>> pred(static_cast<size_t>(n) + 1);
    for (int v = 0; v <= n; ++v) {
      for (int s : succ_x[static_cast<size_t>(v)]) pred[static_cast<size_t>(s)].push_back(v);
    }
    std::deque<int> q{exit};
    reaches[static_cast<size_t>(exit)] = 1;
    while (!q.empty()) {
      int v = q.front();
      q.pop_front();
      for (int p : pred[static_cast<size_t>(v)]) {
        if (!reaches[static_cast<size_t>(p)]) {
          reaches[static_cast<size_t>(p)] = 1;
          q.push_back(p);
        }
      }
    }
    for (int v = 0; v < n; ++v) {
      if (!reaches[static_cast<size_t>(v)]) succ_x[static_cast<size_t>(v)].push_back(exit);
    }
  }

  // Reverse graph predecessors (= successors of the reversed CFG rooted at
  // exit) and a reverse post-order over that reversed graph.
  std::vector<std::vector<int>> rpred(static_cast<size_t>(n) + 1);
  for (int v = 0; v <= n; ++v) {
    for (int s : succ_x[static_cast<size_t>(v)]) rpred[static_cast<size_t>(s)].push_back(v);
  }
  std::vector<int> order;  // post-order of DFS over reversed edges from exit
  {
    std::vector<char> seen(static_cast<size_t>(n) + 1, 0);
    std::vector<std::pair<int, size_t>> stack{{exit, 0}};
    seen[static_cast<size_t>(exit)] = 1;
    while (!stack.empty()) {
      auto& [v, idx] = stack.back();
      if (idx < rpred[static_cast<size_t>(v)].size()) {
        int next = rpred[static_cast<size_t>(v)][idx++];
        if (!seen[static_cast<size_t>(next)]) {
          seen[static_cast<size_t>(next)] = 1;
          stack.push_back({next, 0});
        }
      } else {
        order.push_back(v);
        stack.pop_back();
      }
    }
  }
  std::vector<int> rpo_index(static_cast<size_t>(n) + 1, -1);
  std::vector<int> rpo(order.rbegin(), order.rend());
  for (size_t i = 0; i < rpo.size(); ++i) rpo_index[static_cast<size_t>(rpo[i])] = static_cast<int>(i);

  // Cooper–Harvey–Kennedy on the reversed graph.
  std::vector<int> ipdom(static_cast<size_t>(n) + 1, -1);
  ipdom[static_cast<size_t>(exit)] = exit;
  auto intersect = [&](int a, int b) {
    while (a != b) {
      while (rpo_index[static_cast<size_t>(a)] > rpo_index[static_cast<size_t>(b)])
        a = ipdom[static_cast<size_t>(a)];
      while (rpo_index[static_cast<size_t>(b)] > rpo_index[static_cast<size_t>(a)])
        b = ipdom[static_cast<size_t>(b)];
    }
    return a;
  };
  bool changed = true;
  while (changed) {
    changed = false;
    for (int v : rpo) {
      if (v == exit) continue;
      int new_idom = -1;
      for (int s : succ_x[static_cast<size_t>(v)]) {  // preds in reversed graph
        if (ipdom[static_cast<size_t>(s)] == -1 && s != exit) continue;
        if (rpo_index[static_cast<size_t>(s)] < 0) continue;
        new_idom = new_idom == -1 ? s : intersect(new_idom, s);
      }
      if (new_idom != -1 && ipdom[static_cast<size_t>(v)] != new_idom) {
        ipdom[static_cast<size_t>(v)] = new_idom;
        changed = true;
      }
    }
  }
  return PostDom{std::move(ipdom), exit, std::move(succ_x)};
}

}  // namespace

ParsedSource parse_source(std::string file_path, std::string_view source, Language lang) {
  detail::AdapterResult result = lang == Language::python
                                     ? detail::parse_python_source(file_path, source)
                                     : detail::parse_java_source(file_path, source);
  if (result.statements.empty() && !lex::tokenize(source, lang).empty()) {
    throw ParseFailure("no statements recovered from " +
                       (file_path.empty() ? std::string("<memory>") : file_path));
  }
  ParsedSource parsed;
  parsed.language = lang;
  parsed.file_path = std::move(file_path);
  parsed.statements = std::move(result.statements);
  auto structure = std::make_shared<detail::SourceStructure>();
  structure->roots = std::move(result.roots);
  structure->callables = std::move(result.callables);
  parsed.structure = std::move(structure);
  return parsed;
}

std::vector<Statement> extract_statements(std::string_view source, Language lang) {
  return parse_source("", source, lang).statements;
}

const std::vector<std::string>& defined_callables(const ParsedSource& parsed) {
  return parsed.structure->callables;
}

std::vector<Edge> build_cfg(const ParsedSource& parsed) {
  std::vector<Edge> edges;
  CfgWirer wirer(edges);
  wirer.wire_roots(parsed.structure->roots);
  sort_and_dedup_edges(edges);
  return edges;
}

std::vector<Edge> build_cdg(const std::vector<Statement>& statements,
                            const std::vector<Edge>& cf_edges) {
  const int n = static_cast<int>(statements.size());
  std::vector<std::vector<int>> succ(static_cast<size_t>(n));
  for (const Edge& e : cf_edges) {
    if (e.type == EdgeType::CF) succ[static_cast<size_t>(e.src)].push_back(e.dst);
  }
  PostDom pd = compute_postdominators(n, succ);

  std::vector<Edge> out;
  for (int a = 0; a < n; ++a) {
    if (statements[static_cast<size_t>(a)].kind != StatementKind::predicate) continue;
    for (int b : pd.succ[static_cast<size_t>(a)]) {
      // March up the postdominator tree from b to (exclusive) ipdom(a).
      int runner = b;
      const int stop = pd.ipdom[static_cast<size_t>(a)];
      int guard = 0;
      while (runner != stop && runner >= 0 && guard++ <= n + 1) {
        if (runner == pd.exit) break;
        out.push_back(Edge{a, EdgeType::CD, runner});
        runner = pd.ipdom[static_cast<size_t>(runner)];
      }
    }
  }
  sort_and_dedup_edges(out);
  return out;
}

std::vector<Edge> build_ddg(const std::vector<Statement>& statements,
                            const std::vector<Edge>& cf_edges) {
  const size_t n = statements.size();
  // Def sites, grouped per variable for kill computation.
  struct DefSite {
    int stmt;
    int var;
  };
  std::map<std::string, int> var_ids;
  std::vector<DefSite> sites;
  std::vector<std::vector<int>> sites_of_var;
  std::vector<std::vector<int>> gen(n);
  for (size_t s = 0; s < n; ++s) {
    for (const std::string& v : statements[s].defs) {
      auto [it, inserted] = var_ids.try_emplace(v, static_cast<int>(var_ids.size()));
      if (inserted) sites_of_var.emplace_back();
      const int site = static_cast<int>(sites.size());
      sites.push_back(DefSite{static_cast<int>(s), it->second});
      sites_of_var[static_cast<size_t>(it->second)].push_back(site);
      gen[s].push_back(site);
    }
  }
  const size_t nsites = sites.size();
  const size_t words = (nsites + 63) / 64;
  auto make_bits = [&] { return std::vector<std::uint64_t>(words, 0); };
  auto set_bit = [](std::vector<std::uint64_t>& b, int i) {
    b[static_cast<size_t>(i) >> 6] |= (1ULL << (i & 63));
  };
  auto test_bit = [](const std::vector<std::uint64_t>& b, int i) {
    return (b[static_cast<size_t>(i) >> 6] >> (i & 63)) & 1ULL;
  };

  std::vector<std::vector<std::uint64_t>> in(n, make_bits()), out_sets(n, make_bits());
  std::vector<std::vector<std::uint64_t>> kill(n, make_bits()), gen_bits(n, make_bits());
  for (size_t s = 0; s < n; ++s) {
    for (int site : gen[s]) {
      set_bit(gen_bits[s], site);
      for (int other : sites_of_var[static_cast<size_t>(sites[static_cast<size_t>(site)].var)]) {
        if (sites[static_cast<size_t>(other)].stmt != static_cast<int>(s)) {
          set_bit(kill[s], other);
        }
      }
    }
  }
  std::vector<std::vector<int>> preds(n);
  for (const Edge& e : cf_edges) {
    if (e.type == EdgeType::CF) preds[static_cast<size_t>(e.dst)].push_back(e.src);
  }

  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t s = 0; s < n; ++s) {
      auto& in_s = in[s];
      for (int p : preds[s]) {
        for (size_t w = 0; w < words; ++w) in_s[w] |= out_sets[static_cast<size_t>(p)][w];
      }
      for (size_t w = 0; w < words; ++w) {
        const std::uint64_t next = gen_bits[s][w] | (in_s[w] & ~kill[s][w]);
        if (next != out_sets[s][w]) {
          out_sets[s][w] = next;
          changed = true;
        }
      }
    }
  }

  std::vector<Edge> out;
  for (size_t u = 0; u < n; ++u) {
    for (const std::string& v : statements[u].uses) {
      auto it = var_ids.find(v);
      if (it == var_ids.end()) continue;
      for (int site : sites_of_var[static_cast<size_t>(it->second)]) {
        const int d = sites[static_cast<size_t>(site)].stmt;
        if (d == static_cast<int>(u)) continue;  // no DD self-loops
        if (test_bit(in[u], site)) out.push_back(Edge{d, EdgeType::DD, static_cast<int>(u)});
      }
    }
  }
  sort_and_dedup_edges(out);
  return out;
}

CodeContextGraph build_ccg(std::string file_path, std::string_view source, Language lang) {
  ParsedSource parsed = parse_source(std::move(file_path), source, lang);
  CodeContextGraph g;
  g.language = lang;
  g.edges = build_cfg(parsed);
  auto cd = build_cdg(parsed.statements, g.edges);
  auto dd = build_ddg(parsed.statements, g.edges);
  g.edges.insert(g.edges.end(), cd.begin(), cd.end());
  g.edges.insert(g.edges.end(), dd.begin(), dd.end());
  sort_and_dedup_edges(g.edges);
  g.vertices = std::move(parsed.statements);
  return g;
}

}  // namespace ccgrag
