// ccgrag: index / query / complete / eval workflows over statement-level
// code context graphs.
//
// Exit codes: 0 success, 1 usage or data error, 2 external-service error.

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ccgrag/ccg_builder.hpp"
#include "ccgrag/config.hpp"
#include "ccgrag/errors.hpp"
#include "ccgrag/eval_harness.hpp"
#include "ccgrag/index_store.hpp"
#include "ccgrag/json_io.hpp"
#include "ccgrag/prompt_composer.hpp"
#include "ccgrag/retriever.hpp"
#include "ccgrag/slicer.hpp"

namespace {

using namespace ccgrag;

std::string read_stream(std::istream& in) {
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string read_context(const std::string& context_file) {
  std::string raw;
  if (context_file.empty() || context_file == "-") {
    raw = read_stream(std::cin);
  } else {
    std::ifstream in(context_file, std::ios::binary);
    if (!in) throw IoError("cannot open context file " + context_file);
    raw = read_stream(in);
  }
  return sanitize_source(raw);
}

Language context_language(const std::string& context_file, const Config& config) {
  Language lang;
  if (!context_file.empty() && language_of_path(context_file, lang)) return lang;
  return config.languages.empty() ? Language::python : config.languages.front();
}

struct CommonOpts {
  std::string config_path;
  bool verbose = false;
};

Config effective_config(const CommonOpts& opts) {
  Config config;
  if (!opts.config_path.empty()) config = load_config(opts.config_path, std::move(config));
  return config;
}

void echo_config(const Config& config, bool verbose) {
  if (verbose) std::cerr << "effective config:\n" << config_to_json(config);
}

std::string now_utc() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

int cmd_index(const CommonOpts& opts, Config config, const std::string& repo_root,
              const std::string& db_path) {
  const auto start = std::chrono::steady_clock::now();
  Database db = build_database(repo_root, config.languages, config.h, config.l,
                               config.exclude_globs);
  db.params.built_at = now_utc();
  save_database(db, db_path);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::cout << "indexed " << db.stats.entry_count << " entries from " << db.stats.file_count
            << " files (" << db.stats.parse_failures << " skipped parses, "
            << db.stats.source_lines << " lines) in " << secs << "s -> " << db_path << "\n";
  echo_config(config, opts.verbose);
  return 0;
}

std::vector<Snippet> query_snippets(const Database& db, const Config& config,
                                    const std::string& context, Language lang,
                                    RetrievalStats* stats) {
  const CcgSlice query = query_ccg(context, lang, db.params.h, db.params.l, config.hop_rule);
  auto coarse = coarse_retrieve(db, query, config.coarse_k, nullptr, stats);
  auto ranked = rerank(std::move(coarse), query, config.gamma, config.top_m, stats);
  std::vector<Snippet> snippets;
  snippets.reserve(ranked.size());
  for (const Candidate& c : ranked) snippets.push_back(to_snippet(c));
  return snippets;
}

int cmd_graph(const std::string& source_path, bool pretty) {
  Language lang;
  if (!language_of_path(source_path, lang)) {
    throw UnsupportedLanguage("cannot infer language of " + source_path);
  }
  std::ifstream in(source_path, std::ios::binary);
  if (!in) throw IoError("cannot open " + source_path);
  const CodeContextGraph graph = build_ccg(source_path, sanitize_source(read_stream(in)), lang);
  std::cout << graph_to_json(graph, pretty) << "\n";
  return 0;
}

int cmd_query(const CommonOpts& opts, Config config, const std::string& db_path,
              const std::string& context_file, bool as_json) {
  const Database db = load_database(db_path);
  const std::string context = read_context(context_file);
  const Language lang = context_language(context_file, config);
  const CcgSlice query = query_ccg(context, lang, db.params.h, db.params.l, config.hop_rule);
  auto coarse = coarse_retrieve(db, query, config.coarse_k);
  auto ranked = rerank(std::move(coarse), query, config.gamma, config.top_m);
  if (as_json) {
    std::cout << candidates_to_json(ranked) << "\n";
  } else {
    for (const Candidate& c : ranked) {
      std::cout << "#" << c.rank << " " << c.entry->file_path << ":" << c.entry->anchor_line
                << " coarse=" << c.coarse_score << " sed=" << *c.fine_cost << "\n";
      std::istringstream lines(c.entry->value);
      std::string line;
      while (std::getline(lines, line)) std::cout << "    " << line << "\n";
    }
  }
  echo_config(config, opts.verbose);
  return 0;
}

int cmd_complete(const CommonOpts& opts, Config config, const std::string& db_path,
                 const std::string& context_file, bool dry_run) {
  const std::string context = read_context(context_file);
  const Language lang = context_language(context_file, config);
  std::vector<Snippet> snippets;
  if (!db_path.empty()) {
    const Database db = load_database(db_path);
    snippets = query_snippets(db, config, context, lang, nullptr);
  }
  const PromptBundle bundle =
      compose_prompt(snippets, context, config.llm.context_window_tokens, lang);
  if (dry_run) {
    std::cout << bundle.prompt_text;
    return 0;
  }
  std::cout << complete(bundle, config.llm) << "\n";
  echo_config(config, opts.verbose);
  return 0;
}

int cmd_eval(const CommonOpts& opts, Config config, const std::string& repo_root,
             const std::string& level_name, int n, std::uint64_t seed,
             const std::string& retriever_name, const std::string& db_path,
             const std::string& report_path, const std::string& tasks_path, bool timings) {
  const TaskLevel level = task_level_from_string(level_name);
  std::vector<CompletionTask> tasks =
      n == 0 ? std::vector<CompletionTask>{}
             : generate_tasks(repo_root, level, n, seed, config.languages, config.exclude_globs);
  if (!tasks_path.empty()) save_tasks(tasks, tasks_path);

  PipelineConfig pipeline;
  pipeline.llm = config.llm;
  pipeline.gamma = config.gamma;
  pipeline.coarse_k = config.coarse_k;
  pipeline.top_m = config.top_m;
  pipeline.hop_rule = config.hop_rule;

  Database db;
  WindowIndex windows;
  if (retriever_name == "graph") {
    pipeline.retriever = RetrieverKind::graph;
    if (db_path.empty()) {
      db = build_database(repo_root, config.languages, config.h, config.l, config.exclude_globs);
    } else {
      db = load_database(db_path);
    }
    pipeline.db = &db;
  } else if (retriever_name == "window") {
    pipeline.retriever = RetrieverKind::window;
    windows = build_window_index(repo_root, config.languages, config.window, config.stride,
                                 config.exclude_globs);
    pipeline.windows = &windows;
  } else if (retriever_name == "none") {
    pipeline.retriever = RetrieverKind::none;
  } else {
    throw Error("unknown retriever '" + retriever_name + "' (graph|window|none)");
  }

  const EvalReport report = run_eval(tasks, pipeline);
  print_report_table(report, std::cout);
  if (!report_path.empty()) {
    std::ofstream out(report_path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open report path " + report_path);
    out << report_to_json(report, timings);
  }
  echo_config(config, opts.verbose);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"statement-graph retrieval-augmented code completion"};
  app.require_subcommand(1);

  CommonOpts common;
  app.add_option("--config", common.config_path, "JSON config file");
  app.add_flag("-v,--verbose", common.verbose, "echo the effective config");

  // index
  auto* index = app.add_subcommand("index", "build the retrieval database for a repository");
  std::string repo_root;
  std::string db_path = "ccgrag.db.gz";
  index->add_option("--repo", repo_root, "repository root")->required();
  index->add_option("--db", db_path, "database path");
  int opt_h = -1, opt_l = -1;
  index->add_option("--hops", opt_h, "max slice hops (h)");
  index->add_option("--max-statements", opt_l, "max slice statements (l)");

  // graph
  auto* graph = app.add_subcommand("graph", "print a file's code context graph as JSON");
  std::string g_file;
  bool g_pretty = false;
  graph->add_option("file", g_file, "source file (.py or .java)")->required();
  graph->add_flag("--pretty", g_pretty, "indent the JSON");

  // query
  auto* query = app.add_subcommand("query", "retrieve snippets for a completion context");
  std::string q_db = "ccgrag.db.gz", q_context;
  bool q_json = false;
  query->add_option("--db", q_db, "database path");
  query->add_option("--context-file", q_context, "context file ('-' or absent = stdin)");
  query->add_flag("--json", q_json, "emit JSON");
  int q_topm = -1;
  double q_gamma = -1;
  query->add_option("--top-m", q_topm, "snippets to return");
  query->add_option("--gamma", q_gamma, "decay factor");

  // complete
  auto* comp = app.add_subcommand("complete", "predict the next line for a context");
  std::string c_db, c_context, c_endpoint, c_model;
  bool c_dry = false;
  comp->add_option("--db", c_db, "database path (omit to prompt without retrieval)");
  comp->add_option("--context-file", c_context, "context file ('-' or absent = stdin)");
  comp->add_flag("--dry-run", c_dry, "print the prompt instead of calling the model");
  comp->add_option("--endpoint", c_endpoint, "completions endpoint url (or mock:echo, ...)");
  comp->add_option("--model", c_model, "model name");

  // eval
  auto* eval = app.add_subcommand("eval", "generate tasks, run the pipeline, score it");
  std::string e_repo, e_level = "line", e_retriever = "graph", e_db, e_report, e_tasks,
              e_endpoint, e_model;
  int e_n = 100;
  std::uint64_t e_seed = 17;
  bool e_timings = false;
  eval->add_option("--repo", e_repo, "repository root")->required();
  eval->add_option("--level", e_level, "task level: line|api");
  eval->add_option("--n", e_n, "number of tasks");
  eval->add_option("--seed", e_seed, "sampling seed");
  eval->add_option("--retriever", e_retriever, "graph|window|none");
  eval->add_option("--db", e_db, "reuse a prebuilt database (graph retriever)");
  eval->add_option("--report", e_report, "write the JSON report here");
  eval->add_option("--tasks-file", e_tasks, "write generated tasks (JSON-lines)");
  eval->add_flag("--timings", e_timings, "include wall-clock timings in the report");
  eval->add_option("--endpoint", e_endpoint, "completions endpoint url (or mock:...)");
  eval->add_option("--model", e_model, "model name");

  CLI11_PARSE(app, argc, argv);

  try {
    Config config = effective_config(common);
    if (index->parsed()) {
      if (opt_h >= 0) config.h = opt_h;
      if (opt_l >= 1) config.l = opt_l;
      return cmd_index(common, config, repo_root, db_path);
    }
    if (graph->parsed()) {
      return cmd_graph(g_file, g_pretty);
    }
    if (query->parsed()) {
      if (q_topm >= 0) config.top_m = q_topm;
      if (q_gamma > 0) config.gamma = q_gamma;
      return cmd_query(common, config, q_db, q_context, q_json);
    }
    if (comp->parsed()) {
      if (!c_endpoint.empty()) config.llm.endpoint_url = c_endpoint;
      if (!c_model.empty()) config.llm.model_name = c_model;
      return cmd_complete(common, config, c_db, c_context, c_dry);
    }
    if (eval->parsed()) {
      if (!e_endpoint.empty()) config.llm.endpoint_url = e_endpoint;
      if (!e_model.empty()) config.llm.model_name = e_model;
      return cmd_eval(common, config, e_repo, e_level, e_n, e_seed, e_retriever, e_db, e_report,
                      e_tasks, e_timings);
    }
  } catch (const EndpointError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const TimeoutError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
