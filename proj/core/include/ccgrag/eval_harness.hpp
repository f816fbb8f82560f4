#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ccgrag/index_store.hpp"
#include "ccgrag/prompt_composer.hpp"
#include "ccgrag/retriever.hpp"

namespace ccgrag {

enum class TaskLevel { line, api };
std::string to_string(TaskLevel level);
TaskLevel task_level_from_string(const std::string& name);

struct CompletionTask {
  std::string repo_root;
  std::string file_path;  // repo-relative
  int target_line_no = 0;
  std::string context_text;   // file content above the target line
  std::string ground_truth;   // the removed line
  TaskLevel level = TaskLevel::line;
  Language language = Language::python;

  bool operator==(const CompletionTask&) const = default;
};

/// Uniformly samples eligible lines: non-comment, >= 5 lexical tokens, for
/// api level at least one call whose callee is defined in the repository.
/// Deterministic under (repo, level, n, seed).
std::vector<CompletionTask> generate_tasks(const std::string& repo_root, TaskLevel level, int n,
                                           std::uint64_t seed,
                                           const std::vector<Language>& languages,
                                           const std::vector<std::string>& exclude_globs = {});

// JSON-lines task files.
void save_tasks(const std::vector<CompletionTask>& tasks, const std::string& path);
std::vector<CompletionTask> load_tasks(const std::string& path);

// ---- metrics ------------------------------------------------------------

int exact_match(std::string_view pred, std::string_view truth);
double edit_similarity(std::string_view pred, std::string_view truth);

struct IdMatch {
  int em = 0;
  double f1 = 0.0;
};
// set_mode compares identifier sets instead of ordered lists for the EM.
IdMatch identifier_match(std::string_view pred, std::string_view truth, Language lang,
                         bool set_mode = false);

// ---- sliding-window baseline -------------------------------------------

struct WindowIndex {
  struct Window {
    std::string file_path;
    int start_line = 0;  // 1-based
    int end_line = 0;
    std::vector<std::string> lines;
    std::vector<std::string> token_bag;  // sorted unique
  };
  std::vector<Window> windows;
  int window = 20;
  int stride = 1;
};

WindowIndex build_window_index(const std::string& repo_root,
                               const std::vector<Language>& languages, int window, int stride,
                               const std::vector<std::string>& exclude_globs = {});

/// Top-k windows by token-bag Jaccard against the last `window` context
/// lines. Ties break by (file_path, start_line).
std::vector<Snippet> sliding_window_retrieve(const WindowIndex& index,
                                             std::string_view context_text, Language lang, int k,
                                             const ExclusionFilter* exclude = nullptr);

// ---- the pipeline runner -------------------------------------------------

enum class RetrieverKind { graph, window, none };
std::string to_string(RetrieverKind kind);

struct PipelineConfig {
  RetrieverKind retriever = RetrieverKind::graph;
  const Database* db = nullptr;            // graph retrieval
  const WindowIndex* windows = nullptr;    // baseline retrieval
  LlmConfig llm;
  double gamma = 0.1;
  int coarse_k = 50;
  int top_m = 10;
  DepHopRule hop_rule = DepHopRule::attach;
};

struct TaskRecord {
  std::string file_path;
  int target_line_no = 0;
  TaskLevel level = TaskLevel::line;
  Language language = Language::python;
  std::string prediction;
  std::string ground_truth;
  int em = 0;
  double es = 0.0;
  int id_em = 0;
  double id_f1 = 0.0;
  bool failed = false;
  std::string error;
};

struct Aggregate {
  std::string level;
  std::string language;
  int count = 0;
  double em = 0.0;
  double es = 0.0;
  double id_em = 0.0;
  double id_f1 = 0.0;
};

struct EvalTimings {
  double retrieval_ms_total = 0.0;
  double coarse_ms_total = 0.0;
  double fine_ms_total = 0.0;
  double generate_ms_total = 0.0;
};

struct EvalReport {
  std::vector<TaskRecord> records;
  std::vector<Aggregate> aggregates;  // per (level, language), ordered
  Aggregate overall;
  int failures = 0;
  std::int64_t db_entries = 0;
  double duplication_ratio = 0.0;  // helper metric: 1 - unique/total code lines
  EvalTimings timings;
  RetrievalStats retrieval_stats;
};

EvalReport run_eval(const std::vector<CompletionTask>& tasks, const PipelineConfig& config);

/// Report JSON; timing fields only when include_timings (they are not
/// byte-stable across runs).
std::string report_to_json(const EvalReport& report, bool include_timings = false);

void print_report_table(const EvalReport& report, std::ostream& os);

/// Share of repeated code lines in the repo (whitespace-normalized,
/// blank/comment lines ignored).
double duplication_ratio(const std::string& repo_root, const std::vector<Language>& languages,
                         const std::vector<std::string>& exclude_globs = {});

}  // namespace ccgrag
