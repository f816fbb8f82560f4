#include "ccgrag/eval_harness.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <nlohmann/json.hpp>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <unordered_set>

#include "ccgrag/errors.hpp"
#include "ccgrag/lex.hpp"

namespace fs = std::filesystem;

namespace ccgrag {

using nlohmann::json;
using nlohmann::ordered_json;

std::string to_string(TaskLevel level) { return level == TaskLevel::line ? "line" : "api"; }

TaskLevel task_level_from_string(const std::string& name) {
  if (name == "line") return TaskLevel::line;
  if (name == "api") return TaskLevel::api;
  throw Error("unknown task level: " + name);
}

std::string to_string(RetrieverKind kind) {
  switch (kind) {
    case RetrieverKind::graph: return "graph";
    case RetrieverKind::window: return "window";
    case RetrieverKind::none: return "none";
  }
  return "?";
}

namespace {

std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  size_t start = 0;
  while (start <= text.size()) {
    size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      lines.emplace_back(text.substr(start));
      break;
    }
    lines.emplace_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  if (!lines.empty() && lines.back().empty() && !text.empty() && text.back() == '\n') {
    lines.pop_back();
  }
  return lines;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return sanitize_source(buf.str());
}

// A line "invokes" a callable when an identifier token directly precedes an
// opening parenthesis and names something defined in the repository.
// Definition headers are not invocations: python skips names preceded by
// def/class, java skips names preceded by a type token, '>' or '@'.
bool line_calls_known_api(const std::string& line, Language lang,
                          const std::unordered_set<std::string>& callables) {
  static const std::unordered_set<std::string> java_type_keywords = {
      "void", "int", "long", "short", "byte", "char", "float", "double", "boolean", "var"};
  const std::vector<std::string> tokens = lex::tokenize(line, lang);
  for (size_t i = 0; i + 1 < tokens.size(); ++i) {
    if (tokens[i + 1] != "(" || tokens[i].empty()) continue;
    if (!std::isalpha(static_cast<unsigned char>(tokens[i][0])) && tokens[i][0] != '_') continue;
    if (lex::is_keyword(tokens[i], lang) || callables.count(tokens[i]) == 0) continue;
    if (i > 0) {
      const std::string& prev = tokens[i - 1];
      if (lang == Language::python && (prev == "def" || prev == "class")) continue;
      if (lang == Language::java) {
        const bool type_like =
            prev == ">" || prev == "@" || java_type_keywords.count(prev) > 0 ||
            (std::isalpha(static_cast<unsigned char>(prev[0])) && !lex::is_keyword(prev, lang) &&
             prev != "new" && prev != "return");
        if (type_like) continue;
      }
    }
    return true;
  }
  return false;
}

}  // namespace

std::vector<CompletionTask> generate_tasks(const std::string& repo_root, TaskLevel level, int n,
                                           std::uint64_t seed,
                                           const std::vector<Language>& languages,
                                           const std::vector<std::string>& exclude_globs) {
  if (n < 0) throw Error("task count must be >= 0");
  const std::vector<std::string> files = list_source_files(repo_root, languages, exclude_globs);

  // Pass 1 (api level): names of callables defined anywhere in the repo.
  std::unordered_set<std::string> callables;
  if (level == TaskLevel::api) {
    for (const std::string& rel : files) {
      Language lang;
      language_of_path(rel, lang);
      try {
        ParsedSource parsed = parse_source(rel, read_file(fs::path(repo_root) / rel), lang);
        for (const std::string& name : defined_callables(parsed)) callables.insert(name);
      } catch (const ParseFailure&) {
        continue;
      }
    }
  }

  struct Eligible {
    std::string file;
    int line_no;
    Language lang;
  };
  std::vector<Eligible> eligible;
  for (const std::string& rel : files) {
    Language lang;
    language_of_path(rel, lang);
    const std::vector<std::string> lines = split_lines(read_file(fs::path(repo_root) / rel));
    bool code_above = false;
    for (size_t i = 0; i < lines.size(); ++i) {
      const std::string& line = lines[i];
      const bool is_code = !lex::is_blank_or_comment_line(line, lang);
      if (!is_code) continue;
      const bool ok = code_above && lex::tokenize(line, lang).size() >= 5 &&
                      (level == TaskLevel::line || line_calls_known_api(line, lang, callables));
      if (ok) eligible.push_back(Eligible{rel, static_cast<int>(i) + 1, lang});
      code_above = true;
    }
  }
  if (static_cast<int>(eligible.size()) < n) {
    throw InsufficientEligibleLines("repository offers " + std::to_string(eligible.size()) +
                                    " eligible lines, " + std::to_string(n) + " requested");
  }

  std::mt19937_64 rng(seed);
  std::shuffle(eligible.begin(), eligible.end(), rng);
  eligible.resize(static_cast<size_t>(n));
  std::sort(eligible.begin(), eligible.end(), [](const Eligible& a, const Eligible& b) {
    return std::tie(a.file, a.line_no) < std::tie(b.file, b.line_no);
  });

  std::vector<CompletionTask> tasks;
  tasks.reserve(eligible.size());
  for (const Eligible& e : eligible) {
    const std::vector<std::string> lines = split_lines(read_file(fs::path(repo_root) / e.file));
    CompletionTask t;
    t.repo_root = repo_root;
    t.file_path = e.file;
    t.target_line_no = e.line_no;
    t.level = level;
    t.language = e.lang;
    t.ground_truth = lines[static_cast<size_t>(e.line_no) - 1];
    std::string context;
    for (int ln = 1; ln < e.line_no; ++ln) {
      context += lines[static_cast<size_t>(ln) - 1];
      context.push_back('\n');
    }
    t.context_text = std::move(context);
    tasks.push_back(std::move(t));
  }
  return tasks;
}

void save_tasks(const std::vector<CompletionTask>& tasks, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  for (const CompletionTask& t : tasks) {
    ordered_json j;
    j["repo_root"] = t.repo_root;
    j["file_path"] = t.file_path;
    j["target_line_no"] = t.target_line_no;
    j["context_text"] = t.context_text;
    j["ground_truth"] = t.ground_truth;
    j["level"] = to_string(t.level);
    j["language"] = to_string(t.language);
    out << j.dump() << '\n';
  }
}

std::vector<CompletionTask> load_tasks(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::vector<CompletionTask> tasks;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    CompletionTask t;
    t.repo_root = j.at("repo_root").get<std::string>();
    t.file_path = j.at("file_path").get<std::string>();
    t.target_line_no = j.at("target_line_no").get<int>();
    t.context_text = j.at("context_text").get<std::string>();
    t.ground_truth = j.at("ground_truth").get<std::string>();
    t.level = task_level_from_string(j.at("level").get<std::string>());
    t.language = language_from_string(j.at("language").get<std::string>());
    tasks.push_back(std::move(t));
  }
  return tasks;
}

// ---- metrics --------------------------------------------------------------

int exact_match(std::string_view pred, std::string_view truth) {
  return lex::normalize_ws(pred) == lex::normalize_ws(truth) ? 1 : 0;
}

double edit_similarity(std::string_view pred, std::string_view truth) {
  const std::string a = lex::normalize_ws(pred);
  const std::string b = lex::normalize_ws(truth);
  if (a.empty() && b.empty()) return 1.0;
  const size_t n = a.size(), m = b.size();
  std::vector<size_t> prev(m + 1), cur(m + 1);
  for (size_t j = 0; j <= m; ++j) prev[j] = j;
  for (size_t i = 1; i <= n; ++i) {
    cur[0] = i;
    for (size_t j = 1; j <= m; ++j) {
      const size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  const double lev = static_cast<double>(prev[m]);
  return 1.0 - lev / static_cast<double>(std::max(n, m));
}

IdMatch identifier_match(std::string_view pred, std::string_view truth, Language lang,
                         bool set_mode) {
  std::vector<std::string> p = lex::identifiers(pred, lang);
  std::vector<std::string> t = lex::identifiers(truth, lang);
  IdMatch out;
  if (p.empty() && t.empty()) return IdMatch{1, 1.0};
  if (set_mode) {
    const std::set<std::string> ps(p.begin(), p.end()), ts(t.begin(), t.end());
    out.em = ps == ts ? 1 : 0;
  } else {
    out.em = p == t ? 1 : 0;
  }
  if (p.empty() || t.empty()) return out;  // f1 stays 0
  std::sort(p.begin(), p.end());
  std::sort(t.begin(), t.end());
  size_t i = 0, j = 0, inter = 0;
  while (i < p.size() && j < t.size()) {
    const int cmp = p[i].compare(t[j]);
    if (cmp == 0) {
      ++inter;
      ++i;
      ++j;
    } else if (cmp < 0) {
      ++i;
    } else {
      ++j;
    }
  }
  const double precision = static_cast<double>(inter) / static_cast<double>(p.size());
  const double recall = static_cast<double>(inter) / static_cast<double>(t.size());
  out.f1 = precision + recall == 0.0 ? 0.0 : 2.0 * precision * recall / (precision + recall);
  return out;
}

// ---- sliding-window baseline ----------------------------------------------

WindowIndex build_window_index(const std::string& repo_root,
                               const std::vector<Language>& languages, int window, int stride,
                               const std::vector<std::string>& exclude_globs) {
  WindowIndex index;
  index.window = window;
  index.stride = stride;
  for (const std::string& rel : list_source_files(repo_root, languages, exclude_globs)) {
    Language lang;
    language_of_path(rel, lang);
    const std::vector<std::string> lines = split_lines(read_file(fs::path(repo_root) / rel));
    const int total = static_cast<int>(lines.size());
    if (total == 0) continue;
    auto add_window = [&](int start) {
      WindowIndex::Window w;
      w.file_path = rel;
      w.start_line = start;
      w.end_line = std::min(total, start + window - 1);
      std::string text;
      for (int ln = start; ln <= w.end_line; ++ln) {
        w.lines.push_back(lines[static_cast<size_t>(ln) - 1]);
        text += lines[static_cast<size_t>(ln) - 1];
        text.push_back('\n');
      }
      std::vector<std::string> tokens = lex::tokenize(text, lang);
      std::sort(tokens.begin(), tokens.end());
      tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
      w.token_bag = std::move(tokens);
      index.windows.push_back(std::move(w));
    };
    if (total <= window) {
      add_window(1);
      continue;
    }
    int last_start = 1;
    for (int start = 1; start + window - 1 <= total; start += stride) {
      add_window(start);
      last_start = start;
    }
    if (last_start + window - 1 < total) add_window(total - window + 1);
  }
  return index;
}

std::vector<Snippet> sliding_window_retrieve(const WindowIndex& index,
                                             std::string_view context_text, Language lang, int k,
                                             const ExclusionFilter* exclude) {
  const std::vector<std::string> context_lines = split_lines(context_text);
  std::string tail;
  const size_t from = context_lines.size() > static_cast<size_t>(index.window)
                          ? context_lines.size() - static_cast<size_t>(index.window)
                          : 0;
  for (size_t i = from; i < context_lines.size(); ++i) {
    tail += context_lines[i];
    tail.push_back('\n');
  }
  std::vector<std::string> query_bag = lex::tokenize(tail, lang);
  std::sort(query_bag.begin(), query_bag.end());
  query_bag.erase(std::unique(query_bag.begin(), query_bag.end()), query_bag.end());

  struct Scored {
    const WindowIndex::Window* w;
    double score;
  };
  std::vector<Scored> scored;
  scored.reserve(index.windows.size());
  for (const auto& w : index.windows) {
    if (exclude != nullptr && w.file_path == exclude->file_path &&
        (exclude->line_lo < 0 ||
         (w.end_line >= exclude->line_lo && w.start_line <= exclude->line_hi))) {
      continue;
    }
    scored.push_back(Scored{&w, jaccard(query_bag, w.token_bag)});
  }
  auto better = [](const Scored& a, const Scored& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.w->file_path != b.w->file_path) return a.w->file_path < b.w->file_path;
    return a.w->start_line < b.w->start_line;
  };
  const size_t keep = std::min<size_t>(static_cast<size_t>(std::max(k, 0)), scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep),
                    scored.end(), better);
  scored.resize(keep);

  std::vector<Snippet> out;
  out.reserve(scored.size());
  for (size_t i = 0; i < scored.size(); ++i) {
    Snippet s;
    s.file_path = scored[i].w->file_path;
    s.anchor_line = scored[i].w->start_line;
    s.window_start = scored[i].w->start_line;
    s.lines = scored[i].w->lines;
    s.score = scored[i].score;
    s.rank = static_cast<int>(i) + 1;
    out.push_back(std::move(s));
  }
  return out;
}

// ---- pipeline runner --------------------------------------------------------

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

Aggregate aggregate_of(const std::string& level, const std::string& language,
                       const std::vector<const TaskRecord*>& records) {
  Aggregate a;
  a.level = level;
  a.language = language;
  a.count = static_cast<int>(records.size());
  if (records.empty()) return a;
  for (const TaskRecord* r : records) {
    a.em += r->em;
    a.es += r->es;
    a.id_em += r->id_em;
    a.id_f1 += r->id_f1;
  }
  a.em /= a.count;
  a.es /= a.count;
  a.id_em /= a.count;
  a.id_f1 /= a.count;
  return a;
}

}  // namespace

EvalReport run_eval(const std::vector<CompletionTask>& tasks, const PipelineConfig& config) {
  EvalReport report;
  if (config.retriever == RetrieverKind::graph && config.db == nullptr) {
    throw Error("graph retrieval needs a database");
  }
  if (config.retriever == RetrieverKind::window && config.windows == nullptr) {
    throw Error("window retrieval needs a window index");
  }
  if (config.db != nullptr) report.db_entries = config.db->stats.entry_count;

  for (const CompletionTask& task : tasks) {
    TaskRecord rec;
    rec.file_path = task.file_path;
    rec.target_line_no = task.target_line_no;
    rec.level = task.level;
    rec.language = task.language;
    rec.ground_truth = task.ground_truth;
    try {
      const ExclusionFilter leak_guard{task.file_path, task.target_line_no, task.target_line_no};
      std::vector<Snippet> snippets;
      const auto retrieval_start = Clock::now();
      if (config.retriever == RetrieverKind::graph) {
        const CcgSlice query = query_ccg(task.context_text, task.language, config.db->params.h,
                                         config.db->params.l, config.hop_rule);
        auto coarse = coarse_retrieve(*config.db, query, config.coarse_k, &leak_guard,
                                      &report.retrieval_stats);
        auto ranked =
            rerank(std::move(coarse), query, config.gamma, config.top_m, &report.retrieval_stats);
        for (const Candidate& c : ranked) snippets.push_back(to_snippet(c));
      } else if (config.retriever == RetrieverKind::window) {
        snippets = sliding_window_retrieve(*config.windows, task.context_text, task.language,
                                           config.top_m, &leak_guard);
      }
      report.timings.retrieval_ms_total += ms_since(retrieval_start);

      const PromptBundle bundle = compose_prompt(snippets, task.context_text,
                                                 config.llm.context_window_tokens, task.language);
      const auto generate_start = Clock::now();
      rec.prediction = complete(bundle, config.llm);
      report.timings.generate_ms_total += ms_since(generate_start);

      rec.em = exact_match(rec.prediction, task.ground_truth);
      rec.es = edit_similarity(rec.prediction, task.ground_truth);
      const IdMatch ids = identifier_match(rec.prediction, task.ground_truth, task.language);
      rec.id_em = ids.em;
      rec.id_f1 = ids.f1;
    } catch (const Error& e) {
      rec.failed = true;
      rec.error = e.what();
      ++report.failures;
    }
    report.records.push_back(std::move(rec));
  }
  report.timings.coarse_ms_total = report.retrieval_stats.coarse_ms;
  report.timings.fine_ms_total = report.retrieval_stats.fine_ms;

  // Aggregates per (level, language) over non-failed records, fixed order.
  std::map<std::pair<std::string, std::string>, std::vector<const TaskRecord*>> groups;
  std::vector<const TaskRecord*> all;
  for (const TaskRecord& r : report.records) {
    if (r.failed) continue;
    groups[{to_string(r.level), to_string(r.language)}].push_back(&r);
    all.push_back(&r);
  }
  for (const auto& [key, records] : groups) {
    report.aggregates.push_back(aggregate_of(key.first, key.second, records));
  }
  report.overall = aggregate_of("all", "all", all);

  if (!tasks.empty()) {
    report.duplication_ratio =
        duplication_ratio(tasks.front().repo_root, {Language::python, Language::java});
  }
  return report;
}

std::string report_to_json(const EvalReport& report, bool include_timings) {
  ordered_json j;
  auto agg_json = [](const Aggregate& a) {
    ordered_json ja;
    ja["level"] = a.level;
    ja["language"] = a.language;
    ja["count"] = a.count;
    ja["em"] = a.em;
    ja["es"] = a.es;
    ja["id_em"] = a.id_em;
    ja["id_f1"] = a.id_f1;
    return ja;
  };
  ordered_json aggs = ordered_json::array();
  for (const Aggregate& a : report.aggregates) aggs.push_back(agg_json(a));
  j["aggregates"] = std::move(aggs);
  j["overall"] = agg_json(report.overall);
  j["failures"] = report.failures;
  j["db_entries"] = report.db_entries;
  j["duplication_ratio"] = report.duplication_ratio;
  j["fine_candidates_scored"] = report.retrieval_stats.fine_scored;
  j["coarse_entries_scored"] = report.retrieval_stats.coarse_scored;
  ordered_json records = ordered_json::array();
  for (const TaskRecord& r : report.records) {
    ordered_json jr;
    jr["file_path"] = r.file_path;
    jr["target_line_no"] = r.target_line_no;
    jr["level"] = to_string(r.level);
    jr["language"] = to_string(r.language);
    jr["prediction"] = r.prediction;
    jr["ground_truth"] = r.ground_truth;
    jr["em"] = r.em;
    jr["es"] = r.es;
    jr["id_em"] = r.id_em;
    jr["id_f1"] = r.id_f1;
    jr["failed"] = r.failed;
    jr["error"] = r.error;
    records.push_back(std::move(jr));
  }
  j["records"] = std::move(records);
  if (include_timings) {
    ordered_json t;
    t["retrieval_ms_total"] = report.timings.retrieval_ms_total;
    t["coarse_ms_total"] = report.timings.coarse_ms_total;
    t["fine_ms_total"] = report.timings.fine_ms_total;
    t["generate_ms_total"] = report.timings.generate_ms_total;
    j["timings"] = std::move(t);
  }
  return j.dump(2) + "\n";
}

void print_report_table(const EvalReport& report, std::ostream& os) {
  os << std::left << std::setw(8) << "level" << std::setw(10) << "language" << std::right
     << std::setw(7) << "count" << std::setw(9) << "EM" << std::setw(9) << "ES" << std::setw(9)
     << "ID-EM" << std::setw(9) << "ID-F1" << '\n';
  os << std::string(61, '-') << '\n';
  auto row = [&](const Aggregate& a) {
    os << std::left << std::setw(8) << a.level << std::setw(10) << a.language << std::right
       << std::setw(7) << a.count << std::fixed << std::setprecision(4) << std::setw(9) << a.em
       << std::setw(9) << a.es << std::setw(9) << a.id_em << std::setw(9) << a.id_f1 << '\n';
  };
  for (const Aggregate& a : report.aggregates) row(a);
  row(report.overall);
  os << "failures: " << report.failures << "  db entries: " << report.db_entries
     << "  duplication ratio: " << std::fixed << std::setprecision(4) << report.duplication_ratio
     << '\n';
  os << "retrieval: " << std::fixed << std::setprecision(1) << report.timings.retrieval_ms_total
     << " ms (coarse " << report.timings.coarse_ms_total << " ms, fine "
     << report.timings.fine_ms_total << " ms), generation: "
     << report.timings.generate_ms_total << " ms\n";
}

double duplication_ratio(const std::string& repo_root, const std::vector<Language>& languages,
                         const std::vector<std::string>& exclude_globs) {
  std::int64_t total = 0;
  std::map<std::string, int> seen;
  for (const std::string& rel : list_source_files(repo_root, languages, exclude_globs)) {
    Language lang;
    language_of_path(rel, lang);
    for (const std::string& line : split_lines(read_file(fs::path(repo_root) / rel))) {
      if (lex::is_blank_or_comment_line(line, lang)) continue;
      ++total;
      ++seen[lex::normalize_ws(line)];
    }
  }
  if (total == 0) return 0.0;
  std::int64_t duplicated = 0;
  for (const auto& [line, count] : seen) {
    if (count > 1) duplicated += count;
  }
  return static_cast<double>(duplicated) / static_cast<double>(total);
}

}  // namespace ccgrag
