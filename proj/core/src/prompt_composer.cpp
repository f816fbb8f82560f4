#include "ccgrag/prompt_composer.hpp"

#include <algorithm>

#include "ccgrag/lex.hpp"

namespace ccgrag {

namespace {

constexpr int kMaxSnippets = 10;
// Slack absorbs the error of the approximate tokenizer.
constexpr double kBudgetSlack = 0.9;

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
  return lines;
}

std::string render_snippet(const Snippet& s, const char* marker) {
  std::string block;
  block += marker;
  block += " the below code fragment can be found in:\n";
  block += marker;
  block += " ";
  block += s.file_path;
  block += "\n";
  for (const std::string& line : s.lines) {
    block += marker;
    block += " ";
    block += line;
    block += "\n";
  }
  block += "\n";
  return block;
}

}  // namespace

Snippet to_snippet(const Candidate& c) {
  Snippet s;
  s.file_path = c.entry->file_path;
  s.anchor_line = c.entry->anchor_line;
  s.window_start = c.entry->window_start;
  s.lines = split_lines(c.entry->value);
  s.score = c.fine_cost.has_value() ? -*c.fine_cost : c.coarse_score;
  s.rank = c.rank;
  return s;
}

PromptBundle compose_prompt(const std::vector<Snippet>& ranked, std::string_view context_text,
                            int window_budget_tokens, Language lang) {
  const char* marker = line_comment_marker(lang);
  const int half_budget =
      static_cast<int>(static_cast<double>(window_budget_tokens) / 2.0 * kBudgetSlack);

  PromptBundle bundle;

  // Keep the best-ranked prefix of snippets that fits its half of the
  // budget, at most kMaxSnippets.
  std::vector<std::string> blocks;
  int snippet_tokens = 0;
  for (const Snippet& s : ranked) {
    if (static_cast<int>(blocks.size()) >= kMaxSnippets) {
      bundle.truncated = true;
      break;
    }
    std::string block = render_snippet(s, marker);
    const int cost = lex::approx_token_count(block);
    if (snippet_tokens + cost > half_budget) {
      bundle.truncated = true;
      break;
    }
    snippet_tokens += cost;
    blocks.push_back(std::move(block));
    bundle.snippets.push_back(s);
  }

  // Context keeps its tail when over budget. Tokens never span lines under
  // the approximate counter, so per-line counts add up exactly.
  std::string context(context_text);
  if (lex::approx_token_count(context) > half_budget) {
    bundle.truncated = true;
    const std::vector<std::string> lines = split_lines(context);
    std::vector<int> per_line(lines.size());
    int total = 0;
    for (size_t i = 0; i < lines.size(); ++i) {
      per_line[i] = lex::approx_token_count(lines[i]);
      total += per_line[i];
    }
    size_t drop = 0;
    while (total > half_budget && drop + 1 < lines.size()) total -= per_line[drop++];
    std::string tail;
    for (size_t i = drop; i < lines.size(); ++i) {
      tail += lines[i];
      if (i + 1 < lines.size()) tail.push_back('\n');
    }
    context = std::move(tail);
  }

  // Ascending similarity: worst kept snippet first, best immediately before
  // the context.
  for (auto it = blocks.rbegin(); it != blocks.rend(); ++it) bundle.prompt_text += *it;
  bundle.prompt_text += context;
  bundle.snippet_count = static_cast<int>(blocks.size());
  bundle.token_estimate = lex::approx_token_count(bundle.prompt_text);
  return bundle;
}

std::string first_completion_line(std::string_view completion) {
  size_t start = 0;
  while (start < completion.size()) {
    size_t nl = completion.find('\n', start);
    if (nl == std::string_view::npos) nl = completion.size();
    std::string_view line = completion.substr(start, nl - start);
    size_t ws = line.find_last_not_of(" \t\r");
    line = ws == std::string_view::npos ? std::string_view{} : line.substr(0, ws + 1);
    if (!line.empty()) return std::string(line);
    start = nl + 1;
  }
  return "";
}

}  // namespace ccgrag
