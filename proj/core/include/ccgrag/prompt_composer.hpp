#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "ccgrag/retriever.hpp"
#include "ccgrag/types.hpp"

namespace ccgrag {

/// Retrieval result normalized for prompting; shared by the graph retriever
/// and the sliding-window baseline.
struct Snippet {
  std::string file_path;
  int anchor_line = 0;   // statement anchor, or window start for the baseline
  int window_start = 0;  // first line of `lines`, 1-based
  std::vector<std::string> lines;
  double score = 0.0;  // coarse score (baseline) or -fine_cost (graph)
  int rank = 0;
};

Snippet to_snippet(const Candidate& c);

struct PromptBundle {
  std::string prompt_text;
  int snippet_count = 0;
  int token_estimate = 0;
  bool truncated = false;
  // Included snippets, best first; consumed by the mock models.
  std::vector<Snippet> snippets;
};

/// Builds the completion prompt: retrieved snippets in ascending similarity
/// order (best last, adjacent to the context), each as a commented block
/// headed by its file path, then the raw context. Snippets get half of the
/// token budget, the context the other half; lowest-ranked snippets are
/// dropped first, then the context is truncated from its start.
PromptBundle compose_prompt(const std::vector<Snippet>& ranked, std::string_view context_text,
                            int window_budget_tokens, Language lang);

struct LlmConfig {
  std::string endpoint_url = "mock:echo";
  std::string model_name = "mock";
  int max_output_tokens = 100;
  double temperature = 0.0;
  int context_window_tokens = 4096;
  std::string auth_token_env_name = "CCGRAG_API_TOKEN";
  int max_retries = 3;
  double timeout_seconds = 30.0;
};

/// Sends the prompt to an OpenAI-compatible completions endpoint (or a
/// built-in `mock:` model) and returns the first line of the completion.
/// Retries transient failures with bounded backoff; never retries 4xx.
std::string complete(const PromptBundle& bundle, const LlmConfig& config);

/// Trimming contract: first non-empty line of the raw completion.
std::string first_completion_line(std::string_view completion);

}  // namespace ccgrag
