#pragma once

#include <string>
#include <vector>

#include "ccgrag/prompt_composer.hpp"
#include "ccgrag/slicer.hpp"
#include "ccgrag/types.hpp"

namespace ccgrag {

/// Knobs shared by every CLI workflow. Defaults follow the per-module
/// defaults (h=5, l=20, gamma=0.1, window=20, stride=1, top_m=10).
struct Config {
  std::vector<Language> languages{Language::python, Language::java};
  int h = 5;
  int l = 20;
  double gamma = 0.1;
  int coarse_k = 50;
  int top_m = 10;
  int window = 20;
  int stride = 1;
  std::vector<std::string> exclude_globs;
  LlmConfig llm;
  DepHopRule hop_rule = DepHopRule::attach;
};

/// Loads overrides from a JSON config file; unknown keys are rejected.
Config load_config(const std::string& path, Config base = {});

std::string config_to_json(const Config& config);

}  // namespace ccgrag
