#pragma once

#include <string>
#include <vector>

#include "ccgrag/eval_harness.hpp"

namespace ccgrag::testing {

// Deterministic synthetic repository with realistic texture: module headers,
// docstrings, blank lines, multi-line calls, classes and helpers. Returns
// total written source lines.
long write_fixture_repo(const std::string& dir, int python_files, int java_files,
                        int functions_per_file, unsigned seed);

// Repository of near-duplicate function pairs: each function exists in
// donors/*.py and again in targets/*.py. Returns one completion task per
// pair targeting a mid-function line of the *second* copy.
std::vector<CompletionTask> write_duplication_fixture(const std::string& dir, int pairs);

}  // namespace ccgrag::testing
