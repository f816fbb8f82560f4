#include "support/fixture_repo.hpp"

#include <filesystem>
#include <fstream>
#include <random>

namespace fs = std::filesystem;

namespace ccgrag::testing {

namespace {

const char* kNouns[] = {"values", "items", "rows", "frames", "chunks", "weights"};
const char* kVerbs[] = {"scale", "merge", "filter", "pack", "rank", "fold"};

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
}

long count_lines(const std::string& text) {
  long lines = 0;
  for (char c : text) lines += c == '\n';
  return lines;
}

std::string python_fixture_file(int file_id, int functions, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> cap_dist(20, 90);
  std::uniform_int_distribution<size_t> noun(0, std::size(kNouns) - 1);
  std::uniform_int_distribution<size_t> verb(0, std::size(kVerbs) - 1);
  std::string s;
  s += "# Batch utilities, fixture group " + std::to_string(file_id) + ".\n";
  s += "# Layout mirrors a production processing module.\n";
  s += "\n";
  s += "\"\"\"Helpers for batch " + std::to_string(file_id) + " processing.\"\"\"\n";
  s += "\n";
  s += "import math\n";
  s += "import os\n";
  s += "\n";
  s += "\n";
  s += "CONFIG_" + std::to_string(file_id) + " = {\n";
  s += "    \"alpha\": 1,\n";
  s += "    \"beta\": 2,\n";
  s += "    \"gamma\": 3,\n";
  s += "    \"cap\": 50,\n";
  s += "}\n";
  s += "\n";
  for (int j = 0; j < functions; ++j) {
    const std::string fname =
        std::string(kVerbs[verb(rng)]) + "_" + std::to_string(file_id) + "_" + std::to_string(j);
    const std::string arg = kNouns[noun(rng)];
    const int cap = cap_dist(rng);
    s += "\n";
    s += "# Helper " + std::to_string(j) + ": combines scaling with clamping.\n";
    s += "# Used by the batch driver in this group.\n";
    s += "def " + fname + "(" + arg + ", factor):\n";
    s += "    \"\"\"Scale " + arg + " by factor.\n";
    s += "\n";
    s += "    Returns the aggregated total together with\n";
    s += "    the element count, as a dict.\n";
    s += "    \"\"\"\n";
    s += "\n";
    s += "    total = 0\n";
    s += "    for v in " + arg + ":\n";
    s += "        scaled = v * factor + " + std::to_string(j) + "\n";
    s += "        # Clamp to the configured cap for this group.\n";
    s += "        if scaled > " + std::to_string(cap) + ":\n";
    s += "            scaled = " + std::to_string(cap) + " - v\n";
    s += "        total += scaled\n";
    s += "\n";
    s += "    bundle = dict(\n";
    s += "        total=total,\n";
    s += "        count=len(" + arg + "),\n";
    s += "    )\n";
    s += "    return bundle\n";
  }
  return s;
}

std::string java_fixture_file(int file_id, int methods, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> cap_dist(20, 90);
  std::uniform_int_distribution<size_t> noun(0, std::size(kNouns) - 1);
  std::string s;
  s += "//\n";
  s += "// Fixture batch processor " + std::to_string(file_id) + ".\n";
  s += "// Mirrors the shape of a production aggregation class.\n";
  s += "//\n";
  s += "\n";
  s += "package fixture.batch" + std::to_string(file_id) + ";\n";
  s += "\n";
  s += "import java.util.List;\n";
  s += "\n";
  s += "/**\n";
  s += " * Aggregation helpers for fixture batch " + std::to_string(file_id) + ".\n";
  s += " */\n";
  s += "public class Processor" + std::to_string(file_id) + " {\n";
  s += "\n";
  s += "    private static final int CAP = 50;\n";
  s += "    private int calls = 0;\n";
  for (int j = 0; j < methods; ++j) {
    const int cap = cap_dist(rng);
    const std::string arg = kNouns[noun(rng)];
    s += "\n";
    s += "    /**\n";
    s += "     * Helper " + std::to_string(j) + ": scales and clamps each element.\n";
    s += "     */\n";
    s += "    public int compute" + std::to_string(j) + "(int[] " + arg + ", int factor) {\n";
    s += "        int total = 0;\n";
    s += "        for (int v : " + arg + ") {\n";
    s += "            int scaled = v * factor + " + std::to_string(j) + ";\n";
    s += "\n";
    s += "            // Clamp to the per-method cap.\n";
    s += "            if (scaled > " + std::to_string(cap) + ") {\n";
    s += "                scaled = " + std::to_string(cap) + " - v;\n";
    s += "            }\n";
    s += "            total += scaled;\n";
    s += "        }\n";
    s += "        calls += 1;\n";
    s += "        return total;\n";
    s += "    }\n";
  }
  s += "}\n";
  return s;
}

}  // namespace

long write_fixture_repo(const std::string& dir, int python_files, int java_files,
                        int functions_per_file, unsigned seed) {
  std::mt19937_64 rng(seed);
  long total_lines = 0;
  for (int i = 0; i < python_files; ++i) {
    const std::string content = python_fixture_file(i, functions_per_file, rng);
    total_lines += count_lines(content);
    write_file(fs::path(dir) / ("pkg" + std::to_string(i % 3)) /
                   ("batch_" + std::to_string(i) + ".py"),
               content);
  }
  for (int i = 0; i < java_files; ++i) {
    const std::string content = java_fixture_file(i, functions_per_file, rng);
    total_lines += count_lines(content);
    write_file(fs::path(dir) / "javasrc" / ("Processor" + std::to_string(i) + ".java"), content);
  }
  return total_lines;
}

std::vector<CompletionTask> write_duplication_fixture(const std::string& dir, int pairs) {
  std::vector<CompletionTask> tasks;
  for (int k = 0; k < pairs; ++k) {
    const std::string ks = std::to_string(k);
    std::string fn;
    fn += "\"\"\"Transform helpers, variant " + ks + ".\"\"\"\n";
    fn += "\n";
    fn += "\n";
    fn += "def transform_" + ks + "(values, factor):\n";
    fn += "    total_" + ks + " = factor * " + ks + " + 1\n";
    fn += "    acc = []\n";
    fn += "    for item in values:\n";
    fn += "        shifted = item + total_" + ks + " * 2\n";
    fn += "        acc.append(shifted + " + ks + " * 3)\n";
    fn += "    checked = min(len(acc), " + ks + " + 7)\n";
    fn += "    return acc, checked\n";

    write_file(fs::path(dir) / "donors" / ("donor_" + ks + ".py"), fn);
    write_file(fs::path(dir) / "targets" / ("target_" + ks + ".py"), fn);

    // Target the append line (line 9) of the second copy; the context ends
    // at the `shifted = ...` line the donor also contains.
    CompletionTask t;
    t.repo_root = dir;
    t.file_path = "targets/target_" + ks + ".py";
    t.target_line_no = 9;
    t.level = TaskLevel::line;
    t.language = Language::python;
    t.ground_truth = "        acc.append(shifted + " + ks + " * 3)";
    std::string context;
    size_t line_no = 1;
    size_t start = 0;
    while (line_no < 9) {
      size_t nl = fn.find('\n', start);
      context += fn.substr(start, nl - start + 1);
      start = nl + 1;
      ++line_no;
    }
    t.context_text = std::move(context);
    tasks.push_back(std::move(t));
  }
  return tasks;
}

}  // namespace ccgrag::testing
