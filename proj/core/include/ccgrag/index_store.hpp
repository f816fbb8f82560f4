#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ccgrag/slicer.hpp"
#include "ccgrag/types.hpp"

namespace ccgrag {

/// One database record: a statement's CCG slice (the key) mapped to the
/// source lines surrounding the statement (the value).
struct IndexEntry {
  CcgSlice key;
  SequenceSlice key_sequence;
  std::string value;  // snippet lines joined with '\n'
  std::string file_path;
  int anchor_line = 0;
  int window_start = 0;  // 1-based, inclusive
  int window_end = 0;

  bool operator==(const IndexEntry&) const = default;
};

struct DatabaseParams {
  int h = 5;
  int l = 20;
  std::vector<Language> languages;
  std::string built_at;  // empty unless stamped by the CLI

  bool operator==(const DatabaseParams&) const = default;
};

struct DatabaseStats {
  std::int64_t entry_count = 0;
  int file_count = 0;
  int parse_failures = 0;  // files skipped with a warning
  std::int64_t source_lines = 0;

  bool operator==(const DatabaseStats&) const = default;
};

struct Database {
  std::vector<IndexEntry> entries;  // ordered by (file_path, anchor_line, id)
  DatabaseParams params;
  DatabaseStats stats;

  bool operator==(const Database&) const = default;
};

/// Repository files eligible for indexing, repo-relative, sorted.
std::vector<std::string> list_source_files(const std::string& repo_root,
                                           const std::vector<Language>& languages,
                                           const std::vector<std::string>& exclude_globs);

/// Shell-style glob match; '*' crosses path separators, '?' matches one char.
bool glob_match(std::string_view pattern, std::string_view path);

Database build_database(const std::string& repo_root, const std::vector<Language>& languages,
                        int h, int l, const std::vector<std::string>& exclude_globs = {},
                        unsigned threads = 0);

// Gzip-compressed JSON-lines: one header line, then one entry per line.
void save_database(const Database& db, const std::string& path);
Database load_database(const std::string& path);

/// Retrieval-time leakage guard: drops entries of `file_path`, or only those
/// whose value window intersects [line_lo, line_hi] when a range is given.
struct ExclusionFilter {
  std::string file_path;
  int line_lo = -1;  // -1/-1 = whole file
  int line_hi = -1;

  bool excludes(const IndexEntry& entry) const;
};

Database exclude_file(const Database& db, const std::string& file_path);
Database exclude_file(const Database& db, const std::string& file_path, int line_lo, int line_hi);

}  // namespace ccgrag
