#include "ccgrag/index_store.hpp"

#include <zlib.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <future>
#include <nlohmann/json.hpp>
#include <sstream>
#include <thread>

#include "ccgrag/errors.hpp"
#include "json_io_detail.hpp"

namespace fs = std::filesystem;

namespace ccgrag {

namespace {

constexpr int kSchemaVersion = 1;

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
  // A trailing newline does not open a new line.
  if (!lines.empty() && lines.back().empty() && !text.empty() && text.back() == '\n') {
    lines.pop_back();
  }
  return lines;
}

struct FileIndex {
  std::vector<IndexEntry> entries;
  std::int64_t lines = 0;
  bool parse_failed = false;
};

FileIndex index_one_file(const std::string& repo_root, const std::string& rel_path, Language lang,
                         int h, int l) {
  FileIndex out;
  std::ifstream in(fs::path(repo_root) / rel_path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string source = sanitize_source(buf.str());
  const std::vector<std::string> lines = split_lines(source);
  out.lines = static_cast<std::int64_t>(lines.size());

  CodeContextGraph graph;
  try {
    graph = build_ccg(rel_path, source, lang);
  } catch (const ParseFailure&) {
    out.parse_failed = true;
    return out;
  }
  if (graph.vertices.empty()) return out;

  const InEdgeIndex index(graph);
  const int half = l / 2;
  for (const Statement& st : graph.vertices) {
    IndexEntry entry;
    entry.key = slice(graph, index, st.id, h, l);
    entry.key_sequence = sequence_slice(entry.key);
    entry.file_path = rel_path;
    entry.anchor_line = st.line_start;
    entry.window_start = std::max(1, st.line_start - half);
    entry.window_end = std::min<int>(static_cast<int>(lines.size()), st.line_start + half);
    std::string value;
    for (int ln = entry.window_start; ln <= entry.window_end; ++ln) {
      if (ln > entry.window_start) value.push_back('\n');
      value += lines[static_cast<size_t>(ln - 1)];
    }
    entry.value = std::move(value);
    out.entries.push_back(std::move(entry));
  }
  return out;
}

}  // namespace

bool glob_match(std::string_view pattern, std::string_view path) {
  // Iterative fnmatch with backtracking on '*'.
  size_t p = 0, s = 0, star = std::string_view::npos, mark = 0;
  while (s < path.size()) {
    if (p < pattern.size() && (pattern[p] == '?' || pattern[p] == path[s])) {
      ++p;
      ++s;
    } else if (p < pattern.size() && pattern[p] == '*') {
      star = p++;
      mark = s;
    } else if (star != std::string_view::npos) {
      p = star + 1;
      s = ++mark;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == '*') ++p;
  return p == pattern.size();
}

std::vector<std::string> list_source_files(const std::string& repo_root,
                                           const std::vector<Language>& languages,
                                           const std::vector<std::string>& exclude_globs) {
  std::vector<std::string> out;
  if (!fs::exists(repo_root)) return out;
  for (const auto& de : fs::recursive_directory_iterator(
           repo_root, fs::directory_options::skip_permission_denied)) {
    if (!de.is_regular_file()) continue;
    const std::string rel = fs::relative(de.path(), repo_root).generic_string();
    Language lang;
    if (!language_of_path(rel, lang)) continue;
    if (std::find(languages.begin(), languages.end(), lang) == languages.end()) continue;
    bool excluded = false;
    for (const std::string& g : exclude_globs) {
      if (glob_match(g, rel)) {
        excluded = true;
        break;
      }
    }
    if (!excluded) out.push_back(rel);
  }
  std::sort(out.begin(), out.end());
  return out;
}

Database build_database(const std::string& repo_root, const std::vector<Language>& languages,
                        int h, int l, const std::vector<std::string>& exclude_globs,
                        unsigned threads) {
  const std::vector<std::string> files = list_source_files(repo_root, languages, exclude_globs);
  if (files.empty()) {
    throw NoSourceFiles("no source files under " + repo_root);
  }

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(files.size()));

  // Per-file indexing fans out; the merge keeps file order, so the result
  // is identical to a sequential build.
  std::vector<FileIndex> results(files.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next.fetch_add(1); i < files.size(); i = next.fetch_add(1)) {
      Language lang;
      language_of_path(files[i], lang);
      results[i] = index_one_file(repo_root, files[i], lang, h, l);
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  Database db;
  db.params.h = h;
  db.params.l = l;
  db.params.languages = languages;
  db.stats.file_count = static_cast<int>(files.size());
  for (FileIndex& fi : results) {
    if (fi.parse_failed) ++db.stats.parse_failures;
    db.stats.source_lines += fi.lines;
    for (IndexEntry& e : fi.entries) db.entries.push_back(std::move(e));
  }
  db.stats.entry_count = static_cast<std::int64_t>(db.entries.size());
  return db;
}

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

ordered_json entry_to_json(const IndexEntry& e) {
  ordered_json j;
  j["file_path"] = e.file_path;
  j["anchor_line"] = e.anchor_line;
  j["window_start"] = e.window_start;
  j["window_end"] = e.window_end;
  j["value"] = e.value;
  j["key"] = jio::slice_to_json_obj(e.key);
  // key_sequence is derived: line-ordered ids + the token bag.
  ordered_json seq;
  ordered_json ids = ordered_json::array();
  for (const Statement& s : e.key_sequence.statements) ids.push_back(s.id);
  seq["statement_ids"] = std::move(ids);
  seq["token_bag"] = e.key_sequence.token_bag;
  j["key_sequence"] = std::move(seq);
  return j;
}

IndexEntry entry_from_json(const json& j) {
  IndexEntry e;
  e.file_path = j.at("file_path").get<std::string>();
  e.anchor_line = j.at("anchor_line").get<int>();
  e.window_start = j.at("window_start").get<int>();
  e.window_end = j.at("window_end").get<int>();
  e.value = j.at("value").get<std::string>();
  e.key = jio::slice_from_json_obj(j.at("key"));
  const json& seq = j.at("key_sequence");
  for (const json& jid : seq.at("statement_ids")) {
    const int id = jid.get<int>();
    const SliceVertex* v = e.key.find(id);
    if (v == nullptr) throw VersionMismatch("key_sequence id not present in key slice");
    e.key_sequence.statements.push_back(v->stmt);
  }
  e.key_sequence.token_bag = seq.at("token_bag").get<std::vector<std::string>>();
  return e;
}

// Deterministic gzip writer: fixed header (mtime 0) so identical databases
// serialize to identical bytes.
void gzip_write(const std::string& path, std::string_view payload) {
  z_stream zs{};
  if (deflateInit2(&zs, Z_BEST_SPEED, Z_DEFLATED, 15 + 16, 8, Z_DEFAULT_STRATEGY) != Z_OK) {
    throw IoError("deflateInit2 failed");
  }
  gz_header header{};
  header.os = 255;
  deflateSetHeader(&zs, &header);

  std::string out;
  out.resize(deflateBound(&zs, static_cast<uLong>(payload.size())) + 64);
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(payload.data()));
  zs.avail_in = static_cast<uInt>(payload.size());
  zs.next_out = reinterpret_cast<Bytef*>(out.data());
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = deflate(&zs, Z_FINISH);
  if (rc != Z_STREAM_END) {
    deflateEnd(&zs);
    throw IoError("deflate failed");
  }
  out.resize(out.size() - zs.avail_out);
  deflateEnd(&zs);

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + path + " for writing");
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw IoError("short write to " + path);
}

std::string gzip_read(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  const std::string compressed = buf.str();

  z_stream zs{};
  if (inflateInit2(&zs, 15 + 32) != Z_OK) throw IoError("inflateInit2 failed");
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(compressed.data()));
  zs.avail_in = static_cast<uInt>(compressed.size());
  std::string out;
  std::string chunk(1 << 20, '\0');
  int rc = Z_OK;
  while (rc != Z_STREAM_END) {
    zs.next_out = reinterpret_cast<Bytef*>(chunk.data());
    zs.avail_out = static_cast<uInt>(chunk.size());
    rc = inflate(&zs, Z_NO_FLUSH);
    if (rc != Z_OK && rc != Z_STREAM_END) {
      inflateEnd(&zs);
      throw IoError("not a gzip database file: " + path);
    }
    out.append(chunk.data(), chunk.size() - zs.avail_out);
  }
  inflateEnd(&zs);
  return out;
}

}  // namespace

void save_database(const Database& db, const std::string& path) {
  std::string payload;
  {
    ordered_json header;
    header["schema_version"] = kSchemaVersion;
    ordered_json params;
    params["h"] = db.params.h;
    params["l"] = db.params.l;
    ordered_json langs = ordered_json::array();
    for (Language lang : db.params.languages) langs.push_back(to_string(lang));
    params["languages"] = std::move(langs);
    params["built_at"] = db.params.built_at;
    header["params"] = std::move(params);
    ordered_json stats;
    stats["entry_count"] = db.stats.entry_count;
    stats["file_count"] = db.stats.file_count;
    stats["parse_failures"] = db.stats.parse_failures;
    stats["source_lines"] = db.stats.source_lines;
    header["stats"] = std::move(stats);
    payload += header.dump();
    payload.push_back('\n');
  }
  for (const IndexEntry& e : db.entries) {
    payload += entry_to_json(e).dump();
    payload.push_back('\n');
  }
  gzip_write(path, payload);
}

Database load_database(const std::string& path) {
  const std::string payload = gzip_read(path);
  Database db;
  size_t start = 0;
  bool header_seen = false;
  while (start < payload.size()) {
    size_t nl = payload.find('\n', start);
    if (nl == std::string::npos) nl = payload.size();
    std::string_view line(payload.data() + start, nl - start);
    start = nl + 1;
    if (line.empty()) continue;
    json j = json::parse(line);
    if (!header_seen) {
      header_seen = true;
      const int version = j.at("schema_version").get<int>();
      if (version != kSchemaVersion) {
        throw VersionMismatch("database schema version " + std::to_string(version) +
                              ", expected " + std::to_string(kSchemaVersion));
      }
      const json& params = j.at("params");
      db.params.h = params.at("h").get<int>();
      db.params.l = params.at("l").get<int>();
      for (const json& jl : params.at("languages")) {
        db.params.languages.push_back(language_from_string(jl.get<std::string>()));
      }
      db.params.built_at = params.at("built_at").get<std::string>();
      const json& stats = j.at("stats");
      db.stats.entry_count = stats.at("entry_count").get<std::int64_t>();
      db.stats.file_count = stats.at("file_count").get<int>();
      db.stats.parse_failures = stats.at("parse_failures").get<int>();
      db.stats.source_lines = stats.at("source_lines").get<std::int64_t>();
      continue;
    }
    db.entries.push_back(entry_from_json(j));
  }
  if (!header_seen) throw VersionMismatch("database file has no header line: " + path);
  return db;
}

bool ExclusionFilter::excludes(const IndexEntry& entry) const {
  if (entry.file_path != file_path) return false;
  if (line_lo < 0) return true;
  return entry.window_end >= line_lo && entry.window_start <= line_hi;
}

namespace {

Database filtered(const Database& db, const ExclusionFilter& filter) {
  Database out;
  out.params = db.params;
  for (const IndexEntry& e : db.entries) {
    if (!filter.excludes(e)) out.entries.push_back(e);
  }
  out.stats = db.stats;
  out.stats.entry_count = static_cast<std::int64_t>(out.entries.size());
  return out;
}

}  // namespace

Database exclude_file(const Database& db, const std::string& file_path) {
  return filtered(db, ExclusionFilter{file_path, -1, -1});
}

Database exclude_file(const Database& db, const std::string& file_path, int line_lo, int line_hi) {
  return filtered(db, ExclusionFilter{file_path, line_lo, line_hi});
}

}  // namespace ccgrag
