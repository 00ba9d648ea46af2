#include "neardup/corpus.hpp"

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>

#include "neardup/util.hpp"

namespace neardup {

void RejectLog::add(std::string file, uint64_t line, std::string reason) {
  entries_.push_back({std::move(file), line, std::move(reason)});
}

void RejectLog::write_jsonl(const std::string& path) const {
  std::string out;
  for (const auto& e : entries_) {
    nlohmann::ordered_json j;
    j["file"] = e.file;
    j["line"] = e.line;
    j["reason"] = e.reason;
    out += j.dump();
    out += '\n';
  }
  write_file_bytes(path, out);
}

LineParse parse_jsonl_line(std::string_view line, const std::string& text_field) {
  LineParse result;
  nlohmann::json j = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) {
    result.reason = "invalid_json";
    return result;
  }
  if (!j.is_object()) {
    result.reason = "not_an_object";
    return result;
  }
  auto it = j.find(text_field);
  if (it == j.end()) {
    result.reason = "missing_text_field";
    return result;
  }
  if (!it->is_string()) {
    result.reason = "text_field_not_string";
    return result;
  }
  result.ok = true;
  result.text = it->get<std::string>();
  return result;
}

uint64_t for_each_raw_document(const std::string& path, uint64_t file_ordinal,
                               const std::string& text_field, RejectLog* rejects,
                               const std::function<void(RawDocument&&)>& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "': " + std::strerror(errno));
  std::string line;
  uint64_t line_no = 0;
  uint64_t ordinal = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;  // blank lines are not records and not rejects
    LineParse parsed = parse_jsonl_line(line, text_field);
    if (!parsed.ok) {
      if (rejects) rejects->add(path, line_no, parsed.reason);
      continue;
    }
    RawDocument raw;
    raw.file_ordinal = file_ordinal;
    raw.record_ordinal = ordinal++;
    raw.line = line_no;
    raw.text = std::move(parsed.text);
    fn(std::move(raw));
  }
  if (in.bad()) throw IoError("read failed for '" + path + "'");
  return ordinal;
}

std::vector<RawDocument> load_jsonl_file(const std::string& path, uint64_t file_ordinal,
                                         const std::string& text_field,
                                         RejectLog* rejects) {
  std::vector<RawDocument> docs;
  for_each_raw_document(path, file_ordinal, text_field, rejects,
                        [&](RawDocument&& raw) { docs.push_back(std::move(raw)); });
  return docs;
}

std::optional<CleanDocument> preprocess(const RawDocument& raw, uint64_t min_chars,
                                        uint64_t record_offset) {
  CleanDocument doc;
  doc.text = nfc_normalize(raw.text);
  doc.char_count = codepoint_count(doc.text);
  if (doc.char_count < min_chars) return std::nullopt;
  doc.doc_id = record_offset + raw.record_ordinal;
  return doc;
}

bool can_shingle(const CleanDocument& doc, uint32_t shingle_len, ShingleUnit unit) {
  if (shingle_len == 0) throw ConfigError("shingle length must be positive");
  uint64_t units = unit == ShingleUnit::kByte ? doc.text.size() : doc.char_count;
  return units >= shingle_len;
}

CorpusManifest build_manifest(std::vector<std::string> paths, const IngestOptions& opts,
                              RejectLog* rejects) {
  if (paths.empty()) throw ConfigError("no input files given");
  std::sort(paths.begin(), paths.end());
  for (size_t i = 1; i < paths.size(); ++i) {
    if (paths[i] == paths[i - 1]) throw ConfigError("duplicate input file '" + paths[i] + "'");
  }
  CorpusManifest manifest;
  uint64_t offset = 0;
  for (size_t i = 0; i < paths.size(); ++i) {
    FileStats stats;
    stats.path = paths[i];
    stats.record_offset = offset;
    stats.records = for_each_raw_document(paths[i], i, opts.text_field, rejects,
                                          [&](RawDocument&& raw) {
      std::optional<CleanDocument> doc = preprocess(raw, opts.min_chars, offset);
      if (!doc) {
        if (rejects) rejects->add(paths[i], raw.line, "below_min_chars");
        return;
      }
      if (!can_shingle(*doc, opts.shingle_len, opts.unit)) {
        if (rejects) rejects->add(paths[i], raw.line, "too_short_to_shingle");
        return;
      }
      ++stats.surviving;
    });
    manifest.total_records += stats.records;
    manifest.total_surviving += stats.surviving;
    offset += stats.records;
    manifest.files.push_back(std::move(stats));
  }
  return manifest;
}

std::vector<CleanDocument> surviving_documents(const CorpusManifest& manifest,
                                               size_t file_index,
                                               const IngestOptions& opts) {
  if (file_index >= manifest.files.size()) throw ConfigError("manifest file index out of range");
  const FileStats& stats = manifest.files[file_index];
  std::vector<CleanDocument> docs;
  docs.reserve(stats.surviving);
  uint64_t records = for_each_raw_document(stats.path, file_index, opts.text_field, nullptr,
                                           [&](RawDocument&& raw) {
    std::optional<CleanDocument> doc = preprocess(raw, opts.min_chars, stats.record_offset);
    if (doc && can_shingle(*doc, opts.shingle_len, opts.unit)) {
      docs.push_back(std::move(*doc));
    }
  });
  if (records != stats.records) {
    throw PrerequisiteError("'" + stats.path + "' changed since the manifest was built (" +
                            std::to_string(records) + " records, manifest says " +
                            std::to_string(stats.records) + ")");
  }
  return docs;
}

}  // namespace neardup
