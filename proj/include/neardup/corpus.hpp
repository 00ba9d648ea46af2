#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "neardup/text.hpp"

namespace neardup {

// One JSONL record as read from disk. record_ordinal counts valid records
// only; line is the 1-based physical line, kept for the reject log.
struct RawDocument {
  uint64_t file_ordinal = 0;
  uint64_t record_ordinal = 0;
  uint64_t line = 0;
  std::string text;
};

// A document that survived preprocessing. text is NFC-normalized (so
// re-normalizing is the identity) and char_count, measured in code points,
// is >= the configured minimum.
struct CleanDocument {
  uint64_t doc_id = 0;
  std::string text;
  uint64_t char_count = 0;
};

struct RejectEntry {
  std::string file;
  uint64_t line = 0;  // 1-based
  std::string reason;
};

// Collects per-line rejects during ingestion. Not thread-safe; the scans
// that feed it are single-threaded.
class RejectLog {
 public:
  void add(std::string file, uint64_t line, std::string reason);
  const std::vector<RejectEntry>& entries() const { return entries_; }
  void write_jsonl(const std::string& path) const;

 private:
  std::vector<RejectEntry> entries_;
};

struct IngestOptions {
  std::string text_field = "text";
  uint64_t min_chars = 200;
  uint32_t shingle_len = 5;
  ShingleUnit unit = ShingleUnit::kByte;
};

struct FileStats {
  std::string path;
  uint64_t records = 0;    // valid JSONL records (ordinal space)
  uint64_t surviving = 0;  // records that pass preprocessing and can shingle
  uint64_t record_offset = 0;  // prefix sum of records over earlier files
};

// Files in lexicographic path order. doc_id of a record is
// files[i].record_offset + record_ordinal, which is unique, stable across
// reruns, and strictly increasing in (file_ordinal, record_ordinal).
struct CorpusManifest {
  std::vector<FileStats> files;
  uint64_t total_records = 0;
  uint64_t total_surviving = 0;
};

// Outcome of parsing one JSONL line; reason is set when ok is false.
struct LineParse {
  bool ok = false;
  std::string text;
  std::string reason;
};

LineParse parse_jsonl_line(std::string_view line, const std::string& text_field);

// Streams the valid records of one file in order, reporting malformed lines
// to the reject log (never silently dropping them). Returns the record count.
uint64_t for_each_raw_document(const std::string& path, uint64_t file_ordinal,
                               const std::string& text_field, RejectLog* rejects,
                               const std::function<void(RawDocument&&)>& fn);

std::vector<RawDocument> load_jsonl_file(const std::string& path, uint64_t file_ordinal,
                                         const std::string& text_field,
                                         RejectLog* rejects);

// NFC-normalizes and length-filters one record. nullopt means filtered
// (a normal outcome, not an error). doc_id = record_offset + record_ordinal.
std::optional<CleanDocument> preprocess(const RawDocument& raw, uint64_t min_chars,
                                        uint64_t record_offset);

// True when the document yields at least one full window of shingle_len units.
bool can_shingle(const CleanDocument& doc, uint32_t shingle_len, ShingleUnit unit);

// Scans every file once, single-threaded. Paths are sorted lexicographically;
// duplicates or an empty list are configuration errors.
CorpusManifest build_manifest(std::vector<std::string> paths, const IngestOptions& opts,
                              RejectLog* rejects);

// Re-derives the surviving documents of one manifest file, in doc_id order.
// Runs the same filters as build_manifest without logging rejects again.
std::vector<CleanDocument> surviving_documents(const CorpusManifest& manifest,
                                               size_t file_index,
                                               const IngestOptions& opts);

}  // namespace neardup
