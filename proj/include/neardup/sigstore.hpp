#pragma once

#include <atomic>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "neardup/lsh.hpp"
#include "neardup/text.hpp"
#include "neardup/util.hpp"

namespace neardup {

inline constexpr char kSignatureMagic[4] = {'F', 'E', 'D', 'S'};
inline constexpr uint32_t kSignatureVersion = 1;
inline constexpr size_t kSignatureHeaderBytes = 72;

// Fixed little-endian header. Every signature file of one run carries the
// same parameters except record_count and source_ordinal, which is how
// cross-config artifact mixing is caught.
struct SignatureFileHeader {
  uint32_t hash_count = 0;
  uint32_t bands = 0;
  uint32_t rows = 0;
  uint32_t bucket_count = 0;
  uint32_t shingle_len = 0;
  ShingleUnit unit = ShingleUnit::kByte;
  uint64_t family_seed = 0;
  Ratio bucket_scale{2, 1};
  uint64_t record_count = 0;
  uint64_t source_ordinal = 0;

  size_t record_bytes() const {
    return 8 + 4 * static_cast<size_t>(hash_count) + 4 * static_cast<size_t>(bands);
  }
  bool run_compatible(const SignatureFileHeader& other) const;
  std::string serialize() const;
  static SignatureFileHeader parse(std::string_view bytes, const std::string& path);
};

struct SignatureRecord {
  uint64_t doc_id = 0;
  std::vector<uint32_t> values;   // hash_count entries
  std::vector<uint32_t> buckets;  // bands entries, one bucket id per band
};

// Streaming writer. The header goes out first with record_count 0 and is
// patched on close, so a crash mid-write leaves an obviously short file.
class SignatureFileWriter {
 public:
  SignatureFileWriter(std::string path, SignatureFileHeader header, bool fsync_on_close = false);
  ~SignatureFileWriter();
  SignatureFileWriter(const SignatureFileWriter&) = delete;
  SignatureFileWriter& operator=(const SignatureFileWriter&) = delete;

  void append(uint64_t doc_id, std::span<const uint32_t> values,
              std::span<const uint32_t> buckets);
  uint64_t record_count() const { return count_; }
  void close();

 private:
  void flush_buffer();

  std::string path_;
  SignatureFileHeader header_;
  bool fsync_on_close_;
  std::FILE* file_ = nullptr;
  std::string buffer_;
  uint64_t count_ = 0;
};

// Streaming reader; validates magic, version, and that the file size matches
// record_count exactly (anything else is reported as corruption).
class SignatureFileReader {
 public:
  explicit SignatureFileReader(std::string path);
  ~SignatureFileReader();
  SignatureFileReader(const SignatureFileReader&) = delete;
  SignatureFileReader& operator=(const SignatureFileReader&) = delete;

  const SignatureFileHeader& header() const { return header_; }
  bool next(SignatureRecord& out);

 private:
  std::string path_;
  SignatureFileHeader header_;
  std::FILE* file_ = nullptr;
  std::string record_buf_;
  uint64_t read_ = 0;
};

void write_signature_file(const std::string& path, SignatureFileHeader header,
                          std::span<const SignatureRecord> records,
                          bool fsync_on_close = false);
std::vector<SignatureRecord> read_signature_file(const std::string& path,
                                                 SignatureFileHeader* header_out = nullptr);

// Process-wide running total of gathered signature bytes, the quantity the
// gather budget constrains. Tests read the peak.
class GatherMemoryGauge {
 public:
  static void add(uint64_t bytes);
  static void sub(uint64_t bytes);
  static uint64_t current();
  static uint64_t peak();
  static void reset_peak();
};

// One populated gather cell: documents sorted by doc_id, their signature
// values concatenated row-per-document.
struct GatheredBucket {
  BucketKey key;
  std::vector<uint64_t> doc_ids;
  std::vector<uint32_t> signatures;  // doc_ids.size() * hash_count values
};

// Holds the gauge charge for its buckets until destroyed.
struct GatherResult {
  std::vector<GatheredBucket> buckets;  // sorted by key; every bucket has >= 2 docs
  uint64_t resident_bytes = 0;

  GatherResult() = default;
  GatherResult(GatherResult&& other) noexcept;
  GatherResult& operator=(GatherResult&& other) noexcept;
  GatherResult(const GatherResult&) = delete;
  GatherResult& operator=(const GatherResult&) = delete;
  ~GatherResult();
};

// One sequential scan of every signature file, keeping the documents whose
// bucket id for a band in `bands` falls in [bucket_first, bucket_last).
// Buckets that end up with a single document are dropped. Files must be
// passed in source order so doc_ids arrive ascending.
GatherResult scan_gather(const std::vector<std::string>& paths,
                         const SignatureFileHeader& expected, BandRange bands,
                         uint32_t bucket_first, uint32_t bucket_last);

struct GatherPass {
  BandRange bands;
  uint32_t bucket_first = 0;
  uint32_t bucket_last = 0;  // exclusive
};

struct GatherPlan {
  uint32_t buckets_per_pass = 1;  // C
  std::vector<std::vector<GatherPass>> per_worker;
};

// C = largest value with (total_bytes / bucket_count) * C * workers within
// the budget, clamped to [1, bucket_count]; each worker's band range is then
// tiled with contiguous bucket intervals of width <= C. A budget too small
// for C = 1 is a configuration error.
GatherPlan plan_gather(uint64_t total_signature_bytes, uint32_t bucket_count,
                       const std::vector<BandRange>& worker_bands,
                       uint64_t memory_budget,
                       std::optional<uint32_t> override_buckets_per_pass = {});

}  // namespace neardup
