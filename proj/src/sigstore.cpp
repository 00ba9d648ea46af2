#include "neardup/sigstore.hpp"

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <filesystem>
#include <utility>

#include <unistd.h>

namespace neardup {

bool SignatureFileHeader::run_compatible(const SignatureFileHeader& other) const {
  return hash_count == other.hash_count && bands == other.bands && rows == other.rows &&
         bucket_count == other.bucket_count && shingle_len == other.shingle_len &&
         unit == other.unit && family_seed == other.family_seed &&
         bucket_scale == other.bucket_scale;
}

std::string SignatureFileHeader::serialize() const {
  std::string out;
  out.reserve(kSignatureHeaderBytes);
  out.append(kSignatureMagic, 4);
  put_u32(out, kSignatureVersion);
  put_u32(out, hash_count);
  put_u32(out, bands);
  put_u32(out, rows);
  put_u32(out, bucket_count);
  put_u32(out, shingle_len);
  put_u32(out, static_cast<uint32_t>(unit));
  put_u64(out, family_seed);
  put_u64(out, bucket_scale.num);
  put_u64(out, bucket_scale.den);
  put_u64(out, record_count);
  put_u64(out, source_ordinal);
  return out;
}

SignatureFileHeader SignatureFileHeader::parse(std::string_view bytes, const std::string& path) {
  if (bytes.size() < kSignatureHeaderBytes) {
    throw IoError("'" + path + "' is shorter than a signature file header");
  }
  if (std::memcmp(bytes.data(), kSignatureMagic, 4) != 0) {
    throw IoError("'" + path + "' is not a signature file (bad magic)");
  }
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  uint32_t version = get_u32(p + 4);
  if (version != kSignatureVersion) {
    throw IoError("'" + path + "' has unsupported signature format version " +
                  std::to_string(version));
  }
  SignatureFileHeader h;
  h.hash_count = get_u32(p + 8);
  h.bands = get_u32(p + 12);
  h.rows = get_u32(p + 16);
  h.bucket_count = get_u32(p + 20);
  h.shingle_len = get_u32(p + 24);
  uint32_t unit_tag = get_u32(p + 28);
  if (unit_tag > 1) throw IoError("'" + path + "' has unknown shingle unit tag");
  h.unit = static_cast<ShingleUnit>(unit_tag);
  h.family_seed = get_u64(p + 32);
  uint64_t num = get_u64(p + 40);
  uint64_t den = get_u64(p + 48);
  if (den == 0) throw IoError("'" + path + "' has a zero bucket-scale denominator");
  h.bucket_scale = Ratio(num, den);
  h.record_count = get_u64(p + 56);
  h.source_ordinal = get_u64(p + 64);
  if (h.hash_count == 0 || h.bands == 0 || h.rows == 0 || h.bucket_count == 0) {
    throw IoError("'" + path + "' has zero-valued header parameters");
  }
  return h;
}

SignatureFileWriter::SignatureFileWriter(std::string path, SignatureFileHeader header,
                                         bool fsync_on_close)
    : path_(std::move(path)), header_(header), fsync_on_close_(fsync_on_close) {
  file_ = std::fopen(path_.c_str(), "wb");
  if (!file_) throw IoError("cannot create '" + path_ + "': " + std::strerror(errno));
  header_.record_count = 0;
  buffer_ = header_.serialize();
  buffer_.reserve(1 << 20);
}

SignatureFileWriter::~SignatureFileWriter() {
  if (file_) std::fclose(file_);  // destructor without close(): abandoned file
}

void SignatureFileWriter::flush_buffer() {
  if (buffer_.empty()) return;
  if (std::fwrite(buffer_.data(), 1, buffer_.size(), file_) != buffer_.size()) {
    throw IoError("write failed for '" + path_ + "'");
  }
  buffer_.clear();
}

void SignatureFileWriter::append(uint64_t doc_id, std::span<const uint32_t> values,
                                 std::span<const uint32_t> buckets) {
  if (!file_) throw IoError("signature writer for '" + path_ + "' already closed");
  if (values.size() != header_.hash_count || buckets.size() != header_.bands) {
    throw ConfigError("signature record shape does not match header of '" + path_ + "'");
  }
  put_u64(buffer_, doc_id);
  for (uint32_t v : values) put_u32(buffer_, v);
  for (uint32_t v : buckets) put_u32(buffer_, v);
  ++count_;
  if (buffer_.size() >= (1 << 20)) flush_buffer();
}

void SignatureFileWriter::close() {
  if (!file_) return;
  flush_buffer();
  // patch record_count in place (offset pinned by the header layout)
  std::string counted;
  put_u64(counted, count_);
  bool ok = std::fseek(file_, 56, SEEK_SET) == 0 &&
            std::fwrite(counted.data(), 1, 8, file_) == 8 && std::fflush(file_) == 0;
  if (ok && fsync_on_close_) ok = fsync(fileno(file_)) == 0;
  if (std::fclose(file_) != 0) ok = false;
  file_ = nullptr;
  if (!ok) throw IoError("finalizing '" + path_ + "' failed");
}

SignatureFileReader::SignatureFileReader(std::string path) : path_(std::move(path)) {
  file_ = std::fopen(path_.c_str(), "rb");
  if (!file_) throw IoError("cannot open '" + path_ + "': " + std::strerror(errno));
  try {
    char head[kSignatureHeaderBytes];
    size_t got = std::fread(head, 1, sizeof head, file_);
    header_ = SignatureFileHeader::parse(std::string_view(head, got), path_);
    std::error_code ec;
    uint64_t size = std::filesystem::file_size(path_, ec);
    if (ec) throw IoError("cannot stat '" + path_ + "': " + ec.message());
    uint64_t expect = kSignatureHeaderBytes + header_.record_count * header_.record_bytes();
    if (size != expect) {
      throw IoError("'" + path_ + "' is corrupt: " + std::to_string(size) +
                    " bytes, header says " + std::to_string(expect));
    }
    record_buf_.resize(header_.record_bytes());
  } catch (...) {
    std::fclose(file_);
    file_ = nullptr;
    throw;
  }
}

SignatureFileReader::~SignatureFileReader() {
  if (file_) std::fclose(file_);
}

bool SignatureFileReader::next(SignatureRecord& out) {
  if (read_ >= header_.record_count) return false;
  if (std::fread(record_buf_.data(), 1, record_buf_.size(), file_) != record_buf_.size()) {
    throw IoError("'" + path_ + "' truncated mid-record");
  }
  const auto* p = reinterpret_cast<const unsigned char*>(record_buf_.data());
  out.doc_id = get_u64(p);
  out.values.resize(header_.hash_count);
  for (uint32_t i = 0; i < header_.hash_count; ++i) out.values[i] = get_u32(p + 8 + 4 * i);
  const size_t boff = 8 + 4 * static_cast<size_t>(header_.hash_count);
  out.buckets.resize(header_.bands);
  for (uint32_t j = 0; j < header_.bands; ++j) {
    out.buckets[j] = get_u32(p + boff + 4 * j);
    if (out.buckets[j] >= header_.bucket_count) {
      throw IoError("'" + path_ + "' is corrupt: bucket id out of range");
    }
  }
  ++read_;
  return true;
}

void write_signature_file(const std::string& path, SignatureFileHeader header,
                          std::span<const SignatureRecord> records, bool fsync_on_close) {
  SignatureFileWriter writer(path, header, fsync_on_close);
  for (const SignatureRecord& rec : records) {
    writer.append(rec.doc_id, rec.values, rec.buckets);
  }
  writer.close();
}

std::vector<SignatureRecord> read_signature_file(const std::string& path,
                                                 SignatureFileHeader* header_out) {
  SignatureFileReader reader(path);
  if (header_out) *header_out = reader.header();
  std::vector<SignatureRecord> records;
  records.reserve(reader.header().record_count);
  SignatureRecord rec;
  while (reader.next(rec)) records.push_back(rec);
  return records;
}

namespace {
std::atomic<uint64_t> g_gather_current{0};
std::atomic<uint64_t> g_gather_peak{0};
}  // namespace

void GatherMemoryGauge::add(uint64_t bytes) {
  uint64_t now = g_gather_current.fetch_add(bytes, std::memory_order_relaxed) + bytes;
  uint64_t seen = g_gather_peak.load(std::memory_order_relaxed);
  while (now > seen && !g_gather_peak.compare_exchange_weak(seen, now, std::memory_order_relaxed)) {
  }
}

void GatherMemoryGauge::sub(uint64_t bytes) {
  g_gather_current.fetch_sub(bytes, std::memory_order_relaxed);
}

uint64_t GatherMemoryGauge::current() { return g_gather_current.load(std::memory_order_relaxed); }
uint64_t GatherMemoryGauge::peak() { return g_gather_peak.load(std::memory_order_relaxed); }
void GatherMemoryGauge::reset_peak() {
  g_gather_peak.store(g_gather_current.load(std::memory_order_relaxed), std::memory_order_relaxed);
}

GatherResult::GatherResult(GatherResult&& other) noexcept
    : buckets(std::move(other.buckets)),
      resident_bytes(std::exchange(other.resident_bytes, 0)) {}

GatherResult& GatherResult::operator=(GatherResult&& other) noexcept {
  if (this != &other) {
    GatherMemoryGauge::sub(resident_bytes);
    buckets = std::move(other.buckets);
    resident_bytes = std::exchange(other.resident_bytes, 0);
  }
  return *this;
}

GatherResult::~GatherResult() { GatherMemoryGauge::sub(resident_bytes); }

GatherResult scan_gather(const std::vector<std::string>& paths,
                         const SignatureFileHeader& expected, BandRange bands,
                         uint32_t bucket_first, uint32_t bucket_last) {
  if (bucket_last > expected.bucket_count || bucket_first > bucket_last) {
    throw ConfigError("gather bucket interval out of range");
  }
  if (bands.last > expected.bands || bands.first > bands.last) {
    throw ConfigError("gather band range out of range");
  }
  GatherResult result;
  const uint32_t width = bucket_last - bucket_first;
  const uint32_t range = bands.size();
  const uint32_t H = expected.hash_count;
  const uint64_t entry_bytes = 8 + 4 * static_cast<uint64_t>(H);
  if (width == 0 || range == 0) return result;

  // cell (band, bucket) lives at (band - first) * width + (bucket - first);
  // at most range * C cells, the quantity plan_gather budgeted for
  std::vector<GatheredBucket> cells(static_cast<size_t>(range) * width);
  SignatureRecord rec;
  for (const std::string& path : paths) {
    SignatureFileReader reader(path);
    if (!reader.header().run_compatible(expected)) {
      throw ConfigError("'" + path + "' was written with different parameters than this run");
    }
    while (reader.next(rec)) {
      for (uint32_t band = bands.first; band < bands.last; ++band) {
        uint32_t bucket = rec.buckets[band];
        if (bucket < bucket_first || bucket >= bucket_last) continue;
        GatheredBucket& cell =
            cells[static_cast<size_t>(band - bands.first) * width + (bucket - bucket_first)];
        if (!cell.doc_ids.empty() && cell.doc_ids.back() >= rec.doc_id) {
          throw ConfigError("signature files are not in ascending doc_id order; "
                            "pass them in manifest order");
        }
        cell.doc_ids.push_back(rec.doc_id);
        cell.signatures.insert(cell.signatures.end(), rec.values.begin(), rec.values.end());
        GatherMemoryGauge::add(entry_bytes);
        result.resident_bytes += entry_bytes;
      }
    }
  }

  for (uint32_t b = 0; b < range; ++b) {
    for (uint32_t k = 0; k < width; ++k) {
      GatheredBucket& cell = cells[static_cast<size_t>(b) * width + k];
      if (cell.doc_ids.size() < 2) {
        if (!cell.doc_ids.empty()) {
          GatherMemoryGauge::sub(entry_bytes);
          result.resident_bytes -= entry_bytes;
        }
        continue;
      }
      cell.key = {bands.first + b, bucket_first + k};
      result.buckets.push_back(std::move(cell));
    }
  }
  return result;
}

GatherPlan plan_gather(uint64_t total_signature_bytes, uint32_t bucket_count,
                       const std::vector<BandRange>& worker_bands, uint64_t memory_budget,
                       std::optional<uint32_t> override_buckets_per_pass) {
  if (bucket_count == 0) throw ConfigError("bucket count must be positive");
  if (worker_bands.empty()) throw ConfigError("plan_gather needs at least one worker");
  if (memory_budget == 0) throw ConfigError("memory budget must be positive");
  const uint64_t workers = worker_bands.size();

  uint64_t c;
  if (override_buckets_per_pass) {
    c = *override_buckets_per_pass;
    if (c < 1) throw ConfigError("buckets-per-pass override must be at least 1");
  } else if (total_signature_bytes == 0) {
    c = bucket_count;
  } else {
    // largest C with (total / K) * C * workers <= budget, evaluated exactly
    c = static_cast<uint64_t>(
        static_cast<unsigned __int128>(memory_budget) * bucket_count /
        (static_cast<unsigned __int128>(total_signature_bytes) * workers));
    if (c < 1) {
      throw ConfigError(
          "memory budget " + std::to_string(memory_budget) +
          " cannot hold even one bucket per worker; raise the budget or the bucket scale");
    }
  }
  if (c > bucket_count) c = bucket_count;

  GatherPlan plan;
  plan.buckets_per_pass = static_cast<uint32_t>(c);
  plan.per_worker.resize(worker_bands.size());
  for (size_t w = 0; w < worker_bands.size(); ++w) {
    if (worker_bands[w].size() == 0) continue;
    for (uint64_t lo = 0; lo < bucket_count; lo += c) {
      GatherPass pass;
      pass.bands = worker_bands[w];
      pass.bucket_first = static_cast<uint32_t>(lo);
      pass.bucket_last = static_cast<uint32_t>(std::min<uint64_t>(lo + c, bucket_count));
      plan.per_worker[w].push_back(pass);
    }
  }
  return plan;
}

}  // namespace neardup
