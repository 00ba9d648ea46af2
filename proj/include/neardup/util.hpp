#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

namespace neardup {

// Error taxonomy mirrors the CLI exit codes: 2 config, 3 I/O, 4 prerequisite.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PrerequisiteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Exact non-negative rational. Thresholds and scale factors stay in integer
// arithmetic end to end; doubles appear only in reports.
struct Ratio {
  uint64_t num = 0;
  uint64_t den = 1;

  constexpr Ratio() = default;
  Ratio(uint64_t n, uint64_t d);  // reduces; zero denominator is a ConfigError

  // Accepts "3", "4/5" and decimals like "0.8" (at most 9 fractional digits).
  static Ratio parse(std::string_view text);

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string str() const;
  bool operator==(const Ratio&) const = default;
};

// FNV-1a, used for config fingerprints. Not a quality hash; stability across
// runs and platforms is all that matters here.
inline constexpr uint64_t kFnvOffset = 14695981039346656037ull;

inline constexpr uint64_t fnv1a64(std::string_view bytes, uint64_t h = kFnvOffset) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// Uniform draw from [0, bound) by rejection. std::uniform_int_distribution is
// not specified bit-for-bit across standard libraries; this is.
uint64_t bounded_random(std::mt19937_64& rng, uint64_t bound);

// Runs fn(worker_id) for worker_id in [0, workers) on separate threads and
// joins them all. The first exception thrown by any worker is rethrown on the
// caller once every thread has stopped. workers == 1 runs inline.
void run_workers(unsigned workers, const std::function<void(unsigned)>& fn);

// Runs fn(index) for every index in [0, count), distributing indices over up
// to `workers` threads via a shared counter. Safe only when iterations are
// independent; output ordering must not depend on which thread ran what.
void parallel_for_index(uint64_t count, unsigned workers,
                        const std::function<void(uint64_t)>& fn);

// Little-endian scalar I/O used by the binary file formats.
inline void put_u32(std::string& out, uint32_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 24) & 0xff));
}

inline void put_u64(std::string& out, uint64_t v) {
  put_u32(out, static_cast<uint32_t>(v));
  put_u32(out, static_cast<uint32_t>(v >> 32));
}

inline uint32_t get_u32(const unsigned char* p) {
  return static_cast<uint32_t>(p[0]) | static_cast<uint32_t>(p[1]) << 8 |
         static_cast<uint32_t>(p[2]) << 16 | static_cast<uint32_t>(p[3]) << 24;
}

inline uint64_t get_u64(const unsigned char* p) {
  return static_cast<uint64_t>(get_u32(p)) | static_cast<uint64_t>(get_u32(p + 4)) << 32;
}

// Whole-file helpers; both throw IoError with the path in the message.
std::string read_file_bytes(const std::string& path);
void write_file_bytes(const std::string& path, std::string_view bytes, bool fsync_file = false);

}  // namespace neardup
