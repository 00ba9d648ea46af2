#include "neardup/lsh.hpp"

#include <limits>

namespace neardup {

namespace {

// floor(sqrt(x)) for 128-bit x: float seed, Newton steps, exact adjustment.
// The root of any 128-bit value fits in 64 bits; the iterates are kept in
// 128 bits and capped so inputs near 2^128 cannot wrap the averaging step.
uint64_t isqrt_u128(unsigned __int128 x) {
  constexpr uint64_t kCap = std::numeric_limits<uint64_t>::max();
  if (x == 0) return 0;
  auto r = static_cast<unsigned __int128>(__builtin_sqrtl(static_cast<long double>(x)));
  if (r == 0) r = 1;
  for (int i = 0; i < 4; ++i) r = (r + x / r) / 2;
  if (r > kCap) r = kCap;
  while (r * r > x) --r;
  while (r < kCap && (r + 1) * (r + 1) <= x) ++r;
  return static_cast<uint64_t>(r);
}

}  // namespace

uint32_t choose_bucket_count(uint64_t doc_count, const Ratio& scale) {
  if (scale.num == 0) throw ConfigError("bucket scale must be positive");
  if (doc_count == 0) return 1;
  // ceil(num * sqrt(N) / den) = ceil(sqrt(num^2 * N) / den), exact because
  // sqrt(num^2 * N) is an integer iff num^2 * N is a perfect square
  unsigned __int128 m = static_cast<unsigned __int128>(scale.num) * scale.num * doc_count;
  uint64_t root = isqrt_u128(m);
  bool exact = static_cast<unsigned __int128>(root) * root == m && root % scale.den == 0;
  uint64_t k = exact ? root / scale.den : root / scale.den + 1;
  if (k < 1) k = 1;
  if (k > std::numeric_limits<uint32_t>::max()) {
    throw ConfigError("bucket count " + std::to_string(k) + " exceeds 32 bits; lower the bucket scale");
  }
  return static_cast<uint32_t>(k);
}

std::vector<uint32_t> band_bucket_ids(std::span<const uint32_t> signature,
                                      uint32_t bands, uint32_t rows,
                                      uint32_t bucket_count) {
  if (bands == 0 || rows == 0) throw ConfigError("bands and rows must be positive");
  if (bucket_count == 0) throw ConfigError("bucket count must be positive");
  if (signature.size() != static_cast<size_t>(bands) * rows) {
    throw ConfigError("signature has " + std::to_string(signature.size()) +
                      " values, banding needs " + std::to_string(bands) + "*" +
                      std::to_string(rows));
  }
  std::vector<uint32_t> ids(bands);
  for (uint32_t j = 0; j < bands; ++j) {
    uint64_t sum = 0;  // rows * (2^23) << 2^64, never wraps
    const uint32_t* row = signature.data() + static_cast<size_t>(j) * rows;
    for (uint32_t i = 0; i < rows; ++i) sum += row[i];
    ids[j] = static_cast<uint32_t>(sum % bucket_count);
  }
  return ids;
}

std::vector<BandRange> band_partition(uint32_t bands, uint32_t workers) {
  if (workers == 0) throw ConfigError("worker count must be positive");
  std::vector<BandRange> ranges(workers);
  uint32_t cursor = 0;
  for (uint32_t w = 0; w < workers; ++w) {
    uint32_t len = bands / workers + (w < bands % workers ? 1 : 0);
    ranges[w] = {cursor, cursor + len};
    cursor += len;
  }
  return ranges;
}

}  // namespace neardup
