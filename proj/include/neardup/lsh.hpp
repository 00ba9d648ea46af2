#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "neardup/util.hpp"

namespace neardup {

// Banding layout: H = bands * rows, band j covers signature rows
// [j*rows, (j+1)*rows). bucket_count is K, frozen at pipeline start from the
// post-filter document count.
struct BandingConfig {
  uint32_t bands = 0;
  uint32_t rows = 0;
  uint32_t bucket_count = 0;
  Ratio bucket_scale{2, 1};

  uint32_t hash_count() const { return bands * rows; }
};

// (band, bucket) cell; bucket ids from different bands are never compared.
struct BucketKey {
  uint32_t band = 0;
  uint32_t bucket = 0;

  auto operator<=>(const BucketKey&) const = default;
};

// K = max(1, ceil(scale * sqrt(doc_count))), evaluated exactly in integer
// arithmetic (no floating point), so every platform picks the same K.
uint32_t choose_bucket_count(uint64_t doc_count, const Ratio& scale);

// Per-band bucket ids: sum of the band's rows values in 64 bits, mod K.
// Identical bands always land in the same bucket, so no identical-band
// candidate is ever missed; sum collisions only add candidates.
std::vector<uint32_t> band_bucket_ids(std::span<const uint32_t> signature,
                                      uint32_t bands, uint32_t rows,
                                      uint32_t bucket_count);

// Half-open band range owned by one worker.
struct BandRange {
  uint32_t first = 0;
  uint32_t last = 0;  // exclusive

  uint32_t size() const { return last - first; }
  bool operator==(const BandRange&) const = default;
};

// Contiguous ranges covering [0, bands) exactly once, sizes differing by at
// most one. More workers than bands leaves the extras with empty ranges.
std::vector<BandRange> band_partition(uint32_t bands, uint32_t workers);

}  // namespace neardup
