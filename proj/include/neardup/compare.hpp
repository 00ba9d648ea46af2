#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "neardup/sigstore.hpp"
#include "neardup/util.hpp"

namespace neardup {

// Near-duplicate edge. Similarity is kept exact as match_count out of
// hash_count; floats only appear when reporting.
struct DuplicatePair {
  uint64_t lo = 0;
  uint64_t hi = 0;
  uint32_t match_count = 0;

  bool operator==(const DuplicatePair&) const = default;
};

// Positions where the two signatures agree. Lengths must match.
uint32_t signature_match_count(std::span<const uint32_t> a, std::span<const uint32_t> b);

// Strict acceptance rule: a pair is a duplicate iff
// match_count / hash_count > value, tested as integers (equality rejects).
struct SimilarityThreshold {
  Ratio value{4, 5};

  bool accepts(uint32_t match_count, uint32_t hash_count) const {
    return static_cast<unsigned __int128>(match_count) * value.den >
           static_cast<unsigned __int128>(value.num) * hash_count;
  }
  // smallest accepted match count; anything below can never pass
  uint32_t min_matches(uint32_t hash_count) const;
};

// All pairs of the bucket with similarity above the threshold, lo < hi.
// The upper triangle is walked tile by tile with both tiles' signatures
// staged into local buffers; every pair's match count is computed in full
// (no early exit), and the output set is exactly the naive double loop's.
std::vector<DuplicatePair> compare_bucket(const GatheredBucket& bucket, uint32_t hash_count,
                                          const SimilarityThreshold& threshold,
                                          uint32_t tile_size = 32);

// compare_bucket over every bucket of a gather pass, with exact duplicate
// pairs suppressed within the pass (the same pair found via two bands).
// Cross-pass repeats are allowed; the union stage is idempotent.
std::vector<DuplicatePair> compare_pass(const GatherResult& gathered, uint32_t hash_count,
                                        const SimilarityThreshold& threshold,
                                        uint32_t tile_size = 32);

// Pair stream file: bare little-endian records (lo u64, hi u64,
// match_count u32), no header; one file per worker per pass.
void write_pair_file(const std::string& path, std::span<const DuplicatePair> pairs);
std::vector<DuplicatePair> read_pair_file(const std::string& path);

}  // namespace neardup
