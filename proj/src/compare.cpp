#include "neardup/compare.hpp"

#include <algorithm>

namespace neardup {

uint32_t signature_match_count(std::span<const uint32_t> a, std::span<const uint32_t> b) {
  if (a.size() != b.size()) {
    throw ConfigError("signature length mismatch: " + std::to_string(a.size()) + " vs " +
                      std::to_string(b.size()));
  }
  uint32_t matches = 0;
  for (size_t i = 0; i < a.size(); ++i) matches += a[i] == b[i];
  return matches;
}

uint32_t SimilarityThreshold::min_matches(uint32_t hash_count) const {
  // smallest m with m * den > num * hash_count
  unsigned __int128 lhs = static_cast<unsigned __int128>(value.num) * hash_count;
  uint64_t m = static_cast<uint64_t>(lhs / value.den) + 1;
  return m > hash_count ? hash_count + 1 : static_cast<uint32_t>(m);
}

std::vector<DuplicatePair> compare_bucket(const GatheredBucket& bucket, uint32_t hash_count,
                                          const SimilarityThreshold& threshold,
                                          uint32_t tile_size) {
  if (hash_count == 0) throw ConfigError("hash count must be positive");
  if (tile_size == 0) throw ConfigError("tile size must be positive");
  const size_t n = bucket.doc_ids.size();
  if (bucket.signatures.size() != n * hash_count) {
    throw ConfigError("gathered bucket shape mismatch");
  }
  std::vector<DuplicatePair> out;
  if (n < 2) return out;

  const size_t T = tile_size;
  const uint32_t H = hash_count;
  const uint32_t* rows = bucket.signatures.data();
  std::vector<uint32_t> tile_a(T * H);
  std::vector<uint32_t> tile_b(T * H);

  for (size_t ti = 0; ti < n; ti += T) {
    const size_t ni = std::min(T, n - ti);
    std::copy_n(rows + ti * H, ni * H, tile_a.data());
    for (size_t tj = ti; tj < n; tj += T) {
      const size_t nj = std::min(T, n - tj);
      const uint32_t* right = tile_a.data();
      if (tj != ti) {
        std::copy_n(rows + tj * H, nj * H, tile_b.data());
        right = tile_b.data();
      }
      for (size_t i = 0; i < ni; ++i) {
        const uint32_t* a = tile_a.data() + i * H;
        const size_t j_begin = tj == ti ? i + 1 : 0;
        for (size_t j = j_begin; j < nj; ++j) {
          const uint32_t* b = right + j * H;
          uint32_t matches = 0;
          for (uint32_t h = 0; h < H; ++h) matches += a[h] == b[h];
          if (threshold.accepts(matches, H)) {
            out.push_back({bucket.doc_ids[ti + i], bucket.doc_ids[tj + j], matches});
          }
        }
      }
    }
  }
  return out;
}

std::vector<DuplicatePair> compare_pass(const GatherResult& gathered, uint32_t hash_count,
                                        const SimilarityThreshold& threshold,
                                        uint32_t tile_size) {
  std::vector<DuplicatePair> out;
  for (const GatheredBucket& bucket : gathered.buckets) {
    std::vector<DuplicatePair> pairs = compare_bucket(bucket, hash_count, threshold, tile_size);
    out.insert(out.end(), pairs.begin(), pairs.end());
  }
  std::sort(out.begin(), out.end(), [](const DuplicatePair& a, const DuplicatePair& b) {
    return a.lo != b.lo ? a.lo < b.lo : a.hi < b.hi;
  });
  out.erase(std::unique(out.begin(), out.end(),
                        [](const DuplicatePair& a, const DuplicatePair& b) {
                          return a.lo == b.lo && a.hi == b.hi;
                        }),
            out.end());
  return out;
}

void write_pair_file(const std::string& path, std::span<const DuplicatePair> pairs) {
  std::string bytes;
  bytes.reserve(pairs.size() * 20);
  for (const DuplicatePair& p : pairs) {
    put_u64(bytes, p.lo);
    put_u64(bytes, p.hi);
    put_u32(bytes, p.match_count);
  }
  write_file_bytes(path, bytes);
}

std::vector<DuplicatePair> read_pair_file(const std::string& path) {
  std::string bytes = read_file_bytes(path);
  if (bytes.size() % 20 != 0) {
    throw IoError("'" + path + "' is corrupt: size is not a multiple of the pair record");
  }
  std::vector<DuplicatePair> pairs(bytes.size() / 20);
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  for (auto& pair : pairs) {
    pair.lo = get_u64(p);
    pair.hi = get_u64(p + 8);
    pair.match_count = get_u32(p + 16);
    p += 20;
  }
  return pairs;
}

}  // namespace neardup
