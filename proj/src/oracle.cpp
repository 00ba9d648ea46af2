#include "neardup/oracle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <unordered_set>

#include "neardup/util.hpp"

namespace neardup {

namespace {

// Distinct windows of a unit sequence, viewed as byte strings over the raw
// u32 buffer; the views stay valid while `units` lives.
std::unordered_set<std::string_view> window_set(const std::vector<uint32_t>& units,
                                                uint32_t shingle_len) {
  std::unordered_set<std::string_view> set;
  if (units.size() < shingle_len) return set;
  const size_t count = units.size() - shingle_len + 1;
  set.reserve(count * 2);
  const char* base = reinterpret_cast<const char*>(units.data());
  for (size_t i = 0; i < count; ++i) {
    set.emplace(base + i * sizeof(uint32_t), sizeof(uint32_t) * shingle_len);
  }
  return set;
}

}  // namespace

JaccardResult exact_window_jaccard(std::string_view a, std::string_view b,
                                   uint32_t shingle_len, ShingleUnit unit) {
  if (shingle_len == 0) throw ConfigError("shingle length must be positive");
  std::vector<uint32_t> units_a = text_units(a, unit);
  std::vector<uint32_t> units_b = text_units(b, unit);
  if (units_a.size() < shingle_len || units_b.size() < shingle_len) {
    throw ShortDocumentError("document too short for a " + std::to_string(shingle_len) +
                             "-unit window");
  }
  std::unordered_set<std::string_view> set_a = window_set(units_a, shingle_len);
  std::unordered_set<std::string_view> set_b = window_set(units_b, shingle_len);
  JaccardResult result;
  const auto& small = set_a.size() <= set_b.size() ? set_a : set_b;
  const auto& large = set_a.size() <= set_b.size() ? set_b : set_a;
  for (std::string_view w : small) {
    if (large.contains(w)) ++result.intersection;
  }
  result.union_size = set_a.size() + set_b.size() - result.intersection;
  return result;
}

NearDuplicateSet all_pairs_dupset(std::span<const Signature> signatures, uint32_t hash_count,
                                  const SimilarityThreshold& threshold,
                                  const OracleGuard& guard, unsigned workers) {
  const uint64_t n = signatures.size();
  if (n > guard.refuse_above && !guard.override_refusal) {
    throw ConfigError("all-pairs oracle refused: " + std::to_string(n) + " documents exceed the " +
                      std::to_string(guard.refuse_above) + " guard (quadratic cost); "
                      "pass the override to force it");
  }
  if (n > guard.warn_above) {
    std::fprintf(stderr, "warning: all-pairs oracle over %llu documents is quadratic\n",
                 static_cast<unsigned long long>(n));
  }
  const uint32_t H = hash_count;
  for (const Signature& s : signatures) {
    if (s.values.size() != H) throw ConfigError("oracle signature length mismatch");
  }

  // flat matrix keeps the row scans cache-friendly
  std::vector<uint32_t> matrix(n * H);
  for (uint64_t i = 0; i < n; ++i) {
    std::copy(signatures[i].values.begin(), signatures[i].values.end(), matrix.begin() + i * H);
  }
  const uint32_t needed = threshold.min_matches(H);
  std::vector<unsigned char> has_partner(n, 0);

  parallel_for_index(n, workers, [&](uint64_t i) {
    const uint32_t* a = matrix.data() + i * H;
    const uint32_t allowed_misses = needed > H ? 0 : H - needed;
    for (uint64_t j = i + 1; j < n; ++j) {
      const uint32_t* b = matrix.data() + j * H;
      uint32_t misses = 0;
      uint32_t matches = 0;
      bool alive = needed <= H;
      for (uint32_t h0 = 0; alive && h0 < H; h0 += 32) {
        const uint32_t hi = std::min(H, h0 + 32);
        for (uint32_t h = h0; h < hi; ++h) matches += a[h] == b[h];
        misses = hi - matches;
        if (misses > allowed_misses) alive = false;  // accepting count unreachable
      }
      if (alive && matches >= needed) {
        std::atomic_ref<unsigned char>(has_partner[i]).store(1, std::memory_order_relaxed);
        std::atomic_ref<unsigned char>(has_partner[j]).store(1, std::memory_order_relaxed);
      }
    }
  });

  NearDuplicateSet set;
  set.method = "all-pairs";
  for (uint64_t i = 0; i < n; ++i) {
    if (has_partner[i]) set.doc_ids.push_back(signatures[i].doc_id);
  }
  std::sort(set.doc_ids.begin(), set.doc_ids.end());
  set.doc_ids.erase(std::unique(set.doc_ids.begin(), set.doc_ids.end()), set.doc_ids.end());
  return set;
}

NearDuplicateSet standard_minhash_dupset(std::span<const CleanDocument> docs,
                                         const HashFamily& family,
                                         const SimilarityThreshold& threshold,
                                         const OracleGuard& guard, unsigned workers) {
  std::vector<Signature> signatures(docs.size());
  parallel_for_index(docs.size(), workers, [&](uint64_t i) {
    signatures[i] = signature_of_document(docs[i], family);
  });
  NearDuplicateSet set =
      all_pairs_dupset(signatures, family.hash_count, threshold, guard, workers);
  set.method = "standard-minhash";
  return set;
}

JaccardResult dupset_jaccard(std::span<const uint64_t> a, std::span<const uint64_t> b) {
  JaccardResult result;
  size_t i = 0;
  size_t j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j]) {
      ++result.intersection;
      ++i;
      ++j;
    } else if (a[i] < b[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  result.union_size = a.size() + b.size() - result.intersection;
  return result;
}

EstimatorStats estimator_error_stats(
    std::span<const std::pair<CleanDocument, CleanDocument>> pairs, const HashFamily& family) {
  EstimatorStats stats;
  stats.samples.reserve(pairs.size());
  double total = 0.0;
  for (const auto& [a, b] : pairs) {
    PairErrorSample sample;
    sample.exact_jaccard =
        exact_window_jaccard(a.text, b.text, family.shingle_len, family.unit).value();
    Signature sig_a = signature_of_document(a, family);
    Signature sig_b = signature_of_document(b, family);
    uint32_t matches = signature_match_count(sig_a.values, sig_b.values);
    sample.estimated = static_cast<double>(matches) / static_cast<double>(family.hash_count);
    sample.abs_error = std::abs(sample.estimated - sample.exact_jaccard);
    total += sample.abs_error;
    stats.samples.push_back(sample);
  }
  if (!stats.samples.empty()) stats.mean_abs_error = total / static_cast<double>(stats.samples.size());
  return stats;
}

}  // namespace neardup
