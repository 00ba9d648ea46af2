#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "neardup/compare.hpp"
#include "neardup/corpus.hpp"
#include "neardup/minhash.hpp"

namespace neardup {

struct JaccardResult {
  uint64_t intersection = 0;
  uint64_t union_size = 0;

  // both-empty is defined as 1.0 so the metric is total
  double value() const {
    return union_size == 0 ? 1.0 : static_cast<double>(intersection) / static_cast<double>(union_size);
  }
};

// |A intersect B| / |A union B| over the sets of distinct L-unit windows.
// Throws ShortDocumentError when either text yields no window.
JaccardResult exact_window_jaccard(std::string_view a, std::string_view b,
                                   uint32_t shingle_len, ShingleUnit unit);

struct NearDuplicateSet {
  std::string method;
  std::vector<uint64_t> doc_ids;  // sorted, unique
};

// The all-pairs oracle is quadratic; these bounds keep it desk-scale unless
// explicitly overridden.
struct OracleGuard {
  uint64_t warn_above = 100'000;
  uint64_t refuse_above = 1'000'000;
  bool override_refusal = false;
};

// Exhaustive pairwise signature comparison: every doc with some partner at
// similarity above the threshold. Comparison uses exact block-wise early
// termination (a pair is abandoned only once the accepting match count is
// arithmetically unreachable), so results equal the full scan's.
NearDuplicateSet all_pairs_dupset(std::span<const Signature> signatures, uint32_t hash_count,
                                  const SimilarityThreshold& threshold,
                                  const OracleGuard& guard = {}, unsigned workers = 1);

// Reference MinHash without any banding: signs the corpus with the family,
// then compares all pairs. Deterministic function of (corpus, family, threshold).
NearDuplicateSet standard_minhash_dupset(std::span<const CleanDocument> docs,
                                         const HashFamily& family,
                                         const SimilarityThreshold& threshold,
                                         const OracleGuard& guard = {}, unsigned workers = 1);

// Jaccard between two sorted doc_id sets (the accuracy metric over
// near-duplicate sets).
JaccardResult dupset_jaccard(std::span<const uint64_t> a, std::span<const uint64_t> b);

struct PairErrorSample {
  double exact_jaccard = 0.0;
  double estimated = 0.0;  // signature match fraction
  double abs_error = 0.0;
};

struct EstimatorStats {
  std::vector<PairErrorSample> samples;
  double mean_abs_error = 0.0;
};

// For each document pair: exact window Jaccard vs the signature estimate
// under the family, plus the aggregate mean absolute error.
EstimatorStats estimator_error_stats(
    std::span<const std::pair<CleanDocument, CleanDocument>> pairs, const HashFamily& family);

}  // namespace neardup
