#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "neardup/text.hpp"
#include "neardup/util.hpp"

namespace neardup {

// Planted-duplicate corpus: group_count groups share a base text each, with
// every non-base member perturbed by random character substitutions at
// edit_rate per character. Remaining documents are independent singletons.
// Group members and singletons are shuffled over the output positions.
struct SyntheticSpec {
  uint64_t doc_count = 1000;
  uint64_t group_count = 100;
  uint32_t group_size_min = 2;
  uint32_t group_size_max = 2;
  Ratio edit_rate{1, 100};  // probability a character is substituted
  uint32_t base_len_min = 600;
  uint32_t base_len_max = 1200;  // inclusive
  uint64_t seed = 1;
};

// A within-group pair with its measured exact window Jaccard.
struct PlantedPair {
  uint64_t lo = 0;
  uint64_t hi = 0;
  double window_jaccard = 0.0;
};

struct SyntheticCorpus {
  std::vector<std::string> texts;    // by output position = doc index
  std::vector<PlantedPair> planted;  // all within-group pairs, lo < hi, sorted
};

// Deterministic in the spec (same spec, same corpus bit for bit). Jaccard in
// the truth list is measured on the generated texts with the given window.
SyntheticCorpus generate_synthetic(const SyntheticSpec& spec, uint32_t shingle_len,
                                   ShingleUnit unit);

// corpus_path gets one {"text": ...} JSONL line per document; truth_path gets
// one {"lo", "hi", "jaccard"} line per planted pair.
void write_synthetic(const SyntheticCorpus& corpus, const std::string& corpus_path,
                     const std::string& truth_path);

std::vector<PlantedPair> read_truth_file(const std::string& path);

}  // namespace neardup
