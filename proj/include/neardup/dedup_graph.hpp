#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "neardup/compare.hpp"

namespace neardup {

// Disjoint sets over the doc_ids that appear in pairs, densely renumbered so
// memory scales with the duplicate population, not the corpus.
class UnionFind {
 public:
  // get-or-create the dense index of a doc_id
  uint32_t add(uint64_t doc_id);
  std::optional<uint32_t> index_of(uint64_t doc_id) const;
  uint32_t find(uint32_t index);  // path-compressing
  void unite(uint32_t a, uint32_t b);  // by rank
  size_t size() const { return parent_.size(); }
  uint64_t doc_at(uint32_t index) const { return docs_[index]; }

 private:
  std::vector<uint32_t> parent_;
  std::vector<uint8_t> rank_;
  std::vector<uint64_t> docs_;
  std::unordered_map<uint64_t, uint32_t> index_;
};

// Connectivity equals the transitive closure of the pair list; order and
// repetition of pairs never matter.
UnionFind union_pairs(std::span<const DuplicatePair> pairs);

struct DuplicateGroup {
  uint64_t representative = 0;  // min member, the one kept
  std::vector<uint64_t> members;  // sorted, size >= 2
};

// One group per component with >= 2 members, members sorted, groups sorted by
// representative. Canonical regardless of how the structure was built.
std::vector<DuplicateGroup> components(UnionFind& uf);

struct DedupReport {
  std::vector<DuplicateGroup> groups;
  std::vector<uint64_t> near_duplicates;  // every doc in any group, sorted
  std::vector<uint64_t> removals;         // near_duplicates minus representatives
  uint64_t total_documents = 0;           // corpus size the ratio is over
  uint64_t distinct_pairs = 0;
  double ratio = 0.0;                     // |near_duplicates| / total_documents
};

DedupReport emit_report(std::vector<DuplicateGroup> groups, uint64_t total_documents,
                        uint64_t distinct_pairs);

}  // namespace neardup
