#include "neardup/dedup_graph.hpp"

#include <algorithm>
#include <limits>
#include <map>

namespace neardup {

uint32_t UnionFind::add(uint64_t doc_id) {
  auto [it, inserted] = index_.try_emplace(doc_id, static_cast<uint32_t>(parent_.size()));
  if (inserted) {
    if (parent_.size() > std::numeric_limits<uint32_t>::max()) {
      throw ConfigError("too many distinct documents in pairs for the dense index");
    }
    parent_.push_back(it->second);
    rank_.push_back(0);
    docs_.push_back(doc_id);
  }
  return it->second;
}

std::optional<uint32_t> UnionFind::index_of(uint64_t doc_id) const {
  auto it = index_.find(doc_id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

uint32_t UnionFind::find(uint32_t index) {
  uint32_t root = index;
  while (parent_[root] != root) root = parent_[root];
  while (parent_[index] != root) {
    uint32_t next = parent_[index];
    parent_[index] = root;
    index = next;
  }
  return root;
}

void UnionFind::unite(uint32_t a, uint32_t b) {
  uint32_t ra = find(a);
  uint32_t rb = find(b);
  if (ra == rb) return;
  if (rank_[ra] < rank_[rb]) std::swap(ra, rb);
  parent_[rb] = ra;
  if (rank_[ra] == rank_[rb]) ++rank_[ra];
}

UnionFind union_pairs(std::span<const DuplicatePair> pairs) {
  UnionFind uf;
  for (const DuplicatePair& p : pairs) {
    uf.unite(uf.add(p.lo), uf.add(p.hi));
  }
  return uf;
}

std::vector<DuplicateGroup> components(UnionFind& uf) {
  std::map<uint64_t, std::vector<uint64_t>> by_root_min;
  std::unordered_map<uint32_t, uint64_t> root_min;
  const uint32_t n = static_cast<uint32_t>(uf.size());
  for (uint32_t i = 0; i < n; ++i) {
    uint32_t root = uf.find(i);
    uint64_t doc = uf.doc_at(i);
    auto [it, inserted] = root_min.try_emplace(root, doc);
    if (!inserted && doc < it->second) it->second = doc;
  }
  std::unordered_map<uint32_t, std::vector<uint64_t>> members;
  for (uint32_t i = 0; i < n; ++i) {
    members[uf.find(i)].push_back(uf.doc_at(i));
  }
  for (auto& [root, docs] : members) {
    if (docs.size() < 2) continue;  // cannot happen for pair-built structures, kept as a guard
    std::sort(docs.begin(), docs.end());
    by_root_min.emplace(root_min[root], std::move(docs));
  }
  std::vector<DuplicateGroup> groups;
  groups.reserve(by_root_min.size());
  for (auto& [rep, docs] : by_root_min) {
    groups.push_back({rep, std::move(docs)});
  }
  return groups;
}

DedupReport emit_report(std::vector<DuplicateGroup> groups, uint64_t total_documents,
                        uint64_t distinct_pairs) {
  DedupReport report;
  report.groups = std::move(groups);
  report.total_documents = total_documents;
  report.distinct_pairs = distinct_pairs;
  for (const DuplicateGroup& g : report.groups) {
    for (uint64_t doc : g.members) {
      report.near_duplicates.push_back(doc);
      if (doc != g.representative) report.removals.push_back(doc);
    }
  }
  std::sort(report.near_duplicates.begin(), report.near_duplicates.end());
  std::sort(report.removals.begin(), report.removals.end());
  if (total_documents > 0) {
    report.ratio = static_cast<double>(report.near_duplicates.size()) /
                   static_cast<double>(total_documents);
  }
  return report;
}

}  // namespace neardup
