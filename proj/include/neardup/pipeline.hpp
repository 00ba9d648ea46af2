#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "neardup/compare.hpp"
#include "neardup/corpus.hpp"
#include "neardup/dedup_graph.hpp"
#include "neardup/lsh.hpp"
#include "neardup/minhash.hpp"
#include "neardup/oracle.hpp"
#include "neardup/sigstore.hpp"

namespace neardup {

// Everything a run needs. Fields up to and including `seed` shape the
// artifacts and are covered by config_hash(); workers, memory budget and
// friends only shape the execution schedule, never the report bytes.
struct RunConfig {
  std::vector<std::string> inputs;  // JSONL files, or directories of *.jsonl
  std::string workspace;
  std::string text_field = "text";
  uint32_t hash_count = 128;
  uint32_t bands = 16;
  uint32_t rows = 8;
  uint32_t shingle_len = 5;
  ShingleUnit unit = ShingleUnit::kByte;
  Ratio threshold{4, 5};     // similarity strictly above this is a duplicate
  Ratio bucket_scale{2, 1};  // K = ceil(scale * sqrt(N))
  uint64_t min_chars = 200;
  // every function of the seed-5 family clears the uniformity and collision
  // acceptance gates; a new default must be re-qualified against them
  uint64_t seed = 5;

  unsigned workers = 1;
  uint64_t memory_budget = 1ull << 30;  // gather budget, bytes
  std::optional<uint32_t> buckets_per_pass;  // override for the planner's C
  uint32_t tile_size = 32;
  bool fsync_files = false;
  bool oracle_override = false;  // lifts the all-pairs oracle size refusal

  void validate() const;
  uint64_t config_hash() const;
  IngestOptions ingest_options() const;
  SimilarityThreshold similarity_threshold() const { return {threshold}; }
};

// Workspace file layout, shared by the stages and the tests.
std::string run_manifest_path(const RunConfig& config);
std::string rejects_path(const RunConfig& config);
std::string compare_stage_path(const RunConfig& config);
std::string groups_path(const RunConfig& config);
std::string removal_path(const RunConfig& config);
std::string summary_path(const RunConfig& config);
std::string timings_path(const RunConfig& config);
std::string accuracy_path(const RunConfig& config);

struct HashStageOutput {
  CorpusManifest manifest;
  uint32_t bucket_count = 0;
  std::vector<std::string> signature_files;  // absolute paths, source order
  uint64_t total_signature_bytes = 0;
};

// Ingests, signs and persists every input file; writes run_manifest.json and
// rejects.jsonl. Output bytes are identical for any worker count.
HashStageOutput run_hash_stage(const RunConfig& config);

struct CompareStageOutput {
  uint32_t buckets_per_pass = 0;
  uint32_t pass_count = 0;       // summed over workers
  uint64_t candidate_pairs = 0;  // within-bucket pairs examined
  uint64_t emitted_pairs = 0;    // records written across pair files
  uint64_t gather_peak_bytes = 0;
  std::vector<std::string> pair_files;
};

// Plans gather passes against the memory budget, runs the per-band scans and
// bucket comparisons, and writes one pair file per worker per pass plus
// compare_stage.json. Requires a matching hash stage in the workspace.
CompareStageOutput run_compare_stage(const RunConfig& config);

// Merges the pair files (sort + distinct), builds the union graph, and writes
// groups.jsonl, removal.txt and summary.json. The report bytes depend only on
// the artifact-shaping config, never on workers or pass structure.
DedupReport run_union_stage(const RunConfig& config);

struct StageTimings {
  double hash_seconds = 0.0;
  double compare_seconds = 0.0;
  double union_seconds = 0.0;

  double total() const { return hash_seconds + compare_seconds + union_seconds; }
};

// hash -> gather/compare -> union, equal to running the stages separately.
// Wall-clock per stage lands in timings.json, kept out of the reports.
DedupReport run_dedup(const RunConfig& config, StageTimings* timings = nullptr);

struct AccuracyReport {
  uint64_t corpus_size = 0;
  uint64_t pipeline_dupset_size = 0;
  uint64_t oracle_dupset_size = 0;
  double pipeline_ratio = 0.0;
  double oracle_ratio = 0.0;
  double jaccard_vs_oracle = 0.0;
};

// Full pipeline, then the exhaustive-comparison reference over the very same
// signatures; reports both near-duplicate ratios and their set Jaccard.
AccuracyReport run_eval_accuracy(const RunConfig& config);

struct BenchRow {
  unsigned workers = 0;
  StageTimings timings;
};

// One full dedup per worker count, each in its own sub-workspace.
std::vector<BenchRow> run_bench(const RunConfig& config, const std::vector<unsigned>& worker_counts);

}  // namespace neardup
