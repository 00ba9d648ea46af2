// neardup: near-duplicate document detection over JSONL corpora.
// MinHash signatures with rolling window hashes, banded LSH bucketing,
// memory-bounded bucket gathering, and union-graph grouping.

#include <cstdio>
#include <exception>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "neardup/pipeline.hpp"
#include "neardup/synthetic.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitPrerequisite = 4;

struct RawOptions {
  std::string threshold = "0.8";
  std::string bucket_scale = "2";
  std::string unit = "byte";
  uint32_t buckets_per_pass = 0;  // 0 means let the planner choose
};

void add_run_options(CLI::App* cmd, neardup::RunConfig& config, RawOptions& raw,
                     bool wants_input) {
  auto* input = cmd->add_option("--input,-i", config.inputs,
                                "JSONL corpus file or directory (repeatable)");
  if (wants_input) input->required();
  cmd->add_option("--workspace,-w", config.workspace, "directory for run artifacts")->required();
  cmd->add_option("--text-field", config.text_field, "JSON field holding the document text");
  cmd->add_option("--hashes", config.hash_count, "signature length H (= bands*rows)");
  cmd->add_option("--bands", config.bands, "LSH band count");
  cmd->add_option("--rows", config.rows, "rows per band");
  cmd->add_option("--shingle-len", config.shingle_len, "window length in units");
  cmd->add_option("--shingle-unit", raw.unit, "window unit: byte or codepoint");
  cmd->add_option("--threshold", raw.threshold, "duplicate similarity threshold (exceeding it)");
  cmd->add_option("--bucket-scale", raw.bucket_scale, "bucket count scale in K = scale*sqrt(N)");
  cmd->add_option("--min-chars", config.min_chars, "drop documents with fewer characters");
  cmd->add_option("--seed", config.seed, "hash family seed");
  cmd->add_option("--workers", config.workers, "worker thread count");
  cmd->add_option("--memory-budget", config.memory_budget, "gather memory budget in bytes");
  cmd->add_option("--buckets-per-pass", raw.buckets_per_pass,
                  "override the planner's buckets per gather pass");
  cmd->add_option("--tile-size", config.tile_size, "comparison kernel tile size");
  cmd->add_flag("--fsync", config.fsync_files, "fsync artifacts on close");
  cmd->set_config("--config", "", "read options from an INI file");
}

void finalize_config(neardup::RunConfig& config, const RawOptions& raw) {
  config.threshold = neardup::Ratio::parse(raw.threshold);
  config.bucket_scale = neardup::Ratio::parse(raw.bucket_scale);
  config.unit = neardup::parse_shingle_unit(raw.unit);
  if (raw.buckets_per_pass > 0) config.buckets_per_pass = raw.buckets_per_pass;
  config.validate();
}

void print_report(const neardup::DedupReport& report) {
  std::printf("documents:        %llu\n", static_cast<unsigned long long>(report.total_documents));
  std::printf("duplicate groups: %zu\n", report.groups.size());
  std::printf("near duplicates:  %zu\n", report.near_duplicates.size());
  std::printf("removals:         %zu\n", report.removals.size());
  std::printf("distinct pairs:   %llu\n", static_cast<unsigned long long>(report.distinct_pairs));
  std::printf("ratio:            %.6f (%zu / %llu)\n", report.ratio,
              report.near_duplicates.size(),
              static_cast<unsigned long long>(report.total_documents));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"near-duplicate document detection (MinHash + LSH)"};
  app.require_subcommand(1);

  neardup::RunConfig config;
  config.workers = std::thread::hardware_concurrency() ? std::thread::hardware_concurrency() : 1;
  RawOptions raw;

  auto* cmd_dedup = app.add_subcommand("dedup", "run the full pipeline: hash, compare, union");
  add_run_options(cmd_dedup, config, raw, true);

  auto* cmd_hash = app.add_subcommand("hash", "ingest and sign the corpus");
  add_run_options(cmd_hash, config, raw, true);

  auto* cmd_compare =
      app.add_subcommand("gather-compare", "gather buckets and emit duplicate pairs");
  add_run_options(cmd_compare, config, raw, false);

  auto* cmd_union = app.add_subcommand("union", "merge pairs into groups and reports");
  add_run_options(cmd_union, config, raw, false);

  auto* cmd_eval = app.add_subcommand("eval-accuracy",
                                      "compare the pipeline against the all-pairs reference");
  add_run_options(cmd_eval, config, raw, true);
  cmd_eval->add_flag("--force-oracle", config.oracle_override,
                     "run the quadratic reference even past the size guard");

  auto* cmd_bench = app.add_subcommand("bench", "time the stages at several worker counts");
  add_run_options(cmd_bench, config, raw, true);
  std::vector<unsigned> bench_workers{1, 2, 4, 8};
  cmd_bench->add_option("--worker-counts", bench_workers, "worker counts to time");

  auto* cmd_gen = app.add_subcommand("gen-synthetic", "generate a planted-duplicate corpus");
  neardup::SyntheticSpec spec;
  std::string corpus_out;
  std::string truth_out;
  std::string edit_rate = "0.01";
  uint32_t gen_shingle_len = 5;
  std::string gen_unit = "byte";
  cmd_gen->add_option("--corpus", corpus_out, "output corpus JSONL path")->required();
  cmd_gen->add_option("--truth", truth_out, "output ground-truth pair JSONL path")->required();
  cmd_gen->add_option("--docs", spec.doc_count, "total documents");
  cmd_gen->add_option("--groups", spec.group_count, "planted duplicate groups");
  cmd_gen->add_option("--group-size-min", spec.group_size_min, "smallest group size");
  cmd_gen->add_option("--group-size-max", spec.group_size_max, "largest group size");
  cmd_gen->add_option("--edit-rate", edit_rate, "per-character substitution probability");
  cmd_gen->add_option("--base-len-min", spec.base_len_min, "shortest base text");
  cmd_gen->add_option("--base-len-max", spec.base_len_max, "longest base text");
  cmd_gen->add_option("--seed", spec.seed, "generator seed");
  cmd_gen->add_option("--shingle-len", gen_shingle_len, "window length for truth Jaccard");
  cmd_gen->add_option("--shingle-unit", gen_unit, "window unit for truth Jaccard");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (cmd_gen->parsed()) {
      spec.edit_rate = neardup::Ratio::parse(edit_rate);
      neardup::SyntheticCorpus corpus =
          neardup::generate_synthetic(spec, gen_shingle_len, neardup::parse_shingle_unit(gen_unit));
      neardup::write_synthetic(corpus, corpus_out, truth_out);
      std::printf("wrote %zu documents to %s and %zu planted pairs to %s\n", corpus.texts.size(),
                  corpus_out.c_str(), corpus.planted.size(), truth_out.c_str());
      return kExitOk;
    }

    finalize_config(config, raw);

    if (cmd_dedup->parsed()) {
      neardup::StageTimings timings;
      neardup::DedupReport report = neardup::run_dedup(config, &timings);
      print_report(report);
      std::printf("stage seconds:    hash %.2f, compare %.2f, union %.2f\n",
                  timings.hash_seconds, timings.compare_seconds, timings.union_seconds);
    } else if (cmd_hash->parsed()) {
      neardup::HashStageOutput out = neardup::run_hash_stage(config);
      std::printf("hashed %llu documents into %zu signature files (%llu bytes, %u buckets)\n",
                  static_cast<unsigned long long>(out.manifest.total_surviving),
                  out.signature_files.size(),
                  static_cast<unsigned long long>(out.total_signature_bytes), out.bucket_count);
    } else if (cmd_compare->parsed()) {
      neardup::CompareStageOutput out = neardup::run_compare_stage(config);
      std::printf("compared %llu candidate pairs over %u passes (C=%u), emitted %llu; "
                  "peak gather %llu bytes\n",
                  static_cast<unsigned long long>(out.candidate_pairs), out.pass_count,
                  out.buckets_per_pass, static_cast<unsigned long long>(out.emitted_pairs),
                  static_cast<unsigned long long>(out.gather_peak_bytes));
    } else if (cmd_union->parsed()) {
      print_report(neardup::run_union_stage(config));
    } else if (cmd_eval->parsed()) {
      neardup::AccuracyReport acc = neardup::run_eval_accuracy(config);
      std::printf("corpus:           %llu documents\n",
                  static_cast<unsigned long long>(acc.corpus_size));
      std::printf("pipeline dupset:  %llu (ratio %.6f)\n",
                  static_cast<unsigned long long>(acc.pipeline_dupset_size), acc.pipeline_ratio);
      std::printf("oracle dupset:    %llu (ratio %.6f)\n",
                  static_cast<unsigned long long>(acc.oracle_dupset_size), acc.oracle_ratio);
      std::printf("dupset jaccard:   %.6f\n", acc.jaccard_vs_oracle);
    } else if (cmd_bench->parsed()) {
      std::vector<neardup::BenchRow> rows = neardup::run_bench(config, bench_workers);
      std::printf("%8s %12s %12s %12s %12s\n", "workers", "hash_s", "compare_s", "union_s",
                  "total_s");
      for (const neardup::BenchRow& row : rows) {
        std::printf("%8u %12.3f %12.3f %12.3f %12.3f\n", row.workers, row.timings.hash_seconds,
                    row.timings.compare_seconds, row.timings.union_seconds, row.timings.total());
      }
    }
    return kExitOk;
  } catch (const neardup::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const neardup::PrerequisiteError& e) {
    std::fprintf(stderr, "prerequisite error: %s\n", e.what());
    return kExitPrerequisite;
  } catch (const neardup::IoError& e) {
    std::fprintf(stderr, "I/O error: %s\n", e.what());
    return kExitIo;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitIo;
  }
}
