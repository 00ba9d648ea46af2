#include "neardup/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdio>
#include <filesystem>
#include <mutex>
#include <set>
#include <thread>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace neardup {

void RunConfig::validate() const {
  if (workspace.empty()) throw ConfigError("workspace directory is required");
  if (bands == 0 || rows == 0) throw ConfigError("bands and rows must be positive");
  if (hash_count != bands * rows) {
    throw ConfigError("hash count " + std::to_string(hash_count) + " must equal bands*rows = " +
                      std::to_string(bands) + "*" + std::to_string(rows));
  }
  if (shingle_len == 0) throw ConfigError("shingle length must be positive");
  if (threshold.num > threshold.den) throw ConfigError("threshold must be at most 1");
  if (bucket_scale.num == 0) throw ConfigError("bucket scale must be positive");
  if (workers == 0) throw ConfigError("worker count must be positive");
  if (memory_budget == 0) throw ConfigError("memory budget must be positive");
  if (tile_size == 0) throw ConfigError("tile size must be positive");
}

uint64_t RunConfig::config_hash() const {
  std::string blob = "neardup-config-v1";
  auto put = [&blob](std::string_view key, const std::string& value) {
    blob += '|';
    blob += key;
    blob += '=';
    blob += value;
  };
  put("text_field", text_field);
  put("hash_count", std::to_string(hash_count));
  put("bands", std::to_string(bands));
  put("rows", std::to_string(rows));
  put("shingle_len", std::to_string(shingle_len));
  put("unit", std::string(shingle_unit_name(unit)));
  put("threshold", threshold.str());
  put("bucket_scale", bucket_scale.str());
  put("min_chars", std::to_string(min_chars));
  put("seed", std::to_string(seed));
  return fnv1a64(blob);
}

IngestOptions RunConfig::ingest_options() const {
  IngestOptions opts;
  opts.text_field = text_field;
  opts.min_chars = min_chars;
  opts.shingle_len = shingle_len;
  opts.unit = unit;
  return opts;
}

std::string run_manifest_path(const RunConfig& c) { return c.workspace + "/run_manifest.json"; }
std::string rejects_path(const RunConfig& c) { return c.workspace + "/rejects.jsonl"; }
std::string compare_stage_path(const RunConfig& c) { return c.workspace + "/compare_stage.json"; }
std::string groups_path(const RunConfig& c) { return c.workspace + "/groups.jsonl"; }
std::string removal_path(const RunConfig& c) { return c.workspace + "/removal.txt"; }
std::string summary_path(const RunConfig& c) { return c.workspace + "/summary.json"; }
std::string timings_path(const RunConfig& c) { return c.workspace + "/timings.json"; }
std::string accuracy_path(const RunConfig& c) { return c.workspace + "/accuracy.json"; }

namespace {

std::string signatures_dir(const RunConfig& c) { return c.workspace + "/signatures"; }
std::string pairs_dir(const RunConfig& c) { return c.workspace + "/pairs"; }

std::vector<std::string> expand_inputs(const std::vector<std::string>& inputs) {
  std::vector<std::string> paths;
  for (const std::string& entry : inputs) {
    std::error_code ec;
    if (fs::is_directory(entry, ec)) {
      std::vector<std::string> found;
      for (const auto& item : fs::directory_iterator(entry, ec)) {
        if (item.is_regular_file() && item.path().extension() == ".jsonl") {
          found.push_back(item.path().string());
        }
      }
      if (ec) throw IoError("cannot list directory '" + entry + "': " + ec.message());
      std::sort(found.begin(), found.end());
      paths.insert(paths.end(), found.begin(), found.end());
    } else if (fs::is_regular_file(entry, ec)) {
      paths.push_back(entry);
    } else {
      throw IoError("input '" + entry + "' does not exist");
    }
  }
  return paths;
}

std::string signature_file_name(uint64_t ordinal, const std::string& source_path) {
  char prefix[16];
  std::snprintf(prefix, sizeof prefix, "%05llu", static_cast<unsigned long long>(ordinal));
  return std::string(prefix) + "_" + fs::path(source_path).stem().string() + ".feds";
}

SignatureFileHeader header_template(const RunConfig& config, uint32_t bucket_count) {
  SignatureFileHeader h;
  h.hash_count = config.hash_count;
  h.bands = config.bands;
  h.rows = config.rows;
  h.bucket_count = bucket_count;
  h.shingle_len = config.shingle_len;
  h.unit = config.unit;
  h.family_seed = config.seed;
  h.bucket_scale = config.bucket_scale;
  return h;
}

// Reader thread fills one slab while the workers hash the previous one
// (double buffering); slab order preserves doc_id order, so the output bytes
// never depend on the worker count.
constexpr size_t kSlabDocs = 1024;

struct SlabQueue {
  std::mutex mu;
  std::condition_variable can_push;
  std::condition_variable can_pop;
  std::optional<std::vector<CleanDocument>> slot;
  bool done = false;
  std::exception_ptr error;

  void push(std::vector<CleanDocument>&& docs) {
    std::unique_lock lock(mu);
    can_push.wait(lock, [&] { return !slot.has_value() || done; });
    if (done) return;  // consumer bailed out
    slot = std::move(docs);
    can_pop.notify_one();
  }

  bool pop(std::vector<CleanDocument>& out) {
    std::unique_lock lock(mu);
    can_pop.wait(lock, [&] { return slot.has_value() || done; });
    if (!slot.has_value()) {
      if (error) std::rethrow_exception(error);
      return false;
    }
    out = std::move(*slot);
    slot.reset();
    can_push.notify_one();
    return true;
  }

  void finish(std::exception_ptr err) {
    std::lock_guard lock(mu);
    error = err;
    done = true;
    can_pop.notify_all();
  }

  void abort() {
    std::lock_guard lock(mu);
    done = true;
    slot.reset();
    can_push.notify_all();
    can_pop.notify_all();
  }
};

// Signs one input file into one signature file. Returns the records written.
uint64_t hash_one_file(const RunConfig& config, const HashFamily& family,
                       const SignatureFileHeader& base_header, const FileStats& stats,
                       uint64_t file_ordinal, const std::string& out_path) {
  SignatureFileHeader header = base_header;
  header.source_ordinal = file_ordinal;
  SignatureFileWriter writer(out_path, header, config.fsync_files);

  SlabQueue queue;
  std::atomic<uint64_t> records_seen{0};
  IngestOptions opts = config.ingest_options();

  std::thread reader([&] {
    std::exception_ptr err;
    try {
      std::vector<CleanDocument> slab;
      slab.reserve(kSlabDocs);
      uint64_t records = for_each_raw_document(
          stats.path, file_ordinal, opts.text_field, nullptr, [&](RawDocument&& raw) {
            std::optional<CleanDocument> doc = preprocess(raw, opts.min_chars, stats.record_offset);
            if (!doc || !can_shingle(*doc, opts.shingle_len, opts.unit)) return;
            slab.push_back(std::move(*doc));
            if (slab.size() >= kSlabDocs) {
              queue.push(std::move(slab));
              slab.clear();
              slab.reserve(kSlabDocs);
            }
          });
      records_seen.store(records, std::memory_order_relaxed);
      if (!slab.empty()) queue.push(std::move(slab));
    } catch (...) {
      err = std::current_exception();
    }
    queue.finish(err);
  });

  std::vector<CleanDocument> slab;
  std::vector<std::vector<uint32_t>> values;
  std::vector<std::vector<uint32_t>> buckets;
  try {
    while (queue.pop(slab)) {
      values.resize(slab.size());
      buckets.resize(slab.size());
      parallel_for_index(slab.size(), config.workers, [&](uint64_t i) {
        Signature sig = signature_of_document(slab[i], family);
        buckets[i] = band_bucket_ids(sig.values, config.bands, config.rows, header.bucket_count);
        values[i] = std::move(sig.values);
      });
      for (size_t i = 0; i < slab.size(); ++i) {
        writer.append(slab[i].doc_id, values[i], buckets[i]);
      }
    }
  } catch (...) {
    queue.abort();
    reader.join();
    throw;
  }
  reader.join();

  if (records_seen.load(std::memory_order_relaxed) != stats.records) {
    throw PrerequisiteError("'" + stats.path + "' changed since the manifest was built");
  }
  if (writer.record_count() != stats.surviving) {
    throw PrerequisiteError("'" + stats.path + "' yielded " +
                            std::to_string(writer.record_count()) +
                            " documents, manifest says " + std::to_string(stats.surviving));
  }
  writer.close();
  return stats.surviving;
}

uint64_t file_size_or_throw(const std::string& path) {
  std::error_code ec;
  uint64_t size = fs::file_size(path, ec);
  if (ec) throw IoError("cannot stat '" + path + "': " + ec.message());
  return size;
}

ordered_json config_parameters_json(const RunConfig& config) {
  ordered_json p;
  p["text_field"] = config.text_field;
  p["hash_count"] = config.hash_count;
  p["bands"] = config.bands;
  p["rows"] = config.rows;
  p["shingle_len"] = config.shingle_len;
  p["unit"] = std::string(shingle_unit_name(config.unit));
  p["threshold"] = config.threshold.str();
  p["bucket_scale"] = config.bucket_scale.str();
  p["min_chars"] = config.min_chars;
  p["seed"] = config.seed;
  return p;
}

ordered_json load_json_artifact(const std::string& path, const std::string& stage_hint) {
  if (!fs::exists(path)) {
    throw PrerequisiteError("'" + path + "' is missing; run the " + stage_hint + " stage first");
  }
  ordered_json j = ordered_json::parse(read_file_bytes(path), nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw IoError("'" + path + "' is not valid JSON");
  }
  return j;
}

void check_config_hash(const ordered_json& artifact, const RunConfig& config,
                       const std::string& path) {
  uint64_t stored = artifact.value("config_hash", static_cast<uint64_t>(0));
  if (stored != config.config_hash()) {
    throw ConfigError("configuration changed since '" + path +
                      "' was written; rerun the earlier stages");
  }
}

}  // namespace

HashStageOutput run_hash_stage(const RunConfig& config) {
  config.validate();
  fs::create_directories(signatures_dir(config));
  fs::create_directories(pairs_dir(config));

  std::vector<std::string> paths = expand_inputs(config.inputs);
  RejectLog rejects;
  IngestOptions opts = config.ingest_options();
  CorpusManifest manifest = build_manifest(paths, opts, &rejects);
  if (manifest.total_surviving == 0) {
    throw ConfigError("no documents survive preprocessing; nothing to deduplicate");
  }

  HashStageOutput out;
  out.bucket_count = choose_bucket_count(manifest.total_surviving, config.bucket_scale);
  HashFamily family =
      derive_family(config.seed, config.hash_count, config.shingle_len, config.unit);
  SignatureFileHeader base = header_template(config, out.bucket_count);

  for (size_t i = 0; i < manifest.files.size(); ++i) {
    std::string sig_path =
        signatures_dir(config) + "/" + signature_file_name(i, manifest.files[i].path);
    hash_one_file(config, family, base, manifest.files[i], i, sig_path);
    out.signature_files.push_back(sig_path);
    out.total_signature_bytes += file_size_or_throw(sig_path);
  }

  rejects.write_jsonl(rejects_path(config));

  ordered_json doc;
  doc["format_version"] = 1;
  doc["config_hash"] = config.config_hash();
  doc["parameters"] = config_parameters_json(config);
  doc["bucket_count"] = out.bucket_count;
  doc["totals"] = {{"records", manifest.total_records},
                   {"surviving", manifest.total_surviving},
                   {"signature_bytes", out.total_signature_bytes}};
  ordered_json files = ordered_json::array();
  for (size_t i = 0; i < manifest.files.size(); ++i) {
    const FileStats& f = manifest.files[i];
    ordered_json entry;
    entry["path"] = f.path;
    entry["records"] = f.records;
    entry["surviving"] = f.surviving;
    entry["record_offset"] = f.record_offset;
    entry["signature_file"] = fs::path(out.signature_files[i]).filename().string();
    files.push_back(entry);
  }
  doc["files"] = files;
  write_file_bytes(run_manifest_path(config), doc.dump(2) + "\n", config.fsync_files);

  out.manifest = std::move(manifest);
  return out;
}

namespace {

struct LoadedManifest {
  uint32_t bucket_count = 0;
  uint64_t total_records = 0;
  uint64_t total_surviving = 0;
  uint64_t total_signature_bytes = 0;
  std::vector<std::string> source_paths;
  std::vector<std::string> signature_files;  // absolute
};

LoadedManifest load_run_manifest(const RunConfig& config) {
  const std::string path = run_manifest_path(config);
  ordered_json doc = load_json_artifact(path, "hash");
  check_config_hash(doc, config, path);
  LoadedManifest m;
  try {
    m.bucket_count = doc.at("bucket_count").get<uint32_t>();
    m.total_records = doc.at("totals").at("records").get<uint64_t>();
    m.total_surviving = doc.at("totals").at("surviving").get<uint64_t>();
    m.total_signature_bytes = doc.at("totals").at("signature_bytes").get<uint64_t>();
    for (const auto& entry : doc.at("files")) {
      m.source_paths.push_back(entry.at("path").get<std::string>());
      m.signature_files.push_back(signatures_dir(config) + "/" +
                                  entry.at("signature_file").get<std::string>());
    }
  } catch (const ordered_json::exception&) {
    throw IoError("'" + path + "' is missing required fields");
  }
  return m;
}

}  // namespace

CompareStageOutput run_compare_stage(const RunConfig& config) {
  config.validate();
  LoadedManifest manifest = load_run_manifest(config);

  if (!config.inputs.empty()) {
    std::vector<std::string> current = expand_inputs(config.inputs);
    std::sort(current.begin(), current.end());
    if (current != manifest.source_paths) {
      throw PrerequisiteError("input files differ from the hashed manifest; rerun the hash stage");
    }
  }

  std::vector<BandRange> ranges = band_partition(config.bands, config.workers);
  GatherPlan plan = plan_gather(manifest.total_signature_bytes, manifest.bucket_count, ranges,
                                config.memory_budget, config.buckets_per_pass);
  SignatureFileHeader expected = header_template(config, manifest.bucket_count);

  GatherMemoryGauge::reset_peak();
  CompareStageOutput out;
  out.buckets_per_pass = plan.buckets_per_pass;
  SimilarityThreshold threshold = config.similarity_threshold();

  std::atomic<uint64_t> candidates{0};
  std::atomic<uint64_t> emitted{0};
  std::vector<std::vector<std::string>> worker_files(config.workers);

  run_workers(config.workers, [&](unsigned w) {
    for (size_t p = 0; p < plan.per_worker[w].size(); ++p) {
      const GatherPass& pass = plan.per_worker[w][p];
      GatherResult gathered = scan_gather(manifest.signature_files, expected, pass.bands,
                                          pass.bucket_first, pass.bucket_last);
      uint64_t pass_candidates = 0;
      for (const GatheredBucket& bucket : gathered.buckets) {
        uint64_t n = bucket.doc_ids.size();
        pass_candidates += n * (n - 1) / 2;
      }
      candidates.fetch_add(pass_candidates, std::memory_order_relaxed);
      std::vector<DuplicatePair> pairs =
          compare_pass(gathered, config.hash_count, threshold, config.tile_size);
      emitted.fetch_add(pairs.size(), std::memory_order_relaxed);
      std::string file = pairs_dir(config) + "/w" + std::to_string(w) + "_p" + std::to_string(p) +
                         ".pairs";
      write_pair_file(file, pairs);
      worker_files[w].push_back(file);
    }
  });

  for (auto& files : worker_files) {
    out.pass_count += static_cast<uint32_t>(files.size());
    out.pair_files.insert(out.pair_files.end(), files.begin(), files.end());
  }
  std::sort(out.pair_files.begin(), out.pair_files.end());
  out.candidate_pairs = candidates.load();
  out.emitted_pairs = emitted.load();
  out.gather_peak_bytes = GatherMemoryGauge::peak();

  ordered_json doc;
  doc["config_hash"] = config.config_hash();
  doc["bucket_count"] = manifest.bucket_count;
  doc["buckets_per_pass"] = out.buckets_per_pass;
  doc["pass_count"] = out.pass_count;
  doc["workers"] = config.workers;
  doc["memory_budget"] = config.memory_budget;
  doc["candidate_pairs"] = out.candidate_pairs;
  doc["emitted_pairs"] = out.emitted_pairs;
  doc["gather_peak_bytes"] = out.gather_peak_bytes;
  ordered_json files = ordered_json::array();
  for (const std::string& f : out.pair_files) files.push_back(fs::path(f).filename().string());
  doc["pair_files"] = files;
  write_file_bytes(compare_stage_path(config), doc.dump(2) + "\n", config.fsync_files);
  return out;
}

DedupReport run_union_stage(const RunConfig& config) {
  config.validate();
  LoadedManifest manifest = load_run_manifest(config);
  const std::string stage_path = compare_stage_path(config);
  ordered_json stage = load_json_artifact(stage_path, "gather-compare");
  check_config_hash(stage, config, stage_path);

  std::vector<DuplicatePair> pairs;
  try {
    for (const auto& name : stage.at("pair_files")) {
      std::vector<DuplicatePair> chunk =
          read_pair_file(pairs_dir(config) + "/" + name.get<std::string>());
      pairs.insert(pairs.end(), chunk.begin(), chunk.end());
    }
  } catch (const ordered_json::exception&) {
    throw IoError("'" + stage_path + "' is missing required fields");
  }

  std::sort(pairs.begin(), pairs.end(), [](const DuplicatePair& a, const DuplicatePair& b) {
    return a.lo != b.lo ? a.lo < b.lo : a.hi < b.hi;
  });
  pairs.erase(std::unique(pairs.begin(), pairs.end(),
                          [](const DuplicatePair& a, const DuplicatePair& b) {
                            return a.lo == b.lo && a.hi == b.hi;
                          }),
              pairs.end());

  UnionFind uf = union_pairs(pairs);
  std::vector<DuplicateGroup> groups = components(uf);
  DedupReport report = emit_report(std::move(groups), manifest.total_surviving, pairs.size());

  std::string group_lines;
  for (const DuplicateGroup& g : report.groups) {
    ordered_json j;
    j["representative"] = g.representative;
    j["members"] = g.members;
    group_lines += j.dump();
    group_lines += '\n';
  }
  write_file_bytes(groups_path(config), group_lines, config.fsync_files);

  std::string removal_lines;
  for (uint64_t doc : report.removals) {
    removal_lines += std::to_string(doc);
    removal_lines += '\n';
  }
  write_file_bytes(removal_path(config), removal_lines, config.fsync_files);

  ordered_json summary;
  summary["total_records"] = manifest.total_records;
  summary["total_documents"] = report.total_documents;
  summary["duplicate_groups"] = report.groups.size();
  summary["near_duplicates"] = report.near_duplicates.size();
  summary["removals"] = report.removals.size();
  summary["distinct_pairs"] = report.distinct_pairs;
  summary["ratio"] = report.ratio;
  summary["ratio_label"] = std::to_string(report.near_duplicates.size()) + " / " +
                           std::to_string(report.total_documents);
  write_file_bytes(summary_path(config), summary.dump(2) + "\n", config.fsync_files);
  return report;
}

DedupReport run_dedup(const RunConfig& config, StageTimings* timings) {
  using clock = std::chrono::steady_clock;
  StageTimings t;
  auto mark = clock::now();
  run_hash_stage(config);
  auto done_hash = clock::now();
  t.hash_seconds = std::chrono::duration<double>(done_hash - mark).count();
  run_compare_stage(config);
  auto done_compare = clock::now();
  t.compare_seconds = std::chrono::duration<double>(done_compare - done_hash).count();
  DedupReport report = run_union_stage(config);
  t.union_seconds = std::chrono::duration<double>(clock::now() - done_compare).count();

  ordered_json j;
  j["workers"] = config.workers;
  j["hash_seconds"] = t.hash_seconds;
  j["compare_seconds"] = t.compare_seconds;
  j["union_seconds"] = t.union_seconds;
  j["total_seconds"] = t.total();
  write_file_bytes(timings_path(config), j.dump(2) + "\n");
  if (timings) *timings = t;
  return report;
}

AccuracyReport run_eval_accuracy(const RunConfig& config) {
  DedupReport report = run_dedup(config);
  LoadedManifest manifest = load_run_manifest(config);

  std::vector<Signature> signatures;
  signatures.reserve(manifest.total_surviving);
  for (const std::string& path : manifest.signature_files) {
    SignatureFileReader reader(path);
    SignatureRecord rec;
    while (reader.next(rec)) {
      signatures.push_back({rec.doc_id, std::move(rec.values)});
    }
  }

  OracleGuard guard;
  guard.override_refusal = config.oracle_override;
  NearDuplicateSet oracle = all_pairs_dupset(signatures, config.hash_count,
                                             config.similarity_threshold(), guard, config.workers);

  AccuracyReport acc;
  acc.corpus_size = manifest.total_surviving;
  acc.pipeline_dupset_size = report.near_duplicates.size();
  acc.oracle_dupset_size = oracle.doc_ids.size();
  if (acc.corpus_size > 0) {
    acc.pipeline_ratio = static_cast<double>(acc.pipeline_dupset_size) / acc.corpus_size;
    acc.oracle_ratio = static_cast<double>(acc.oracle_dupset_size) / acc.corpus_size;
  }
  acc.jaccard_vs_oracle = dupset_jaccard(report.near_duplicates, oracle.doc_ids).value();

  ordered_json j;
  j["corpus_size"] = acc.corpus_size;
  j["jaccard_vs_oracle"] = acc.jaccard_vs_oracle;
  ordered_json methods = ordered_json::array();
  {
    ordered_json m;
    m["method"] = "pipeline-lsh";
    m["dupset_size"] = acc.pipeline_dupset_size;
    m["ratio"] = acc.pipeline_ratio;
    m["ratio_label"] =
        std::to_string(acc.pipeline_dupset_size) + " / " + std::to_string(acc.corpus_size);
    methods.push_back(m);
    m["method"] = "standard-minhash";
    m["dupset_size"] = acc.oracle_dupset_size;
    m["ratio"] = acc.oracle_ratio;
    m["ratio_label"] =
        std::to_string(acc.oracle_dupset_size) + " / " + std::to_string(acc.corpus_size);
    methods.push_back(m);
  }
  j["methods"] = methods;
  write_file_bytes(accuracy_path(config), j.dump(2) + "\n");
  return acc;
}

std::vector<BenchRow> run_bench(const RunConfig& config, const std::vector<unsigned>& worker_counts) {
  if (worker_counts.empty()) throw ConfigError("bench needs at least one worker count");
  std::vector<BenchRow> rows;
  for (unsigned w : worker_counts) {
    RunConfig sub = config;
    sub.workers = w == 0 ? 1 : w;
    sub.workspace = config.workspace + "/bench_w" + std::to_string(sub.workers);
    fs::create_directories(sub.workspace);
    BenchRow row;
    row.workers = sub.workers;
    run_dedup(sub, &row.timings);
    rows.push_back(row);
  }
  ordered_json j = ordered_json::array();
  for (const BenchRow& row : rows) {
    ordered_json r;
    r["workers"] = row.workers;
    r["hash_seconds"] = row.timings.hash_seconds;
    r["compare_seconds"] = row.timings.compare_seconds;
    r["union_seconds"] = row.timings.union_seconds;
    r["total_seconds"] = row.timings.total();
    j.push_back(r);
  }
  fs::create_directories(config.workspace);
  write_file_bytes(config.workspace + "/bench.json", j.dump(2) + "\n");
  return rows;
}

}  // namespace neardup
