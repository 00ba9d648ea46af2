#include "neardup/synthetic.hpp"

#include <algorithm>
#include <random>

#include <nlohmann/json.hpp>

#include "neardup/corpus.hpp"
#include "neardup/oracle.hpp"

namespace neardup {

namespace {

constexpr std::string_view kAlphabet = "abcdefghijklmnopqrstuvwxyz0123456789 ";

std::string random_text(std::mt19937_64& rng, uint32_t len_min, uint32_t len_max) {
  uint64_t len = len_min + bounded_random(rng, static_cast<uint64_t>(len_max) - len_min + 1);
  std::string text(len, ' ');
  for (auto& c : text) c = kAlphabet[bounded_random(rng, kAlphabet.size())];
  return text;
}

// substitution-only edits keep the length, so windows stay aligned
std::string perturb(const std::string& base, const Ratio& rate, std::mt19937_64& rng) {
  std::string text = base;
  if (rate.num == 0) return text;
  for (auto& c : text) {
    if (bounded_random(rng, rate.den) >= rate.num) continue;
    char replacement = kAlphabet[bounded_random(rng, kAlphabet.size())];
    while (replacement == c) replacement = kAlphabet[bounded_random(rng, kAlphabet.size())];
    c = replacement;
  }
  return text;
}

}  // namespace

SyntheticCorpus generate_synthetic(const SyntheticSpec& spec, uint32_t shingle_len,
                                   ShingleUnit unit) {
  if (spec.group_size_min < 2 || spec.group_size_max < spec.group_size_min) {
    throw ConfigError("group sizes must satisfy 2 <= min <= max");
  }
  if (spec.base_len_min < shingle_len || spec.base_len_max < spec.base_len_min) {
    throw ConfigError("base length range is empty or below the window length");
  }
  if (spec.edit_rate.num > spec.edit_rate.den) {
    throw ConfigError("edit rate must be at most 1");
  }
  std::mt19937_64 rng(spec.seed);

  // group sizes first, then reject specs the doc count cannot hold
  std::vector<uint32_t> sizes(spec.group_count);
  uint64_t grouped = 0;
  for (auto& size : sizes) {
    size = spec.group_size_min +
           static_cast<uint32_t>(bounded_random(
               rng, static_cast<uint64_t>(spec.group_size_max) - spec.group_size_min + 1));
    grouped += size;
  }
  if (grouped > spec.doc_count) {
    throw ConfigError("doc count " + std::to_string(spec.doc_count) + " cannot hold " +
                      std::to_string(grouped) + " grouped documents");
  }

  std::vector<std::string> texts;
  texts.reserve(spec.doc_count);
  std::vector<std::vector<uint64_t>> group_slots(sizes.size());
  for (size_t g = 0; g < sizes.size(); ++g) {
    std::string base = random_text(rng, spec.base_len_min, spec.base_len_max);
    group_slots[g].reserve(sizes[g]);
    for (uint32_t m = 0; m < sizes[g]; ++m) {
      group_slots[g].push_back(texts.size());
      texts.push_back(m == 0 ? base : perturb(base, spec.edit_rate, rng));
    }
  }
  while (texts.size() < spec.doc_count) {
    texts.push_back(random_text(rng, spec.base_len_min, spec.base_len_max));
  }

  // shuffle output positions so duplicates are scattered like in real corpora
  std::vector<uint64_t> position(texts.size());
  for (uint64_t i = 0; i < position.size(); ++i) position[i] = i;
  for (uint64_t i = position.size(); i > 1; --i) {
    std::swap(position[i - 1], position[bounded_random(rng, i)]);
  }
  std::vector<std::string> placed(texts.size());
  for (uint64_t i = 0; i < texts.size(); ++i) placed[position[i]] = std::move(texts[i]);

  SyntheticCorpus corpus;
  corpus.texts = std::move(placed);
  for (const auto& slots : group_slots) {
    for (size_t a = 0; a < slots.size(); ++a) {
      for (size_t b = a + 1; b < slots.size(); ++b) {
        PlantedPair pair;
        pair.lo = std::min(position[slots[a]], position[slots[b]]);
        pair.hi = std::max(position[slots[a]], position[slots[b]]);
        pair.window_jaccard =
            exact_window_jaccard(corpus.texts[pair.lo], corpus.texts[pair.hi], shingle_len, unit)
                .value();
        corpus.planted.push_back(pair);
      }
    }
  }
  std::sort(corpus.planted.begin(), corpus.planted.end(),
            [](const PlantedPair& a, const PlantedPair& b) {
              return a.lo != b.lo ? a.lo < b.lo : a.hi < b.hi;
            });
  return corpus;
}

void write_synthetic(const SyntheticCorpus& corpus, const std::string& corpus_path,
                     const std::string& truth_path) {
  std::string lines;
  for (const std::string& text : corpus.texts) {
    nlohmann::ordered_json j;
    j["text"] = text;
    lines += j.dump();
    lines += '\n';
  }
  write_file_bytes(corpus_path, lines);

  std::string truth;
  for (const PlantedPair& pair : corpus.planted) {
    nlohmann::ordered_json j;
    j["lo"] = pair.lo;
    j["hi"] = pair.hi;
    j["jaccard"] = pair.window_jaccard;
    truth += j.dump();
    truth += '\n';
  }
  write_file_bytes(truth_path, truth);
}

std::vector<PlantedPair> read_truth_file(const std::string& path) {
  std::string bytes = read_file_bytes(path);
  std::vector<PlantedPair> pairs;
  size_t start = 0;
  uint64_t line_no = 0;
  while (start < bytes.size()) {
    size_t end = bytes.find('\n', start);
    if (end == std::string::npos) end = bytes.size();
    std::string_view line(bytes.data() + start, end - start);
    ++line_no;
    if (!line.empty()) {
      nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
      if (j.is_discarded() || !j.contains("lo") || !j.contains("hi")) {
        throw IoError("'" + path + "' line " + std::to_string(line_no) + " is not a truth record");
      }
      PlantedPair pair;
      pair.lo = j["lo"].get<uint64_t>();
      pair.hi = j["hi"].get<uint64_t>();
      pair.window_jaccard = j.value("jaccard", 0.0);
      pairs.push_back(pair);
    }
    start = end + 1;
  }
  return pairs;
}

}  // namespace neardup
