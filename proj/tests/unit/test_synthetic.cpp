#include <doctest.h>

#include <algorithm>
#include <set>

#include "neardup/corpus.hpp"
#include "neardup/oracle.hpp"
#include "neardup/synthetic.hpp"
#include "test_helpers.hpp"

using namespace neardup;

namespace {

SyntheticSpec small_spec() {
  SyntheticSpec spec;
  spec.doc_count = 40;
  spec.group_count = 8;
  spec.group_size_min = 2;
  spec.group_size_max = 4;
  spec.edit_rate = Ratio(1, 100);
  spec.base_len_min = 80;
  spec.base_len_max = 160;
  spec.seed = 21;
  return spec;
}

}  // namespace

TEST_SUITE("synthetic") {

TEST_CASE("generation is a pure function of the spec") {
  SyntheticCorpus a = generate_synthetic(small_spec(), 5, ShingleUnit::kByte);
  SyntheticCorpus b = generate_synthetic(small_spec(), 5, ShingleUnit::kByte);
  CHECK(a.texts == b.texts);
  REQUIRE(a.planted.size() == b.planted.size());
  for (size_t i = 0; i < a.planted.size(); ++i) {
    CHECK(a.planted[i].lo == b.planted[i].lo);
    CHECK(a.planted[i].hi == b.planted[i].hi);
    CHECK(a.planted[i].window_jaccard == b.planted[i].window_jaccard);
  }
  SyntheticSpec reseeded = small_spec();
  reseeded.seed = 22;
  CHECK(generate_synthetic(reseeded, 5, ShingleUnit::kByte).texts != a.texts);
}

TEST_CASE("corpus holds the requested documents within the length bounds") {
  SyntheticSpec spec = small_spec();
  SyntheticCorpus corpus = generate_synthetic(spec, 5, ShingleUnit::kByte);
  REQUIRE(corpus.texts.size() == spec.doc_count);
  for (const std::string& text : corpus.texts) {
    CHECK(text.size() >= spec.base_len_min);
    CHECK(text.size() <= spec.base_len_max);
  }
}

TEST_CASE("planted pairs cover every within-group pair, sorted and in range") {
  SyntheticCorpus corpus = generate_synthetic(small_spec(), 5, ShingleUnit::kByte);
  // 8 groups of 2..4 members: between C(2,2)=1 and C(4,2)=6 pairs each
  CHECK(corpus.planted.size() >= 8);
  CHECK(corpus.planted.size() <= 48);
  CHECK(std::is_sorted(corpus.planted.begin(), corpus.planted.end(),
                       [](const PlantedPair& a, const PlantedPair& b) {
                         return a.lo != b.lo ? a.lo < b.lo : a.hi < b.hi;
                       }));
  for (const PlantedPair& pair : corpus.planted) {
    CHECK(pair.lo < pair.hi);
    CHECK(pair.hi < corpus.texts.size());
    // truth jaccard is measured on the emitted texts, so it must reproduce
    CHECK(pair.window_jaccard ==
          exact_window_jaccard(corpus.texts[pair.lo], corpus.texts[pair.hi], 5,
                               ShingleUnit::kByte)
              .value());
  }
}

TEST_CASE("an edit rate of zero plants exact copies") {
  SyntheticSpec spec = small_spec();
  spec.edit_rate = Ratio(0, 1);
  SyntheticCorpus corpus = generate_synthetic(spec, 5, ShingleUnit::kByte);
  for (const PlantedPair& pair : corpus.planted) {
    CHECK(corpus.texts[pair.lo] == corpus.texts[pair.hi]);
    CHECK(pair.window_jaccard == 1.0);
  }
}

TEST_CASE("a light edit rate keeps planted pairs highly similar") {
  SyntheticSpec spec = small_spec();
  spec.base_len_min = 600;
  spec.base_len_max = 1200;
  SyntheticCorpus corpus = generate_synthetic(spec, 5, ShingleUnit::kByte);
  size_t high = 0;
  for (const PlantedPair& pair : corpus.planted) {
    if (pair.window_jaccard > 0.8) ++high;
  }
  CHECK(high >= corpus.planted.size() * 9 / 10);
}

TEST_CASE("invalid specs are rejected up front") {
  SyntheticSpec spec = small_spec();
  spec.group_size_min = 1;
  CHECK_THROWS_AS(generate_synthetic(spec, 5, ShingleUnit::kByte), ConfigError);

  spec = small_spec();
  spec.group_size_max = 1;
  CHECK_THROWS_AS(generate_synthetic(spec, 5, ShingleUnit::kByte), ConfigError);

  spec = small_spec();
  spec.doc_count = 10;  // 8 groups of >= 2 cannot fit
  CHECK_THROWS_AS(generate_synthetic(spec, 5, ShingleUnit::kByte), ConfigError);

  spec = small_spec();
  spec.edit_rate = Ratio(3, 2);
  CHECK_THROWS_AS(generate_synthetic(spec, 5, ShingleUnit::kByte), ConfigError);

  spec = small_spec();
  spec.base_len_min = 4;
  spec.base_len_max = 4;
  CHECK_THROWS_AS(generate_synthetic(spec, 5, ShingleUnit::kByte), ConfigError);
}

TEST_CASE("written corpus and truth files read back consistently") {
  testutil::TempDir dir;
  SyntheticCorpus corpus = generate_synthetic(small_spec(), 5, ShingleUnit::kByte);
  write_synthetic(corpus, dir.file("corpus.jsonl"), dir.file("truth.jsonl"));

  RejectLog rejects;
  std::vector<RawDocument> docs = load_jsonl_file(dir.file("corpus.jsonl"), 0, "text", &rejects);
  CHECK(rejects.entries().empty());
  REQUIRE(docs.size() == corpus.texts.size());
  for (size_t i = 0; i < docs.size(); ++i) CHECK(docs[i].text == corpus.texts[i]);

  std::vector<PlantedPair> truth = read_truth_file(dir.file("truth.jsonl"));
  REQUIRE(truth.size() == corpus.planted.size());
  for (size_t i = 0; i < truth.size(); ++i) {
    CHECK(truth[i].lo == corpus.planted[i].lo);
    CHECK(truth[i].hi == corpus.planted[i].hi);
    CHECK(truth[i].window_jaccard == doctest::Approx(corpus.planted[i].window_jaccard));
  }

  write_file_bytes(dir.file("bad.jsonl"), "{\"lo\": 1}\n");
  CHECK_THROWS_AS(read_truth_file(dir.file("bad.jsonl")), IoError);
}

}  // TEST_SUITE
