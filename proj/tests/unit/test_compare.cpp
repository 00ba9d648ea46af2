#include <doctest.h>

#include <algorithm>
#include <random>
#include <vector>

#include "neardup/compare.hpp"
#include "neardup/util.hpp"
#include "test_helpers.hpp"

using namespace neardup;

namespace {

// The obviously-correct double loop the tiled kernel must reproduce.
std::vector<DuplicatePair> naive_bucket(const GatheredBucket& bucket, uint32_t H,
                                        const SimilarityThreshold& threshold) {
  std::vector<DuplicatePair> out;
  const size_t n = bucket.doc_ids.size();
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      uint32_t matches = signature_match_count({bucket.signatures.data() + i * H, H},
                                               {bucket.signatures.data() + j * H, H});
      if (threshold.accepts(matches, H)) {
        out.push_back({bucket.doc_ids[i], bucket.doc_ids[j], matches});
      }
    }
  }
  return out;
}

GatheredBucket random_bucket(size_t n, uint32_t H, uint64_t seed) {
  GatheredBucket bucket;
  std::mt19937_64 rng(seed);
  for (size_t i = 0; i < n; ++i) {
    bucket.doc_ids.push_back(i * 3 + 1);
    // a tiny value alphabet makes positionwise matches frequent
    for (uint32_t h = 0; h < H; ++h) {
      bucket.signatures.push_back(static_cast<uint32_t>(bounded_random(rng, 3)));
    }
  }
  return bucket;
}

}  // namespace

TEST_SUITE("compare") {

TEST_CASE("signature_match_count counts agreeing positions") {
  std::vector<uint32_t> a{1, 2, 3, 4}, b{1, 9, 3, 8}, c{1, 2};
  CHECK(signature_match_count(a, a) == 4);
  CHECK(signature_match_count(a, b) == 2);
  CHECK_THROWS_AS(signature_match_count(a, c), ConfigError);
}

TEST_CASE("threshold acceptance is strict") {
  SimilarityThreshold t{Ratio(4, 5)};
  CHECK(t.accepts(103, 128));        // 103/128 > 4/5
  CHECK_FALSE(t.accepts(102, 128));  // 102/128 < 4/5
  CHECK(t.min_matches(128) == 103);

  SimilarityThreshold exact{Ratio(4, 5)};
  CHECK_FALSE(exact.accepts(4, 5));  // equality is rejected
  CHECK(exact.accepts(5, 5));
  CHECK(exact.min_matches(5) == 5);

  SimilarityThreshold one{Ratio(1, 1)};
  CHECK_FALSE(one.accepts(128, 128));  // nothing exceeds 1
  CHECK(one.min_matches(128) == 129);

  SimilarityThreshold zero{Ratio(0, 1)};
  CHECK(zero.accepts(1, 128));
  CHECK_FALSE(zero.accepts(0, 128));  // 0 > 0 is false
  CHECK(zero.min_matches(128) == 1);
}

TEST_CASE("tiled kernel equals the naive double loop") {
  // pair order differs across tile layouts, so equality is on the sorted set
  auto sorted = [](std::vector<DuplicatePair> pairs) {
    std::sort(pairs.begin(), pairs.end(), [](const DuplicatePair& a, const DuplicatePair& b) {
      return a.lo != b.lo ? a.lo < b.lo : a.hi < b.hi;
    });
    return pairs;
  };
  SimilarityThreshold threshold{Ratio(1, 4)};
  for (size_t n : {2, 3, 31, 32, 33, 64}) {
    GatheredBucket bucket = random_bucket(n, 8, 1000 + n);
    std::vector<DuplicatePair> expected = sorted(naive_bucket(bucket, 8, threshold));
    if (n > 16) CHECK_FALSE(expected.empty());  // the tiny alphabet guarantees pairs at this size
    for (uint32_t tile : {1u, 3u, 5u, 32u, 100u}) {
      std::vector<DuplicatePair> got = sorted(compare_bucket(bucket, 8, threshold, tile));
      REQUIRE(got == expected);
    }
  }
}

TEST_CASE("tiled kernel orders pairs lo before hi") {
  GatheredBucket bucket = random_bucket(40, 8, 5);
  for (const DuplicatePair& p : compare_bucket(bucket, 8, SimilarityThreshold{Ratio(1, 4)}, 16)) {
    CHECK(p.lo < p.hi);
  }
}

TEST_CASE("compare_bucket validates its inputs") {
  GatheredBucket bucket = random_bucket(4, 8, 2);
  SimilarityThreshold t{Ratio(1, 2)};
  CHECK_THROWS_AS(compare_bucket(bucket, 0, t, 32), ConfigError);
  CHECK_THROWS_AS(compare_bucket(bucket, 8, t, 0), ConfigError);
  bucket.signatures.pop_back();
  CHECK_THROWS_AS(compare_bucket(bucket, 8, t, 32), ConfigError);
}

TEST_CASE("compare_pass merges buckets and drops exact repeats") {
  // the same two docs collide in two different bands
  GatherResult gathered;
  GatheredBucket first;
  first.key = {0, 1};
  first.doc_ids = {10, 20};
  first.signatures = {1, 2, 3, 4, 1, 2, 3, 9};
  GatheredBucket second;
  second.key = {1, 4};
  second.doc_ids = {10, 20};
  second.signatures = first.signatures;
  gathered.buckets.push_back(std::move(first));
  gathered.buckets.push_back(std::move(second));

  std::vector<DuplicatePair> pairs = compare_pass(gathered, 4, SimilarityThreshold{Ratio(1, 2)});
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0] == DuplicatePair{10, 20, 3});
}

TEST_CASE("compare_pass output is sorted by (lo, hi)") {
  GatherResult gathered;
  for (uint64_t seed : {1, 2, 3}) {
    GatheredBucket bucket = random_bucket(20, 8, seed);
    bucket.key = {static_cast<uint32_t>(seed), 0};
    gathered.buckets.push_back(std::move(bucket));
  }
  std::vector<DuplicatePair> pairs = compare_pass(gathered, 8, SimilarityThreshold{Ratio(1, 4)});
  CHECK(std::is_sorted(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) {
    return a.lo != b.lo ? a.lo < b.lo : a.hi < b.hi;
  }));
}

TEST_CASE("pair files round-trip and reject ragged sizes") {
  testutil::TempDir dir;
  std::vector<DuplicatePair> pairs{{1, 2, 100}, {5, 9, 127}, {0, 3, 128}};
  std::string path = dir.file("w0_p0.pairs");
  write_pair_file(path, pairs);
  CHECK(read_pair_file(path) == pairs);

  write_pair_file(dir.file("empty.pairs"), {});
  CHECK(read_pair_file(dir.file("empty.pairs")).empty());

  write_file_bytes(dir.file("ragged.pairs"), read_file_bytes(path) + "zz");
  CHECK_THROWS_AS(read_pair_file(dir.file("ragged.pairs")), IoError);
}

}  // TEST_SUITE
