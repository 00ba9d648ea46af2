#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>
#include <vector>

#include "neardup/minhash.hpp"
#include "neardup/util.hpp"

using namespace neardup;

namespace {

// Hand-built parameters for worked examples: modulus 97, base 10.
HashFunctionParams toy_params(uint32_t shingle_len) {
  HashFunctionParams f;
  f.modulus = 97;
  f.base = 10;
  f.base_inverse = 68;  // 10 * 68 = 680 = 7*97 + 1
  f.base_power = static_cast<uint32_t>(mod_pow(10, shingle_len - 1, 97));
  f.reduce_factor = static_cast<uint64_t>((static_cast<unsigned __int128>(1) << 64) / 97);
  return f;
}

uint32_t brute_min_hash(const std::vector<uint32_t>& units, uint32_t L,
                        const HashFunctionParams& f) {
  uint32_t best = f.modulus;
  for (size_t w = 0; w + L <= units.size(); ++w) {
    best = std::min(best, hash_window_direct({units.data() + w, L}, f));
  }
  return best;
}

}  // namespace

TEST_SUITE("minhash") {

TEST_CASE("is_prime_u32 agrees with known primes and composites") {
  for (uint32_t p : {2u, 3u, 5u, 7u, 11u, 257u, 65521u, 2097143u, 8388593u, 2147483647u}) {
    CHECK(is_prime_u32(p));
  }
  // 561 and 25326001 fool weaker probable-prime tests; 2097151 = 2^21 - 1
  for (uint32_t c : {0u, 1u, 4u, 9u, 100u, 561u, 2097151u, 25326001u, 65536u}) {
    CHECK_FALSE(is_prime_u32(c));
  }
}

TEST_CASE("mod_pow computes modular exponents") {
  CHECK(mod_pow(10, 0, 97) == 1);
  CHECK(mod_pow(10, 2, 97) == 3);  // 100 mod 97
  CHECK(mod_pow(2, 10, 1000) == 24);
  CHECK(mod_pow(5, 96, 97) == 1);  // Fermat
  CHECK(mod_pow(7, 1, 1) == 0);
  CHECK_THROWS_AS(mod_pow(2, 2, 0), ConfigError);
}

TEST_CASE("direct window hash matches the worked example") {
  // units (1, 2, 3) with base 10: 1 + 2*10 + 3*100 = 321; 321 mod 97 = 30
  HashFunctionParams f = toy_params(3);
  std::vector<uint32_t> window{1, 2, 3};
  CHECK(hash_window_direct(window, f) == 30);
  CHECK_THROWS_AS(hash_window_direct({}, f), ConfigError);
}

TEST_CASE("rolling one unit matches the worked example") {
  // from (1,2,3) to (2,3,4): 2 + 3*10 + 4*100 = 432; 432 mod 97 = 44
  HashFunctionParams f = toy_params(3);
  std::vector<uint32_t> window{1, 2, 3};
  uint32_t state = hash_window_direct(window, f);
  CHECK(roll_next(state, 1, 4, f) == 44);
  std::vector<uint32_t> next{2, 3, 4};
  CHECK(roll_next(state, 1, 4, f) == hash_window_direct(next, f));
}

TEST_CASE("derive_family is a pure function of the seed") {
  HashFamily a = derive_family(42, 16, 5, ShingleUnit::kByte);
  HashFamily b = derive_family(42, 16, 5, ShingleUnit::kByte);
  HashFamily c = derive_family(43, 16, 5, ShingleUnit::kByte);
  CHECK(a.functions == b.functions);
  CHECK(a.functions != c.functions);
}

TEST_CASE("derived functions satisfy every structural invariant") {
  const uint32_t L = 5;
  HashFamily family = derive_family(7, 32, L, ShingleUnit::kByte);
  REQUIRE(family.functions.size() == 32);
  std::set<std::pair<uint32_t, uint32_t>> pairs;
  for (const HashFunctionParams& f : family.functions) {
    CHECK(f.modulus >= (1u << 21));
    CHECK(f.modulus < (1u << 23));
    CHECK(f.base > 256);
    CHECK(f.base < (1u << 16));
    CHECK(is_prime_u32(f.modulus));
    CHECK(is_prime_u32(f.base));
    CHECK(static_cast<uint64_t>(f.base) * f.base_inverse % f.modulus == 1);
    CHECK(f.base_power == mod_pow(f.base, L - 1, f.modulus));
    CHECK(f.reduce_factor ==
          static_cast<uint64_t>((static_cast<unsigned __int128>(1) << 64) / f.modulus));
    CHECK(pairs.insert({f.modulus, f.base}).second);  // pairwise distinct
  }
  CHECK_THROWS_AS(derive_family(1, 0, 5, ShingleUnit::kByte), ConfigError);
  CHECK_THROWS_AS(derive_family(1, 4, 0, ShingleUnit::kByte), ConfigError);
}

TEST_CASE("rolling equals direct evaluation across ten thousand windows") {
  const uint32_t L = 5;
  HashFamily family = derive_family(42, 4, L, ShingleUnit::kByte);
  std::mt19937_64 rng(99);
  std::vector<uint32_t> units(10'000 + L - 1);
  for (auto& u : units) u = static_cast<uint32_t>(bounded_random(rng, 256));

  for (const HashFunctionParams& f : family.functions) {
    uint32_t state = hash_window_direct({units.data(), L}, f);
    for (size_t w = 1; w + L <= units.size(); ++w) {
      state = roll_next(state, units[w - 1], units[w + L - 1], f);
      uint32_t direct = hash_window_direct({units.data() + w, L}, f);
      REQUIRE(state == direct);
    }
  }
}

TEST_CASE("rolling handles code point units beyond the base") {
  const uint32_t L = 4;
  HashFamily family = derive_family(5, 2, L, ShingleUnit::kCodepoint);
  std::mt19937_64 rng(123);
  std::vector<uint32_t> units(500 + L - 1);
  for (auto& u : units) u = static_cast<uint32_t>(bounded_random(rng, 0x110000));
  for (const HashFunctionParams& f : family.functions) {
    uint32_t state = hash_window_direct({units.data(), L}, f);
    for (size_t w = 1; w + L <= units.size(); ++w) {
      state = roll_next(state, units[w - 1], units[w + L - 1], f);
      REQUIRE(state == hash_window_direct({units.data() + w, L}, f));
    }
  }
}

TEST_CASE("signature equals the brute-force minimum over all windows") {
  HashFamily family = derive_family(11, 8, 5, ShingleUnit::kByte);
  CleanDocument doc{.doc_id = 3, .text = "the quick brown fox jumps over the lazy dog",
                    .char_count = 43};
  Signature sig = signature_of_document(doc, family);
  CHECK(sig.doc_id == 3);
  REQUIRE(sig.values.size() == 8);
  std::vector<uint32_t> units = text_units(doc.text, ShingleUnit::kByte);
  for (uint32_t i = 0; i < 8; ++i) {
    CHECK(sig.values[i] == brute_min_hash(units, 5, family.functions[i]));
  }
}

TEST_CASE("signature respects the unit mode") {
  HashFamily bytes = derive_family(11, 8, 3, ShingleUnit::kByte);
  HashFamily cps = derive_family(11, 8, 3, ShingleUnit::kCodepoint);
  CleanDocument doc{.doc_id = 0, .text = "na\xc3\xafve caf\xc3\xa9 d\xc3\xa9j\xc3\xa0 vu",
                    .char_count = 16};
  Signature sb = signature_of_document(doc, bytes);
  Signature sc = signature_of_document(doc, cps);
  std::vector<uint32_t> units = text_units(doc.text, ShingleUnit::kCodepoint);
  for (uint32_t i = 0; i < 8; ++i) {
    CHECK(sc.values[i] == brute_min_hash(units, 3, cps.functions[i]));
  }
  CHECK(sb.values != sc.values);  // multi-byte text shingles differently per unit
}

TEST_CASE("identical documents get identical signatures") {
  HashFamily family = derive_family(1, 16, 5, ShingleUnit::kByte);
  CleanDocument a{.doc_id = 1, .text = "some reasonably long duplicate text body", .char_count = 40};
  CleanDocument b{.doc_id = 2, .text = a.text, .char_count = a.char_count};
  CHECK(signature_of_document(a, family).values == signature_of_document(b, family).values);
}

TEST_CASE("documents without a full window are rejected, not padded") {
  HashFamily family = derive_family(1, 4, 5, ShingleUnit::kByte);
  CleanDocument tiny{.doc_id = 9, .text = "abcd", .char_count = 4};
  CHECK_THROWS_AS(signature_of_document(tiny, family), ShortDocumentError);

  std::vector<CleanDocument> docs{
      {.doc_id = 0, .text = "abcdefgh", .char_count = 8},
      {.doc_id = 1, .text = "abc", .char_count = 3},
      {.doc_id = 2, .text = "ijklmnop", .char_count = 8},
  };
  std::vector<uint64_t> shorts;
  std::vector<Signature> sigs = signature_batch(docs, family, [&](uint64_t id) { shorts.push_back(id); });
  REQUIRE(sigs.size() == 2);
  CHECK(sigs[0].doc_id == 0);
  CHECK(sigs[1].doc_id == 2);
  CHECK(shorts == std::vector<uint64_t>{1});
}

}  // TEST_SUITE
