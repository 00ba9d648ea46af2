#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "neardup/corpus.hpp"
#include "neardup/text.hpp"

namespace neardup {

// One member of the hash family: h(s) = (sum of c_i * base^(i-1)) mod modulus
// over the window units c_1..c_L. The precomputed constants make the one-unit
// shift of a window a constant-time update instead of a fresh evaluation.
struct HashFunctionParams {
  uint32_t modulus = 0;       // prime in [2^21, 2^23); all products fit 64 bits
  uint32_t base = 0;          // prime in (256, 2^16); exceeds the byte alphabet
  uint32_t base_inverse = 0;  // base^-1 mod modulus
  uint32_t base_power = 0;    // base^(L-1) mod modulus
  uint64_t reduce_factor = 0; // floor(2^64 / modulus), for Barrett reduction

  bool operator==(const HashFunctionParams&) const = default;
};

struct HashFamily {
  uint32_t hash_count = 0;   // H
  uint32_t shingle_len = 0;  // L, window length in units
  ShingleUnit unit = ShingleUnit::kByte;
  uint64_t seed = 0;
  std::vector<HashFunctionParams> functions;  // H entries, pairwise distinct (modulus, base)
};

// Deterministic Miller-Rabin, exact for all 32-bit inputs.
bool is_prime_u32(uint32_t n);

uint64_t mod_pow(uint64_t base, uint64_t exp, uint64_t mod);

// Draws H distinct (modulus, base) prime pairs from a seeded mt19937_64 by
// rejection; the same seed always yields the bit-identical family.
HashFamily derive_family(uint64_t seed, uint32_t hash_count, uint32_t shingle_len,
                         ShingleUnit unit);

// Fresh evaluation of one window. Window length is the L the params were
// derived for; byte units are always < base.
uint32_t hash_window_direct(std::span<const uint32_t> window, const HashFunctionParams& f);

// Shifts the window one unit: drops outgoing (the old c_1), appends incoming
// (the new last unit). Exactly equals hash_window_direct of the new window;
// the division by base in the underlying algebra is exact, so the modular
// inverse loses nothing.
uint32_t roll_next(uint32_t state, uint32_t outgoing, uint32_t incoming,
                   const HashFunctionParams& f);

// The per-document column of the signature matrix: for each hash function the
// minimum over all sliding-window hashes.
struct Signature {
  uint64_t doc_id = 0;
  std::vector<uint32_t> values;
};

class ShortDocumentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Window 0 is evaluated directly once per function; every later window comes
// from roll_next. Throws ShortDocumentError when the unit sequence has no
// full window (cannot occur with min_chars >= shingle_len).
Signature signature_of_document(const CleanDocument& doc, const HashFamily& family);

// Maps signature_of_document over the batch; output order matches input order.
// Documents too short to shingle are skipped and reported through on_short,
// never emitted with sentinel values.
std::vector<Signature> signature_batch(std::span<const CleanDocument> docs,
                                       const HashFamily& family,
                                       const std::function<void(uint64_t doc_id)>& on_short = {});

}  // namespace neardup
