#include "neardup/minhash.hpp"

#include <set>
#include <utility>

#include "neardup/util.hpp"

namespace neardup {

uint64_t mod_pow(uint64_t base, uint64_t exp, uint64_t mod) {
  if (mod == 0) throw ConfigError("mod_pow: zero modulus");
  uint64_t result = 1 % mod;
  base %= mod;
  while (exp > 0) {
    if (exp & 1) result = static_cast<uint64_t>((static_cast<unsigned __int128>(result) * base) % mod);
    base = static_cast<uint64_t>((static_cast<unsigned __int128>(base) * base) % mod);
    exp >>= 1;
  }
  return result;
}

bool is_prime_u32(uint32_t n) {
  if (n < 2) return false;
  for (uint32_t small : {2u, 3u, 5u, 7u}) {
    if (n == small) return true;
    if (n % small == 0) return false;
  }
  uint32_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  // bases {2,3,5,7} decide primality for everything below 3,215,031,751,
  // which covers the full u32 range we draw from
  for (uint32_t a : {2u, 3u, 5u, 7u}) {
    uint64_t x = mod_pow(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool witness = true;
    for (int i = 1; i < s; ++i) {
      x = (x * x) % n;
      if (x == n - 1) {
        witness = false;
        break;
      }
    }
    if (witness) return false;
  }
  return true;
}

namespace {

constexpr uint32_t kModulusLo = 1u << 21;
constexpr uint32_t kModulusHi = 1u << 23;  // exclusive
constexpr uint32_t kBaseLo = 257;
constexpr uint32_t kBaseHi = 1u << 16;  // exclusive

// Reduces x mod f.modulus for x < 2^48 using the precomputed 2^64/modulus
// factor: one high multiply plus a couple of subtractions, no hardware divide.
inline uint32_t barrett_reduce(uint64_t x, const HashFunctionParams& f) {
  uint64_t quotient = static_cast<uint64_t>(
      (static_cast<unsigned __int128>(x) * f.reduce_factor) >> 64);
  uint64_t r = x - quotient * f.modulus;
  while (r >= f.modulus) r -= f.modulus;
  return static_cast<uint32_t>(r);
}

}  // namespace

HashFamily derive_family(uint64_t seed, uint32_t hash_count, uint32_t shingle_len,
                         ShingleUnit unit) {
  if (hash_count < 1) throw ConfigError("hash count must be at least 1");
  if (shingle_len < 1) throw ConfigError("shingle length must be at least 1");
  HashFamily family;
  family.hash_count = hash_count;
  family.shingle_len = shingle_len;
  family.unit = unit;
  family.seed = seed;
  family.functions.reserve(hash_count);

  std::mt19937_64 rng(seed);
  std::set<std::pair<uint32_t, uint32_t>> used;
  uint64_t attempts = 0;
  const uint64_t attempt_limit = 10'000'000;
  while (family.functions.size() < hash_count) {
    if (++attempts > attempt_limit) {
      throw ConfigError("could not derive " + std::to_string(hash_count) +
                        " distinct hash functions; lower the hash count");
    }
    auto modulus = static_cast<uint32_t>(kModulusLo + bounded_random(rng, kModulusHi - kModulusLo));
    auto base = static_cast<uint32_t>(kBaseLo + bounded_random(rng, kBaseHi - kBaseLo));
    if (!is_prime_u32(modulus) || !is_prime_u32(base)) continue;
    if (!used.insert({modulus, base}).second) continue;

    HashFunctionParams f;
    f.modulus = modulus;
    f.base = base;
    f.base_inverse = static_cast<uint32_t>(mod_pow(base, modulus - 2, modulus));
    f.base_power = static_cast<uint32_t>(mod_pow(base, shingle_len - 1, modulus));
    f.reduce_factor = static_cast<uint64_t>((static_cast<unsigned __int128>(1) << 64) / modulus);
    family.functions.push_back(f);
  }
  return family;
}

// Units are bytes or Unicode scalar values, both < 2^21 <= modulus, so unit
// values never need reducing and every intermediate below stays under 2^48,
// inside barrett_reduce's domain.

uint32_t hash_window_direct(std::span<const uint32_t> window, const HashFunctionParams& f) {
  if (window.empty()) throw ConfigError("hash_window_direct: empty window");
  // Horner evaluation from the last unit down: result = sum c_i * base^(i-1)
  uint64_t acc = 0;
  for (size_t i = window.size(); i-- > 0;) {
    acc = barrett_reduce(acc * f.base + window[i], f);
  }
  return static_cast<uint32_t>(acc);
}

uint32_t roll_next(uint32_t state, uint32_t outgoing, uint32_t incoming,
                   const HashFunctionParams& f) {
  // (state - c_1) is divisible by base before the mod, so multiplying by the
  // modular inverse reproduces the exact integer division of the shift
  uint64_t dropped = state + f.modulus - outgoing;
  uint64_t shifted = barrett_reduce(dropped * f.base_inverse, f);
  uint64_t appended = barrett_reduce(static_cast<uint64_t>(incoming) * f.base_power, f);
  uint64_t sum = shifted + appended;
  if (sum >= f.modulus) sum -= f.modulus;
  return static_cast<uint32_t>(sum);
}

Signature signature_of_document(const CleanDocument& doc, const HashFamily& family) {
  std::vector<uint32_t> units = text_units(doc.text, family.unit);
  const uint32_t L = family.shingle_len;
  if (units.size() < L) {
    throw ShortDocumentError("document " + std::to_string(doc.doc_id) + " has " +
                             std::to_string(units.size()) + " units, needs " + std::to_string(L));
  }
  const uint32_t H = family.hash_count;
  Signature sig;
  sig.doc_id = doc.doc_id;
  sig.values.assign(H, 0);

  std::vector<uint32_t> state(H);
  std::span<const uint32_t> first(units.data(), L);
  for (uint32_t i = 0; i < H; ++i) {
    state[i] = hash_window_direct(first, family.functions[i]);
    sig.values[i] = state[i];
  }
  const size_t window_count = units.size() - L + 1;
  for (size_t w = 1; w < window_count; ++w) {
    const uint32_t outgoing = units[w - 1];
    const uint32_t incoming = units[w + L - 1];
    for (uint32_t i = 0; i < H; ++i) {
      uint32_t next = roll_next(state[i], outgoing, incoming, family.functions[i]);
      state[i] = next;
      if (next < sig.values[i]) sig.values[i] = next;
    }
  }
  return sig;
}

std::vector<Signature> signature_batch(std::span<const CleanDocument> docs,
                                       const HashFamily& family,
                                       const std::function<void(uint64_t)>& on_short) {
  std::vector<Signature> out;
  out.reserve(docs.size());
  for (const CleanDocument& doc : docs) {
    try {
      out.push_back(signature_of_document(doc, family));
    } catch (const ShortDocumentError&) {
      if (on_short) on_short(doc.doc_id);
    }
  }
  return out;
}

}  // namespace neardup
