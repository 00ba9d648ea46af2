#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace neardup {

// What one position of a sliding window holds: a raw UTF-8 byte or a whole
// Unicode code point.
enum class ShingleUnit : uint32_t {
  kByte = 0,
  kCodepoint = 1,
};

std::string_view shingle_unit_name(ShingleUnit unit);
ShingleUnit parse_shingle_unit(std::string_view name);  // "byte" | "codepoint"

// NFC-normalizes UTF-8 text. Ill-formed byte sequences come out as U+FFFD,
// so the result is always valid UTF-8 and re-normalizing it is the identity.
std::string nfc_normalize(std::string_view utf8);

// Number of code points in valid UTF-8 (each ill-formed byte counts as one).
uint64_t codepoint_count(std::string_view utf8);

// Decodes UTF-8 into code points; ill-formed bytes decode to U+FFFD.
std::vector<uint32_t> decode_codepoints(std::string_view utf8);

// The window-unit sequence hashing runs over. Byte units are the raw bytes,
// widened; codepoint units are decoded scalar values.
std::vector<uint32_t> text_units(std::string_view utf8, ShingleUnit unit);

}  // namespace neardup
