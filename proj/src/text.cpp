#include "neardup/text.hpp"

#include <unicode/bytestream.h>
#include <unicode/normalizer2.h>
#include <unicode/stringpiece.h>
#include <unicode/utf8.h>

#include "neardup/util.hpp"

namespace neardup {

std::string_view shingle_unit_name(ShingleUnit unit) {
  return unit == ShingleUnit::kByte ? "byte" : "codepoint";
}

ShingleUnit parse_shingle_unit(std::string_view name) {
  if (name == "byte") return ShingleUnit::kByte;
  if (name == "codepoint") return ShingleUnit::kCodepoint;
  throw ConfigError("unknown shingle unit '" + std::string(name) + "' (expected byte or codepoint)");
}

namespace {

const icu::Normalizer2& nfc() {
  static const icu::Normalizer2* instance = [] {
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* n = icu::Normalizer2::getNFCInstance(status);
    if (U_FAILURE(status) || n == nullptr) {
      throw IoError("ICU NFC normalizer unavailable");
    }
    return n;
  }();
  return *instance;
}

bool well_formed_utf8(std::string_view utf8) {
  int32_t i = 0;
  const int32_t len = static_cast<int32_t>(utf8.size());
  const uint8_t* s = reinterpret_cast<const uint8_t*>(utf8.data());
  while (i < len) {
    UChar32 c;
    U8_NEXT(s, i, len, c);
    if (c < 0) return false;
  }
  return true;
}

// one U+FFFD per ill-formed subsequence, as U8_NEXT delimits them
std::string replace_ill_formed(std::string_view utf8) {
  std::string out;
  out.reserve(utf8.size());
  int32_t i = 0;
  const int32_t len = static_cast<int32_t>(utf8.size());
  const uint8_t* s = reinterpret_cast<const uint8_t*>(utf8.data());
  while (i < len) {
    const int32_t start = i;
    UChar32 c;
    U8_NEXT(s, i, len, c);
    if (c < 0) {
      out.append("\xef\xbf\xbd");
    } else {
      out.append(utf8.substr(static_cast<size_t>(start), static_cast<size_t>(i - start)));
    }
  }
  return out;
}

}  // namespace

std::string nfc_normalize(std::string_view utf8) {
  // ICU's UTF-8 normalization copies ill-formed spans through verbatim, so
  // they are rewritten to U+FFFD first; well-formed input goes straight in
  std::string sanitized;
  if (!well_formed_utf8(utf8)) {
    sanitized = replace_ill_formed(utf8);
    utf8 = sanitized;
  }
  std::string out;
  out.reserve(utf8.size());
  icu::StringByteSink<std::string> sink(&out);
  UErrorCode status = U_ZERO_ERROR;
  nfc().normalizeUTF8(0, icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())),
                      sink, nullptr, status);
  if (U_FAILURE(status)) throw IoError("NFC normalization failed");
  return out;
}

uint64_t codepoint_count(std::string_view utf8) {
  uint64_t count = 0;
  int32_t i = 0;
  const int32_t len = static_cast<int32_t>(utf8.size());
  const uint8_t* s = reinterpret_cast<const uint8_t*>(utf8.data());
  while (i < len) {
    UChar32 c;
    U8_NEXT(s, i, len, c);  // ill-formed sequences yield c < 0, one per bad byte run
    ++count;
  }
  return count;
}

std::vector<uint32_t> decode_codepoints(std::string_view utf8) {
  std::vector<uint32_t> out;
  out.reserve(utf8.size());
  int32_t i = 0;
  const int32_t len = static_cast<int32_t>(utf8.size());
  const uint8_t* s = reinterpret_cast<const uint8_t*>(utf8.data());
  while (i < len) {
    UChar32 c;
    U8_NEXT(s, i, len, c);
    out.push_back(c < 0 ? 0xFFFDu : static_cast<uint32_t>(c));
  }
  return out;
}

std::vector<uint32_t> text_units(std::string_view utf8, ShingleUnit unit) {
  if (unit == ShingleUnit::kCodepoint) return decode_codepoints(utf8);
  std::vector<uint32_t> out(utf8.size());
  for (size_t i = 0; i < utf8.size(); ++i) {
    out[i] = static_cast<unsigned char>(utf8[i]);
  }
  return out;
}

}  // namespace neardup
