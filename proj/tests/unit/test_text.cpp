#include <doctest.h>

#include <string>
#include <vector>

#include "neardup/text.hpp"
#include "neardup/util.hpp"

using namespace neardup;

TEST_SUITE("text") {

TEST_CASE("nfc composes combining sequences") {
  // "e" + COMBINING ACUTE ACCENT becomes the single code point U+00E9
  std::string decomposed = "e\xcc\x81";
  std::string composed = nfc_normalize(decomposed);
  CHECK(composed == "\xc3\xa9");
  CHECK(codepoint_count(composed) == 1);
}

TEST_CASE("nfc is idempotent") {
  for (const char* s : {"hello", "e\xcc\x81llo", "\xc3\xa9llo", "caf\xc3\xa9 nai\xcc\x88ve", ""}) {
    std::string once = nfc_normalize(s);
    CHECK(nfc_normalize(once) == once);
  }
}

TEST_CASE("nfc replaces ill-formed bytes with the replacement character") {
  std::string bad = "ab\xff\xfe";
  std::string fixed = nfc_normalize(bad);
  CHECK(fixed == "ab\xef\xbf\xbd\xef\xbf\xbd");
  CHECK(codepoint_count(fixed) == 4);
}

TEST_CASE("codepoint_count counts scalars, not bytes") {
  CHECK(codepoint_count("") == 0);
  CHECK(codepoint_count("abc") == 3);
  CHECK(codepoint_count("h\xc3\xa9llo") == 5);          // 2-byte é
  CHECK(codepoint_count("\xe6\x97\xa5\xe6\x9c\xac") == 2);  // two 3-byte CJK
  CHECK(codepoint_count("\xf0\x9f\x98\x80") == 1);      // 4-byte emoji
}

TEST_CASE("decode_codepoints yields scalar values") {
  std::vector<uint32_t> cps = decode_codepoints("A\xc3\xa9\xf0\x9f\x98\x80");
  REQUIRE(cps.size() == 3);
  CHECK(cps[0] == 0x41);
  CHECK(cps[1] == 0xe9);
  CHECK(cps[2] == 0x1f600);
  CHECK(decode_codepoints("\xff") == std::vector<uint32_t>{0xfffd});
}

TEST_CASE("text_units differ by unit for multi-byte text") {
  std::string s = "\xc3\xa9x";  // é then x
  std::vector<uint32_t> bytes = text_units(s, ShingleUnit::kByte);
  std::vector<uint32_t> cps = text_units(s, ShingleUnit::kCodepoint);
  CHECK(bytes == std::vector<uint32_t>{0xc3, 0xa9, 0x78});
  CHECK(cps == std::vector<uint32_t>{0xe9, 0x78});
  // pure ASCII is identical either way
  CHECK(text_units("abc", ShingleUnit::kByte) == text_units("abc", ShingleUnit::kCodepoint));
}

TEST_CASE("shingle unit names round-trip") {
  CHECK(parse_shingle_unit("byte") == ShingleUnit::kByte);
  CHECK(parse_shingle_unit("codepoint") == ShingleUnit::kCodepoint);
  CHECK(shingle_unit_name(ShingleUnit::kByte) == "byte");
  CHECK(shingle_unit_name(ShingleUnit::kCodepoint) == "codepoint");
  CHECK_THROWS_AS(parse_shingle_unit("word"), ConfigError);
}

}  // TEST_SUITE
