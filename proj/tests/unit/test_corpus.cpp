#include <doctest.h>

#include <string>
#include <vector>

#include "neardup/corpus.hpp"
#include "neardup/util.hpp"
#include "test_helpers.hpp"

using namespace neardup;

namespace {

IngestOptions small_opts(uint64_t min_chars = 5, uint32_t shingle_len = 3) {
  IngestOptions opts;
  opts.min_chars = min_chars;
  opts.shingle_len = shingle_len;
  return opts;
}

}  // namespace

TEST_SUITE("corpus") {

TEST_CASE("parse_jsonl_line classifies every malformed shape") {
  CHECK(parse_jsonl_line(R"({"text": "hello"})", "text").ok);
  CHECK(parse_jsonl_line(R"({"text": "hello"})", "text").text == "hello");
  CHECK(parse_jsonl_line(R"({"body": "hi"})", "body").text == "hi");

  CHECK(parse_jsonl_line("{not json", "text").reason == "invalid_json");
  CHECK(parse_jsonl_line(R"(["text"])", "text").reason == "not_an_object");
  CHECK(parse_jsonl_line(R"("text")", "text").reason == "not_an_object");
  CHECK(parse_jsonl_line(R"({"other": 1})", "text").reason == "missing_text_field");
  CHECK(parse_jsonl_line(R"({"text": 42})", "text").reason == "text_field_not_string");
  CHECK(parse_jsonl_line(R"({"text": null})", "text").reason == "text_field_not_string");
}

TEST_CASE("for_each_raw_document streams valid records and logs the rest") {
  testutil::TempDir dir;
  std::string path = dir.file("a.jsonl");
  write_file_bytes(path,
                   "{\"text\": \"one\"}\r\n"
                   "not json\n"
                   "\n"
                   "{\"text\": \"two\"}\n"
                   "{\"nope\": 1}\n"
                   "{\"text\": \"three\"}");  // no trailing newline

  RejectLog rejects;
  std::vector<RawDocument> docs;
  uint64_t records = for_each_raw_document(path, 3, "text", &rejects,
                                           [&](RawDocument&& d) { docs.push_back(std::move(d)); });

  CHECK(records == 3);
  REQUIRE(docs.size() == 3);
  CHECK(docs[0].text == "one");  // CRLF stripped
  CHECK(docs[0].file_ordinal == 3);
  CHECK(docs[0].record_ordinal == 0);
  CHECK(docs[0].line == 1);
  CHECK(docs[1].record_ordinal == 1);
  CHECK(docs[1].line == 4);
  CHECK(docs[2].record_ordinal == 2);
  CHECK(docs[2].line == 6);

  REQUIRE(rejects.entries().size() == 2);  // blank lines are skipped silently
  CHECK(rejects.entries()[0].line == 2);
  CHECK(rejects.entries()[0].reason == "invalid_json");
  CHECK(rejects.entries()[1].line == 5);
  CHECK(rejects.entries()[1].reason == "missing_text_field");
}

TEST_CASE("preprocess assigns doc ids from the record offset") {
  RawDocument raw{.file_ordinal = 1, .record_ordinal = 4, .line = 9, .text = "abcdefgh"};
  auto doc = preprocess(raw, 5, 100);
  REQUIRE(doc.has_value());
  CHECK(doc->doc_id == 104);
  CHECK(doc->text == "abcdefgh");
  CHECK(doc->char_count == 8);
}

TEST_CASE("preprocess filters on code points, not bytes") {
  // four 3-byte code points: 12 bytes but only 4 characters
  RawDocument raw{.file_ordinal = 0, .record_ordinal = 0, .line = 1,
                  .text = "\xe6\x97\xa5\xe6\x9c\xac\xe8\xaa\x9e\xe6\x96\x87"};
  CHECK_FALSE(preprocess(raw, 5, 0).has_value());
  auto doc = preprocess(raw, 4, 0);
  REQUIRE(doc.has_value());
  CHECK(doc->char_count == 4);
}

TEST_CASE("preprocess normalizes before counting") {
  RawDocument raw{.file_ordinal = 0, .record_ordinal = 0, .line = 1, .text = "e\xcc\x81xyz"};
  // 5 code points before NFC, 4 after; the normalized length is what counts
  CHECK_FALSE(preprocess(raw, 5, 0).has_value());
  auto doc = preprocess(raw, 4, 0);
  REQUIRE(doc.has_value());
  CHECK(doc->text == "\xc3\xa9xyz");
}

TEST_CASE("can_shingle requires one full window") {
  CleanDocument doc{.doc_id = 0, .text = "abc", .char_count = 3};
  CHECK(can_shingle(doc, 3, ShingleUnit::kByte));
  CHECK_FALSE(can_shingle(doc, 4, ShingleUnit::kByte));
  CleanDocument wide{.doc_id = 1, .text = "\xc3\xa9\xc3\xa9", .char_count = 2};
  CHECK(can_shingle(wide, 4, ShingleUnit::kByte));       // 4 bytes
  CHECK_FALSE(can_shingle(wide, 3, ShingleUnit::kCodepoint));  // 2 code points
}

TEST_CASE("build_manifest sorts files and accumulates record offsets") {
  testutil::TempDir dir;
  write_file_bytes(dir.file("b.jsonl"), "{\"text\": \"fghij\"}\n{\"text\": \"klmno\"}\n");
  write_file_bytes(dir.file("a.jsonl"),
                   "{\"text\": \"abcde\"}\nbad line\n{\"text\": \"hi\"}\n{\"text\": \"pqrst\"}\n");

  RejectLog rejects;
  CorpusManifest m = build_manifest({dir.file("b.jsonl"), dir.file("a.jsonl")}, small_opts(), &rejects);

  REQUIRE(m.files.size() == 2);
  CHECK(m.files[0].path == dir.file("a.jsonl"));  // lexicographic, not given order
  CHECK(m.files[0].records == 3);
  CHECK(m.files[0].surviving == 2);  // "hi" is below min_chars
  CHECK(m.files[0].record_offset == 0);
  CHECK(m.files[1].path == dir.file("b.jsonl"));
  CHECK(m.files[1].records == 2);
  CHECK(m.files[1].surviving == 2);
  CHECK(m.files[1].record_offset == 3);  // prefix sum over records, not survivors
  CHECK(m.total_records == 5);
  CHECK(m.total_surviving == 4);

  bool saw_below_min = false;
  for (const auto& r : rejects.entries()) saw_below_min |= r.reason == "below_min_chars";
  CHECK(saw_below_min);
}

TEST_CASE("build_manifest logs documents too short to shingle") {
  testutil::TempDir dir;
  write_file_bytes(dir.file("a.jsonl"), "{\"text\": \"\xc3\xa9\xc3\xa9\xc3\xa9\xc3\xa9\xc3\xa9\"}\n");
  IngestOptions opts = small_opts(5, 8);
  opts.unit = ShingleUnit::kCodepoint;
  RejectLog rejects;
  CorpusManifest m = build_manifest({dir.file("a.jsonl")}, opts, &rejects);
  CHECK(m.total_surviving == 0);
  REQUIRE(rejects.entries().size() == 1);
  CHECK(rejects.entries()[0].reason == "too_short_to_shingle");
}

TEST_CASE("build_manifest rejects duplicate and empty input lists") {
  testutil::TempDir dir;
  write_file_bytes(dir.file("a.jsonl"), "{\"text\": \"abcde\"}\n");
  RejectLog rejects;
  CHECK_THROWS_AS(build_manifest({}, small_opts(), &rejects), ConfigError);
  CHECK_THROWS_AS(build_manifest({dir.file("a.jsonl"), dir.file("a.jsonl")}, small_opts(), &rejects),
                  ConfigError);
  CHECK_THROWS_AS(build_manifest({dir.file("missing.jsonl")}, small_opts(), &rejects), IoError);
}

TEST_CASE("surviving_documents re-derives the manifest survivors in doc_id order") {
  testutil::TempDir dir;
  write_file_bytes(dir.file("a.jsonl"),
                   "{\"text\": \"abcde\"}\n{\"text\": \"x\"}\n{\"text\": \"vwxyz\"}\n");
  RejectLog rejects;
  CorpusManifest m = build_manifest({dir.file("a.jsonl")}, small_opts(), &rejects);
  std::vector<CleanDocument> docs = surviving_documents(m, 0, small_opts());
  REQUIRE(docs.size() == 2);
  CHECK(docs[0].doc_id == 0);
  CHECK(docs[0].text == "abcde");
  CHECK(docs[1].doc_id == 2);  // ordinal skips the filtered record but keeps its slot
  CHECK(docs[1].text == "vwxyz");
}

TEST_CASE("surviving_documents detects an input changed after the manifest") {
  testutil::TempDir dir;
  write_file_bytes(dir.file("a.jsonl"), "{\"text\": \"abcde\"}\n");
  RejectLog rejects;
  CorpusManifest m = build_manifest({dir.file("a.jsonl")}, small_opts(), &rejects);
  write_file_bytes(dir.file("a.jsonl"), "{\"text\": \"abcde\"}\n{\"text\": \"fghij\"}\n");
  CHECK_THROWS_AS(surviving_documents(m, 0, small_opts()), PrerequisiteError);
  CHECK_THROWS_AS(surviving_documents(m, 5, small_opts()), ConfigError);
}

TEST_CASE("reject log serializes one json object per line") {
  testutil::TempDir dir;
  RejectLog log;
  log.add("a.jsonl", 7, "invalid_json");
  log.add("b.jsonl", 2, "below_min_chars");
  std::string path = dir.file("rejects.jsonl");
  log.write_jsonl(path);
  CHECK(read_file_bytes(path) ==
        "{\"file\":\"a.jsonl\",\"line\":7,\"reason\":\"invalid_json\"}\n"
        "{\"file\":\"b.jsonl\",\"line\":2,\"reason\":\"below_min_chars\"}\n");
}

}  // TEST_SUITE
