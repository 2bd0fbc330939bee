#include <filesystem>

#include "doctest.h"
#include "hfscreen/corpus.hpp"
#include "hfscreen/errors.hpp"
#include "hfscreen/io.hpp"

using namespace hfscreen;

namespace {

std::string note(const std::string& nid, const std::string& pid, const std::string& text,
                 const std::string& ts = "") {
  std::string s = R"({"note_id":")" + nid + R"(","patient_id":")" + pid + R"(","text":")" + text + '"';
  if (!ts.empty()) s += R"(,"timestamp":")" + ts + '"';
  return s + "}\n";
}

}  // namespace

TEST_CASE("records aggregate into one profile per patient") {
  const std::string jsonl = note("a", "P1", "one") + note("b", "P2", "two") + note("c", "P1", "three") +
                            note("d", "P1", "four");
  const Corpus c = ingest_jsonl(jsonl, "mem");
  REQUIRE(c.profiles.size() == 2);
  CHECK(c.profiles[0].patient_id == "P1");
  CHECK(c.profiles[0].notes.size() == 3);
  CHECK(c.profiles[1].notes.size() == 1);
  CHECK(c.note_count() == 4);
  CHECK_FALSE(c.fully_labeled());
}

TEST_CASE("empty input yields an empty corpus") {
  CHECK(ingest_jsonl("", "mem").profiles.empty());
  CHECK(ingest_jsonl("\n  \n", "mem").profiles.empty());
}

TEST_CASE("malformed records name their line") {
  const std::string missing_pid = note("a", "P1", "x") + R"({"note_id":"b","text":"y"})" + "\n";
  try {
    ingest_jsonl(missing_pid, "notes.jsonl");
    FAIL("expected a DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("notes.jsonl:2") != std::string::npos);
    CHECK(std::string(e.what()).find("patient_id") != std::string::npos);
  }
  CHECK_THROWS_AS(ingest_jsonl("{not json\n", "mem"), DataError);
  CHECK_THROWS_AS(ingest_jsonl(R"({"patient_id":"P1"})" "\n", "mem"), DataError);
  CHECK_THROWS_AS(ingest_jsonl(note("a", "P1", "x") + note("a", "P2", "y"), "mem"), DataError);
}

TEST_CASE("notes order by timestamp with untimed notes after, stably") {
  const std::string jsonl = note("u1", "P", "untimed first") + note("t2", "P", "late", "2015-08-02T00:00:00") +
                            note("u2", "P", "untimed second") + note("t1", "P", "early", "2015-08-01T00:00:00");
  const Corpus c = ingest_jsonl(jsonl, "mem");
  std::vector<std::string> ids;
  for (const auto& n : c.profiles[0].notes) ids.push_back(n.note_id);
  CHECK(ids == std::vector<std::string>{"t1", "t2", "u1", "u2"});
}

TEST_CASE("empty-text notes are kept") {
  const Corpus c = ingest_jsonl(note("a", "P", ""), "mem");
  REQUIRE(c.profiles.size() == 1);
  CHECK(c.profiles[0].notes[0].text.empty());
}

TEST_CASE("ingestion is lossless and serialization round-trips") {
  std::string jsonl;
  std::size_t n = 0;
  for (int p = 0; p < 7; ++p) {
    for (int k = 0; k <= p % 3; ++k) {
      jsonl += note("n" + std::to_string(n), "P" + std::to_string(p), "text " + std::to_string(n));
      ++n;
    }
  }
  Corpus c = ingest_jsonl(jsonl, "mem");
  CHECK(c.note_count() == n);

  GoldLabels labels{{"P0", Fine::Grey}, {"P3", Fine::Green}, {"PX", Fine::Red}};
  CHECK(attach_labels(c, labels) == 2);
  CHECK(c.profiles[3].gold->fine() == Fine::Green);

  const Corpus again = ingest_jsonl(corpus_to_jsonl(c), "mem");
  CHECK(again.note_count() == n);
  CHECK(corpus_to_jsonl(again) == corpus_to_jsonl(c));

  const Corpus from_profiles = ingest_jsonl(profiles_to_jsonl(c), "mem");
  CHECK(from_profiles.note_count() == n);
  CHECK(from_profiles.profiles[3].gold->fine() == Fine::Green);
  CHECK_FALSE(from_profiles.profiles[1].gold.has_value());

  const GoldLabels parsed = parse_gold_labels(labels_to_jsonl(c), "mem");
  CHECK(parsed.size() == 2);
  CHECK(parsed.at("P0") == Fine::Grey);
}

TEST_CASE("gold label sidecar validation") {
  CHECK_THROWS_AS(parse_gold_labels(R"({"patient_id":"P","fine":"blue"})" "\n", "mem"), DataError);
  CHECK_THROWS_AS(parse_gold_labels(R"({"patient_id":"P","fine":"red"})" "\n"
                                    R"({"patient_id":"P","fine":"grey"})" "\n", "mem"),
                  DataError);
}

TEST_CASE("a directory of jsonl files is ingested in file-name order") {
  const auto dir = std::filesystem::temp_directory_path() / "hfscreen_corpus_dir";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  write_file_atomic(dir / "b.jsonl", note("x2", "P2", "b"));
  write_file_atomic(dir / "a.jsonl", note("x1", "P1", "a"));
  write_file_atomic(dir / "ignored.txt", "not json");
  const Corpus c = ingest_notes(dir);
  REQUIRE(c.profiles.size() == 2);
  CHECK(c.profiles[0].patient_id == "P1");
  std::filesystem::remove_all(dir);
  CHECK_THROWS_AS(ingest_notes(dir), DataError);
}
