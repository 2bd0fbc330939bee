#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "hfscreen/labels.hpp"

namespace hfscreen {

struct ClinicalNote {
  std::string note_id;
  std::string patient_id;
  std::string note_type;
  std::optional<std::string> timestamp;  // ISO-8601
  std::string text;
};

struct PatientProfile {
  std::string patient_id;
  std::vector<ClinicalNote> notes;
  std::optional<ColorLabel> gold;
};

struct Corpus {
  std::vector<PatientProfile> profiles;
  std::string provenance;

  std::size_t note_count() const;
  bool fully_labeled() const;
};

/// Reads note records from a JSONL file, or from every `*.jsonl` file of a
/// directory in filename order. Each line is either a single note
///
///     {"note_id", "patient_id", "note_type"?, "timestamp"?, "text"}
///
/// or a pre-aggregated profile {"patient_id", "notes": [...], "fine"?}.
/// Profiles appear in order of first appearance of their patient id; within a
/// profile notes are stably sorted by timestamp, untimestamped notes last.
/// Throws DataError naming the file and line for malformed records and for
/// duplicate note ids.
Corpus ingest_notes(const std::filesystem::path& path);

// Same as ingest_notes over in-memory JSONL text; `source` names it in errors.
Corpus ingest_jsonl(std::string_view jsonl, const std::string& source);

using GoldLabels = std::unordered_map<std::string, Fine>;

// Sidecar format: one {"patient_id", "fine"} object per line.
GoldLabels load_gold_labels(const std::filesystem::path& path);
GoldLabels parse_gold_labels(std::string_view jsonl, const std::string& source);

// Sets gold labels on matching profiles; returns the number labeled.
std::size_t attach_labels(Corpus& corpus, const GoldLabels& labels);

std::string corpus_to_jsonl(const Corpus& corpus);
std::string labels_to_jsonl(const Corpus& corpus);
// One aggregated profile object per line.
std::string profiles_to_jsonl(const Corpus& corpus);

}  // namespace hfscreen
