#include "hfscreen/corpus.hpp"

#include <algorithm>
#include <unordered_set>

#include "hfscreen/errors.hpp"
#include "hfscreen/io.hpp"
#include "json.hpp"

namespace hfscreen {

using nlohmann::json;

namespace {

std::string where(const std::string& source, std::size_t line) {
  return source + ":" + std::to_string(line);
}

std::string required_string(const json& obj, const char* key, const std::string& loc) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) {
    throw DataError(loc + ": record is missing \"" + key + "\"");
  }
  if (!it->is_string()) throw DataError(loc + ": \"" + key + "\" must be a string");
  return it->get<std::string>();
}

std::optional<std::string> optional_string(const json& obj, const char* key,
                                           const std::string& loc) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw DataError(loc + ": \"" + key + "\" must be a string");
  return it->get<std::string>();
}

class CorpusBuilder {
 public:
  void add_note(ClinicalNote note, const std::string& loc) {
    if (!note_ids_.insert(note.note_id).second) {
      throw DataError(loc + ": duplicate note_id \"" + note.note_id + "\"");
    }
    profile(note.patient_id).notes.push_back(std::move(note));
  }

  PatientProfile& profile(const std::string& patient_id) {
    auto [it, inserted] = by_patient_.try_emplace(patient_id, corpus_.profiles.size());
    if (inserted) corpus_.profiles.push_back(PatientProfile{patient_id, {}, std::nullopt});
    return corpus_.profiles[it->second];
  }

  void add_line(std::string_view line, const std::string& loc) {
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw DataError(loc + ": malformed JSON record (" + e.what() + ")");
    }
    if (!record.is_object()) throw DataError(loc + ": record is not a JSON object");

    const std::string patient_id = required_string(record, "patient_id", loc);
    if (auto notes = record.find("notes"); notes != record.end()) {
      if (!notes->is_array()) throw DataError(loc + ": \"notes\" must be an array");
      PatientProfile& p = profile(patient_id);
      if (auto fine = optional_string(record, "fine", loc)) p.gold = ColorLabel(parse_fine(*fine));
      for (const json& n : *notes) {
        if (!n.is_object()) throw DataError(loc + ": note entry is not an object");
        if (auto pid = optional_string(n, "patient_id", loc); pid && *pid != patient_id) {
          throw DataError(loc + ": note patient_id \"" + *pid + "\" does not match profile");
        }
        add_note(make_note(n, patient_id, loc), loc);
      }
      return;
    }
    add_note(make_note(record, patient_id, loc), loc);
  }

  Corpus finish(std::string provenance) && {
    for (PatientProfile& p : corpus_.profiles) {
      std::stable_sort(p.notes.begin(), p.notes.end(),
                       [](const ClinicalNote& a, const ClinicalNote& b) {
                         if (a.timestamp && b.timestamp) return *a.timestamp < *b.timestamp;
                         return a.timestamp.has_value() && !b.timestamp.has_value();
                       });
    }
    corpus_.provenance = std::move(provenance);
    return std::move(corpus_);
  }

 private:
  ClinicalNote make_note(const json& n, const std::string& patient_id, const std::string& loc) {
    ClinicalNote note;
    note.patient_id = patient_id;
    note.note_id = optional_string(n, "note_id", loc)
                       .value_or(patient_id + "#" + std::to_string(++anonymous_notes_));
    note.note_type = optional_string(n, "note_type", loc).value_or("");
    note.timestamp = optional_string(n, "timestamp", loc);
    note.text = required_string(n, "text", loc);
    return note;
  }

  Corpus corpus_;
  std::unordered_map<std::string, std::size_t> by_patient_;
  std::unordered_set<std::string> note_ids_;
  std::size_t anonymous_notes_ = 0;
};

template <typename F>
void for_each_line(std::string_view text, F&& f) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") != std::string_view::npos) f(line, line_no);
    pos = nl + 1;
  }
}

}  // namespace

std::size_t Corpus::note_count() const {
  std::size_t n = 0;
  for (const auto& p : profiles) n += p.notes.size();
  return n;
}

bool Corpus::fully_labeled() const {
  return std::all_of(profiles.begin(), profiles.end(),
                     [](const PatientProfile& p) { return p.gold.has_value(); });
}

Corpus ingest_jsonl(std::string_view jsonl, const std::string& source) {
  CorpusBuilder builder;
  for_each_line(jsonl, [&](std::string_view line, std::size_t no) {
    builder.add_line(line, where(source, no));
  });
  return std::move(builder).finish(source);
}

Corpus ingest_notes(const std::filesystem::path& path) {
  namespace fs = std::filesystem;
  if (!fs::exists(path)) throw DataError("input not found: " + path.string());
  if (!fs::is_directory(path)) return ingest_jsonl(read_file(path), path.string());

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(path)) {
    if (entry.is_regular_file() && entry.path().extension() == ".jsonl") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  CorpusBuilder builder;
  for (const auto& f : files) {
    const std::string text = read_file(f);
    for_each_line(text, [&](std::string_view line, std::size_t no) {
      builder.add_line(line, where(f.string(), no));
    });
  }
  return std::move(builder).finish(path.string());
}

GoldLabels parse_gold_labels(std::string_view jsonl, const std::string& source) {
  GoldLabels labels;
  for_each_line(jsonl, [&](std::string_view line, std::size_t no) {
    const std::string loc = where(source, no);
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw DataError(loc + ": malformed JSON label (" + e.what() + ")");
    }
    if (!record.is_object()) throw DataError(loc + ": label is not a JSON object");
    const std::string pid = required_string(record, "patient_id", loc);
    const Fine fine = parse_fine(required_string(record, "fine", loc));
    if (!labels.emplace(pid, fine).second) {
      throw DataError(loc + ": duplicate label for patient \"" + pid + "\"");
    }
  });
  return labels;
}

GoldLabels load_gold_labels(const std::filesystem::path& path) {
  return parse_gold_labels(read_file(path), path.string());
}

std::size_t attach_labels(Corpus& corpus, const GoldLabels& labels) {
  std::size_t n = 0;
  for (PatientProfile& p : corpus.profiles) {
    if (auto it = labels.find(p.patient_id); it != labels.end()) {
      p.gold = ColorLabel(it->second);
      ++n;
    }
  }
  return n;
}

namespace {

json note_json(const ClinicalNote& n) {
  json j = json::object();
  j["note_id"] = n.note_id;
  j["patient_id"] = n.patient_id;
  j["note_type"] = n.note_type;
  if (n.timestamp) j["timestamp"] = *n.timestamp;
  j["text"] = n.text;
  return j;
}

}  // namespace

std::string corpus_to_jsonl(const Corpus& corpus) {
  std::string out;
  for (const auto& p : corpus.profiles) {
    for (const auto& n : p.notes) {
      out += note_json(n).dump();
      out += '\n';
    }
  }
  return out;
}

std::string labels_to_jsonl(const Corpus& corpus) {
  std::string out;
  for (const auto& p : corpus.profiles) {
    if (!p.gold || !p.gold->fine()) continue;
    json j = {{"patient_id", p.patient_id}, {"fine", to_string(*p.gold->fine())}};
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::string profiles_to_jsonl(const Corpus& corpus) {
  std::string out;
  for (const auto& p : corpus.profiles) {
    json j = json::object();
    j["patient_id"] = p.patient_id;
    json notes = json::array();
    for (const auto& n : p.notes) notes.push_back(note_json(n));
    j["notes"] = std::move(notes);
    if (p.gold && p.gold->fine()) j["fine"] = to_string(*p.gold->fine());
    out += j.dump();
    out += '\n';
  }
  return out;
}

}  // namespace hfscreen
