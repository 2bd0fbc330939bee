#pragma once

// Independent reference computations shared by the unit tests and the
// acceptance runner.

#include <fstream>
#include <iterator>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "hfscreen/negation.hpp"
#include "hfscreen/rng.hpp"

namespace testing {

inline const std::vector<std::string> kOracleWords = {"alpha", "bravo", "charlie", "delta", "echo", "foxtrot"};

// Notes are sentences of plain words joined by ". ", so an oracle can split
// them without the library's tokenizer.
inline hfscreen::Corpus random_corpus(hfscreen::Rng& rng, std::size_t n_patients) {
  hfscreen::Corpus c;
  for (std::size_t p = 0; p < n_patients; ++p) {
    std::vector<std::string> notes;
    const auto n_notes = rng.between(0, 3);
    for (std::int64_t k = 0; k < n_notes; ++k) {
      std::string text;
      const auto n_sent = rng.between(1, 3);
      for (std::int64_t s = 0; s < n_sent; ++s) {
        const auto len = rng.between(1, 5);
        for (std::int64_t w = 0; w < len; ++w) {
          if (w > 0) text += ' ';
          text += kOracleWords[rng.below(kOracleWords.size())];
        }
        text += ". ";
      }
      notes.push_back(text);
    }
    c.profiles.push_back(profile("P" + std::to_string(p), notes));
  }
  return c;
}

using BigramCounts = std::map<std::pair<std::string, std::string>, int>;

inline BigramCounts oracle_counts(const hfscreen::PatientProfile& p) {
  BigramCounts counts;
  for (const auto& note : p.notes) {
    std::size_t start = 0;
    while (start < note.text.size()) {
      std::size_t end = note.text.find(". ", start);
      if (end == std::string::npos) end = note.text.size();
      std::istringstream in(note.text.substr(start, end - start));
      std::vector<std::string> w{std::istream_iterator<std::string>(in), {}};
      for (std::size_t i = 0; i + 1 < w.size(); ++i) ++counts[{w[i], w[i + 1]}];
      start = end + 2;
    }
  }
  return counts;
}

// Negation status of the first occurrence of `target` in `text`, judged
// within the target's own sentence; empty when the target is absent.
inline std::optional<bool> target_negated(std::string_view text, std::string_view target) {
  using namespace hfscreen;
  const auto tokens = tokenize_sentences(text);
  std::vector<std::string> needle;
  for (const auto& t : tokenize(target)) needle.push_back(t.surface);
  if (needle.empty()) return std::nullopt;
  for (std::size_t i = 0; i + needle.size() <= tokens.size(); ++i) {
    bool hit = true;
    for (std::size_t k = 0; k < needle.size() && hit; ++k) {
      hit = tokens[i + k].surface == needle[k] && tokens[i + k].sentence_index == tokens[i].sentence_index;
    }
    if (!hit) continue;
    const int s = tokens[i].sentence_index;
    std::size_t begin = i;
    while (begin > 0 && tokens[begin - 1].sentence_index == s) --begin;
    std::size_t end = i;
    while (end < tokens.size() && tokens[end].sentence_index == s) ++end;
    const std::span<const Token> sentence(tokens.data() + begin, end - begin);
    const auto spans = detect_negated_spans(sentence, default_trigger_lexicon(), kDefaultNegationWindow);
    return is_mention_negated(i - begin, i - begin + needle.size(), spans);
  }
  return std::nullopt;
}

struct Annotation {
  std::string sentence;
  std::string target;
  bool negated = false;
};

// Lines "sentence<TAB>target<TAB>negated|affirmed"; '#' comments.
inline std::vector<Annotation> load_annotations(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<Annotation> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    Annotation a;
    std::string label;
    std::getline(fields, a.sentence, '\t');
    std::getline(fields, a.target, '\t');
    std::getline(fields, label, '\t');
    if (label != "negated" && label != "affirmed") throw std::runtime_error("bad label in: " + line);
    a.negated = label == "negated";
    out.push_back(std::move(a));
  }
  return out;
}

}  // namespace testing
