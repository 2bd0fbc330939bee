#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "hfscreen/corpus.hpp"
#include "hfscreen/negation.hpp"
#include "hfscreen/textprep.hpp"

namespace hfscreen {

enum class Element : std::uint8_t {
  CardiologyConsulted = 0,
  HeartFailure = 1,
  AtGalter10 = 2,
  HeartTransplant = 3,
  NonActiveIssue = 4,
};

inline constexpr int kNumElements = 5;
inline constexpr std::array<Element, kNumElements> kAllElements{
    Element::CardiologyConsulted, Element::HeartFailure, Element::AtGalter10,
    Element::HeartTransplant, Element::NonActiveIssue};

constexpr int index(Element e) { return static_cast<int>(e); }

// Section names used in lexicon files: cardiology_consulted, heart_failure, ...
std::string_view to_string(Element e);
Element parse_element(std::string_view name);

struct KeywordPhrase {
  std::vector<std::string> tokens;
  Element element;
  // Exact token match only. Otherwise the final token may also carry a
  // plural or possessive suffix ("s", "es", "'s").
  bool whole_token = false;

  std::string text() const;
};

class KeywordLexicon {
 public:
  void add(Element element, std::string_view phrase, bool whole_token);
  const std::vector<KeywordPhrase>& phrases() const { return phrases_; }
  std::size_t count(Element e) const;

 private:
  std::vector<KeywordPhrase> phrases_;
};

// Sections named after elements; one phrase per line; a trailing " !token"
// marks a whole-token-only entry; '#' comments.
KeywordLexicon parse_keyword_lexicon(std::string_view text);
KeywordLexicon load_keyword_lexicon(const std::filesystem::path& path);
const KeywordLexicon& default_keyword_lexicon();

struct KeywordMention {
  Element element;
  std::string note_id;
  int sentence_index = 0;
  // Token range within the sentence.
  std::size_t first = 0;
  std::size_t last = 0;
  // Byte range within the note text.
  Span position;
  std::string phrase;
};

// Keyword mentions in one text; `note_id` is copied into each mention.
std::vector<KeywordMention> find_keyword_mentions(std::string_view text, const std::string& note_id,
                                                  const KeywordLexicon& lexicon);

std::vector<KeywordMention> find_keyword_mentions(const PatientProfile& profile,
                                                  const KeywordLexicon& lexicon);

struct Evidence {
  std::string note_id;
  int sentence_index = 0;
  std::string phrase;
  Span position;
};

class DataElements {
 public:
  bool operator[](Element e) const { return flags_[index(e)]; }

  bool cardiology_consulted() const { return (*this)[Element::CardiologyConsulted]; }
  bool heart_failure() const { return (*this)[Element::HeartFailure]; }
  bool at_galter_10() const { return (*this)[Element::AtGalter10]; }
  bool heart_transplant() const { return (*this)[Element::HeartTransplant]; }
  bool non_active_issue() const { return (*this)[Element::NonActiveIssue]; }

  const std::vector<Evidence>& evidence(Element e) const { return evidence_[index(e)]; }
  void add_evidence(Element e, Evidence ev) {
    flags_[index(e)] = true;
    evidence_[index(e)].push_back(std::move(ev));
  }

  // Element values without evidence, e.g. for exhaustive rule checks.
  static DataElements from_flags(std::array<bool, kNumElements> flags) {
    DataElements d;
    d.flags_ = flags;
    return d;
  }

  std::array<bool, kNumElements> flags() const { return flags_; }

 private:
  std::array<bool, kNumElements> flags_{};
  std::array<std::vector<Evidence>, kNumElements> evidence_;
};

struct ExtractionOptions {
  int negation_window = kDefaultNegationWindow;
  bool apply_negation = true;
};

/// Each element is true iff at least one of its keyword mentions across the
/// patient's notes is not negated within its sentence.
DataElements extract_data_elements(const PatientProfile& profile, const KeywordLexicon& lexicon,
                                   const TriggerLexicon& triggers,
                                   const ExtractionOptions& options = {});

}  // namespace hfscreen
