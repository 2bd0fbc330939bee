#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hfscreen/corpus.hpp"
#include "hfscreen/extraction.hpp"
#include "hfscreen/labels.hpp"

namespace hfscreen {

struct SynthesisSpec {
  std::size_t n_patients = 1000;
  // Indexed by Fine. Defaults follow the reference cohort: 82.3% Other,
  // 11.6% Orange, 6.1% Green.
  std::array<double, kNumFine> class_proportions{0.061, 0.116, 0.700, 0.080, 0.043};
  int min_notes = 2;
  int max_notes = 5;
  // Probability, per data element and patient, of one extra negated mention
  // of that element's keyword.
  double negation_rate = 0.0;
  std::size_t noise_vocab_size = 400;
  // Probability that an element the label leaves unconstrained is present.
  double optional_element_rate = 0.25;
  std::uint64_t seed = 7;

  void validate() const;
};

SynthesisSpec synthesis_spec_from_json(std::string_view json_text);
std::string synthesis_spec_to_json(const SynthesisSpec& spec);

/// Sentence templates and keyword surface forms used for synthesis, loaded
/// from `synth_templates.json`.
struct SynthTemplates {
  std::vector<std::string> filler;
  // Indexed by Element; "{kw}" marks the keyword slot.
  std::array<std::vector<std::string>, kNumElements> affirmed;
  std::array<std::vector<std::string>, kNumElements> negated;
  std::array<std::vector<std::string>, kNumElements> surface_forms;
  std::vector<std::string> noise_words;
  std::vector<std::string> note_types;
};

SynthTemplates load_synth_templates(const std::filesystem::path& path);
const SynthTemplates& default_synth_templates();

// Noise vocabulary of exactly `size` words: the shipped list first, then
// generated pseudo-words.
std::vector<std::string> noise_vocabulary(const SynthTemplates& templates, std::size_t size);

/// Builds a labeled corpus whose keyword and negation content entails each
/// patient's gold label under the rule classifier. Label counts are allotted
/// by largest remainder, so proportions are exact up to rounding. Identical
/// specs give byte-identical corpora.
Corpus generate_synthetic_corpus(const SynthesisSpec& spec,
                                 const SynthTemplates& templates = default_synth_templates());

}  // namespace hfscreen
