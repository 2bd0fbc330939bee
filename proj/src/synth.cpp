#include "hfscreen/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <unordered_set>

#include "hfscreen/errors.hpp"
#include "hfscreen/io.hpp"
#include "hfscreen/rng.hpp"
#include "hfscreen/textprep.hpp"
#include "json.hpp"

namespace hfscreen {

using nlohmann::json;

void SynthesisSpec::validate() const {
  double sum = 0.0;
  for (double p : class_proportions) {
    if (!(p >= 0.0 && p <= 1.0)) throw UsageError("class proportions must lie in [0, 1]");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw UsageError("class proportions sum to " + std::to_string(sum) + ", expected 1");
  }
  if (!(negation_rate >= 0.0 && negation_rate <= 1.0)) {
    throw UsageError("negation_rate must lie in [0, 1]");
  }
  if (!(optional_element_rate >= 0.0 && optional_element_rate <= 1.0)) {
    throw UsageError("optional_element_rate must lie in [0, 1]");
  }
  if (min_notes < 1 || max_notes < min_notes) {
    throw UsageError("notes_per_patient must be a range [lo, hi] with 1 <= lo <= hi");
  }
}

SynthesisSpec synthesis_spec_from_json(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw UsageError(std::string("malformed synthesis spec: ") + e.what());
  }
  SynthesisSpec spec;
  try {
    spec.n_patients = j.value("n_patients", spec.n_patients);
    if (auto it = j.find("class_proportions"); it != j.end()) {
      spec.class_proportions.fill(0.0);
      for (const auto& [name, value] : it->items()) {
        spec.class_proportions[index(parse_fine(name))] = value.get<double>();
      }
    }
    if (auto it = j.find("notes_per_patient"); it != j.end()) {
      if (!it->is_array() || it->size() != 2) {
        throw UsageError("notes_per_patient must be [lo, hi]");
      }
      spec.min_notes = (*it)[0].get<int>();
      spec.max_notes = (*it)[1].get<int>();
    }
    spec.negation_rate = j.value("negation_rate", spec.negation_rate);
    spec.noise_vocab_size = j.value("noise_vocab_size", spec.noise_vocab_size);
    spec.optional_element_rate = j.value("optional_element_rate", spec.optional_element_rate);
    spec.seed = j.value("seed", spec.seed);
  } catch (const json::exception& e) {
    throw UsageError(std::string("invalid synthesis spec: ") + e.what());
  } catch (const DataError& e) {
    throw UsageError(std::string("invalid synthesis spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

std::string synthesis_spec_to_json(const SynthesisSpec& spec) {
  json props = json::object();
  for (Fine f : kAllFine) props[std::string(to_string(f))] = spec.class_proportions[index(f)];
  json j = {{"n_patients", spec.n_patients},
            {"class_proportions", props},
            {"notes_per_patient", {spec.min_notes, spec.max_notes}},
            {"negation_rate", spec.negation_rate},
            {"noise_vocab_size", spec.noise_vocab_size},
            {"optional_element_rate", spec.optional_element_rate},
            {"seed", spec.seed}};
  return j.dump(2);
}

SynthTemplates load_synth_templates(const std::filesystem::path& path) {
  SynthTemplates t;
  try {
    const json j = json::parse(read_file(path));
    t.filler = j.at("filler").get<std::vector<std::string>>();
    t.noise_words = j.at("noise_words").get<std::vector<std::string>>();
    t.note_types = j.at("note_types").get<std::vector<std::string>>();
    for (Element e : kAllElements) {
      const json& el = j.at("elements").at(std::string(to_string(e)));
      t.surface_forms[index(e)] = el.at("surface_forms").get<std::vector<std::string>>();
      t.affirmed[index(e)] = el.at("affirmed").get<std::vector<std::string>>();
      t.negated[index(e)] = el.at("negated").get<std::vector<std::string>>();
      if (t.surface_forms[index(e)].empty() || t.affirmed[index(e)].empty() ||
          t.negated[index(e)].empty()) {
        throw DataError("element " + std::string(to_string(e)) + " has an empty template list");
      }
    }
  } catch (const json::exception& e) {
    throw DataError("bad synthesis templates in " + path.string() + ": " + e.what());
  }
  if (t.filler.empty() || t.note_types.empty()) {
    throw DataError("synthesis templates need filler sentences and note types");
  }
  return t;
}

const SynthTemplates& default_synth_templates() {
  static const SynthTemplates t = load_synth_templates(data_dir() / "synth_templates.json");
  return t;
}

std::vector<std::string> noise_vocabulary(const SynthTemplates& templates, std::size_t size) {
  std::vector<std::string> words;
  std::unordered_set<std::string> taken;
  for (const auto& w : templates.noise_words) {
    if (words.size() == size) return words;
    if (taken.insert(w).second) words.push_back(w);
  }
  // Pseudo-words of three consonant-vowel syllables, never colliding with
  // lexicon tokens.
  for (const auto& forms : templates.surface_forms) {
    for (const auto& f : forms) {
      for (auto& t : phrase_tokens(f)) taken.insert(std::move(t));
    }
  }
  constexpr std::string_view consonants = "bdfgklmnprstvz";
  constexpr std::string_view vowels = "aeiou";
  const std::size_t syllables = consonants.size() * vowels.size();
  for (std::size_t k = 0; words.size() < size; ++k) {
    std::string w;
    std::size_t v = k;
    for (int s = 0; s < 3; ++s) {
      const std::size_t syl = v % syllables;
      v /= syllables;
      w += consonants[syl / vowels.size()];
      w += vowels[syl % vowels.size()];
    }
    if (v > 0) w += std::to_string(v);
    if (taken.insert(w).second) words.push_back(std::move(w));
  }
  return words;
}

namespace {

std::vector<Fine> allot_labels(const SynthesisSpec& spec, Rng& rng) {
  const double n = static_cast<double>(spec.n_patients);
  std::array<std::size_t, kNumFine> counts{};
  std::array<double, kNumFine> remainder{};
  std::size_t assigned = 0;
  for (int f = 0; f < kNumFine; ++f) {
    const double exact = spec.class_proportions[f] * n;
    counts[f] = static_cast<std::size_t>(std::floor(exact));
    remainder[f] = exact - std::floor(exact);
    assigned += counts[f];
  }
  std::array<int, kNumFine> order{};
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return remainder[a] > remainder[b]; });
  for (std::size_t i = 0; assigned < spec.n_patients; ++i, ++assigned) {
    ++counts[order[i % kNumFine]];
  }

  std::vector<Fine> labels;
  labels.reserve(spec.n_patients);
  for (Fine f : kAllFine) labels.insert(labels.end(), counts[index(f)], f);
  rng.shuffle(std::span<Fine>(labels));
  return labels;
}

std::array<bool, kNumElements> sample_elements(Fine label, double p, Rng& rng) {
  std::array<bool, kNumElements> flags{};
  auto set = [&](Element e, bool v) { flags[index(e)] = v; };
  auto maybe = [&](Element e) { flags[index(e)] = rng.bernoulli(p); };
  switch (label) {
    case Fine::Purple:
      set(Element::HeartTransplant, true);
      maybe(Element::HeartFailure);
      maybe(Element::CardiologyConsulted);
      maybe(Element::AtGalter10);
      maybe(Element::NonActiveIssue);
      break;
    case Fine::Grey:
      maybe(Element::CardiologyConsulted);
      maybe(Element::AtGalter10);
      maybe(Element::NonActiveIssue);
      break;
    case Fine::Red:
      set(Element::HeartFailure, true);
      set(Element::NonActiveIssue, true);
      maybe(Element::CardiologyConsulted);
      maybe(Element::AtGalter10);
      break;
    case Fine::Orange: {
      set(Element::HeartFailure, true);
      const auto which = rng.below(3);
      set(Element::CardiologyConsulted, which != 1);
      set(Element::AtGalter10, which != 0);
      break;
    }
    case Fine::Green:
      set(Element::HeartFailure, true);
      break;
  }
  return flags;
}

std::string fill(std::string_view tmpl, std::string_view keyword) {
  std::string s(tmpl);
  if (auto pos = s.find("{kw}"); pos != std::string::npos) s.replace(pos, 4, keyword);
  if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') s[0] = static_cast<char>(s[0] - 'a' + 'A');
  return s;
}

std::string noise_sentence(std::span<const std::string> noise, Rng& rng) {
  const auto len = rng.between(4, 8);
  std::string s;
  for (std::int64_t i = 0; i < len; ++i) {
    if (i > 0) s += ' ';
    s += rng.pick(noise);
  }
  s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  s += '.';
  return s;
}

}  // namespace

Corpus generate_synthetic_corpus(const SynthesisSpec& spec, const SynthTemplates& templates) {
  spec.validate();
  Rng rng(spec.seed);
  const std::vector<Fine> labels = allot_labels(spec, rng);
  const std::vector<std::string> noise =
      noise_vocabulary(templates, std::max<std::size_t>(spec.noise_vocab_size, 1));

  Corpus corpus;
  corpus.provenance = "synthetic seed=" + std::to_string(spec.seed);
  corpus.profiles.reserve(labels.size());

  for (std::size_t i = 0; i < labels.size(); ++i) {
    char pid_buf[32];
    std::snprintf(pid_buf, sizeof pid_buf, "P%05zu", i + 1);
    PatientProfile profile{pid_buf, {}, ColorLabel(labels[i])};

    const auto flags = sample_elements(labels[i], spec.optional_element_rate, rng);
    const auto n_notes = static_cast<std::size_t>(rng.between(spec.min_notes, spec.max_notes));
    std::vector<std::vector<std::string>> sentences(n_notes);
    for (auto& note : sentences) {
      const auto n_filler = rng.between(2, 4);
      for (std::int64_t k = 0; k < n_filler; ++k) {
        note.push_back(rng.pick(std::span<const std::string>(templates.filler)));
      }
      if (rng.bernoulli(0.5)) note.push_back(noise_sentence(noise, rng));
    }

    auto insert = [&](const std::string& sentence) {
      auto& note = sentences[rng.below(n_notes)];
      note.insert(note.begin() + static_cast<std::ptrdiff_t>(rng.below(note.size() + 1)), sentence);
    };
    for (Element e : kAllElements) {
      const int ei = index(e);
      if (flags[ei]) {
        const auto mentions = rng.between(1, 2);
        for (std::int64_t m = 0; m < mentions; ++m) {
          const auto& forms = templates.surface_forms[ei];
          const auto& affirmed = templates.affirmed[ei];
          insert(m == 0 ? fill(affirmed.front(), forms.front())
                        : fill(rng.pick(std::span<const std::string>(affirmed)),
                               rng.pick(std::span<const std::string>(forms))));
        }
      }
      if (rng.bernoulli(spec.negation_rate)) {
        insert(fill(rng.pick(std::span<const std::string>(templates.negated[ei])),
                    rng.pick(std::span<const std::string>(templates.surface_forms[ei]))));
      }
    }

    const auto first_day = 1 + rng.below(20);
    for (std::size_t j = 0; j < n_notes; ++j) {
      ClinicalNote note;
      note.patient_id = profile.patient_id;
      note.note_id = profile.patient_id + "-N" + std::to_string(j + 1);
      note.note_type = rng.pick(std::span<const std::string>(templates.note_types));
      // one note every three hours from 06:00 of the admission day
      const std::size_t hours = 6 + 3 * j;
      char ts[48];
      std::snprintf(ts, sizeof ts, "2015-08-%02lluT%02zu:00:00",
                    static_cast<unsigned long long>(first_day + hours / 24), hours % 24);
      note.timestamp = ts;
      for (const auto& s : sentences[j]) {
        if (!note.text.empty()) note.text += ' ';
        note.text += s;
      }
      profile.notes.push_back(std::move(note));
    }
    corpus.profiles.push_back(std::move(profile));
  }
  return corpus;
}

}  // namespace hfscreen
