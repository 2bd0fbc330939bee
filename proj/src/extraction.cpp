#include "hfscreen/extraction.hpp"

#include <algorithm>
#include <cctype>
#include <optional>

#include "hfscreen/errors.hpp"
#include "hfscreen/io.hpp"

namespace hfscreen {

std::string_view to_string(Element e) {
  switch (e) {
    case Element::CardiologyConsulted: return "cardiology_consulted";
    case Element::HeartFailure: return "heart_failure";
    case Element::AtGalter10: return "at_galter_10";
    case Element::HeartTransplant: return "heart_transplant";
    case Element::NonActiveIssue: return "non_active_issue";
  }
  return "?";
}

Element parse_element(std::string_view name) {
  for (Element e : kAllElements) {
    if (to_string(e) == name) return e;
  }
  throw DataError("unknown data element '" + std::string(name) + "'");
}

std::string KeywordPhrase::text() const {
  std::string s;
  for (const auto& t : tokens) {
    if (!s.empty()) s += ' ';
    s += t;
  }
  return s;
}

void KeywordLexicon::add(Element element, std::string_view phrase, bool whole_token) {
  KeywordPhrase p{phrase_tokens(phrase), element, whole_token};
  if (p.tokens.empty()) throw DataError("empty keyword phrase");
  phrases_.push_back(std::move(p));
}

std::size_t KeywordLexicon::count(Element e) const {
  return static_cast<std::size_t>(std::count_if(
      phrases_.begin(), phrases_.end(), [e](const KeywordPhrase& p) { return p.element == e; }));
}

KeywordLexicon parse_keyword_lexicon(std::string_view text) {
  constexpr std::string_view kWholeToken = "!token";
  KeywordLexicon lexicon;
  std::optional<Element> current;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  auto trim = [](std::string_view& s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  };
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    trim(line);
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']') {
      current = parse_element(line.substr(1, line.size() - 2));
      continue;
    }
    if (!current) {
      throw DataError("keyword lexicon line " + std::to_string(line_no) +
                      ": phrase outside of a section");
    }
    bool whole = false;
    if (line.ends_with(kWholeToken)) {
      whole = true;
      line.remove_suffix(kWholeToken.size());
      trim(line);
    }
    lexicon.add(*current, line, whole);
  }
  return lexicon;
}

KeywordLexicon load_keyword_lexicon(const std::filesystem::path& path) {
  return parse_keyword_lexicon(read_file(path));
}

const KeywordLexicon& default_keyword_lexicon() {
  static const KeywordLexicon lexicon = load_keyword_lexicon(data_dir() / "keywords.txt");
  return lexicon;
}

namespace {

bool final_token_matches(const std::string& token, const std::string& phrase_token, bool whole) {
  if (token == phrase_token) return true;
  if (whole || !token.starts_with(phrase_token)) return false;
  const std::string_view suffix = std::string_view(token).substr(phrase_token.size());
  return suffix == "s" || suffix == "es" || suffix == "'s";
}

bool matches_at(std::span<const Token> tokens, std::size_t pos, const KeywordPhrase& p) {
  const std::size_t len = p.tokens.size();
  if (pos + len > tokens.size()) return false;
  for (std::size_t k = 0; k + 1 < len; ++k) {
    if (tokens[pos + k].surface != p.tokens[k]) return false;
  }
  return final_token_matches(tokens[pos + len - 1].surface, p.tokens[len - 1], p.whole_token);
}

// Longest match per element at each start, skipping starts inside an earlier
// mention of the same element.
void scan_sentence(std::span<const Token> tokens, const std::string& note_id, std::string_view text,
                   const KeywordLexicon& lexicon, int sentence_index,
                   std::vector<KeywordMention>& out) {
  std::array<std::size_t, kNumElements> covered_until{};
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    std::array<const KeywordPhrase*, kNumElements> best{};
    for (const auto& p : lexicon.phrases()) {
      const int e = index(p.element);
      if (i < covered_until[e]) continue;
      if (best[e] && best[e]->tokens.size() >= p.tokens.size()) continue;
      if (matches_at(tokens, i, p)) best[e] = &p;
    }
    for (int e = 0; e < kNumElements; ++e) {
      if (!best[e]) continue;
      const std::size_t last = i + best[e]->tokens.size();
      covered_until[e] = last;
      const Span position{tokens[i].position.begin, tokens[last - 1].position.end};
      out.push_back({best[e]->element, note_id, sentence_index, i, last, position,
                     std::string(position.of(text))});
    }
  }
}

}  // namespace

std::vector<KeywordMention> find_keyword_mentions(std::string_view text, const std::string& note_id,
                                                  const KeywordLexicon& lexicon) {
  std::vector<KeywordMention> mentions;
  int sentence_index = 0;
  for (const Span& s : split_sentences(text)) {
    const auto tokens = tokenize_span(text, s, sentence_index, true);
    scan_sentence(tokens, note_id, text, lexicon, sentence_index, mentions);
    ++sentence_index;
  }
  return mentions;
}

std::vector<KeywordMention> find_keyword_mentions(const PatientProfile& profile,
                                                  const KeywordLexicon& lexicon) {
  std::vector<KeywordMention> mentions;
  for (const auto& note : profile.notes) {
    auto part = find_keyword_mentions(note.text, note.note_id, lexicon);
    mentions.insert(mentions.end(), std::make_move_iterator(part.begin()),
                    std::make_move_iterator(part.end()));
  }
  return mentions;
}

DataElements extract_data_elements(const PatientProfile& profile, const KeywordLexicon& lexicon,
                                   const TriggerLexicon& triggers,
                                   const ExtractionOptions& options) {
  DataElements elements;
  std::vector<KeywordMention> mentions;
  for (const auto& note : profile.notes) {
    int sentence_index = 0;
    for (const Span& s : split_sentences(note.text)) {
      const auto tokens = tokenize_span(note.text, s, sentence_index, true);
      mentions.clear();
      scan_sentence(tokens, note.note_id, note.text, lexicon, sentence_index, mentions);
      if (!mentions.empty()) {
        std::vector<NegatedSpan> negated;
        if (options.apply_negation) {
          negated = detect_negated_spans(std::span<const Token>(tokens), triggers,
                                         options.negation_window);
        }
        for (auto& m : mentions) {
          if (is_mention_negated(m.first, m.last, negated)) continue;
          elements.add_evidence(m.element,
                                {m.note_id, m.sentence_index, std::move(m.phrase), m.position});
        }
      }
      ++sentence_index;
    }
  }
  return elements;
}

}  // namespace hfscreen
