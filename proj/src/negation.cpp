#include "hfscreen/negation.hpp"

#include <algorithm>
#include <cctype>
#include <optional>
#include <unordered_map>

#include "hfscreen/errors.hpp"
#include "hfscreen/io.hpp"

namespace hfscreen {

std::string TriggerPhrase::text() const {
  std::string s;
  for (const auto& t : tokens) {
    if (!s.empty()) s += ' ';
    s += t;
  }
  return s;
}

void TriggerLexicon::add(std::string_view phrase, TriggerKind kind) {
  TriggerPhrase p{phrase_tokens(phrase), kind};
  if (p.tokens.empty() || p.tokens.size() > 4) {
    throw DataError("trigger phrase must have 1-4 tokens: '" + std::string(phrase) + "'");
  }
  for (const auto& existing : phrases_) {
    if (existing.tokens == p.tokens) {
      throw DataError("trigger phrase listed twice: '" + p.text() + "'");
    }
  }
  phrases_.push_back(std::move(p));
}

const TriggerPhrase* TriggerLexicon::longest_match(std::span<const std::string> tokens,
                                                   std::size_t pos) const {
  const TriggerPhrase* best = nullptr;
  for (const auto& p : phrases_) {
    if (pos + p.tokens.size() > tokens.size()) continue;
    if (best && p.tokens.size() <= best->tokens.size()) continue;
    if (std::equal(p.tokens.begin(), p.tokens.end(), tokens.begin() + pos)) best = &p;
  }
  return best;
}

std::size_t TriggerLexicon::count(TriggerKind kind) const {
  return static_cast<std::size_t>(std::count_if(
      phrases_.begin(), phrases_.end(), [kind](const TriggerPhrase& p) { return p.kind == kind; }));
}

TriggerLexicon parse_trigger_lexicon(std::string_view text) {
  static const std::unordered_map<std::string, TriggerKind> sections{
      {"pre", TriggerKind::Pre},
      {"post", TriggerKind::Post},
      {"pseudo", TriggerKind::Pseudo},
      {"termination", TriggerKind::Termination}};

  TriggerLexicon lexicon;
  std::optional<TriggerKind> current;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.front()))) line.remove_prefix(1);
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.remove_suffix(1);
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']') {
      auto it = sections.find(std::string(line.substr(1, line.size() - 2)));
      if (it == sections.end()) {
        throw DataError("trigger lexicon line " + std::to_string(line_no) + ": unknown section " +
                        std::string(line));
      }
      current = it->second;
      continue;
    }
    if (!current) {
      throw DataError("trigger lexicon line " + std::to_string(line_no) +
                      ": phrase outside of a section");
    }
    lexicon.add(line, *current);
  }
  return lexicon;
}

TriggerLexicon load_trigger_lexicon(const std::filesystem::path& path) {
  return parse_trigger_lexicon(read_file(path));
}

const TriggerLexicon& default_trigger_lexicon() {
  static const TriggerLexicon lexicon = load_trigger_lexicon(data_dir() / "negex_triggers.txt");
  return lexicon;
}

std::vector<NegatedSpan> detect_negated_spans(std::span<const std::string> tokens,
                                              const TriggerLexicon& lexicon, int window,
                                              int sentence_index) {
  const std::size_t n = tokens.size();
  const auto w = static_cast<std::size_t>(std::max(window, 1));

  struct Match {
    std::size_t pos;
    const TriggerPhrase* phrase;
  };
  std::vector<Match> matches;
  std::vector<bool> terminates(n, false);
  for (std::size_t i = 0; i < n;) {
    const TriggerPhrase* p = lexicon.longest_match(tokens, i);
    if (!p) {
      ++i;
      continue;
    }
    if (p->kind == TriggerKind::Termination) {
      std::fill_n(terminates.begin() + static_cast<std::ptrdiff_t>(i), p->tokens.size(), true);
    }
    matches.push_back({i, p});
    i += p->tokens.size();
  }

  std::vector<NegatedSpan> spans;
  for (const Match& m : matches) {
    if (m.phrase->kind == TriggerKind::Pre) {
      const std::size_t first = m.pos + m.phrase->tokens.size();
      std::size_t last = first;
      while (last < n && last < first + w && !terminates[last]) ++last;
      if (last > first) {
        spans.push_back({sentence_index, first, last, m.phrase->text(), ScopeDirection::Forward});
      }
    } else if (m.phrase->kind == TriggerKind::Post) {
      const std::size_t last = m.pos;
      std::size_t first = last;
      while (first > 0 && first + w > last && !terminates[first - 1]) --first;
      if (last > first) {
        spans.push_back({sentence_index, first, last, m.phrase->text(), ScopeDirection::Backward});
      }
    }
  }
  return spans;
}

std::vector<NegatedSpan> detect_negated_spans(std::span<const Token> sentence_tokens,
                                              const TriggerLexicon& lexicon, int window) {
  std::vector<std::string> surfaces;
  surfaces.reserve(sentence_tokens.size());
  for (const auto& t : sentence_tokens) surfaces.push_back(t.surface);
  const int index = sentence_tokens.empty() ? 0 : sentence_tokens.front().sentence_index;
  return detect_negated_spans(std::span<const std::string>(surfaces), lexicon, window, index);
}

bool is_mention_negated(std::size_t first, std::size_t last, std::span<const NegatedSpan> spans) {
  return std::any_of(spans.begin(), spans.end(), [&](const NegatedSpan& s) {
    return first < s.last && s.first < last;
  });
}

}  // namespace hfscreen
