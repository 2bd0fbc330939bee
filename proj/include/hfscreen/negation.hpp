#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hfscreen/textprep.hpp"

namespace hfscreen {

enum class TriggerKind { Pre, Post, Pseudo, Termination };

struct TriggerPhrase {
  std::vector<std::string> tokens;
  TriggerKind kind;

  std::string text() const;
};

/// NegEx trigger phrases in four categories. Phrases are lowercased, one to
/// four tokens long, and no phrase belongs to two categories.
class TriggerLexicon {
 public:
  TriggerLexicon() = default;
  void add(std::string_view phrase, TriggerKind kind);

  // Longest phrase matching `tokens` at `pos`, or nullptr.
  const TriggerPhrase* longest_match(std::span<const std::string> tokens, std::size_t pos) const;

  std::size_t size() const { return phrases_.size(); }
  std::size_t count(TriggerKind kind) const;
  const std::vector<TriggerPhrase>& phrases() const { return phrases_; }

 private:
  std::vector<TriggerPhrase> phrases_;
};

// Sections [pre], [post], [pseudo], [termination]; one phrase per line; '#'
// comments. Throws DataError on unknown sections, overlong or duplicated
// phrases.
TriggerLexicon parse_trigger_lexicon(std::string_view text);
TriggerLexicon load_trigger_lexicon(const std::filesystem::path& path);
const TriggerLexicon& default_trigger_lexicon();

enum class ScopeDirection { Forward, Backward };

struct NegatedSpan {
  int sentence_index = 0;
  std::size_t first = 0;  // token range [first, last)
  std::size_t last = 0;
  std::string trigger;
  ScopeDirection direction = ScopeDirection::Forward;
};

inline constexpr int kDefaultNegationWindow = 6;

/// Scans one sentence left to right, taking the longest trigger at each
/// position. Pre triggers negate up to `window` following tokens, post
/// triggers up to `window` preceding tokens; a termination phrase or the
/// sentence edge cuts a scope short. Pseudo triggers are consumed and open
/// nothing.
std::vector<NegatedSpan> detect_negated_spans(std::span<const std::string> sentence_tokens,
                                              const TriggerLexicon& lexicon,
                                              int window = kDefaultNegationWindow,
                                              int sentence_index = 0);

std::vector<NegatedSpan> detect_negated_spans(std::span<const Token> sentence_tokens,
                                              const TriggerLexicon& lexicon,
                                              int window = kDefaultNegationWindow);

// True iff token range [first, last) intersects any span.
bool is_mention_negated(std::size_t first, std::size_t last, std::span<const NegatedSpan> spans);

}  // namespace hfscreen
