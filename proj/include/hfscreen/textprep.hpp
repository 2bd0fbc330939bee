#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace hfscreen {

// Half-open byte range into a source text.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  std::string_view of(std::string_view text) const { return text.substr(begin, end - begin); }
  friend bool operator==(const Span&, const Span&) = default;
};

struct Token {
  std::string surface;
  Span position;
  int sentence_index = 0;
};

/// Sentence spans over `text`, trimmed of surrounding whitespace. A sentence
/// ends after '.', '!' or '?' followed by whitespace or end of text, and at a
/// paragraph break (a newline followed by optional blanks and another
/// newline). Every non-whitespace byte belongs to exactly one span.
std::vector<Span> split_sentences(std::string_view text);

/// Maximal runs of alphanumeric characters, keeping apostrophes that sit
/// between two such characters. Bytes >= 0x80 count as alphanumeric so UTF-8
/// letters stay inside words. Only ASCII is case-folded.
std::vector<Token> tokenize(std::string_view text, bool lowercase = true);

// Tokenizes each sentence of `text`; offsets stay relative to `text`.
std::vector<Token> tokenize_sentences(std::string_view text, bool lowercase = true);

// Tokenizes `text[span]` with offsets relative to `text`.
std::vector<Token> tokenize_span(std::string_view text, Span span, int sentence_index,
                                 bool lowercase = true);

// Lowercased token surfaces of a phrase, e.g. lexicon entries.
std::vector<std::string> phrase_tokens(std::string_view phrase);

struct PreprocessConfig {
  std::unordered_set<std::string> stopwords;
  std::size_t min_token_len = 4;
  std::string number_placeholder = "NUM";
  bool lowercase = true;
};

// Digits with optional internal '.' or ',' groups ("37", "1,200", "3.5").
bool is_number(std::string_view token);

// Length in UTF-8 code points.
std::size_t utf8_length(std::string_view s);

/// Applies, in order: numbers -> placeholder, stopword removal, removal of
/// tokens shorter than min_token_len. The placeholder passes through every
/// step untouched, which makes the function idempotent.
std::vector<Token> preprocess(std::vector<Token> tokens, const PreprocessConfig& config);

// One word per line, '#' starts a comment.
std::unordered_set<std::string> parse_stopwords(std::string_view text);
std::unordered_set<std::string> load_stopwords(const std::filesystem::path& path);
const std::unordered_set<std::string>& default_stopwords();

PreprocessConfig default_preprocess_config();

}  // namespace hfscreen
