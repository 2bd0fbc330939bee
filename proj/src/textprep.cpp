#include "hfscreen/textprep.hpp"

#include <algorithm>

#include "hfscreen/io.hpp"

namespace hfscreen {

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_word_byte(char c) {
  const auto u = static_cast<unsigned char>(c);
  return (u >= '0' && u <= '9') || (u >= 'a' && u <= 'z') || (u >= 'A' && u <= 'Z') || u >= 0x80;
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

char ascii_lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), ascii_lower);
  return out;
}

}  // namespace

std::vector<Span> split_sentences(std::string_view text) {
  std::vector<Span> spans;
  constexpr std::size_t kNone = std::string_view::npos;
  std::size_t start = kNone;

  auto emit = [&](std::size_t end) {
    while (end > start && is_space(text[end - 1])) --end;
    if (end > start) spans.push_back({start, end});
    start = kNone;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (start == kNone) {
      if (!is_space(c)) start = i;
      else continue;
    }
    if ((c == '.' || c == '!' || c == '?') && (i + 1 == text.size() || is_space(text[i + 1]))) {
      emit(i + 1);
    } else if (c == '\n') {
      std::size_t j = i + 1;
      while (j < text.size() && (text[j] == ' ' || text[j] == '\t' || text[j] == '\r')) ++j;
      if (j < text.size() && text[j] == '\n') emit(i);
    }
  }
  if (start != kNone) emit(text.size());
  return spans;
}

std::vector<Token> tokenize_span(std::string_view text, Span span, int sentence_index,
                                 bool lowercase) {
  std::vector<Token> tokens;
  std::size_t i = span.begin;
  while (i < span.end) {
    if (!is_word_byte(text[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < span.end) {
      if (is_word_byte(text[j])) {
        ++j;
      } else if (text[j] == '\'' && j + 1 < span.end && is_word_byte(text[j + 1])) {
        ++j;
      } else {
        break;
      }
    }
    std::string_view surface = text.substr(i, j - i);
    tokens.push_back({lowercase ? lower(surface) : std::string(surface), {i, j}, sentence_index});
    i = j;
  }
  return tokens;
}

std::vector<Token> tokenize(std::string_view text, bool lowercase) {
  return tokenize_span(text, {0, text.size()}, 0, lowercase);
}

std::vector<Token> tokenize_sentences(std::string_view text, bool lowercase) {
  std::vector<Token> tokens;
  int index = 0;
  for (const Span& s : split_sentences(text)) {
    auto part = tokenize_span(text, s, index++, lowercase);
    tokens.insert(tokens.end(), std::make_move_iterator(part.begin()),
                  std::make_move_iterator(part.end()));
  }
  return tokens;
}

std::vector<std::string> phrase_tokens(std::string_view phrase) {
  std::vector<std::string> out;
  for (auto& t : tokenize(phrase, true)) out.push_back(std::move(t.surface));
  return out;
}

bool is_number(std::string_view token) {
  if (token.empty() || !is_digit(token.front()) || !is_digit(token.back())) return false;
  for (std::size_t i = 0; i < token.size(); ++i) {
    const char c = token[i];
    if (is_digit(c)) continue;
    // separators only between digits
    if ((c == '.' || c == ',') && is_digit(token[i - 1]) && is_digit(token[i + 1])) continue;
    return false;
  }
  return true;
}

std::size_t utf8_length(std::string_view s) {
  return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [](char c) {
    return (static_cast<unsigned char>(c) & 0xC0) != 0x80;
  }));
}

std::vector<Token> preprocess(std::vector<Token> tokens, const PreprocessConfig& config) {
  std::vector<Token> out;
  out.reserve(tokens.size());
  for (Token& t : tokens) {
    if (t.surface == config.number_placeholder) {
      out.push_back(std::move(t));
      continue;
    }
    if (is_number(t.surface)) {
      t.surface = config.number_placeholder;
      out.push_back(std::move(t));
      continue;
    }
    if (config.lowercase) t.surface = lower(t.surface);
    if (config.stopwords.contains(t.surface)) continue;
    if (utf8_length(t.surface) < config.min_token_len) continue;
    out.push_back(std::move(t));
  }
  return out;
}

std::unordered_set<std::string> parse_stopwords(std::string_view text) {
  std::unordered_set<std::string> words;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    while (!line.empty() && is_space(line.front())) line.remove_prefix(1);
    while (!line.empty() && is_space(line.back())) line.remove_suffix(1);
    if (!line.empty()) words.insert(lower(line));
    pos = nl + 1;
  }
  return words;
}

std::unordered_set<std::string> load_stopwords(const std::filesystem::path& path) {
  return parse_stopwords(read_file(path));
}

const std::unordered_set<std::string>& default_stopwords() {
  static const auto words = load_stopwords(data_dir() / "stopwords.txt");
  return words;
}

PreprocessConfig default_preprocess_config() {
  PreprocessConfig config;
  config.stopwords = default_stopwords();
  return config;
}

}  // namespace hfscreen
