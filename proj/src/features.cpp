#include "hfscreen/features.hpp"

#include <algorithm>
#include <cstdio>
#include <string_view>
#include <vector>

#include "hfscreen/errors.hpp"
#include "hfscreen/io.hpp"
#include "json.hpp"

namespace hfscreen {

using nlohmann::json;

void FeaturizerConfig::validate() const {
  if (!(0.0 <= min_df && min_df <= max_df && max_df <= 1.0)) {
    throw UsageError("document frequency band must satisfy 0 <= min_df <= max_df <= 1");
  }
  if (preprocess.min_token_len < 1) throw UsageError("min_token_len must be at least 1");
}

std::uint64_t FeaturizerConfig::fingerprint() const {
  std::vector<std::string> stop(preprocess.stopwords.begin(), preprocess.stopwords.end());
  std::sort(stop.begin(), stop.end());
  char buf[128];
  std::snprintf(buf, sizeof buf, "df=[%.17g,%.17g];len=%zu;lower=%d;", min_df, max_df,
                preprocess.min_token_len, preprocess.lowercase ? 1 : 0);
  std::string canonical = buf;
  canonical += "num=" + preprocess.number_placeholder + ";stop=";
  for (const auto& w : stop) {
    canonical += w;
    canonical += '\n';
  }
  return fnv1a(canonical);
}

Document make_document(const PatientProfile& profile, const PreprocessConfig& config) {
  Document doc;
  for (const auto& note : profile.notes) {
    int index = 0;
    for (const Span& s : split_sentences(note.text)) {
      auto tokens = preprocess(tokenize_span(note.text, s, index++, config.lowercase), config);
      if (tokens.empty()) continue;
      std::vector<std::string> segment;
      segment.reserve(tokens.size());
      for (auto& t : tokens) segment.push_back(std::move(t.surface));
      doc.segments.push_back(std::move(segment));
    }
  }
  return doc;
}

std::string bigram_key(const Bigram& b) { return b.first + ' ' + b.second; }

Bigram split_bigram_key(std::string_view key) {
  const auto sp = key.find(' ');
  return {std::string(key.substr(0, sp)), std::string(key.substr(sp + 1))};
}

BigramBag bigram_bag(const Document& doc) {
  BigramBag bag;
  for (const auto& seg : doc.segments) {
    for (std::size_t i = 0; i + 1 < seg.size(); ++i) {
      ++bag[seg[i] + ' ' + seg[i + 1]];
    }
  }
  return bag;
}

Vocabulary::Vocabulary(std::vector<Bigram> bigrams, std::vector<double> df,
                       std::uint64_t fingerprint)
    : bigrams_(std::move(bigrams)), df_(std::move(df)), fingerprint_(fingerprint) {
  if (df_.size() != bigrams_.size()) throw DataError("vocabulary df/bigram length mismatch");
  index_.reserve(bigrams_.size());
  for (std::size_t i = 0; i < bigrams_.size(); ++i) {
    if (!index_.emplace(bigram_key(bigrams_[i]), static_cast<int>(i)).second) {
      throw DataError("duplicate bigram in vocabulary: " + bigram_key(bigrams_[i]));
    }
  }
}

int Vocabulary::column(std::string_view key) const {
  auto it = index_.find(std::string(key));
  return it == index_.end() ? -1 : it->second;
}

Vocabulary build_vocabulary(std::span<const BigramBag> bags, std::span<const std::size_t> rows,
                            const FeaturizerConfig& config) {
  config.validate();
  if (rows.empty()) throw DataError("cannot build a vocabulary from an empty corpus");

  std::unordered_map<std::string_view, int> doc_count;
  for (std::size_t r : rows) {
    for (const auto& [key, count] : bags[r]) ++doc_count[key];
  }
  const double n = static_cast<double>(rows.size());
  std::vector<std::pair<Bigram, double>> kept;
  for (const auto& [key, count] : doc_count) {
    const double df = count / n;
    if (config.min_df <= df && df <= config.max_df) kept.emplace_back(split_bigram_key(key), df);
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

  std::vector<Bigram> bigrams;
  std::vector<double> df;
  bigrams.reserve(kept.size());
  df.reserve(kept.size());
  for (auto& [b, d] : kept) {
    bigrams.push_back(std::move(b));
    df.push_back(d);
  }
  return Vocabulary(std::move(bigrams), std::move(df), config.fingerprint());
}

Vocabulary build_vocabulary(std::span<const BigramBag> bags, const FeaturizerConfig& config) {
  std::vector<std::size_t> rows(bags.size());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  return build_vocabulary(bags, rows, config);
}

Vocabulary build_vocabulary(const Corpus& corpus, const FeaturizerConfig& config) {
  std::vector<BigramBag> bags;
  bags.reserve(corpus.profiles.size());
  for (const auto& p : corpus.profiles) bags.push_back(bigram_bag(make_document(p, config.preprocess)));
  return build_vocabulary(bags, config);
}

FeatureVector featurize(const BigramBag& bag, const Vocabulary& vocabulary) {
  std::vector<std::pair<int, int>> entries;
  for (const auto& [key, count] : bag) {
    if (const int col = vocabulary.column(key); col >= 0) entries.emplace_back(col, count);
  }
  std::sort(entries.begin(), entries.end());
  FeatureVector v{SparseVec<double>(static_cast<Eigen::Index>(vocabulary.size())),
                  vocabulary.fingerprint()};
  v.counts.reserve(static_cast<Eigen::Index>(entries.size()));
  for (const auto& [col, count] : entries) v.counts.insert(col) = count;
  return v;
}

FeatureVector featurize(const PatientProfile& profile, const Vocabulary& vocabulary,
                        const FeaturizerConfig& config) {
  if (config.fingerprint() != vocabulary.fingerprint()) {
    throw DataError("featurizer config does not match the vocabulary it was built with");
  }
  return featurize(bigram_bag(make_document(profile, config.preprocess)), vocabulary);
}

FeatureMatrix featurize_rows(std::span<const BigramBag> bags, std::span<const std::size_t> rows,
                             const Vocabulary& vocabulary) {
  std::vector<Eigen::Triplet<double, int>> triplets;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (const auto& [key, count] : bags[rows[r]]) {
      if (const int col = vocabulary.column(key); col >= 0) {
        triplets.emplace_back(static_cast<int>(r), col, count);
      }
    }
  }
  FeatureMatrix m{SparseRows<double>(static_cast<Eigen::Index>(rows.size()),
                                     static_cast<Eigen::Index>(vocabulary.size())),
                  vocabulary.fingerprint()};
  m.rows.setFromTriplets(triplets.begin(), triplets.end());
  return m;
}

FeatureMatrix featurize_corpus(const Corpus& corpus, const Vocabulary& vocabulary,
                               const FeaturizerConfig& config) {
  if (config.fingerprint() != vocabulary.fingerprint()) {
    throw DataError("featurizer config does not match the vocabulary it was built with");
  }
  std::vector<BigramBag> bags;
  bags.reserve(corpus.profiles.size());
  for (const auto& p : corpus.profiles) bags.push_back(bigram_bag(make_document(p, config.preprocess)));
  std::vector<std::size_t> rows(bags.size());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  return featurize_rows(bags, rows, vocabulary);
}

namespace {

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

std::string vocabulary_to_json(const Vocabulary& vocabulary) {
  json bigrams = json::array();
  for (const auto& [a, b] : vocabulary.bigrams()) bigrams.push_back({a, b});
  json j = {{"fingerprint", hex64(vocabulary.fingerprint())},
            {"bigrams", std::move(bigrams)},
            {"df", vocabulary.df()}};
  return j.dump();
}

Vocabulary vocabulary_from_json(std::string_view json_text) {
  try {
    const json j = json::parse(json_text);
    std::vector<Bigram> bigrams;
    for (const auto& b : j.at("bigrams")) {
      bigrams.emplace_back(b.at(0).get<std::string>(), b.at(1).get<std::string>());
    }
    return Vocabulary(std::move(bigrams), j.at("df").get<std::vector<double>>(),
                      std::stoull(j.at("fingerprint").get<std::string>(), nullptr, 16));
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed vocabulary: ") + e.what());
  } catch (const std::logic_error& e) {
    throw FormatError(std::string("malformed vocabulary fingerprint: ") + e.what());
  }
}

}  // namespace hfscreen
