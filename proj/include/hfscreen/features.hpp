#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/SparseCore>

#include "hfscreen/corpus.hpp"
#include "hfscreen/textprep.hpp"

namespace hfscreen {

using Bigram = std::pair<std::string, std::string>;

template <typename Scalar>
using SparseRows = Eigen::SparseMatrix<Scalar, Eigen::RowMajor, int>;
template <typename Scalar>
using SparseVec = Eigen::SparseVector<Scalar, Eigen::RowMajor, int>;

struct FeaturizerConfig {
  double min_df = 0.2;
  double max_df = 0.8;
  PreprocessConfig preprocess = default_preprocess_config();

  void validate() const;
  // Hash over every setting that changes the token stream or the df band.
  std::uint64_t fingerprint() const;
};

/// A patient's preprocessed token stream, one segment per sentence. Bigrams
/// never cross segments, so they never span sentences or notes.
struct Document {
  std::vector<std::vector<std::string>> segments;
};

Document make_document(const PatientProfile& profile, const PreprocessConfig& config);

// Bigram -> occurrence count, keyed "first second".
using BigramBag = std::unordered_map<std::string, int>;

BigramBag bigram_bag(const Document& doc);
std::string bigram_key(const Bigram& b);
Bigram split_bigram_key(std::string_view key);

/// Bigram columns of the feature space, in lexicographic order, each with its
/// training document frequency.
class Vocabulary {
 public:
  Vocabulary() = default;
  Vocabulary(std::vector<Bigram> bigrams, std::vector<double> df, std::uint64_t fingerprint);

  std::size_t size() const { return bigrams_.size(); }
  const std::vector<Bigram>& bigrams() const { return bigrams_; }
  const std::vector<double>& df() const { return df_; }
  std::uint64_t fingerprint() const { return fingerprint_; }

  // Column id, or -1 when the bigram is out of vocabulary.
  int column(std::string_view key) const;
  int column(const Bigram& b) const { return column(bigram_key(b)); }

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.bigrams_ == b.bigrams_ && a.df_ == b.df_ && a.fingerprint_ == b.fingerprint_;
  }

 private:
  std::vector<Bigram> bigrams_;
  std::vector<double> df_;
  std::unordered_map<std::string, int> index_;
  std::uint64_t fingerprint_ = 0;
};

/// df(b) = (#documents containing b) / (#documents); b is kept iff
/// min_df <= df(b) <= max_df. Throws DataError when `bags` is empty.
Vocabulary build_vocabulary(std::span<const BigramBag> bags, const FeaturizerConfig& config);

// Restricted to the documents at `rows` (e.g. a training fold).
Vocabulary build_vocabulary(std::span<const BigramBag> bags, std::span<const std::size_t> rows,
                            const FeaturizerConfig& config);

Vocabulary build_vocabulary(const Corpus& corpus, const FeaturizerConfig& config);

struct FeatureVector {
  SparseVec<double> counts;
  std::uint64_t fingerprint = 0;
};

struct FeatureMatrix {
  SparseRows<double> rows;
  std::uint64_t fingerprint = 0;
};

FeatureVector featurize(const BigramBag& bag, const Vocabulary& vocabulary);

// Throws DataError when `config` does not match the vocabulary's fingerprint.
FeatureVector featurize(const PatientProfile& profile, const Vocabulary& vocabulary,
                        const FeaturizerConfig& config);

FeatureMatrix featurize_rows(std::span<const BigramBag> bags, std::span<const std::size_t> rows,
                             const Vocabulary& vocabulary);
FeatureMatrix featurize_corpus(const Corpus& corpus, const Vocabulary& vocabulary,
                               const FeaturizerConfig& config);

std::string vocabulary_to_json(const Vocabulary& vocabulary);
Vocabulary vocabulary_from_json(std::string_view json_text);

}  // namespace hfscreen
