#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hfscreen/corpus.hpp"
#include "hfscreen/features.hpp"
#include "hfscreen/labels.hpp"
#include "hfscreen/models.hpp"

namespace hfscreen {

struct ClassCounts {
  long tp = 0;
  long fp = 0;
  long fn = 0;
  long tn = 0;

  long support() const { return tp + fn; }
};

struct ConfusionCounts {
  std::array<ClassCounts, kNumCoarse> per_class{};
  // matrix[gold][predicted]
  std::array<std::array<long, kNumCoarse>, kNumCoarse> matrix{};
  long n_samples = 0;

  long correct() const;
};

// Throws DataError when the sequences differ in length.
ConfusionCounts confusion_counts(std::span<const Coarse> gold, std::span<const Coarse> predicted);

// Empty when the denominator is zero.
std::optional<double> precision(const ClassCounts& c);
std::optional<double> recall(const ClassCounts& c);
std::optional<double> f1_score(std::optional<double> precision, std::optional<double> recall);

struct ClassMetrics {
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f1;
  long support = 0;
};

struct FoldSummary {
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  std::size_t vocabulary_size = 0;
  bool converged = true;
  std::optional<double> accuracy;
  std::array<long, kNumCoarse> test_class_counts{};
};

struct MetricsReport {
  std::array<ClassMetrics, kNumCoarse> per_class{};
  // Support-weighted means over classes whose metric is defined.
  ClassMetrics weighted;
  std::optional<double> accuracy;
  ConfusionCounts counts;
  std::vector<FoldSummary> folds;
};

/// Per-class precision, recall and F1, accuracy = correct / n, and
/// support-weighted averages that skip undefined (0/0) entries together with
/// their support.
MetricsReport compute_metrics(const ConfusionCounts& counts);

MetricsReport evaluate(std::span<const Coarse> gold, std::span<const Coarse> predicted);

struct FoldPlan {
  int k = 0;
  std::uint64_t seed = 0;
  std::vector<std::vector<std::size_t>> folds;
};

/// Shuffles each class's members with the seed and deals them round-robin
/// across folds, continuing the dealing position from one class to the next.
/// Throws DataError naming any present class with fewer than k members.
FoldPlan stratified_folds(std::span<const Coarse> labels, int k, std::uint64_t seed);

struct CvReport {
  ModelKind kind = ModelKind::LinearSvmOvR;
  int k = 0;
  std::uint64_t seed = 0;
  MetricsReport metrics;
  // Out-of-fold prediction for every profile, in corpus order.
  std::vector<Coarse> predictions;
};

/// k-fold stratified cross-validation. For every fold the vocabulary and
/// class weights come from the training profiles only; predictions are
/// pooled across folds and scored once. Throws DataError when a profile has
/// no gold label.
CvReport cross_validate(const Corpus& corpus, const FeaturizerConfig& featurizer,
                        const TrainConfig& train, ModelKind kind, int k, std::uint64_t seed);

// Several model kinds over the same fold plan.
std::vector<CvReport> cross_validate_models(const Corpus& corpus,
                                            const FeaturizerConfig& featurizer,
                                            const TrainConfig& train,
                                            std::span<const ModelKind> kinds, int k,
                                            std::uint64_t seed);

std::vector<Coarse> gold_coarse_labels(const Corpus& corpus);

std::string metrics_to_json(const MetricsReport& report, int indent = 2);
std::string cv_report_to_json(const CvReport& report, int indent = 2);
std::string format_metrics_table(const MetricsReport& report);
std::string format_model_comparison(std::span<const CvReport> reports);

}  // namespace hfscreen
