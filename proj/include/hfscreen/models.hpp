#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "hfscreen/features.hpp"

namespace hfscreen {

enum class ModelKind { NaiveBayes, LogisticRegressionOvR, LinearSvmOvR, RbfSvmOvR };

inline constexpr std::array<ModelKind, 4> kAllModelKinds{
    ModelKind::NaiveBayes, ModelKind::RbfSvmOvR, ModelKind::LinearSvmOvR,
    ModelKind::LogisticRegressionOvR};

std::string_view to_string(ModelKind kind);
// Short CLI names: nb, logreg, linsvm, rbfsvm.
std::string_view short_name(ModelKind kind);
// Accepts short and full names.
ModelKind parse_model_kind(std::string_view name);

enum class LinearLoss { Hinge, Logistic };
enum class ClassWeighting { Balanced, None };

struct TrainConfig {
  // Multinomial NB additive smoothing.
  double alpha = 1.0;
  // L2 strength of the linear objective lambda/2 |theta|^2 + sum_i s_i loss_i.
  double lambda = 0.1;
  // Coordinate-descent epochs (hinge) or L-BFGS iterations (logistic).
  int epochs = 1000;
  double tolerance = 1e-4;
  std::uint64_t seed = 7;
  // RBF SVM: box constraint, kernel width (<= 0 means 1 / n_features).
  double C = 1.0;
  double gamma = 0.0;
  double smo_tolerance = 1e-3;
  int max_passes = 200;
  // Unset: true for margin models, false for Naive Bayes.
  std::optional<bool> l2_normalize_inputs;
  ClassWeighting class_weighting = ClassWeighting::Balanced;

  bool normalizes_inputs(ModelKind kind) const;
  void validate() const;
};

struct NaiveBayesParams {
  Eigen::VectorXd log_prior;       // per class
  Eigen::MatrixXd log_likelihood;  // classes x features
};

struct LinearOvrParams {
  Eigen::MatrixXd weights;  // classes x features
  Eigen::VectorXd bias;
};

struct KernelMachine {
  Eigen::VectorXd dual_coef;  // alpha_i * y_i of each support vector
  SparseRows<double> support_vectors;
  double bias = 0.0;
  double gamma = 0.0;
};

struct RbfOvrParams {
  std::vector<KernelMachine> machines;  // one per class
};

using ModelParams = std::variant<NaiveBayesParams, LinearOvrParams, RbfOvrParams>;

struct TrainedModel {
  ModelKind kind = ModelKind::NaiveBayes;
  std::uint64_t vocabulary_fingerprint = 0;
  int n_classes = 0;
  Eigen::Index n_features = 0;
  TrainConfig config;
  bool converged = true;
  ModelParams params;
};

/// Balanced weights w_c = N / (C * n_c). Throws DataError when a class in
/// [0, n_classes) has no samples.
Eigen::VectorXd compute_class_weights(std::span<const int> labels, int n_classes);

// Class weights per `config.class_weighting`.
Eigen::VectorXd class_weights_for(std::span<const int> labels, int n_classes,
                                  const TrainConfig& config);

/// Multinomial NB. Each sample contributes its class weight to the class
/// prior mass and weight * count to the class feature counts.
TrainedModel train_naive_bayes(const FeatureMatrix& x, std::span<const int> labels, int n_classes,
                               const Eigen::VectorXd& class_weights, const TrainConfig& config);

/// One-vs-rest linear models; each minimizes
///   lambda/2 (|w|^2 + b^2) + sum_i s_i loss(y_i (w.x_i + b))
/// with s_i the class weight of sample i's true label. Hinge is solved by
/// dual coordinate descent in seeded order, logistic by L-BFGS.
TrainedModel train_linear_ovr(const FeatureMatrix& x, std::span<const int> labels, int n_classes,
                              const Eigen::VectorXd& class_weights, const TrainConfig& config,
                              LinearLoss loss);

/// One-vs-rest soft-margin RBF SVMs solved by SMO with per-sample box
/// C_i = C * class_weight(label_i).
TrainedModel train_rbf_svm_ovr(const FeatureMatrix& x, std::span<const int> labels,
                               int n_classes, const Eigen::VectorXd& class_weights,
                               const TrainConfig& config);

TrainedModel train_model(ModelKind kind, const FeatureMatrix& x, std::span<const int> labels,
                         int n_classes, const TrainConfig& config);

struct Prediction {
  int label = 0;
  Eigen::VectorXd scores;
};

// Index of the largest score; ties go to the lowest index.
int argmax_lowest(const Eigen::Ref<const Eigen::VectorXd>& scores);

/// OvR models score each class by its decision value, NB by the joint
/// log-likelihood. Throws DataError on a vocabulary fingerprint or
/// dimension mismatch.
Prediction predict(const TrainedModel& model, const FeatureVector& x);
std::vector<Prediction> predict_rows(const TrainedModel& model, const FeatureMatrix& x);

// NB class posteriors for one input.
Eigen::VectorXd naive_bayes_posterior(const TrainedModel& model, const FeatureVector& x);

struct RankedFeature {
  Bigram bigram;
  double weight = 0.0;
};

// Per class, the k bigrams with the largest |weight| (ties by column order).
// Throws UsageError for non-linear models.
std::vector<std::vector<RankedFeature>> top_features(const TrainedModel& model,
                                                     const Vocabulary& vocabulary, std::size_t k);

// Rows scaled to unit L2 norm; zero rows stay zero.
SparseRows<double> l2_normalized(const SparseRows<double>& rows);

}  // namespace hfscreen
