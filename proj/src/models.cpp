#include "hfscreen/models.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

#include "hfscreen/errors.hpp"
#include "hfscreen/kernel_svm.hpp"
#include "hfscreen/linear_objective.hpp"
#include "hfscreen/rng.hpp"

namespace hfscreen {

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::NaiveBayes: return "NaiveBayes";
    case ModelKind::LogisticRegressionOvR: return "LogisticRegressionOvR";
    case ModelKind::LinearSvmOvR: return "LinearSvmOvR";
    case ModelKind::RbfSvmOvR: return "RbfSvmOvR";
  }
  return "?";
}

std::string_view short_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::NaiveBayes: return "nb";
    case ModelKind::LogisticRegressionOvR: return "logreg";
    case ModelKind::LinearSvmOvR: return "linsvm";
    case ModelKind::RbfSvmOvR: return "rbfsvm";
  }
  return "?";
}

ModelKind parse_model_kind(std::string_view name) {
  for (ModelKind k : kAllModelKinds) {
    if (name == short_name(k) || name == to_string(k)) return k;
  }
  throw UsageError("unknown model kind '" + std::string(name) +
                   "' (expected nb, logreg, linsvm or rbfsvm)");
}

bool TrainConfig::normalizes_inputs(ModelKind kind) const {
  return l2_normalize_inputs.value_or(kind != ModelKind::NaiveBayes);
}

void TrainConfig::validate() const {
  if (!(alpha > 0)) throw UsageError("alpha must be positive");
  if (!(lambda > 0)) throw UsageError("lambda must be positive");
  if (epochs < 1) throw UsageError("epochs must be positive");
  if (!(tolerance > 0)) throw UsageError("tolerance must be positive");
  if (!(C > 0)) throw UsageError("C must be positive");
  if (gamma < 0) throw UsageError("gamma must be non-negative");
  if (!(smo_tolerance > 0)) throw UsageError("smo_tolerance must be positive");
  if (max_passes < 1) throw UsageError("max_passes must be positive");
}

Eigen::VectorXd compute_class_weights(std::span<const int> labels, int n_classes) {
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(n_classes);
  for (int y : labels) {
    if (y < 0 || y >= n_classes) throw DataError("label out of range");
    counts(y) += 1.0;
  }
  for (int c = 0; c < n_classes; ++c) {
    if (counts(c) == 0) {
      throw DataError("class " + std::to_string(c) + " has no training samples");
    }
  }
  const double n = static_cast<double>(labels.size());
  return (n / static_cast<double>(n_classes)) * counts.cwiseInverse();
}

Eigen::VectorXd class_weights_for(std::span<const int> labels, int n_classes,
                                  const TrainConfig& config) {
  Eigen::VectorXd w = compute_class_weights(labels, n_classes);
  if (config.class_weighting == ClassWeighting::None) w.setOnes();
  return w;
}

SparseRows<double> l2_normalized(const SparseRows<double>& rows) {
  SparseRows<double> out = rows;
  for (Eigen::Index r = 0; r < out.outerSize(); ++r) {
    double norm2 = 0.0;
    for (SparseRows<double>::InnerIterator it(out, r); it; ++it) norm2 += it.value() * it.value();
    if (norm2 == 0.0) continue;
    const double inv = 1.0 / std::sqrt(norm2);
    for (SparseRows<double>::InnerIterator it(out, r); it; ++it) it.valueRef() *= inv;
  }
  return out;
}

namespace {

void check_training_inputs(const FeatureMatrix& x, std::span<const int> labels, int n_classes,
                           const Eigen::VectorXd& class_weights) {
  if (static_cast<std::size_t>(x.rows.rows()) != labels.size()) {
    throw DataError("feature matrix has " + std::to_string(x.rows.rows()) + " rows but " +
                    std::to_string(labels.size()) + " labels were given");
  }
  if (class_weights.size() != n_classes) throw DataError("class weight vector has wrong size");
  if ((class_weights.array() <= 0).any()) throw DataError("class weights must be positive");
  for (int y : labels) {
    if (y < 0 || y >= n_classes) throw DataError("label out of range");
  }
}

TrainedModel model_shell(ModelKind kind, const FeatureMatrix& x, int n_classes,
                         const TrainConfig& config) {
  TrainedModel m;
  m.kind = kind;
  m.vocabulary_fingerprint = x.fingerprint;
  m.n_classes = n_classes;
  m.n_features = x.rows.cols();
  m.config = config;
  return m;
}

Eigen::VectorXd sample_weights(std::span<const int> labels, const Eigen::VectorXd& class_weights) {
  Eigen::VectorXd s(static_cast<Eigen::Index>(labels.size()));
  for (std::size_t i = 0; i < labels.size(); ++i) s(static_cast<Eigen::Index>(i)) = class_weights(labels[i]);
  return s;
}

Eigen::VectorXd one_vs_rest_targets(std::span<const int> labels, int positive) {
  Eigen::VectorXd y(static_cast<Eigen::Index>(labels.size()));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    y(static_cast<Eigen::Index>(i)) = labels[i] == positive ? 1.0 : -1.0;
  }
  return y;
}

struct BinaryFit {
  Eigen::VectorXd theta;  // [w; b]
  bool converged = false;
};

// Dual coordinate descent for
//   1/2 |theta|^2 + sum_i C_i max(0, 1 - y_i theta.[x_i; 1]),  C_i = s_i / lambda.
BinaryFit fit_hinge(const SparseRows<double>& x, const Eigen::VectorXd& y,
                    const Eigen::VectorXd& s, const TrainConfig& config, Rng& rng) {
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  const Eigen::VectorXd upper = s / config.lambda;
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(d);
  double b = 0.0;
  Eigen::VectorXd qd(n);
  for (Eigen::Index i = 0; i < n; ++i) qd(i) = x.row(i).squaredNorm() + 1.0;

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});

  BinaryFit fit;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(std::span<Eigen::Index>(order));
    double pg_max = -std::numeric_limits<double>::infinity();
    double pg_min = std::numeric_limits<double>::infinity();
    for (Eigen::Index i : order) {
      double dot = b;
      for (SparseRows<double>::InnerIterator it(x, i); it; ++it) dot += it.value() * w(it.col());
      const double g = y(i) * dot - 1.0;
      double pg = g;
      if (alpha(i) <= 0) pg = std::min(g, 0.0);
      else if (alpha(i) >= upper(i)) pg = std::max(g, 0.0);
      pg_max = std::max(pg_max, pg);
      pg_min = std::min(pg_min, pg);
      if (std::abs(pg) > 1e-12) {
        const double old = alpha(i);
        alpha(i) = std::clamp(old - g / qd(i), 0.0, upper(i));
        const double step = (alpha(i) - old) * y(i);
        for (SparseRows<double>::InnerIterator it(x, i); it; ++it) w(it.col()) += step * it.value();
        b += step;
      }
    }
    if (pg_max - pg_min < config.tolerance) {
      fit.converged = true;
      break;
    }
  }
  fit.theta.resize(d + 1);
  fit.theta << w, b;
  return fit;
}

// L-BFGS with Armijo backtracking on the weighted logistic objective.
BinaryFit fit_logistic(const SparseRows<double>& x, const Eigen::VectorXd& y,
                       const Eigen::VectorXd& s, const TrainConfig& config) {
  constexpr int kMemory = 10;
  const WeightedLinearObjective<double> objective(x, y, s, config.lambda, LinearLoss::Logistic);
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(objective.dimension());
  double f = objective.value(theta);
  Eigen::VectorXd g = objective.gradient(theta);
  const double g0 = std::max(1.0, g.norm());

  std::deque<std::pair<Eigen::VectorXd, Eigen::VectorXd>> history;  // (s, y) pairs
  BinaryFit fit;
  for (int iter = 0; iter < config.epochs; ++iter) {
    if (g.norm() <= config.tolerance * g0) {
      fit.converged = true;
      break;
    }
    // two-loop recursion
    Eigen::VectorXd q = g;
    std::vector<double> a(history.size());
    for (std::size_t k = history.size(); k-- > 0;) {
      const auto& [sk, yk] = history[k];
      a[k] = sk.dot(q) / yk.dot(sk);
      q -= a[k] * yk;
    }
    if (!history.empty()) {
      const auto& [sk, yk] = history.back();
      q *= sk.dot(yk) / yk.squaredNorm();
    }
    for (std::size_t k = 0; k < history.size(); ++k) {
      const auto& [sk, yk] = history[k];
      const double beta = yk.dot(q) / yk.dot(sk);
      q += (a[k] - beta) * sk;
    }
    Eigen::VectorXd dir = -q;
    double slope = g.dot(dir);
    if (slope >= 0) {
      history.clear();
      dir = -g;
      slope = -g.squaredNorm();
    }

    double step = history.empty() ? std::min(1.0, 1.0 / g.norm()) : 1.0;
    Eigen::VectorXd next;
    double f_next = f;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      next = theta + step * dir;
      f_next = objective.value(next);
      if (f_next <= f + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      // no further decrease representable in floating point
      fit.converged = g.norm() <= std::sqrt(config.tolerance) * g0;
      break;
    }
    Eigen::VectorXd g_next = objective.gradient(next);
    Eigen::VectorXd sk = next - theta;
    Eigen::VectorXd yk = g_next - g;
    if (sk.dot(yk) > 1e-12 * sk.norm() * yk.norm()) {
      history.emplace_back(std::move(sk), std::move(yk));
      if (history.size() > static_cast<std::size_t>(kMemory)) history.pop_front();
    }
    theta = std::move(next);
    f = f_next;
    g = std::move(g_next);
  }
  fit.theta = std::move(theta);
  return fit;
}

SparseRows<double> select_rows(const SparseRows<double>& x, const std::vector<Eigen::Index>& rows) {
  std::vector<Eigen::Triplet<double, int>> triplets;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (SparseRows<double>::InnerIterator it(x, rows[r]); it; ++it) {
      triplets.emplace_back(static_cast<int>(r), static_cast<int>(it.col()), it.value());
    }
  }
  SparseRows<double> out(static_cast<Eigen::Index>(rows.size()), x.cols());
  out.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

}  // namespace

TrainedModel train_naive_bayes(const FeatureMatrix& x, std::span<const int> labels, int n_classes,
                               const Eigen::VectorXd& class_weights, const TrainConfig& config) {
  config.validate();
  check_training_inputs(x, labels, n_classes, class_weights);
  TrainedModel model = model_shell(ModelKind::NaiveBayes, x, n_classes, config);
  const SparseRows<double> rows =
      config.normalizes_inputs(ModelKind::NaiveBayes) ? l2_normalized(x.rows) : x.rows;

  const Eigen::Index v = rows.cols();
  Eigen::VectorXd prior_mass = Eigen::VectorXd::Zero(n_classes);
  Eigen::MatrixXd feature_mass = Eigen::MatrixXd::Zero(n_classes, v);
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    const int c = labels[static_cast<std::size_t>(i)];
    const double w = class_weights(c);
    prior_mass(c) += w;
    for (SparseRows<double>::InnerIterator it(rows, i); it; ++it) {
      feature_mass(c, it.col()) += w * it.value();
    }
  }

  NaiveBayesParams p;
  p.log_prior = (prior_mass / prior_mass.sum()).array().log();
  p.log_likelihood.resize(n_classes, v);
  for (int c = 0; c < n_classes; ++c) {
    const double denom = feature_mass.row(c).sum() + config.alpha * static_cast<double>(v);
    p.log_likelihood.row(c) = ((feature_mass.row(c).array() + config.alpha) / denom).log();
  }
  model.params = std::move(p);
  return model;
}

TrainedModel train_linear_ovr(const FeatureMatrix& x, std::span<const int> labels, int n_classes,
                              const Eigen::VectorXd& class_weights, const TrainConfig& config,
                              LinearLoss loss) {
  config.validate();
  check_training_inputs(x, labels, n_classes, class_weights);
  const ModelKind kind =
      loss == LinearLoss::Hinge ? ModelKind::LinearSvmOvR : ModelKind::LogisticRegressionOvR;
  TrainedModel model = model_shell(kind, x, n_classes, config);
  const SparseRows<double> rows = config.normalizes_inputs(kind) ? l2_normalized(x.rows) : x.rows;
  const Eigen::VectorXd s = sample_weights(labels, class_weights);

  LinearOvrParams p;
  p.weights.resize(n_classes, rows.cols());
  p.bias.resize(n_classes);
  for (int c = 0; c < n_classes; ++c) {
    const Eigen::VectorXd y = one_vs_rest_targets(labels, c);
    Rng rng(config.seed + static_cast<std::uint64_t>(c));
    BinaryFit fit = loss == LinearLoss::Hinge ? fit_hinge(rows, y, s, config, rng)
                                              : fit_logistic(rows, y, s, config);
    p.weights.row(c) = fit.theta.head(rows.cols()).transpose();
    p.bias(c) = fit.theta(rows.cols());
    model.converged = model.converged && fit.converged;
  }
  model.params = std::move(p);
  return model;
}

TrainedModel train_rbf_svm_ovr(const FeatureMatrix& x, std::span<const int> labels,
                               int n_classes, const Eigen::VectorXd& class_weights,
                               const TrainConfig& config) {
  config.validate();
  check_training_inputs(x, labels, n_classes, class_weights);
  TrainedModel model = model_shell(ModelKind::RbfSvmOvR, x, n_classes, config);
  const SparseRows<double> rows =
      config.normalizes_inputs(ModelKind::RbfSvmOvR) ? l2_normalized(x.rows) : x.rows;
  const double gamma =
      config.gamma > 0 ? config.gamma : 1.0 / static_cast<double>(std::max<Eigen::Index>(rows.cols(), 1));

  const Eigen::MatrixXd gram = rbf_gram(rows, gamma);
  const Eigen::VectorXd upper = config.C * sample_weights(labels, class_weights);
  const long max_iterations = static_cast<long>(config.max_passes) * std::max<long>(rows.rows(), 1);

  RbfOvrParams p;
  for (int c = 0; c < n_classes; ++c) {
    const Eigen::VectorXd y = one_vs_rest_targets(labels, c);
    const KernelSvmSolution sol =
        solve_kernel_svm(gram, y, upper, config.smo_tolerance, max_iterations);
    std::vector<Eigen::Index> support;
    for (Eigen::Index i = 0; i < sol.alpha.size(); ++i) {
      if (sol.alpha(i) > 0) support.push_back(i);
    }
    KernelMachine m;
    m.dual_coef.resize(static_cast<Eigen::Index>(support.size()));
    for (std::size_t k = 0; k < support.size(); ++k) {
      m.dual_coef(static_cast<Eigen::Index>(k)) = sol.alpha(support[k]) * y(support[k]);
    }
    m.support_vectors = select_rows(rows, support);
    m.bias = sol.bias;
    m.gamma = gamma;
    p.machines.push_back(std::move(m));
    model.converged = model.converged && sol.converged;
  }
  model.params = std::move(p);
  return model;
}

TrainedModel train_model(ModelKind kind, const FeatureMatrix& x, std::span<const int> labels,
                         int n_classes, const TrainConfig& config) {
  const Eigen::VectorXd weights = class_weights_for(labels, n_classes, config);
  switch (kind) {
    case ModelKind::NaiveBayes: return train_naive_bayes(x, labels, n_classes, weights, config);
    case ModelKind::LogisticRegressionOvR:
      return train_linear_ovr(x, labels, n_classes, weights, config, LinearLoss::Logistic);
    case ModelKind::LinearSvmOvR:
      return train_linear_ovr(x, labels, n_classes, weights, config, LinearLoss::Hinge);
    case ModelKind::RbfSvmOvR: return train_rbf_svm_ovr(x, labels, n_classes, weights, config);
  }
  throw UsageError("unknown model kind");
}

int argmax_lowest(const Eigen::Ref<const Eigen::VectorXd>& scores) {
  int best = 0;
  for (Eigen::Index c = 1; c < scores.size(); ++c) {
    if (scores(c) > scores(best)) best = static_cast<int>(c);
  }
  return best;
}

namespace {

SparseVec<double> prepared_input(const TrainedModel& model, const FeatureVector& x) {
  if (x.fingerprint != model.vocabulary_fingerprint) {
    throw DataError("feature vector was built with a different vocabulary than the model");
  }
  if (x.counts.size() != model.n_features) {
    throw DataError("feature vector has " + std::to_string(x.counts.size()) +
                    " columns, model expects " + std::to_string(model.n_features));
  }
  SparseVec<double> v = x.counts;
  if (model.config.normalizes_inputs(model.kind)) {
    const double norm = v.norm();
    if (norm > 0) v /= norm;
  }
  return v;
}

Eigen::VectorXd decision_scores(const TrainedModel& model, const SparseVec<double>& v) {
  Eigen::VectorXd scores(model.n_classes);
  if (const auto* nb = std::get_if<NaiveBayesParams>(&model.params)) {
    for (int c = 0; c < model.n_classes; ++c) {
      double s = nb->log_prior(c);
      for (SparseVec<double>::InnerIterator it(v); it; ++it) {
        s += it.value() * nb->log_likelihood(c, it.index());
      }
      scores(c) = s;
    }
  } else if (const auto* lin = std::get_if<LinearOvrParams>(&model.params)) {
    for (int c = 0; c < model.n_classes; ++c) {
      double s = lin->bias(c);
      for (SparseVec<double>::InnerIterator it(v); it; ++it) {
        s += it.value() * lin->weights(c, it.index());
      }
      scores(c) = s;
    }
  } else {
    const auto& rbf = std::get<RbfOvrParams>(model.params);
    for (int c = 0; c < model.n_classes; ++c) {
      const KernelMachine& m = rbf.machines[static_cast<std::size_t>(c)];
      double s = m.bias;
      for (Eigen::Index k = 0; k < m.support_vectors.rows(); ++k) {
        const SparseVec<double> sv = m.support_vectors.row(k);
        s += m.dual_coef(k) * rbf_kernel(sv, v, m.gamma);
      }
      scores(c) = s;
    }
  }
  return scores;
}

}  // namespace

Prediction predict(const TrainedModel& model, const FeatureVector& x) {
  Prediction p;
  p.scores = decision_scores(model, prepared_input(model, x));
  p.label = argmax_lowest(p.scores);
  return p;
}

std::vector<Prediction> predict_rows(const TrainedModel& model, const FeatureMatrix& x) {
  std::vector<Prediction> out;
  out.reserve(static_cast<std::size_t>(x.rows.rows()));
  for (Eigen::Index r = 0; r < x.rows.rows(); ++r) {
    out.push_back(predict(model, FeatureVector{x.rows.row(r), x.fingerprint}));
  }
  return out;
}

Eigen::VectorXd naive_bayes_posterior(const TrainedModel& model, const FeatureVector& x) {
  if (model.kind != ModelKind::NaiveBayes) throw UsageError("posterior requires a Naive Bayes model");
  const Eigen::VectorXd joint = decision_scores(model, prepared_input(model, x));
  const double top = joint.maxCoeff();
  Eigen::VectorXd p = (joint.array() - top).exp();
  return p / p.sum();
}

std::vector<std::vector<RankedFeature>> top_features(const TrainedModel& model,
                                                     const Vocabulary& vocabulary, std::size_t k) {
  const auto* lin = std::get_if<LinearOvrParams>(&model.params);
  if (!lin) {
    throw UsageError("top features are defined for linear models only, not " +
                     std::string(to_string(model.kind)));
  }
  if (vocabulary.fingerprint() != model.vocabulary_fingerprint ||
      static_cast<Eigen::Index>(vocabulary.size()) != model.n_features) {
    throw DataError("vocabulary does not match the model");
  }
  std::vector<std::vector<RankedFeature>> out;
  for (int c = 0; c < model.n_classes; ++c) {
    std::vector<Eigen::Index> cols(static_cast<std::size_t>(model.n_features));
    std::iota(cols.begin(), cols.end(), Eigen::Index{0});
    std::stable_sort(cols.begin(), cols.end(), [&](Eigen::Index a, Eigen::Index b) {
      return std::abs(lin->weights(c, a)) > std::abs(lin->weights(c, b));
    });
    cols.resize(std::min(k, cols.size()));
    std::vector<RankedFeature> ranked;
    for (Eigen::Index col : cols) {
      ranked.push_back({vocabulary.bigrams()[static_cast<std::size_t>(col)], lin->weights(c, col)});
    }
    out.push_back(std::move(ranked));
  }
  return out;
}

}  // namespace hfscreen
