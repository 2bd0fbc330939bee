#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "hfscreen/errors.hpp"
#include "hfscreen/linear_objective.hpp"
#include "hfscreen/model_io.hpp"
#include "hfscreen/models.hpp"
#include "hfscreen/rng.hpp"

using namespace hfscreen;
using testing::matrix;
using testing::row_vector;

namespace {

std::vector<int> train_predictions(const TrainedModel& m, const FeatureMatrix& x) {
  std::vector<int> out;
  for (const auto& p : predict_rows(m, x)) out.push_back(p.label);
  return out;
}

TrainConfig precise() {
  TrainConfig c;
  c.epochs = 5000;
  c.tolerance = 1e-10;
  return c;
}

// 2-D points on a grid covering the toy data.
FeatureMatrix grid(int nx, int ny) {
  std::vector<std::vector<double>> pts;
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) pts.push_back({0.05 + 3.0 * i / nx, 0.05 + 3.0 * j / ny, 1.0});
  }
  return matrix(pts);
}

}  // namespace

TEST_CASE("balanced class weights") {
  std::vector<int> y;
  y.insert(y.end(), 61, 0);
  y.insert(y.end(), 116, 1);
  y.insert(y.end(), 823, 2);
  const Eigen::VectorXd w = compute_class_weights(y, 3);
  CHECK(w(0) == doctest::Approx(1000.0 / (3 * 61)));
  CHECK(w(0) == doctest::Approx(5.464).epsilon(1e-3));
  CHECK(w(2) == doctest::Approx(0.405).epsilon(1e-3));
  for (int c = 0; c < 3; ++c) CHECK(w(c) * static_cast<double>(std::count(y.begin(), y.end(), c)) ==
                                    doctest::Approx(1000.0 / 3));

  const std::vector<int> balanced = {0, 1, 2, 0, 1, 2};
  CHECK(compute_class_weights(balanced, 3).isOnes());
  const std::vector<int> two = {0, 1};
  CHECK(compute_class_weights(two, 2).isOnes());
  const std::vector<int> missing = {0, 0, 2};
  CHECK_THROWS_AS(compute_class_weights(missing, 3), DataError);
}

TEST_CASE("naive Bayes hand example") {
  // columns: a, b
  const FeatureMatrix x = matrix({{2, 1}, {0, 2}});
  const std::vector<int> y = {0, 1};
  TrainConfig cfg;
  const TrainedModel m = train_naive_bayes(x, y, 2, Eigen::VectorXd::Ones(2), cfg);
  const auto& nb = std::get<NaiveBayesParams>(m.params);
  CHECK(std::exp(nb.log_likelihood(0, 0)) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(std::exp(nb.log_likelihood(0, 1)) == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(std::exp(nb.log_likelihood(1, 0)) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(std::exp(nb.log_likelihood(1, 1)) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(std::exp(nb.log_prior(0)) == doctest::Approx(0.5).epsilon(1e-15));

  // P(X | [a b]) by direct arithmetic: 0.5*0.6*0.4 vs 0.5*0.25*0.75
  const FeatureVector q = row_vector(matrix({{1, 1}}), 0);
  const Eigen::VectorXd post = naive_bayes_posterior(m, q);
  CHECK(post(0) == doctest::Approx(0.12 / (0.12 + 0.09375)).epsilon(1e-12));
  CHECK(post.sum() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("naive Bayes likelihoods and posteriors are normalized") {
  Rng rng(8);
  std::vector<std::vector<double>> dense;
  std::vector<int> y;
  for (int i = 0; i < 40; ++i) {
    std::vector<double> row(12);
    for (auto& v : row) v = static_cast<double>(rng.below(4));
    dense.push_back(row);
    y.push_back(i % 3);
  }
  const FeatureMatrix x = matrix(dense);
  TrainConfig cfg;
  const TrainedModel m = train_model(ModelKind::NaiveBayes, x, y, 3, cfg);
  const auto& nb = std::get<NaiveBayesParams>(m.params);
  for (int c = 0; c < 3; ++c) CHECK(nb.log_likelihood.row(c).array().exp().sum() == doctest::Approx(1.0).epsilon(1e-9));
  for (int r = 0; r < 40; ++r) CHECK(naive_bayes_posterior(m, row_vector(x, r)).sum() == doctest::Approx(1.0).epsilon(1e-9));

  // no evidence: decided by the weighted log-priors alone
  const FeatureVector zero{SparseVec<double>(12), 0};
  const Prediction p = predict(m, zero);
  CHECK(p.label == argmax_lowest(nb.log_prior));
}

TEST_CASE("naive Bayes requires every class") {
  const FeatureMatrix x = matrix({{1, 0}, {0, 1}});
  const std::vector<int> y = {0, 0};
  TrainConfig cfg;
  cfg.class_weighting = ClassWeighting::None;
  CHECK_THROWS_AS(train_model(ModelKind::NaiveBayes, x, y, 2, cfg), DataError);
  const std::vector<int> short_y = {0};
  CHECK_THROWS_AS(train_naive_bayes(x, short_y, 2, Eigen::VectorXd::Ones(2), cfg), DataError);
}

TEST_CASE("class weights equal physical oversampling") {
  Rng rng(12);
  std::vector<std::vector<double>> base;
  std::vector<int> y;
  for (int i = 0; i < 24; ++i) {
    const int label = i < 4 ? 0 : (i < 10 ? 1 : 2);
    const double cx = label == 0 ? 0.6 : (label == 1 ? 1.8 : 1.2);
    const double cy = label == 0 ? 0.6 : (label == 1 ? 1.0 : 2.2);
    base.push_back({cx + 0.7 * rng.uniform(), cy + 0.7 * rng.uniform(), 1.0});
    y.push_back(label);
  }
  // integer weights {3, 2, 1}: replicate samples accordingly
  const Eigen::Vector3d weights(3, 2, 1);
  std::vector<std::vector<double>> big;
  std::vector<int> big_y;
  for (std::size_t i = 0; i < base.size(); ++i) {
    for (int k = 0; k < static_cast<int>(weights(y[i])); ++k) {
      big.push_back(base[i]);
      big_y.push_back(y[i]);
    }
  }
  const FeatureMatrix x = matrix(base), xb = matrix(big);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(3);

  SUBCASE("naive Bayes parameters are identical") {
    TrainConfig cfg;
    const auto& a = std::get<NaiveBayesParams>(train_naive_bayes(x, y, 3, weights, cfg).params);
    const auto& b = std::get<NaiveBayesParams>(train_naive_bayes(xb, big_y, 3, ones, cfg).params);
    CHECK(a.log_prior == b.log_prior);
    CHECK(a.log_likelihood == b.log_likelihood);
  }
  SUBCASE("linear models predict identically on a grid") {
    const FeatureMatrix g = grid(20, 10);
    for (LinearLoss loss : {LinearLoss::Hinge, LinearLoss::Logistic}) {
      TrainConfig cfg = precise();
      cfg.epochs = 50000;
      const TrainedModel a = train_linear_ovr(x, y, 3, weights, cfg, loss);
      const TrainedModel b = train_linear_ovr(xb, big_y, 3, ones, cfg, loss);
      REQUIRE(a.converged);
      REQUIRE(b.converged);
      const auto& pa = std::get<LinearOvrParams>(a.params);
      const auto& pb = std::get<LinearOvrParams>(b.params);
      CHECK((pa.weights - pb.weights).cwiseAbs().maxCoeff() < 1e-5);
      CHECK(train_predictions(a, g) == train_predictions(b, g));
    }
  }
}

TEST_CASE("scaling class weights and lambda together leaves predictions unchanged") {
  const FeatureMatrix x = matrix({{1, 0.2, 1}, {0.9, 0.4, 1}, {0.2, 1, 1}, {0.3, 0.8, 1}, {0.6, 0.6, 1}, {0.1, 0.3, 1}});
  const std::vector<int> y = {0, 0, 1, 1, 2, 2};
  const Eigen::Vector3d w(1.5, 1.0, 0.5);
  const FeatureMatrix g = grid(15, 15);
  for (LinearLoss loss : {LinearLoss::Hinge, LinearLoss::Logistic}) {
    TrainConfig a = precise(), b = precise();
    b.lambda = a.lambda * 4.0;
    const auto ma = train_linear_ovr(x, y, 3, w, a, loss);
    const auto mb = train_linear_ovr(x, y, 3, 4.0 * w, b, loss);
    CHECK(train_predictions(ma, g) == train_predictions(mb, g));
  }
}

TEST_CASE("objective gradients match central finite differences") {
  Rng rng(31);
  for (LinearLoss loss : {LinearLoss::Logistic, LinearLoss::Hinge}) {
    std::vector<std::vector<double>> dense(5, std::vector<double>(8));
    for (auto& row : dense) {
      for (auto& v : row) v = rng.uniform() < 0.6 ? rng.uniform() * 2 - 1 : 0.0;
    }
    const FeatureMatrix x = matrix(dense);
    Eigen::VectorXd t(5), s(5);
    for (int i = 0; i < 5; ++i) {
      t(i) = i % 2 ? 1.0 : -1.0;
      s(i) = 0.5 + rng.uniform();
    }
    const WeightedLinearObjective<double> f(x.rows, t, s, 0.3, loss);
    int points = 0;
    while (points < 20) {
      Eigen::VectorXd theta(f.dimension());
      for (Eigen::Index k = 0; k < theta.size(); ++k) theta(k) = points == 0 ? 0.0 : rng.uniform() * 2 - 1;
      // hinge is differentiable only away from margin 1
      if (loss == LinearLoss::Hinge && ((f.margins(theta).array() - 1).abs() < 1e-3).any()) continue;
      const Eigen::VectorXd g = f.gradient(theta);
      const double h = 1e-6;
      for (Eigen::Index k = 0; k < theta.size(); ++k) {
        Eigen::VectorXd up = theta, dn = theta;
        up(k) += h;
        dn(k) -= h;
        const double fd = (f.value(up) - f.value(dn)) / (2 * h);
        CHECK(std::abs(fd - g(k)) <= 1e-5 * std::max(1.0, std::abs(g(k))));
      }
      ++points;
    }
  }
}

TEST_CASE("hinge subgradient is zero at the kink") {
  CHECK(hinge_loss_derivative(1.0) == 0.0);
  CHECK(hinge_loss_derivative(0.999) == -1.0);
  CHECK(logistic_loss(800.0) >= 0.0);
  CHECK(std::isfinite(logistic_loss(-800.0)));
}

TEST_CASE("every model fits its separable toy set") {
  TrainConfig cfg;
  SUBCASE("naive Bayes on disjoint vocabularies") {
    const FeatureMatrix x = matrix({{3, 1, 0, 0, 0, 0}, {2, 2, 0, 0, 0, 0}, {0, 0, 3, 1, 0, 0},
                                    {0, 0, 1, 2, 0, 0}, {0, 0, 0, 0, 2, 2}, {0, 0, 0, 0, 1, 3}});
    const std::vector<int> y = {0, 0, 1, 1, 2, 2};
    CHECK(train_predictions(train_model(ModelKind::NaiveBayes, x, y, 3, cfg), x) == y);
  }
  SUBCASE("linear models on four points") {
    const FeatureMatrix x = matrix({{2, 0.2}, {1.5, 0.4}, {0.3, 1.8}, {0.1, 2.5}});
    const std::vector<int> y = {0, 0, 1, 1};
    CHECK(train_predictions(train_model(ModelKind::LinearSvmOvR, x, y, 2, cfg), x) == y);
    CHECK(train_predictions(train_model(ModelKind::LogisticRegressionOvR, x, y, 2, cfg), x) == y);
  }
  SUBCASE("RBF on XOR") {
    const FeatureMatrix x = matrix({{0, 0, 1}, {1, 1, 1}, {1, 0, 1}, {0, 1, 1}});
    const std::vector<int> y = {0, 0, 1, 1};
    TrainConfig r = cfg;
    r.l2_normalize_inputs = false;
    r.gamma = 2.0;
    r.C = 100.0;
    CHECK(train_predictions(train_model(ModelKind::RbfSvmOvR, x, y, 2, r), x) == y);
    CHECK(train_predictions(train_model(ModelKind::LinearSvmOvR, x, y, 2, r), x) != y);
  }
}

TEST_CASE("RBF with a vanishing gamma collapses to the weighted majority") {
  const FeatureMatrix x = matrix({{1, 0}, {0.9, 0.1}, {0.8, 0.3}, {0.1, 1}, {0.2, 0.9}, {0.5, 0.5}, {0.7, 0.2}});
  const std::vector<int> y = {0, 0, 0, 0, 0, 1, 1};
  TrainConfig cfg;
  cfg.gamma = 1e-9;
  cfg.class_weighting = ClassWeighting::None;
  const auto m = train_model(ModelKind::RbfSvmOvR, x, y, 2, cfg);
  const FeatureMatrix probe = matrix({{0.3, 0.7}, {0.9, 0.9}, {0.5, 0.5}, {0, 0}});
  for (int p : train_predictions(m, probe)) CHECK(p == 0);
}

TEST_CASE("prediction contract") {
  CHECK(argmax_lowest(Eigen::Vector3d(0.3, 0.3, -1)) == 0);
  CHECK(argmax_lowest(Eigen::Vector3d(-1, 0.3, 0.3)) == 1);

  const FeatureMatrix x = matrix({{2, 0.2}, {1.5, 0.4}, {0.3, 1.8}, {0.1, 2.5}}, 77);
  const std::vector<int> y = {0, 0, 1, 1};
  TrainConfig cfg;
  const auto m = train_model(ModelKind::LinearSvmOvR, x, y, 2, cfg);
  CHECK(m.vocabulary_fingerprint == 77);
  FeatureVector wrong = row_vector(x, 0);
  wrong.fingerprint = 78;
  CHECK_THROWS_AS(predict(m, wrong), DataError);
  const FeatureVector narrow{SparseVec<double>(3), 77};
  CHECK_THROWS_AS(predict(m, narrow), DataError);
}

TEST_CASE("fixed seed gives identical model bytes") {
  Rng rng(6);
  std::vector<std::vector<double>> dense;
  std::vector<int> y;
  for (int i = 0; i < 30; ++i) {
    dense.push_back({rng.uniform(), rng.uniform(), rng.uniform(), 1.0});
    y.push_back(dense.back()[0] > dense.back()[1] ? 0 : (dense.back()[2] > 0.5 ? 1 : 2));
  }
  const FeatureMatrix x = matrix(dense);
  TrainConfig cfg;
  for (ModelKind k : kAllModelKinds) {
    CHECK(model_to_json(train_model(k, x, y, 3, cfg)) == model_to_json(train_model(k, x, y, 3, cfg)));
  }
}

TEST_CASE("training config validation") {
  TrainConfig c;
  c.lambda = 0;
  CHECK_THROWS_AS(c.validate(), UsageError);
  c = TrainConfig{};
  c.C = -1;
  CHECK_THROWS_AS(c.validate(), UsageError);
  CHECK(parse_model_kind("linsvm") == ModelKind::LinearSvmOvR);
  CHECK_THROWS_AS(parse_model_kind("forest"), UsageError);
  CHECK(TrainConfig{}.normalizes_inputs(ModelKind::RbfSvmOvR));
  CHECK_FALSE(TrainConfig{}.normalizes_inputs(ModelKind::NaiveBayes));
}

TEST_CASE("top features") {
  TrainedModel m;
  m.kind = ModelKind::LinearSvmOvR;
  m.n_classes = 1;
  m.n_features = 3;
  m.vocabulary_fingerprint = 5;
  LinearOvrParams p;
  p.weights = Eigen::MatrixXd(1, 3);
  p.weights << 2.0, -3.0, 2.0;
  p.bias = Eigen::VectorXd::Zero(1);
  m.params = p;
  const Vocabulary v({{"a", "b"}, {"c", "d"}, {"e", "f"}}, {0.5, 0.5, 0.5}, 5);

  auto top = top_features(m, v, 1);
  REQUIRE(top[0].size() == 1);
  CHECK(top[0][0].bigram == Bigram{"c", "d"});
  top = top_features(m, v, 10);
  REQUIRE(top[0].size() == 3);
  CHECK(top[0][1].bigram == Bigram{"a", "b"});
  CHECK(top[0][2].bigram == Bigram{"e", "f"});

  m.kind = ModelKind::NaiveBayes;
  m.params = NaiveBayesParams{};
  CHECK_THROWS_AS(top_features(m, v, 1), UsageError);
}

TEST_CASE("a bigram that drives a class ranks among its top five") {
  Corpus c;
  Rng rng(14);
  const std::vector<std::string> filler = {"Patient resting comfortably overnight.", "Vital signs stable overnight.",
                                           "Labs reviewed including potassium.", "Continue current medications today."};
  std::vector<int> y;
  for (int i = 0; i < 90; ++i) {
    const int label = i % 3;
    std::string text = filler[rng.below(filler.size())] + " " + filler[rng.below(filler.size())];
    if (label == 0) text += " Worsening heart failure.";
    if (label == 1) text += " Cardiology consult placed.";
    if (label == 2) text += " Ambulating hallway independently.";
    c.profiles.push_back(testing::profile("P" + std::to_string(i), {text}));
    y.push_back(label);
  }
  FeaturizerConfig fc;
  const Vocabulary v = build_vocabulary(c, fc);
  REQUIRE(v.column(Bigram{"heart", "failure"}) >= 0);
  const FeatureMatrix x = featurize_corpus(c, v, fc);
  TrainConfig cfg;
  const auto m = train_model(ModelKind::LinearSvmOvR, x, y, 3, cfg);
  const auto top = top_features(m, v, 5);
  CHECK(std::any_of(top[0].begin(), top[0].end(),
                    [](const RankedFeature& f) { return f.bigram == Bigram{"heart", "failure"}; }));
}
