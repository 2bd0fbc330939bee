#include "hfscreen/eval.hpp"

#include <algorithm>
#include <cstdio>

#include "hfscreen/errors.hpp"
#include "hfscreen/rng.hpp"
#include "json.hpp"

namespace hfscreen {

using nlohmann::json;

long ConfusionCounts::correct() const {
  long c = 0;
  for (const auto& k : per_class) c += k.tp;
  return c;
}

ConfusionCounts confusion_counts(std::span<const Coarse> gold, std::span<const Coarse> predicted) {
  if (gold.size() != predicted.size()) {
    throw DataError("gold and predicted label sequences differ in length (" +
                    std::to_string(gold.size()) + " vs " + std::to_string(predicted.size()) + ")");
  }
  ConfusionCounts counts;
  counts.n_samples = static_cast<long>(gold.size());
  for (std::size_t i = 0; i < gold.size(); ++i) {
    ++counts.matrix[index(gold[i])][index(predicted[i])];
  }
  for (int c = 0; c < kNumCoarse; ++c) {
    ClassCounts& k = counts.per_class[c];
    for (int other = 0; other < kNumCoarse; ++other) {
      if (other == c) continue;
      k.fn += counts.matrix[c][other];
      k.fp += counts.matrix[other][c];
    }
    k.tp = counts.matrix[c][c];
    k.tn = counts.n_samples - k.tp - k.fp - k.fn;
  }
  return counts;
}

std::optional<double> precision(const ClassCounts& c) {
  if (c.tp + c.fp == 0) return std::nullopt;
  return static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
}

std::optional<double> recall(const ClassCounts& c) {
  if (c.tp + c.fn == 0) return std::nullopt;
  return static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
}

std::optional<double> f1_score(std::optional<double> p, std::optional<double> r) {
  if (!p || !r || *p + *r == 0.0) return std::nullopt;
  return 2.0 * (*p * *r) / (*p + *r);
}

MetricsReport compute_metrics(const ConfusionCounts& counts) {
  MetricsReport report;
  report.counts = counts;
  for (int c = 0; c < kNumCoarse; ++c) {
    ClassMetrics& m = report.per_class[c];
    m.precision = precision(counts.per_class[c]);
    m.recall = recall(counts.per_class[c]);
    m.f1 = f1_score(m.precision, m.recall);
    m.support = counts.per_class[c].support();
  }
  auto weighted = [&](std::optional<double> ClassMetrics::*field) -> std::optional<double> {
    double sum = 0.0;
    long support = 0;
    for (const auto& m : report.per_class) {
      if (!(m.*field) || m.support == 0) continue;
      sum += *(m.*field) * static_cast<double>(m.support);
      support += m.support;
    }
    if (support == 0) return std::nullopt;
    return sum / static_cast<double>(support);
  };
  report.weighted.precision = weighted(&ClassMetrics::precision);
  report.weighted.recall = weighted(&ClassMetrics::recall);
  report.weighted.f1 = weighted(&ClassMetrics::f1);
  report.weighted.support = counts.n_samples;
  if (counts.n_samples > 0) {
    report.accuracy = static_cast<double>(counts.correct()) / static_cast<double>(counts.n_samples);
  }
  return report;
}

MetricsReport evaluate(std::span<const Coarse> gold, std::span<const Coarse> predicted) {
  return compute_metrics(confusion_counts(gold, predicted));
}

FoldPlan stratified_folds(std::span<const Coarse> labels, int k, std::uint64_t seed) {
  if (k < 2) throw UsageError("cross-validation needs k >= 2");
  std::array<std::vector<std::size_t>, kNumCoarse> members;
  for (std::size_t i = 0; i < labels.size(); ++i) members[index(labels[i])].push_back(i);
  for (Coarse c : kAllCoarse) {
    const auto n = members[index(c)].size();
    if (n > 0 && n < static_cast<std::size_t>(k)) {
      throw DataError("class '" + std::string(to_string(c)) + "' has " + std::to_string(n) +
                      " members, fewer than k=" + std::to_string(k));
    }
  }

  FoldPlan plan{k, seed, std::vector<std::vector<std::size_t>>(static_cast<std::size_t>(k))};
  Rng rng(seed);
  std::size_t next = 0;
  for (auto& m : members) {
    rng.shuffle(std::span<std::size_t>(m));
    for (std::size_t idx : m) {
      plan.folds[next].push_back(idx);
      next = (next + 1) % static_cast<std::size_t>(k);
    }
  }
  for (auto& f : plan.folds) std::sort(f.begin(), f.end());
  return plan;
}

std::vector<Coarse> gold_coarse_labels(const Corpus& corpus) {
  std::vector<Coarse> gold;
  gold.reserve(corpus.profiles.size());
  for (const auto& p : corpus.profiles) {
    if (!p.gold) throw DataError("patient " + p.patient_id + " has no gold label");
    gold.push_back(p.gold->coarse());
  }
  return gold;
}

std::vector<CvReport> cross_validate_models(const Corpus& corpus,
                                            const FeaturizerConfig& featurizer,
                                            const TrainConfig& train,
                                            std::span<const ModelKind> kinds, int k,
                                            std::uint64_t seed) {
  featurizer.validate();
  train.validate();
  const std::vector<Coarse> gold = gold_coarse_labels(corpus);
  const FoldPlan plan = stratified_folds(gold, k, seed);

  std::vector<BigramBag> bags;
  bags.reserve(corpus.profiles.size());
  for (const auto& p : corpus.profiles) {
    bags.push_back(bigram_bag(make_document(p, featurizer.preprocess)));
  }

  std::vector<CvReport> reports(kinds.size());
  std::vector<std::vector<FoldSummary>> summaries(kinds.size());
  for (std::size_t m = 0; m < kinds.size(); ++m) {
    reports[m].kind = kinds[m];
    reports[m].k = k;
    reports[m].seed = seed;
    reports[m].predictions.assign(gold.size(), Coarse::Other);
  }

  std::vector<bool> in_test(gold.size());
  for (const auto& test_rows : plan.folds) {
    std::fill(in_test.begin(), in_test.end(), false);
    for (std::size_t r : test_rows) in_test[r] = true;
    std::vector<std::size_t> train_rows;
    train_rows.reserve(gold.size() - test_rows.size());
    for (std::size_t r = 0; r < gold.size(); ++r) {
      if (!in_test[r]) train_rows.push_back(r);
    }

    const Vocabulary vocab = build_vocabulary(bags, train_rows, featurizer);
    const FeatureMatrix x_train = featurize_rows(bags, train_rows, vocab);
    const FeatureMatrix x_test = featurize_rows(bags, test_rows, vocab);
    std::vector<int> y_train;
    y_train.reserve(train_rows.size());
    for (std::size_t r : train_rows) y_train.push_back(index(gold[r]));

    for (std::size_t m = 0; m < kinds.size(); ++m) {
      const TrainedModel model = train_model(kinds[m], x_train, y_train, kNumCoarse, train);
      const auto preds = predict_rows(model, x_test);
      FoldSummary fs;
      fs.train_size = train_rows.size();
      fs.test_size = test_rows.size();
      fs.vocabulary_size = vocab.size();
      fs.converged = model.converged;
      long correct = 0;
      for (std::size_t t = 0; t < test_rows.size(); ++t) {
        const Coarse pred = static_cast<Coarse>(preds[t].label);
        reports[m].predictions[test_rows[t]] = pred;
        correct += pred == gold[test_rows[t]];
        ++fs.test_class_counts[index(gold[test_rows[t]])];
      }
      if (!test_rows.empty()) {
        fs.accuracy = static_cast<double>(correct) / static_cast<double>(test_rows.size());
      }
      summaries[m].push_back(fs);
    }
  }

  for (std::size_t m = 0; m < kinds.size(); ++m) {
    reports[m].metrics = evaluate(gold, reports[m].predictions);
    reports[m].metrics.folds = std::move(summaries[m]);
  }
  return reports;
}

CvReport cross_validate(const Corpus& corpus, const FeaturizerConfig& featurizer,
                        const TrainConfig& train, ModelKind kind, int k, std::uint64_t seed) {
  const ModelKind kinds[] = {kind};
  return std::move(cross_validate_models(corpus, featurizer, train, kinds, k, seed).front());
}

namespace {

json opt(std::optional<double> v) { return v ? json(*v) : json(nullptr); }

json class_metrics_json(const ClassMetrics& m) {
  return {{"precision", opt(m.precision)},
          {"recall", opt(m.recall)},
          {"f1", opt(m.f1)},
          {"support", m.support}};
}

json metrics_json(const MetricsReport& r) {
  json per_class = json::object();
  for (Coarse c : kAllCoarse) per_class[std::string(to_string(c))] = class_metrics_json(r.per_class[index(c)]);
  json confusion = json::array();
  for (const auto& row : r.counts.matrix) confusion.push_back(row);
  json folds = json::array();
  for (const auto& f : r.folds) {
    folds.push_back({{"train_size", f.train_size},
                     {"test_size", f.test_size},
                     {"vocabulary_size", f.vocabulary_size},
                     {"converged", f.converged},
                     {"accuracy", opt(f.accuracy)},
                     {"test_class_counts", f.test_class_counts}});
  }
  return {{"per_class", std::move(per_class)},
          {"weighted", class_metrics_json(r.weighted)},
          {"accuracy", opt(r.accuracy)},
          {"n_samples", r.counts.n_samples},
          {"confusion", std::move(confusion)},
          {"folds", std::move(folds)}};
}

std::string cell(std::optional<double> v) {
  if (!v) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", *v);
  return buf;
}

}  // namespace

std::string metrics_to_json(const MetricsReport& report, int indent) {
  return metrics_json(report).dump(indent);
}

std::string cv_report_to_json(const CvReport& report, int indent) {
  json j = metrics_json(report.metrics);
  j["model_kind"] = to_string(report.kind);
  j["k"] = report.k;
  j["seed"] = report.seed;
  return j.dump(indent);
}

std::string format_metrics_table(const MetricsReport& report) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof line, "%-10s %9s %9s %9s %9s %9s\n", "class", "precision", "recall",
                "f1-score", "support", "accuracy");
  out += line;
  for (Coarse c : kAllCoarse) {
    const ClassMetrics& m = report.per_class[index(c)];
    std::snprintf(line, sizeof line, "%-10s %9s %9s %9s %9ld %9s\n", std::string(to_string(c)).c_str(),
                  cell(m.precision).c_str(), cell(m.recall).c_str(), cell(m.f1).c_str(), m.support,
                  "N/A");
    out += line;
  }
  std::snprintf(line, sizeof line, "%-10s %9s %9s %9s %9ld %9s\n", "avg/total",
                cell(report.weighted.precision).c_str(), cell(report.weighted.recall).c_str(),
                cell(report.weighted.f1).c_str(), report.weighted.support,
                cell(report.accuracy).c_str());
  out += line;
  return out;
}

std::string format_model_comparison(std::span<const CvReport> reports) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof line, "%-22s %9s %9s %9s %9s\n", "model", "precision", "recall",
                "f1-score", "accuracy");
  out += line;
  for (const auto& r : reports) {
    std::snprintf(line, sizeof line, "%-22s %9s %9s %9s %9s\n", std::string(to_string(r.kind)).c_str(),
                  cell(r.metrics.weighted.precision).c_str(), cell(r.metrics.weighted.recall).c_str(),
                  cell(r.metrics.weighted.f1).c_str(), cell(r.metrics.accuracy).c_str());
    out += line;
  }
  return out;
}

}  // namespace hfscreen
