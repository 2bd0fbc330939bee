// hfscreen: batch screening of clinical notes for active heart failure.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 data error.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hfscreen/corpus.hpp"
#include "hfscreen/errors.hpp"
#include "hfscreen/eval.hpp"
#include "hfscreen/extraction.hpp"
#include "hfscreen/features.hpp"
#include "hfscreen/io.hpp"
#include "hfscreen/model_io.hpp"
#include "hfscreen/models.hpp"
#include "hfscreen/negation.hpp"
#include "hfscreen/ruleclf.hpp"
#include "hfscreen/synth.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace hfscreen;

namespace {

struct Flags {
  std::string config, corpus, labels, model, out, model_kind;
  std::optional<std::uint64_t> seed;
  std::optional<int> k, min_token_len, negation_window;
  std::optional<double> min_df, max_df;
  bool all_models = false;
  int top = 10;
};

struct RunConfig {
  std::string corpus, labels, model, out;
  std::string keywords, triggers, stopwords, templates;
  FeaturizerConfig featurizer;
  TrainConfig train;
  json synthesis = json::object();
  int negation_window = kDefaultNegationWindow;
  int k = 10;
  std::optional<std::uint64_t> seed;
  ModelKind model_kind = ModelKind::LinearSvmOvR;
  bool all_models = false;
  int top = 10;

  std::uint64_t require_seed() const {
    if (!seed) throw UsageError("this command is stochastic; give --seed or a \"seed\" in --config");
    return *seed;
  }
};

template <class T>
void take(const json& obj, const char* key, T& into) {
  if (auto it = obj.find(key); it != obj.end() && !it->is_null()) into = it->get<T>();
}

void apply_train_section(const json& t, TrainConfig& c) {
  take(t, "alpha", c.alpha);
  take(t, "lambda", c.lambda);
  take(t, "epochs", c.epochs);
  take(t, "tolerance", c.tolerance);
  take(t, "C", c.C);
  take(t, "gamma", c.gamma);
  take(t, "smo_tolerance", c.smo_tolerance);
  take(t, "max_passes", c.max_passes);
  if (auto it = t.find("class_weighting"); it != t.end()) {
    const auto v = it->get<std::string>();
    if (v == "balanced") c.class_weighting = ClassWeighting::Balanced;
    else if (v == "none") c.class_weighting = ClassWeighting::None;
    else throw UsageError("class_weighting must be \"balanced\" or \"none\"");
  }
  if (auto it = t.find("l2_normalize_inputs"); it != t.end() && !it->is_null()) {
    c.l2_normalize_inputs = it->get<bool>();
  }
}

RunConfig resolve(const Flags& f) {
  RunConfig rc;
  std::optional<std::size_t> min_token_len;
  if (!f.config.empty()) {
    json j;
    try {
      j = json::parse(read_file(f.config));
    } catch (const json::parse_error& e) {
      throw UsageError("config " + f.config + " is not valid JSON: " + e.what());
    }
    if (!j.is_object()) throw UsageError("config " + f.config + " must be a JSON object");
    try {
      if (auto p = j.find("paths"); p != j.end()) {
        take(*p, "corpus", rc.corpus);
        take(*p, "labels", rc.labels);
        take(*p, "model", rc.model);
        take(*p, "out", rc.out);
        take(*p, "keywords", rc.keywords);
        take(*p, "triggers", rc.triggers);
        take(*p, "stopwords", rc.stopwords);
        take(*p, "templates", rc.templates);
      }
      if (auto fz = j.find("featurizer"); fz != j.end()) {
        take(*fz, "min_df", rc.featurizer.min_df);
        take(*fz, "max_df", rc.featurizer.max_df);
        if (fz->contains("min_token_len")) min_token_len = fz->at("min_token_len").get<std::size_t>();
      }
      if (auto t = j.find("train"); t != j.end()) apply_train_section(*t, rc.train);
      if (auto s = j.find("synthesis"); s != j.end()) rc.synthesis = *s;
      take(j, "negation_window", rc.negation_window);
      take(j, "k", rc.k);
      if (j.contains("seed")) rc.seed = j.at("seed").get<std::uint64_t>();
      if (j.contains("model_kind")) rc.model_kind = parse_model_kind(j.at("model_kind").get<std::string>());
    } catch (const json::exception& e) {
      throw UsageError("config " + f.config + ": " + e.what());
    }
  }

  if (!f.corpus.empty()) rc.corpus = f.corpus;
  if (!f.labels.empty()) rc.labels = f.labels;
  if (!f.model.empty()) rc.model = f.model;
  if (!f.out.empty()) rc.out = f.out;
  if (f.seed) rc.seed = f.seed;
  if (f.k) rc.k = *f.k;
  if (f.min_df) rc.featurizer.min_df = *f.min_df;
  if (f.max_df) rc.featurizer.max_df = *f.max_df;
  if (f.min_token_len) min_token_len = static_cast<std::size_t>(*f.min_token_len);
  if (f.negation_window) rc.negation_window = *f.negation_window;
  if (!f.model_kind.empty()) rc.model_kind = parse_model_kind(f.model_kind);
  rc.all_models = f.all_models;
  rc.top = f.top;

  if (!rc.stopwords.empty()) rc.featurizer.preprocess.stopwords = load_stopwords(rc.stopwords);
  if (min_token_len) rc.featurizer.preprocess.min_token_len = *min_token_len;
  if (rc.seed) rc.train.seed = *rc.seed;
  if (rc.negation_window < 0) throw UsageError("--negation-window must be non-negative");
  rc.featurizer.validate();
  rc.train.validate();
  return rc;
}

const std::string& need(const std::string& value, const char* flag) {
  if (value.empty()) throw UsageError(std::string("missing required ") + flag);
  return value;
}

Corpus load_corpus(const RunConfig& rc) {
  Corpus corpus = ingest_notes(need(rc.corpus, "--corpus"));
  if (!rc.labels.empty()) attach_labels(corpus, load_gold_labels(rc.labels));
  return corpus;
}

bool has_any_label(const Corpus& corpus) {
  for (const auto& p : corpus.profiles) {
    if (p.gold) return true;
  }
  return false;
}

// Writes atomically to `path`, or to stdout when no path was given.
void emit(const std::string& path, const std::string& contents) {
  if (path.empty()) {
    std::cout << contents;
  } else {
    write_file_atomic(path, contents);
  }
}

std::ostream& report_stream(const RunConfig& rc) { return rc.out.empty() ? std::cerr : std::cout; }

int cmd_synth(const RunConfig& rc) {
  SynthesisSpec spec = synthesis_spec_from_json(rc.synthesis.dump());
  if (rc.seed) spec.seed = *rc.seed;
  else if (!rc.synthesis.contains("seed")) rc.require_seed();
  const SynthTemplates templates =
      rc.templates.empty() ? default_synth_templates() : load_synth_templates(rc.templates);
  const Corpus corpus = generate_synthetic_corpus(spec, templates);

  const fs::path dir = need(rc.out, "--out");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create output directory " + dir.string() + ": " + ec.message());
  write_file_atomic(dir / "notes.jsonl", corpus_to_jsonl(corpus));
  write_file_atomic(dir / "labels.jsonl", labels_to_jsonl(corpus));
  write_file_atomic(dir / "synthesis.json", synthesis_spec_to_json(spec));

  std::array<std::size_t, kNumFine> histogram{};
  for (const auto& p : corpus.profiles) ++histogram[index(*p.gold->fine())];
  std::printf("seed %llu, %zu patients, %zu notes\n", static_cast<unsigned long long>(spec.seed),
              corpus.profiles.size(), corpus.note_count());
  for (Fine f : kAllFine) {
    std::printf("%-8s %6zu\n", std::string(to_string(f)).c_str(), histogram[index(f)]);
  }
  return 0;
}

int cmd_ingest(const RunConfig& rc) {
  const Corpus corpus = load_corpus(rc);
  emit(rc.out, profiles_to_jsonl(corpus));
  std::size_t labeled = 0;
  for (const auto& p : corpus.profiles) labeled += p.gold.has_value();
  report_stream(rc) << corpus.profiles.size() << " patients, " << corpus.note_count() << " notes, "
                    << labeled << " labeled\n";
  return 0;
}

int cmd_rules(const RunConfig& rc) {
  const Corpus corpus = load_corpus(rc);
  const KeywordLexicon keywords =
      rc.keywords.empty() ? default_keyword_lexicon() : load_keyword_lexicon(rc.keywords);
  const TriggerLexicon triggers =
      rc.triggers.empty() ? default_trigger_lexicon() : load_trigger_lexicon(rc.triggers);
  ExtractionOptions options;
  options.negation_window = rc.negation_window;

  std::string lines;
  std::vector<Coarse> gold, predicted;
  for (const auto& p : corpus.profiles) {
    const RuleTrace trace = classify_rules(extract_data_elements(p, keywords, triggers, options));
    json evidence = json::object();
    for (Element e : kAllElements) {
      json items = json::array();
      for (const auto& ev : trace.elements.evidence(e)) {
        items.push_back({{"note_id", ev.note_id}, {"sentence_index", ev.sentence_index}, {"phrase", ev.phrase}});
      }
      if (!items.empty()) evidence[std::string(to_string(e))] = std::move(items);
    }
    const json line = {{"patient_id", p.patient_id},
                       {"color", to_string(trace.predicted.coarse())},
                       {"fine", to_string(*trace.predicted.fine())},
                       {"fired_rule", to_string(trace.fired_rule)},
                       {"evidence", std::move(evidence)}};
    lines += line.dump() + '\n';
    if (p.gold) {
      gold.push_back(p.gold->coarse());
      predicted.push_back(trace.predicted.coarse());
    }
  }
  emit(rc.out, lines);
  if (!gold.empty()) {
    report_stream(rc) << format_metrics_table(evaluate(gold, predicted));
  }
  return 0;
}

int cmd_featurize(const RunConfig& rc) {
  const Corpus corpus = load_corpus(rc);
  const Vocabulary vocab = build_vocabulary(corpus, rc.featurizer);
  const json out = {{"featurizer", json::parse(featurizer_config_to_json(rc.featurizer))},
                    {"vocabulary", json::parse(vocabulary_to_json(vocab))},
                    {"n_patients", corpus.profiles.size()}};
  emit(rc.out, out.dump(2) + '\n');
  report_stream(rc) << vocab.size() << " bigrams kept from " << corpus.profiles.size()
                    << " patients\n";
  return 0;
}

std::vector<int> label_indices(const Corpus& corpus) {
  std::vector<int> y;
  for (Coarse c : gold_coarse_labels(corpus)) y.push_back(index(c));
  return y;
}

int cmd_train(const RunConfig& rc) {
  rc.require_seed();
  const Corpus corpus = load_corpus(rc);
  const std::vector<int> y = label_indices(corpus);
  const Vocabulary vocab = build_vocabulary(corpus, rc.featurizer);
  const FeatureMatrix x = featurize_corpus(corpus, vocab, rc.featurizer);
  const TrainedModel model = train_model(rc.model_kind, x, y, kNumCoarse, rc.train);
  const std::string& dest = rc.out.empty() ? need(rc.model, "--out or --model") : rc.out;
  save_model(model, dest, FeaturizerBundle{rc.featurizer, vocab});
  std::printf("%s trained on %zu patients, %zu bigrams, seed %llu\n",
              std::string(to_string(model.kind)).c_str(), corpus.profiles.size(), vocab.size(),
              static_cast<unsigned long long>(rc.train.seed));
  if (!model.converged) std::fprintf(stderr, "warning: optimizer did not converge within its budget\n");
  return 0;
}

FeaturizerBundle model_featurizer(const std::string& path) {
  auto bundle = load_featurizer(path);
  if (!bundle) throw DataError("model " + path + " carries no featurizer section");
  return std::move(*bundle);
}

int cmd_predict(const RunConfig& rc) {
  const std::string& path = need(rc.model, "--model");
  const TrainedModel model = load_model(path);
  const FeaturizerBundle bundle = model_featurizer(path);
  const Corpus corpus = load_corpus(rc);

  std::string lines;
  std::vector<Coarse> gold, predicted;
  for (const auto& p : corpus.profiles) {
    const Prediction pr = predict(model, featurize(p, bundle.vocabulary, bundle.config));
    const Coarse label = static_cast<Coarse>(pr.label);
    json scores = json::object();
    for (Coarse c : kAllCoarse) scores[std::string(to_string(c))] = pr.scores(index(c));
    lines += json{{"patient_id", p.patient_id}, {"color", to_string(label)}, {"scores", scores}}.dump() + '\n';
    if (p.gold) {
      gold.push_back(p.gold->coarse());
      predicted.push_back(label);
    }
  }
  emit(rc.out, lines);
  if (!gold.empty()) report_stream(rc) << format_metrics_table(evaluate(gold, predicted));
  return 0;
}

int cmd_cv(const RunConfig& rc) {
  const std::uint64_t seed = rc.require_seed();
  const Corpus corpus = load_corpus(rc);
  if (!has_any_label(corpus)) throw DataError("cross-validation needs gold labels");

  if (rc.all_models) {
    const auto reports = cross_validate_models(corpus, rc.featurizer, rc.train, kAllModelKinds, rc.k, seed);
    std::cout << "k=" << rc.k << " seed=" << seed << '\n' << format_model_comparison(reports);
    if (!rc.out.empty()) {
      json arr = json::array();
      for (const auto& r : reports) arr.push_back(json::parse(cv_report_to_json(r)));
      write_file_atomic(rc.out, json{{"k", rc.k}, {"seed", seed}, {"reports", arr}}.dump(2) + '\n');
    }
    return 0;
  }
  const CvReport report = cross_validate(corpus, rc.featurizer, rc.train, rc.model_kind, rc.k, seed);
  std::cout << to_string(report.kind) << " k=" << rc.k << " seed=" << seed << '\n'
            << format_metrics_table(report.metrics);
  if (!rc.out.empty()) write_file_atomic(rc.out, cv_report_to_json(report) + '\n');
  return 0;
}

int cmd_top_features(const RunConfig& rc) {
  const std::string& path = need(rc.model, "--model");
  const TrainedModel model = load_model(path);
  const FeaturizerBundle bundle = model_featurizer(path);
  if (rc.top < 1) throw UsageError("--top must be at least 1");
  const auto ranked = top_features(model, bundle.vocabulary, static_cast<std::size_t>(rc.top));

  std::string out;
  char cell[64];
  for (Coarse c : kAllCoarse) {
    std::snprintf(cell, sizeof cell, "%-28s", std::string(to_string(c)).c_str());
    out += cell;
  }
  out += '\n';
  for (int row = 0; row < rc.top; ++row) {
    for (Coarse c : kAllCoarse) {
      const auto& col = ranked[index(c)];
      std::string text;
      if (static_cast<std::size_t>(row) < col.size()) {
        std::snprintf(cell, sizeof cell, "%s %s (%.3f)", col[row].bigram.first.c_str(),
                      col[row].bigram.second.c_str(), col[row].weight);
        text = cell;
      }
      std::snprintf(cell, sizeof cell, "%-28s", text.c_str());
      out += cell;
    }
    out += '\n';
  }
  emit(rc.out, out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Screen clinical notes for active heart failure"};
  app.require_subcommand(1);
  Flags f;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", f.config, "JSON run configuration; flags override it");
    sub->add_option("--corpus", f.corpus, "notes or profiles JSONL");
    sub->add_option("--labels", f.labels, "gold label JSONL");
    sub->add_option("--out", f.out, "output path");
    sub->add_option("--seed", f.seed, "random seed");
  };
  auto featurizer_flags = [&](CLI::App* sub) {
    sub->add_option("--min-df", f.min_df, "lower document-frequency bound");
    sub->add_option("--max-df", f.max_df, "upper document-frequency bound");
    sub->add_option("--min-token-len", f.min_token_len, "shortest token kept");
  };
  auto kind_flag = [&](CLI::App* sub) {
    sub->add_option("--model-kind", f.model_kind, "nb | logreg | linsvm | rbfsvm")
        ->check(CLI::IsMember({"nb", "logreg", "linsvm", "rbfsvm"}));
  };

  std::map<std::string, int (*)(const RunConfig&)> handlers = {
      {"synth", cmd_synth},   {"ingest", cmd_ingest},   {"rules", cmd_rules},
      {"featurize", cmd_featurize}, {"train", cmd_train}, {"predict", cmd_predict},
      {"cv", cmd_cv},         {"top-features", cmd_top_features}};

  auto* synth = app.add_subcommand("synth", "generate a labeled synthetic corpus");
  common(synth);
  auto* ingest = app.add_subcommand("ingest", "aggregate notes into patient profiles");
  common(ingest);
  auto* rules = app.add_subcommand("rules", "run the rule-based classifier");
  common(rules);
  rules->add_option("--negation-window", f.negation_window, "negation scope in tokens");
  auto* featurize = app.add_subcommand("featurize", "build the bigram vocabulary");
  common(featurize);
  featurizer_flags(featurize);
  auto* train = app.add_subcommand("train", "train a model on a labeled corpus");
  common(train);
  featurizer_flags(train);
  kind_flag(train);
  train->add_option("--model", f.model, "model output path when --out is absent");
  auto* predict_cmd = app.add_subcommand("predict", "apply a trained model");
  common(predict_cmd);
  predict_cmd->add_option("--model", f.model, "trained model file");
  auto* cv = app.add_subcommand("cv", "stratified k-fold cross-validation");
  common(cv);
  featurizer_flags(cv);
  kind_flag(cv);
  cv->add_option("--k", f.k, "number of folds");
  cv->add_flag("--all-models", f.all_models, "compare all four model kinds on the same folds");
  auto* top = app.add_subcommand("top-features", "highest-weighted bigrams per class");
  common(top);
  top->add_option("--model", f.model, "trained linear model file");
  top->add_option("--top", f.top, "bigrams per class");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    const std::string name = app.get_subcommands().front()->get_name();
    return handlers.at(name)(resolve(f));
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const DataError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
