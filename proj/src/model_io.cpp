#include "hfscreen/model_io.hpp"

#include <algorithm>
#include <cstdio>

#include "hfscreen/errors.hpp"
#include "hfscreen/io.hpp"
#include "json.hpp"

namespace hfscreen {

using nlohmann::json;

namespace {

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

json vector_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd vector_from(const json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) rows.push_back(vector_json(m.row(r).transpose()));
  return rows;
}

Eigen::MatrixXd matrix_from(const json& j, Eigen::Index cols) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), cols);
  for (std::size_t r = 0; r < j.size(); ++r) {
    const Eigen::VectorXd row = vector_from(j[r]);
    if (row.size() != cols) throw FormatError("model matrix row has wrong width");
    m.row(static_cast<Eigen::Index>(r)) = row.transpose();
  }
  return m;
}

json sparse_rows_json(const SparseRows<double>& rows) {
  json out = json::array();
  for (Eigen::Index r = 0; r < rows.outerSize(); ++r) {
    std::vector<int> idx;
    std::vector<double> val;
    for (SparseRows<double>::InnerIterator it(rows, r); it; ++it) {
      idx.push_back(static_cast<int>(it.col()));
      val.push_back(it.value());
    }
    out.push_back({{"indices", idx}, {"values", val}});
  }
  return out;
}

SparseRows<double> sparse_rows_from(const json& j, Eigen::Index cols) {
  std::vector<Eigen::Triplet<double, int>> triplets;
  for (std::size_t r = 0; r < j.size(); ++r) {
    const auto idx = j[r].at("indices").get<std::vector<int>>();
    const auto val = j[r].at("values").get<std::vector<double>>();
    if (idx.size() != val.size()) throw FormatError("support vector index/value mismatch");
    for (std::size_t k = 0; k < idx.size(); ++k) {
      if (idx[k] < 0 || idx[k] >= cols) throw FormatError("support vector column out of range");
      triplets.emplace_back(static_cast<int>(r), idx[k], val[k]);
    }
  }
  SparseRows<double> m(static_cast<Eigen::Index>(j.size()), cols);
  m.setFromTriplets(triplets.begin(), triplets.end());
  return m;
}

json train_config_json(const TrainConfig& c) {
  json j = {{"alpha", c.alpha},
            {"lambda", c.lambda},
            {"epochs", c.epochs},
            {"tolerance", c.tolerance},
            {"seed", c.seed},
            {"C", c.C},
            {"gamma", c.gamma},
            {"smo_tolerance", c.smo_tolerance},
            {"max_passes", c.max_passes},
            {"class_weighting", c.class_weighting == ClassWeighting::Balanced ? "balanced" : "none"}};
  j["l2_normalize_inputs"] = c.l2_normalize_inputs ? json(*c.l2_normalize_inputs) : json(nullptr);
  return j;
}

TrainConfig train_config_from(const json& j) {
  TrainConfig c;
  c.alpha = j.at("alpha").get<double>();
  c.lambda = j.at("lambda").get<double>();
  c.epochs = j.at("epochs").get<int>();
  c.tolerance = j.at("tolerance").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.C = j.at("C").get<double>();
  c.gamma = j.at("gamma").get<double>();
  c.smo_tolerance = j.at("smo_tolerance").get<double>();
  c.max_passes = j.at("max_passes").get<int>();
  c.class_weighting =
      j.at("class_weighting").get<std::string>() == "none" ? ClassWeighting::None : ClassWeighting::Balanced;
  if (const json& n = j.at("l2_normalize_inputs"); !n.is_null()) c.l2_normalize_inputs = n.get<bool>();
  return c;
}

json featurizer_config_json(const FeaturizerConfig& c) {
  std::vector<std::string> stop(c.preprocess.stopwords.begin(), c.preprocess.stopwords.end());
  std::sort(stop.begin(), stop.end());
  return {{"min_df", c.min_df},
          {"max_df", c.max_df},
          {"min_token_len", c.preprocess.min_token_len},
          {"number_placeholder", c.preprocess.number_placeholder},
          {"lowercase", c.preprocess.lowercase},
          {"stopwords", stop}};
}

FeaturizerConfig featurizer_config_from(const json& j) {
  FeaturizerConfig c;
  c.min_df = j.at("min_df").get<double>();
  c.max_df = j.at("max_df").get<double>();
  c.preprocess.min_token_len = j.at("min_token_len").get<std::size_t>();
  c.preprocess.number_placeholder = j.at("number_placeholder").get<std::string>();
  c.preprocess.lowercase = j.at("lowercase").get<bool>();
  const auto stop = j.at("stopwords").get<std::vector<std::string>>();
  c.preprocess.stopwords = {stop.begin(), stop.end()};
  return c;
}

json parse_envelope(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("model file is truncated or not JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("format_version")) {
    throw FormatError("model file lacks a format_version");
  }
  const json& v = j["format_version"];
  if (!v.is_number_integer() || v.get<int>() != kModelFormatVersion) {
    throw FormatError("unsupported model format version " + v.dump() + " (this build reads " +
                      std::to_string(kModelFormatVersion) + ")");
  }
  return j;
}

}  // namespace

std::string featurizer_config_to_json(const FeaturizerConfig& config) {
  return featurizer_config_json(config).dump();
}

FeaturizerConfig featurizer_config_from_json(std::string_view json_text) {
  try {
    return featurizer_config_from(json::parse(json_text));
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed featurizer config: ") + e.what());
  }
}

std::string model_to_json(const TrainedModel& model,
                          const std::optional<FeaturizerBundle>& featurizer) {
  json params;
  if (const auto* nb = std::get_if<NaiveBayesParams>(&model.params)) {
    params = {{"log_prior", vector_json(nb->log_prior)},
              {"log_likelihood", matrix_json(nb->log_likelihood)}};
  } else if (const auto* lin = std::get_if<LinearOvrParams>(&model.params)) {
    params = {{"weights", matrix_json(lin->weights)}, {"bias", vector_json(lin->bias)}};
  } else {
    json machines = json::array();
    for (const auto& m : std::get<RbfOvrParams>(model.params).machines) {
      machines.push_back({{"dual_coef", vector_json(m.dual_coef)},
                          {"support_vectors", sparse_rows_json(m.support_vectors)},
                          {"bias", m.bias},
                          {"gamma", m.gamma}});
    }
    params = {{"machines", std::move(machines)}};
  }
  json j = {{"format_version", kModelFormatVersion},
            {"kind", to_string(model.kind)},
            {"vocabulary_fingerprint", hex64(model.vocabulary_fingerprint)},
            {"n_classes", model.n_classes},
            {"n_features", model.n_features},
            {"converged", model.converged},
            {"parameters", std::move(params)},
            {"train_config", train_config_json(model.config)}};
  if (featurizer) {
    j["featurizer"] = {{"config", featurizer_config_json(featurizer->config)},
                       {"vocabulary", json::parse(vocabulary_to_json(featurizer->vocabulary))}};
  }
  return j.dump();
}

TrainedModel model_from_json(std::string_view json_text) {
  const json j = parse_envelope(json_text);
  try {
    TrainedModel m;
    m.kind = parse_model_kind(j.at("kind").get<std::string>());
    m.vocabulary_fingerprint = std::stoull(j.at("vocabulary_fingerprint").get<std::string>(), nullptr, 16);
    m.n_classes = j.at("n_classes").get<int>();
    m.n_features = j.at("n_features").get<Eigen::Index>();
    m.converged = j.at("converged").get<bool>();
    m.config = train_config_from(j.at("train_config"));
    const json& p = j.at("parameters");
    switch (m.kind) {
      case ModelKind::NaiveBayes: {
        NaiveBayesParams nb{vector_from(p.at("log_prior")),
                            matrix_from(p.at("log_likelihood"), m.n_features)};
        if (nb.log_prior.size() != m.n_classes || nb.log_likelihood.rows() != m.n_classes) {
          throw FormatError("Naive Bayes parameters do not match n_classes");
        }
        m.params = std::move(nb);
        break;
      }
      case ModelKind::LinearSvmOvR:
      case ModelKind::LogisticRegressionOvR: {
        LinearOvrParams lin{matrix_from(p.at("weights"), m.n_features), vector_from(p.at("bias"))};
        if (lin.weights.rows() != m.n_classes || lin.bias.size() != m.n_classes) {
          throw FormatError("linear parameters do not match n_classes");
        }
        m.params = std::move(lin);
        break;
      }
      case ModelKind::RbfSvmOvR: {
        RbfOvrParams rbf;
        for (const json& mj : p.at("machines")) {
          KernelMachine km;
          km.dual_coef = vector_from(mj.at("dual_coef"));
          km.support_vectors = sparse_rows_from(mj.at("support_vectors"), m.n_features);
          km.bias = mj.at("bias").get<double>();
          km.gamma = mj.at("gamma").get<double>();
          if (km.dual_coef.size() != km.support_vectors.rows()) {
            throw FormatError("support vector count mismatch");
          }
          rbf.machines.push_back(std::move(km));
        }
        if (static_cast<int>(rbf.machines.size()) != m.n_classes) {
          throw FormatError("kernel machines do not match n_classes");
        }
        m.params = std::move(rbf);
        break;
      }
    }
    return m;
  } catch (const json::exception& e) {
    throw FormatError(std::string("model file is missing or mistypes a field: ") + e.what());
  } catch (const UsageError& e) {
    throw FormatError(std::string("model file is invalid: ") + e.what());
  } catch (const std::logic_error& e) {
    throw FormatError(std::string("model file has a bad fingerprint: ") + e.what());
  }
}

std::optional<FeaturizerBundle> featurizer_from_model_json(std::string_view json_text) {
  const json j = parse_envelope(json_text);
  auto it = j.find("featurizer");
  if (it == j.end()) return std::nullopt;
  try {
    return FeaturizerBundle{featurizer_config_from(it->at("config")),
                            vocabulary_from_json(it->at("vocabulary").dump())};
  } catch (const json::exception& e) {
    throw FormatError(std::string("model featurizer section is malformed: ") + e.what());
  }
}

void save_model(const TrainedModel& model, const std::filesystem::path& path,
                const std::optional<FeaturizerBundle>& featurizer) {
  write_file_atomic(path, model_to_json(model, featurizer));
}

TrainedModel load_model(const std::filesystem::path& path) { return model_from_json(read_file(path)); }

std::optional<FeaturizerBundle> load_featurizer(const std::filesystem::path& path) {
  return featurizer_from_model_json(read_file(path));
}

}  // namespace hfscreen
