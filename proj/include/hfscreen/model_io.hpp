#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "hfscreen/features.hpp"
#include "hfscreen/models.hpp"

namespace hfscreen {

inline constexpr int kModelFormatVersion = 1;

// Featurizer state stored next to a model so the model file alone can score
// new notes.
struct FeaturizerBundle {
  FeaturizerConfig config;
  Vocabulary vocabulary;
};

/// Envelope {format_version, kind, vocabulary_fingerprint, n_classes,
/// n_features, converged, parameters, train_config[, featurizer]}.
std::string model_to_json(const TrainedModel& model,
                          const std::optional<FeaturizerBundle>& featurizer = std::nullopt);

// Throws FormatError on a version mismatch, truncation or missing fields.
TrainedModel model_from_json(std::string_view json_text);
std::optional<FeaturizerBundle> featurizer_from_model_json(std::string_view json_text);

void save_model(const TrainedModel& model, const std::filesystem::path& path,
                const std::optional<FeaturizerBundle>& featurizer = std::nullopt);
TrainedModel load_model(const std::filesystem::path& path);
std::optional<FeaturizerBundle> load_featurizer(const std::filesystem::path& path);

std::string featurizer_config_to_json(const FeaturizerConfig& config);
FeaturizerConfig featurizer_config_from_json(std::string_view json_text);

}  // namespace hfscreen
