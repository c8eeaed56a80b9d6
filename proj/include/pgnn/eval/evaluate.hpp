#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pgnn/eval/report.hpp"
#include "pgnn/protein/manifest.hpp"
#include "pgnn/training/checkpoint.hpp"
#include "pgnn/training/model.hpp"
#include "pgnn/training/trainer.hpp"

namespace pgnn::eval {

/// A model rebuilt from a checkpoint, with its feature standardizer.
struct LoadedModel {
  std::unique_ptr<training::PgGnnModel> model;
  std::optional<features::FeatureStandardizer> standardizer;
};

LoadedModel load_model(const training::Checkpoint& checkpoint);

/// Reads one manifest entry and applies the checkpoint's standardizer.
training::Example load_example(const protein::ManifestEntry& entry, const LoadedModel& loaded);

/// Runs both paths on every entry. Entries that fail to load or to run are
/// excluded and listed with the reason.
MetricsReport evaluate_dataset(const LoadedModel& loaded,
                               const std::vector<protein::ManifestEntry>& entries,
                               const std::string& split_tag,
                               Aggregation mode = Aggregation::protein_mean);

/// Same report from prediction files `<dir>/<id>.contacts` and
/// `<dir>/<id>.angles` instead of a model.
MetricsReport evaluate_predictions(const std::filesystem::path& dir,
                                   const std::vector<protein::ManifestEntry>& entries,
                                   const std::string& split_tag,
                                   const protein::DistanceBinSpec& bins,
                                   Aggregation mode = Aggregation::protein_mean);

/// Writes `<dir>/<id>.contacts` and `<dir>/<id>.angles`.
void write_prediction(const std::filesystem::path& dir, const training::Prediction& prediction);

}  // namespace pgnn::eval
