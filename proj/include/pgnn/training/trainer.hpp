#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "pgnn/autodiff/adam.hpp"
#include "pgnn/featurize/features.hpp"
#include "pgnn/protein/geometry.hpp"
#include "pgnn/protein/manifest.hpp"
#include "pgnn/training/checkpoint.hpp"
#include "pgnn/training/config.hpp"
#include "pgnn/training/model.hpp"

namespace pgnn::training {

/// One protein ready for training or evaluation.
struct Example {
  features::InputGraph input;
  protein::TargetGeometry target;

  const std::string& id() const { return input.id; }
};

Example make_example(const protein::ProteinRecord& rec, const TrainingConfig& config,
                     const features::FeatureSources& sources);
/// Reads each entry's PDB chain and features.
std::vector<Example> load_examples(const std::vector<protein::ManifestEntry>& entries,
                                   const TrainingConfig& config);

struct LossValues {
  double edge = 0.0;
  double node = 0.0;
  double total = 0.0;
};

struct Evaluation {
  LossValues loss;
  Prediction prediction;
};

/// Tape-free forward pass plus losses.
Evaluation evaluate_example(const PgGnnModel& model, const Example& example);

/// Per-split means of losses and of the validation metrics.
nlohmann::json validation_snapshot(const PgGnnModel& model, std::span<const Example> examples);

struct StepResult {
  LossValues loss;         // averaged over the batch
  double grad_norm = 0.0;  // before clipping
};

class Trainer {
 public:
  Trainer(PgGnnModel& model, const TrainingConfig& config);

  /// Accumulates gradients over the proteins, clips, and applies one Adam
  /// update. A non-finite loss aborts the step before any parameter moves
  /// and throws NonFiniteError naming the protein.
  StepResult step(std::span<const Example* const> batch);

  ad::AdamState& adam() { return adam_; }
  const ad::AdamState& adam() const { return adam_; }

 private:
  PgGnnModel& model_;
  TrainingConfig config_;
  ad::AdamState adam_;
};

struct EpochRecord {
  std::size_t epoch = 0;
  LossValues train;
  nlohmann::json validation;
  bool improved = false;
  double seconds = 0.0;
};

nlohmann::json to_json(const EpochRecord& record, const TrainingConfig& config);

struct FitResult {
  Checkpoint best;
  std::vector<EpochRecord> history;
  bool early_stopped = false;
};

struct FitOptions {
  /// Called after each epoch's validation; return false to stop.
  std::function<bool(const EpochRecord&, const PgGnnModel&)> on_epoch;
  const features::FeatureStandardizer* standardizer = nullptr;
};

/// Epoch loop: seeded shuffle, batched steps, validation, early stop when the
/// validation total loss has not strictly improved for `patience` epochs.
/// The returned checkpoint holds the best-by-validation parameters; the model
/// is left at its final state.
FitResult fit(PgGnnModel& model, Trainer& trainer, const std::vector<Example>& train,
              const std::vector<Example>& val, const TrainingConfig& config,
              const FitOptions& options = {});

/// Manifest-driven training: loads the train and val splits, fits, and writes
/// out_dir/best.ckpt, out_dir/last.ckpt and out_dir/train_log.jsonl.
FitResult fit(const TrainingConfig& config);

}  // namespace pgnn::training
