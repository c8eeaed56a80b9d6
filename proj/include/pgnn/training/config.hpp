#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "pgnn/protein/bins.hpp"

namespace pgnn::training {

/// Everything needed to rebuild and train a model. Field names match the
/// JSON config file keys.
struct TrainingConfig {
  // objective and optimizer
  double lambda = 1.0;
  double learning_rate = 0.00013;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double clip_norm = 1.0;  // 0 disables clipping
  std::size_t batch_size = 1;
  std::size_t max_epochs = 100;
  std::size_t patience = 10;
  std::uint64_t seed = 1;
  bool stop_gradient = false;  // cut node-loss gradients into the edge path

  // architecture
  std::size_t s_e = 10;
  std::size_t n_conv = 4;
  std::size_t s_v = 6;
  std::size_t channels = 48;
  std::size_t pair_dim = 24;
  std::size_t hidden_dim = 64;
  std::size_t edge_hidden = 16;
  std::size_t readout_hidden = 64;
  std::vector<std::size_t> dilations{1, 2, 4, 1};
  std::vector<double> bin_boundaries{8.0};
  bool normalize_cross = true;
  std::size_t sparsify_topk = 0;

  // data
  bool one_hot_features = true;
  bool standardize_features = false;
  std::size_t node_dim = 0;  // 0 = infer from the training data
  std::size_t edge_dim = 0;
  std::string manifest;
  std::string out_dir;

  void validate() const;
  protein::DistanceBinSpec bin_spec() const { return protein::DistanceBinSpec(bin_boundaries); }
  std::size_t bins() const { return bin_boundaries.size() + 1; }

  bool operator==(const TrainingConfig&) const = default;
};

nlohmann::json to_json(const TrainingConfig& config);
/// Unknown keys are rejected; missing keys keep their defaults.
TrainingConfig config_from_json(const nlohmann::json& j);
TrainingConfig load_config(const std::filesystem::path& path);

}  // namespace pgnn::training
