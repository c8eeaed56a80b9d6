#pragma once

#include <cstdint>
#include <vector>

#include "pgnn/autodiff/graph.hpp"
#include "pgnn/autodiff/parameters.hpp"
#include "pgnn/edge_path/edge_path.hpp"
#include "pgnn/featurize/features.hpp"
#include "pgnn/featurize/pairwise.hpp"
#include "pgnn/node_path/node_path.hpp"
#include "pgnn/training/config.hpp"

namespace pgnn::training {

struct ModelVars {
  edge::EdgePathVars edge;
  ad::Var v;  // [L x 4]
};

struct Prediction {
  std::string id;
  edge::EdgePathOutput edge;
  node::NodePathOutput node;
};

/// Both paths over one parameter store: pair transform -> edge path ->
/// (bin probabilities) -> node path.
class PgGnnModel {
 public:
  /// config.node_dim and config.edge_dim must be set.
  explicit PgGnnModel(const TrainingConfig& config);
  PgGnnModel(const PgGnnModel&) = delete;
  PgGnnModel& operator=(const PgGnnModel&) = delete;

  ModelVars forward(ad::Graph& g, const features::InputGraph& input) const;
  /// Inference without a tape.
  Prediction predict(const features::InputGraph& input) const;

  ad::ParameterStore& parameters() { return params_; }
  const ad::ParameterStore& parameters() const { return params_; }
  const TrainingConfig& config() const { return config_; }
  std::size_t contact_labels() const { return contact_labels_; }

 private:
  TrainingConfig config_;
  ad::ParameterStore params_;
  features::SequenceConv1d pair_transform_;
  edge::EdgePath edge_path_;
  node::NodePath node_path_;
  std::size_t contact_labels_ = 1;
};

}  // namespace pgnn::training
