#include "pgnn/training/model.hpp"

#include <random>

#include "pgnn/autodiff/ops.hpp"
#include "pgnn/errors.hpp"

namespace pgnn::training {

PgGnnModel::PgGnnModel(const TrainingConfig& config) : config_(config) {
  config_.validate();
  if (config_.node_dim == 0) throw ValidationError("model: node feature width is not set");
  contact_labels_ = config_.bin_spec().contact_labels();

  std::mt19937_64 rng(config_.seed);
  pair_transform_ = features::SequenceConv1d(params_, "pair", config_.node_dim, config_.pair_dim, rng);

  edge::EdgePathConfig ec;
  ec.in_channels = 2 * config_.pair_dim + config_.edge_dim;
  ec.channels = config_.channels;
  ec.blocks = config_.s_e;
  ec.conv_layers = config_.n_conv;
  ec.dilations = config_.dilations;
  ec.bins = config_.bins();
  ec.normalize_cross = config_.normalize_cross;
  edge_path_ = edge::EdgePath(params_, ec, rng);

  node::NodePathConfig nc;
  nc.node_dim = config_.node_dim;
  nc.hidden = config_.hidden_dim;
  nc.edge_hidden = config_.edge_hidden;
  nc.readout_hidden = config_.readout_hidden;
  nc.rounds = config_.s_v;
  nc.bins = config_.bins();
  nc.sparsify_topk = config_.sparsify_topk;
  node_path_ = node::NodePath(params_, nc, rng);
}

ModelVars PgGnnModel::forward(ad::Graph& g, const features::InputGraph& input) const {
  if (input.node_dim() != config_.node_dim)
    throw DimensionError("protein " + input.id + ": node features have width " +
                         std::to_string(input.node_dim()) + ", model expects " +
                         std::to_string(config_.node_dim));
  if (input.edge_dim() != config_.edge_dim)
    throw DimensionError("protein " + input.id + ": edge features have width " +
                         std::to_string(input.edge_dim()) + ", model expects " +
                         std::to_string(config_.edge_dim));
  const ad::Var f = g.constant(input.node_features);
  const ad::Var pairwise =
      features::build_pairwise_input(g, f, input.edge_features, pair_transform_);
  ModelVars out;
  out.edge = edge_path_.forward(g, pairwise);
  const ad::Var conditioning =
      config_.stop_gradient ? ad::detach(out.edge.pair_probs) : out.edge.pair_probs;
  out.v = node_path_.forward(g, f, conditioning);
  return out;
}

Prediction PgGnnModel::predict(const features::InputGraph& input) const {
  ad::Graph g(false);
  const ModelVars vars = forward(g, input);
  Prediction p;
  p.id = input.id;
  p.edge = edge::to_output(vars.edge, contact_labels_);
  p.node = node::recover_angles(vars.v.value());
  return p;
}

}  // namespace pgnn::training
