#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "pgnn/autodiff/graph.hpp"
#include "pgnn/autodiff/ops.hpp"
#include "pgnn/autodiff/parameters.hpp"
#include "pgnn/featurize/pairwise.hpp"

namespace pgnn::node {

struct NodePathConfig {
  std::size_t node_dim = 20;        // D
  std::size_t hidden = 64;          // d_h
  std::size_t edge_hidden = 16;     // hidden width of the edge network
  std::size_t readout_hidden = 64;
  std::size_t rounds = 6;           // S_V
  std::size_t bins = 2;             // B, width of the edge conditioning vectors
  std::size_t sparsify_topk = 0;    // 0 = dense messaging
};

/// Edge network mapping a B-vector e_vw to A_vw [d_h x d_h]:
///   u = relu(e W1 + b1)                 (H hidden units)
///   A_vw[a][b] = sum_k Q[b, k*d_h + a] * u~_k,   u~ = (u, 1)
/// The last d_h columns of Q act as the output bias of the second layer.
struct EdgeNetwork {
  ad::Parameter* w1 = nullptr;  // [B x H]
  ad::Parameter* b1 = nullptr;  // [H]
  ad::Parameter* q = nullptr;   // [d_h x (H + 1) d_h]
  std::size_t hidden = 0;
  std::size_t state_dim = 0;
};

/// Per-pair edge-network activations ready for message aggregation:
/// [L x L(H + 1)], row v holding u~_vw for every w, zeroed where w == v or
/// where the pair is not kept by the sparsifier.
ad::Var edge_activations(ad::Graph& g, const ad::Var& pair_probs, std::size_t length,
                         const EdgeNetwork& net, std::size_t sparsify_topk = 0);

/// m_v = 1/(L-1) sum_{w != v} A_vw h_w, using activations from edge_activations.
ad::Var aggregate_messages(ad::Graph& g, const ad::Var& h, const ad::Var& activations,
                           const EdgeNetwork& net);

/// Convenience: edge_activations + aggregate_messages.
ad::Var message_step(ad::Graph& g, const ad::Var& h, const ad::Var& pair_probs,
                     const EdgeNetwork& net, std::size_t sparsify_topk = 0);

/// Explicit A_vw for one pair, for inspection and tests.
ad::Tensor edge_matrix(const EdgeNetwork& net, std::span<const double> e);

struct GruParameters {
  ad::Parameter *w_z, *w_r, *w_n, *u_z, *u_r, *u_n, *b_z, *b_r, *b_n;

  ad::GruParams bind(ad::Graph& g) const;
};

struct ReadoutParameters {
  ad::Parameter *w1, *b1, *w2, *b2;
};

/// h'_i = GRU(h_i, m_i), weights shared across nodes.
ad::Var node_update(ad::Graph& g, const ad::Var& h, const ad::Var& m, const GruParameters& p);

/// Per-node two-layer perceptron d_h -> 4 with a ReLU hidden layer.
ad::Var readout(ad::Graph& g, const ad::Var& h, const ReadoutParameters& p);

struct NodePathOutput {
  ad::Tensor v;                        // [L x 4]: sin phi, cos phi, sin psi, cos psi
  std::vector<double> phi, psi;        // degrees, (-180, 180]
  std::vector<std::uint8_t> phi_defined, psi_defined;
};

/// atan2(v_a, v_b), atan2(v_c, v_d) in degrees. An angle whose (sin, cos)
/// pair is exactly zero is flagged undefined.
NodePathOutput recover_angles(const ad::Tensor& v);

class NodePath {
 public:
  NodePath() = default;
  NodePath(ad::ParameterStore& store, const NodePathConfig& config, std::mt19937_64& rng);

  /// node_features [L x D], pair_probs [L*L x B] -> v [L x 4].
  ad::Var forward(ad::Graph& g, const ad::Var& node_features, const ad::Var& pair_probs) const;

  const NodePathConfig& config() const { return config_; }
  const EdgeNetwork& edge_network() const { return edge_net_; }
  const GruParameters& gru() const { return gru_; }
  const ReadoutParameters& readout_parameters() const { return readout_; }
  const features::SequenceConv1d& initial_projection() const { return h0_; }

 private:
  NodePathConfig config_;
  features::SequenceConv1d h0_;
  EdgeNetwork edge_net_;
  GruParameters gru_{};
  ReadoutParameters readout_{};
};

}  // namespace pgnn::node
