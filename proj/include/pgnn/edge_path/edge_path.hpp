#pragma once

#include <random>
#include <string>
#include <vector>

#include "pgnn/autodiff/graph.hpp"
#include "pgnn/autodiff/parameters.hpp"

namespace pgnn::edge {

struct EdgePathConfig {
  std::size_t in_channels = 0;  // 2d + K
  std::size_t channels = 48;    // working width C
  std::size_t blocks = 10;      // S_E
  std::size_t conv_layers = 4;  // N
  std::vector<std::size_t> dilations{1, 2, 4, 1};  // per conv layer; empty = all 1
  std::size_t bins = 2;         // B
  bool normalize_cross = true;  // 1/L on the row and column sums
};

/// Cross-shaped edge-to-edge convolution:
///   out(:, i, j) = rho( W * s * sum_n A(:, i, n) + H * s * sum_n A(:, n, j) )
/// with s = 1/L when normalize is set (else 1), W and H [Cout x Cin] and
/// rho = ELU (identity when apply_elu is false).
ad::Var edge_to_edge_conv(const ad::Var& a, const ad::Var& w_row, const ad::Var& w_col,
                          bool normalize = true, bool apply_elu = true);

struct EdgeBlockParams {
  ad::Parameter* e2e_row = nullptr;  // W [Cout x Cin]
  ad::Parameter* e2e_col = nullptr;  // H [Cout x Cin]
  std::vector<ad::Parameter*> conv_kernels;  // [Cout x Cin x 3 x 3], then [Cout x Cout x 3 x 3]
  std::vector<ad::Parameter*> norm_gamma;
  std::vector<ad::Parameter*> norm_beta;
  ad::Parameter* align = nullptr;  // [Cout x Cin], only when widths differ
  std::size_t in_channels = 0, out_channels = 0;
};

EdgeBlockParams make_block_params(ad::ParameterStore& store, const std::string& prefix,
                                  std::size_t in_channels, std::size_t out_channels,
                                  std::size_t conv_layers, std::mt19937_64& rng);

/// One edge translation block: identity (1x1-aligned when widths differ) +
/// edge-to-edge convolution + N x [conv2d 3x3 -> instance norm -> ELU],
/// summed elementwise.
ad::Var etp_block(ad::Graph& g, const ad::Var& a, const EdgeBlockParams& p,
                  const std::vector<std::size_t>& dilations, bool normalize_cross = true);

struct EdgePathVars {
  ad::Var logits;      // [B x L x L], symmetrized
  ad::Var pair_probs;  // [L*L x B], row (i*L + j) = softmax over bins
};

/// Plain-value result of the edge path.
struct EdgePathOutput {
  ad::Tensor logits;         // [B x L x L]
  ad::Tensor probabilities;  // [B x L x L]
  ad::Tensor contact_map;    // [L x L], summed probability of the contact labels
};

class EdgePath {
 public:
  EdgePath() = default;
  EdgePath(ad::ParameterStore& store, const EdgePathConfig& config, std::mt19937_64& rng);

  /// input [(2d + K) x L x L]. Throws NonFiniteError naming the block whose
  /// output contains NaN/Inf.
  EdgePathVars forward(ad::Graph& g, const ad::Var& input) const;

  const EdgePathConfig& config() const { return config_; }
  const std::vector<EdgeBlockParams>& blocks() const { return blocks_; }
  ad::Parameter& classifier_weight() const { return *classifier_w_; }
  ad::Parameter& classifier_bias() const { return *classifier_b_; }

 private:
  EdgePathConfig config_;
  ad::Parameter* input_w_ = nullptr;  // [C x Cin]
  ad::Parameter* input_b_ = nullptr;  // [C]
  std::vector<EdgeBlockParams> blocks_;
  ad::Parameter* classifier_w_ = nullptr;  // [B x C]
  ad::Parameter* classifier_b_ = nullptr;  // [B]
};

/// 1x1 convolution: x [Cin x L x L], weight [Cout x Cin] -> [Cout x L x L].
ad::Var pointwise_conv(const ad::Var& x, const ad::Var& weight);

EdgePathOutput to_output(const EdgePathVars& vars, std::size_t contact_labels);

}  // namespace pgnn::edge
