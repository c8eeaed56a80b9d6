#pragma once

#include <optional>
#include <random>
#include <string>

#include "pgnn/autodiff/graph.hpp"
#include "pgnn/autodiff/parameters.hpp"

namespace pgnn::features {

/// Learned window-3 convolution along the sequence, same padding:
/// out[i] = F[i-1] W_prev + F[i] W_centre + F[i+1] W_next + b.
/// The kernel is stored as one [3D x d] matrix (prev, centre, next blocks).
class SequenceConv1d {
 public:
  SequenceConv1d() = default;
  SequenceConv1d(ad::ParameterStore& store, const std::string& prefix, std::size_t in_dim,
                 std::size_t out_dim, std::mt19937_64& rng);

  ad::Var forward(ad::Graph& g, const ad::Var& x) const;

  std::size_t in_dim() const { return in_dim_; }
  std::size_t out_dim() const { return out_dim_; }
  ad::Parameter& kernel() const { return *kernel_; }
  ad::Parameter& bias() const { return *bias_; }

 private:
  ad::Parameter* kernel_ = nullptr;
  ad::Parameter* bias_ = nullptr;
  std::size_t in_dim_ = 0, out_dim_ = 0;
};

/// Pairwise input map [(2d + K) x L x L]: channels [0, d) hold T_i, [d, 2d)
/// hold T_j and the last K hold E[i][j], where T = transform(F).
/// edge_features, when present, are [L x L x K].
ad::Var build_pairwise_input(ad::Graph& g, const ad::Var& node_features,
                             const std::optional<ad::Tensor>& edge_features,
                             const SequenceConv1d& transform);

}  // namespace pgnn::features
