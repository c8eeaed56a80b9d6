#include "pgnn/featurize/pairwise.hpp"

#include "pgnn/autodiff/ops.hpp"
#include "pgnn/errors.hpp"

namespace pgnn::features {

SequenceConv1d::SequenceConv1d(ad::ParameterStore& store, const std::string& prefix,
                               std::size_t in_dim, std::size_t out_dim, std::mt19937_64& rng)
    : in_dim_(in_dim), out_dim_(out_dim) {
  kernel_ = &store.add(prefix + ".kernel",
                       ad::xavier_uniform({3 * in_dim, out_dim}, 3 * in_dim, out_dim, rng));
  bias_ = &store.add(prefix + ".bias", ad::Tensor({out_dim}));
}

ad::Var SequenceConv1d::forward(ad::Graph& g, const ad::Var& x) const {
  if (x.shape().size() != 2 || x.shape()[1] != in_dim_)
    throw DimensionError("sequence conv expects [L x " + std::to_string(in_dim_) + "], got " +
                         ad::shape_str(x.shape()));
  const ad::Var window = ad::concat_cols({ad::shift_rows(x, -1), x, ad::shift_rows(x, 1)});
  return ad::add_row_bias(ad::matmul(window, g.parameter(*kernel_)), g.parameter(*bias_));
}

ad::Var build_pairwise_input(ad::Graph& g, const ad::Var& node_features,
                             const std::optional<ad::Tensor>& edge_features,
                             const SequenceConv1d& transform) {
  const std::size_t n = node_features.shape().at(0);
  const ad::Var t = ad::transpose(transform.forward(g, node_features));  // [d x L]
  std::vector<ad::Var> parts{ad::expand_rows(t), ad::expand_cols(t)};
  if (edge_features) {
    if (edge_features->rank() != 3 || edge_features->dim(0) != n || edge_features->dim(1) != n)
      throw AlignmentError("edge features " + ad::shape_str(edge_features->shape()) +
                           " do not match L = " + std::to_string(n));
    parts.push_back(g.constant(ad::channels_first(*edge_features)));
  }
  return ad::concat0(parts);
}

}  // namespace pgnn::features
