#include "pgnn/edge_path/edge_path.hpp"

#include "pgnn/autodiff/ops.hpp"
#include "pgnn/errors.hpp"

namespace pgnn::edge {

ad::Var pointwise_conv(const ad::Var& x, const ad::Var& weight) {
  const auto& s = x.shape();
  if (s.size() != 3) throw DimensionError("pointwise_conv: expected [C x L x L], got " + ad::shape_str(s));
  const ad::Var flat = ad::reshape(x, {s[0], s[1] * s[2]});
  return ad::reshape(ad::matmul(weight, flat), {weight.shape()[0], s[1], s[2]});
}

ad::Var edge_to_edge_conv(const ad::Var& a, const ad::Var& w_row, const ad::Var& w_col,
                          bool normalize, bool apply_elu) {
  const auto& s = a.shape();
  if (s.size() != 3 || s[1] != s[2])
    throw DimensionError("edge_to_edge_conv: expected [C x L x L], got " + ad::shape_str(s));
  if (w_row.shape() != w_col.shape() || w_row.shape().size() != 2 || w_row.shape()[1] != s[0])
    throw DimensionError("edge_to_edge_conv: kernels " + ad::shape_str(w_row.shape()) + " and " +
                         ad::shape_str(w_col.shape()) + " for input " + ad::shape_str(s));
  ad::Var rows = ad::sum_over_cols(a);  // [Cin x L], row i summed over n
  ad::Var cols = ad::sum_over_rows(a);  // [Cin x L], column j summed over n
  if (normalize) {
    const double inv = 1.0 / static_cast<double>(s[1]);
    rows = ad::scale(rows, inv);
    cols = ad::scale(cols, inv);
  }
  const ad::Var out = ad::add(ad::expand_rows(ad::matmul(w_row, rows)),
                              ad::expand_cols(ad::matmul(w_col, cols)));
  return apply_elu ? ad::activation(out, ad::Activation::elu) : out;
}

EdgeBlockParams make_block_params(ad::ParameterStore& store, const std::string& prefix,
                                  std::size_t in_channels, std::size_t out_channels,
                                  std::size_t conv_layers, std::mt19937_64& rng) {
  EdgeBlockParams p;
  p.in_channels = in_channels;
  p.out_channels = out_channels;
  p.e2e_row = &store.add(prefix + ".e2e.row", ad::xavier_uniform({out_channels, in_channels},
                                                                 in_channels, out_channels, rng));
  p.e2e_col = &store.add(prefix + ".e2e.col", ad::xavier_uniform({out_channels, in_channels},
                                                                 in_channels, out_channels, rng));
  for (std::size_t l = 0; l < conv_layers; ++l) {
    const std::size_t cin = l == 0 ? in_channels : out_channels;
    const std::string name = prefix + ".conv" + std::to_string(l);
    p.conv_kernels.push_back(&store.add(
        name + ".kernel",
        ad::xavier_uniform({out_channels, cin, 3, 3}, cin * 9, out_channels * 9, rng)));
    p.norm_gamma.push_back(&store.add(name + ".gamma", ad::Tensor({out_channels}, 1.0)));
    p.norm_beta.push_back(&store.add(name + ".beta", ad::Tensor({out_channels})));
  }
  if (in_channels != out_channels)
    p.align = &store.add(prefix + ".align", ad::xavier_uniform({out_channels, in_channels},
                                                               in_channels, out_channels, rng));
  return p;
}

ad::Var etp_block(ad::Graph& g, const ad::Var& a, const EdgeBlockParams& p,
                  const std::vector<std::size_t>& dilations, bool normalize_cross) {
  if (a.shape().size() != 3 || a.shape()[0] != p.in_channels)
    throw DimensionError("etp_block: expected " + std::to_string(p.in_channels) +
                         " input channels, got " + ad::shape_str(a.shape()));
  const ad::Var identity = p.align ? pointwise_conv(a, g.parameter(*p.align)) : a;
  const ad::Var cross =
      edge_to_edge_conv(a, g.parameter(*p.e2e_row), g.parameter(*p.e2e_col), normalize_cross);
  ad::Var local = a;
  for (std::size_t l = 0; l < p.conv_kernels.size(); ++l) {
    const std::size_t dil = dilations.empty() ? 1 : dilations[l % dilations.size()];
    local = ad::conv2d(local, g.parameter(*p.conv_kernels[l]), dil);
    local = ad::instance_norm(local, g.parameter(*p.norm_gamma[l]), g.parameter(*p.norm_beta[l]));
    local = ad::activation(local, ad::Activation::elu);
  }
  return ad::add(ad::add(identity, cross), local);
}

EdgePath::EdgePath(ad::ParameterStore& store, const EdgePathConfig& config, std::mt19937_64& rng)
    : config_(config) {
  if (config.in_channels == 0 || config.channels == 0 || config.bins < 2)
    throw ValidationError("edge path needs positive widths and at least two bins");
  const std::size_t c = config.channels;
  input_w_ = &store.add("edge.input.weight",
                        ad::xavier_uniform({c, config.in_channels}, config.in_channels, c, rng));
  input_b_ = &store.add("edge.input.bias", ad::Tensor({c}));
  for (std::size_t s = 0; s < config.blocks; ++s)
    blocks_.push_back(make_block_params(store, "edge.block" + std::to_string(s), c, c,
                                        config.conv_layers, rng));
  classifier_w_ = &store.add("edge.classifier.weight",
                             ad::xavier_uniform({config.bins, c}, c, config.bins, rng));
  classifier_b_ = &store.add("edge.classifier.bias", ad::Tensor({config.bins}));
}

EdgePathVars EdgePath::forward(ad::Graph& g, const ad::Var& input) const {
  const auto& s = input.shape();
  if (s.size() != 3 || s[0] != config_.in_channels || s[1] != s[2])
    throw DimensionError("edge path expects [" + std::to_string(config_.in_channels) +
                         " x L x L] input, got " + ad::shape_str(s));
  const std::size_t n = s[1];
  ad::Var x = ad::add_channel_bias(pointwise_conv(input, g.parameter(*input_w_)),
                                   g.parameter(*input_b_));
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    x = etp_block(g, x, blocks_[b], config_.dilations, config_.normalize_cross);
    if (!x.value().all_finite())
      throw NonFiniteError("edge path block " + std::to_string(b) +
                           " produced non-finite activations");
  }
  const ad::Var raw = ad::add_channel_bias(pointwise_conv(x, g.parameter(*classifier_w_)),
                                           g.parameter(*classifier_b_));
  EdgePathVars out;
  out.logits = ad::scale(ad::add(raw, ad::transpose_last2(raw)), 0.5);
  const ad::Var pairs = ad::transpose(ad::reshape(out.logits, {config_.bins, n * n}));
  out.pair_probs = ad::softmax_rows(pairs);
  return out;
}

EdgePathOutput to_output(const EdgePathVars& vars, std::size_t contact_labels) {
  EdgePathOutput out;
  out.logits = vars.logits.value();
  const std::size_t bins = out.logits.dim(0), n = out.logits.dim(1);
  const ad::Tensor& p = vars.pair_probs.value();
  out.probabilities = ad::Tensor({bins, n, n});
  out.contact_map = ad::Tensor({n, n});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t b = 0; b < bins; ++b) {
        const double v = p(i * n + j, b);
        out.probabilities(b, i, j) = v;
        if (b < contact_labels) out.contact_map(i, j) += v;
      }
  return out;
}

}  // namespace pgnn::edge
