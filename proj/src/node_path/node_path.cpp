#include "pgnn/node_path/node_path.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "pgnn/errors.hpp"

namespace pgnn::node {

namespace {

ad::Tensor pair_mask(const ad::Tensor& probs, std::size_t n, std::size_t width,
                     std::size_t sparsify_topk) {
  ad::Tensor mask({n * n, width}, 1.0);
  std::vector<std::uint8_t> keep(n * n, 1);
  if (sparsify_topk > 0 && sparsify_topk < n - 1) {
    std::vector<std::size_t> order;
    for (std::size_t v = 0; v < n; ++v) {
      order.clear();
      for (std::size_t w = 0; w < n; ++w)
        if (w != v) order.push_back(w);
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return probs(v * n + a, 0) > probs(v * n + b, 0);
      });
      std::fill_n(keep.begin() + static_cast<long>(v * n), n, 0);
      for (std::size_t k = 0; k < sparsify_topk; ++k) keep[v * n + order[k]] = 1;
    }
  }
  for (std::size_t v = 0; v < n; ++v)
    for (std::size_t w = 0; w < n; ++w)
      if (v == w || !keep[v * n + w])
        std::fill_n(mask.data().data() + (v * n + w) * width, width, 0.0);
  return mask;
}

}  // namespace

ad::Var edge_activations(ad::Graph& g, const ad::Var& pair_probs, std::size_t length,
                         const EdgeNetwork& net, std::size_t sparsify_topk) {
  const std::size_t n = length;
  if (pair_probs.shape().size() != 2 || pair_probs.shape()[0] != n * n ||
      pair_probs.shape()[1] != net.w1->value.dim(0))
    throw DimensionError("edge conditioning must be [L*L x B], got " +
                         ad::shape_str(pair_probs.shape()));
  const ad::Var hidden = ad::activation(
      ad::add_row_bias(ad::matmul(pair_probs, g.parameter(*net.w1)), g.parameter(*net.b1)),
      ad::Activation::relu);
  const ad::Var augmented = ad::concat_cols({hidden, g.constant(ad::Tensor({n * n, 1}, 1.0))});
  const ad::Var masked = ad::mul(
      augmented, g.constant(pair_mask(pair_probs.value(), n, net.hidden + 1, sparsify_topk)));
  return ad::reshape(masked, {n, n * (net.hidden + 1)});
}

ad::Var aggregate_messages(ad::Graph& g, const ad::Var& h, const ad::Var& activations,
                           const EdgeNetwork& net) {
  const std::size_t n = h.shape().at(0);
  if (h.shape()[1] != net.state_dim)
    throw DimensionError("hidden state " + ad::shape_str(h.shape()) + " vs edge network width " +
                         std::to_string(net.state_dim));
  const ad::Var projected = ad::reshape(ad::matmul(h, g.parameter(*net.q)),
                                        {n * (net.hidden + 1), net.state_dim});
  return ad::scale(ad::matmul(activations, projected), 1.0 / static_cast<double>(n - 1));
}

ad::Var message_step(ad::Graph& g, const ad::Var& h, const ad::Var& pair_probs,
                     const EdgeNetwork& net, std::size_t sparsify_topk) {
  return aggregate_messages(
      g, h, edge_activations(g, pair_probs, h.shape().at(0), net, sparsify_topk), net);
}

ad::Tensor edge_matrix(const EdgeNetwork& net, std::span<const double> e) {
  const std::size_t bins = net.w1->value.dim(0), hid = net.hidden, d = net.state_dim;
  std::vector<double> u(hid + 1, 1.0);
  for (std::size_t k = 0; k < hid; ++k) {
    double s = net.b1->value[k];
    for (std::size_t b = 0; b < bins; ++b) s += e[b] * net.w1->value(b, k);
    u[k] = std::max(s, 0.0);
  }
  ad::Tensor a({d, d});
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t c = 0; c < d; ++c)
      for (std::size_t k = 0; k <= hid; ++k) a(r, c) += net.q->value(c, k * d + r) * u[k];
  return a;
}

ad::GruParams GruParameters::bind(ad::Graph& g) const {
  return {g.parameter(*w_z), g.parameter(*w_r), g.parameter(*w_n),
          g.parameter(*u_z), g.parameter(*u_r), g.parameter(*u_n),
          g.parameter(*b_z), g.parameter(*b_r), g.parameter(*b_n)};
}

ad::Var node_update(ad::Graph& g, const ad::Var& h, const ad::Var& m, const GruParameters& p) {
  return ad::gru_cell(h, m, p.bind(g));
}

ad::Var readout(ad::Graph& g, const ad::Var& h, const ReadoutParameters& p) {
  const ad::Var hidden = ad::activation(
      ad::add_row_bias(ad::matmul(h, g.parameter(*p.w1)), g.parameter(*p.b1)),
      ad::Activation::relu);
  return ad::add_row_bias(ad::matmul(hidden, g.parameter(*p.w2)), g.parameter(*p.b2));
}

NodePathOutput recover_angles(const ad::Tensor& v) {
  if (v.rank() != 2 || v.dim(1) != 4)
    throw DimensionError("recover_angles expects [L x 4], got " + ad::shape_str(v.shape()));
  const std::size_t n = v.dim(0);
  NodePathOutput out;
  out.v = v;
  out.phi.assign(n, 0.0);
  out.psi.assign(n, 0.0);
  out.phi_defined.assign(n, 1);
  out.psi_defined.assign(n, 1);
  auto angle = [](double s, double c) {
    double deg = std::atan2(s, c) * 180.0 / std::numbers::pi;
    if (deg <= -180.0) deg += 360.0;
    return deg;
  };
  for (std::size_t i = 0; i < n; ++i) {
    if (v(i, 0) == 0.0 && v(i, 1) == 0.0) out.phi_defined[i] = 0;
    else out.phi[i] = angle(v(i, 0), v(i, 1));
    if (v(i, 2) == 0.0 && v(i, 3) == 0.0) out.psi_defined[i] = 0;
    else out.psi[i] = angle(v(i, 2), v(i, 3));
  }
  return out;
}

NodePath::NodePath(ad::ParameterStore& store, const NodePathConfig& config, std::mt19937_64& rng)
    : config_(config) {
  const std::size_t d = config.hidden, hid = config.edge_hidden, r = config.readout_hidden;
  if (d == 0 || hid == 0 || r == 0 || config.bins < 2)
    throw ValidationError("node path needs positive widths and at least two bins");
  h0_ = features::SequenceConv1d(store, "node.h0", config.node_dim, d, rng);

  edge_net_.hidden = hid;
  edge_net_.state_dim = d;
  edge_net_.w1 = &store.add("node.edge_net.w1",
                            ad::xavier_uniform({config.bins, hid}, config.bins, hid, rng));
  edge_net_.b1 = &store.add("node.edge_net.b1", ad::Tensor({hid}));
  edge_net_.q = &store.add("node.edge_net.q",
                           ad::xavier_uniform({d, (hid + 1) * d}, (hid + 1) * d, d, rng));

  auto square = [&](const char* name) {
    return &store.add(std::string("node.gru.") + name, ad::xavier_uniform({d, d}, d, d, rng));
  };
  auto bias = [&](const char* name) {
    return &store.add(std::string("node.gru.") + name, ad::Tensor({d}));
  };
  gru_.w_z = square("w_z");
  gru_.w_r = square("w_r");
  gru_.w_n = square("w_n");
  gru_.u_z = square("u_z");
  gru_.u_r = square("u_r");
  gru_.u_n = square("u_n");
  gru_.b_z = bias("b_z");
  gru_.b_r = bias("b_r");
  gru_.b_n = bias("b_n");

  readout_.w1 = &store.add("node.readout.w1", ad::xavier_uniform({d, r}, d, r, rng));
  readout_.b1 = &store.add("node.readout.b1", ad::Tensor({r}));
  readout_.w2 = &store.add("node.readout.w2", ad::xavier_uniform({r, 4}, r, 4, rng));
  readout_.b2 = &store.add("node.readout.b2", ad::Tensor({4}));
}

ad::Var NodePath::forward(ad::Graph& g, const ad::Var& node_features,
                          const ad::Var& pair_probs) const {
  const std::size_t n = node_features.shape().at(0);
  ad::Var h = h0_.forward(g, node_features);
  const ad::Var act = edge_activations(g, pair_probs, n, edge_net_, config_.sparsify_topk);
  for (std::size_t t = 0; t < config_.rounds; ++t)
    h = node_update(g, h, aggregate_messages(g, h, act, edge_net_), gru_);
  return readout(g, h, readout_);
}

}  // namespace pgnn::node
