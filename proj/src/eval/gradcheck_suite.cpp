#include "pgnn/eval/gradcheck_suite.hpp"

#include <chrono>
#include <functional>
#include <random>

#include "pgnn/autodiff/ops.hpp"
#include "pgnn/edge_path/edge_path.hpp"
#include "pgnn/featurize/pairwise.hpp"
#include "pgnn/node_path/node_path.hpp"
#include "pgnn/protein/synthetic.hpp"
#include "pgnn/training/losses.hpp"
#include "pgnn/training/model.hpp"
#include "pgnn/training/trainer.hpp"

namespace pgnn::eval {

namespace {

using ad::Graph;
using ad::Shape;
using ad::Tensor;
using ad::Var;

Tensor random_tensor(const Shape& shape, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Tensor t(shape);
  for (auto& v : t.data()) v = u(rng);
  return t;
}

// Fixed random weighting that turns any output into a scalar with a
// nontrivial gradient everywhere.
Var project(Graph& g, const Var& out) {
  std::mt19937_64 rng(out.size() * 7919 + out.shape().size());
  return ad::sum(ad::mul(out, g.constant(random_tensor(out.shape(), rng))));
}

class Suite {
 public:
  explicit Suite(std::uint64_t seed) : rng_(seed) {}

  Tensor rand(const Shape& s, double lo = -1.0, double hi = 1.0) {
    return random_tensor(s, rng_, lo, hi);
  }
  std::mt19937_64& rng() { return rng_; }

  void inputs(const std::string& name, const std::vector<Tensor>& xs,
              const std::function<Var(Graph&, const std::vector<Var>&)>& f) {
    run(name, [&] {
      return ad::finite_diff_check(f, xs, kGradcheckRtol, kGradcheckAtol, kGradcheckStep);
    });
  }

  void params(const std::string& name, ad::ParameterStore& store,
              const std::function<Var(Graph&)>& f) {
    run(name, [&] {
      return ad::finite_diff_check_parameters(f, store, kGradcheckRtol, kGradcheckAtol,
                                              kGradcheckStep);
    });
  }

  GradcheckSuiteResult take() { return std::move(result_); }

 private:
  void run(const std::string& name, const std::function<ad::GradCheckReport()>& check) {
    const auto start = std::chrono::steady_clock::now();
    GradcheckCase c;
    c.name = name;
    c.report = check();
    c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result_.passed = result_.passed && c.report.passed;
    result_.max_rel_error = std::max(result_.max_rel_error, c.report.max_rel_error);
    result_.cases.push_back(std::move(c));
  }

  std::mt19937_64 rng_;
  GradcheckSuiteResult result_;
};

void elementwise_ops(Suite& s) {
  const Tensor a = s.rand({3, 4}), b = s.rand({3, 4});
  s.inputs("add", {a, b}, [](Graph& g, auto& x) { return project(g, ad::add(x[0], x[1])); });
  s.inputs("sub", {a, b}, [](Graph& g, auto& x) { return project(g, ad::sub(x[0], x[1])); });
  s.inputs("mul", {a, b}, [](Graph& g, auto& x) { return project(g, ad::mul(x[0], x[1])); });
  s.inputs("scale", {a}, [](Graph& g, auto& x) { return project(g, ad::scale(x[0], -1.7)); });
  s.inputs("sum", {a}, [](Graph&, auto& x) { return ad::sum(x[0]); });
  s.inputs("mean", {a}, [](Graph&, auto& x) { return ad::mean(x[0]); });
  s.inputs("matmul", {a, s.rand({4, 2})},
           [](Graph& g, auto& x) { return project(g, ad::matmul(x[0], x[1])); });
  s.inputs("transpose", {a}, [](Graph& g, auto& x) { return project(g, ad::transpose(x[0])); });
  s.inputs("transpose_last2", {s.rand({2, 3, 3})},
           [](Graph& g, auto& x) { return project(g, ad::transpose_last2(x[0])); });
  s.inputs("reshape", {a}, [](Graph& g, auto& x) { return project(g, ad::reshape(x[0], {2, 6})); });
  s.inputs("add_row_bias", {a, s.rand({4})},
           [](Graph& g, auto& x) { return project(g, ad::add_row_bias(x[0], x[1])); });
  s.inputs("add_channel_bias", {s.rand({2, 3, 3}), s.rand({2})},
           [](Graph& g, auto& x) { return project(g, ad::add_channel_bias(x[0], x[1])); });
  for (auto kind : {ad::Activation::elu, ad::Activation::relu, ad::Activation::sigmoid,
                    ad::Activation::tanh}) {
    s.inputs("activation_" + ad::to_string(kind), {s.rand({3, 5}, -2.0, 2.0)},
             [kind](Graph& g, auto& x) { return project(g, ad::activation(x[0], kind)); });
  }
}

void structural_ops(Suite& s) {
  for (std::size_t dil : {1u, 2u}) {
    s.inputs("conv2d_dilation" + std::to_string(dil), {s.rand({2, 5, 5}), s.rand({3, 2, 3, 3})},
             [dil](Graph& g, auto& x) { return project(g, ad::conv2d(x[0], x[1], dil)); });
  }
  s.inputs("instance_norm", {s.rand({2, 4, 4}), s.rand({2}), s.rand({2})},
           [](Graph& g, auto& x) { return project(g, ad::instance_norm(x[0], x[1], x[2])); });
  {
    std::vector<int> labels{0, 2, 1, 1, 0, 2};
    std::vector<std::uint8_t> mask{1, 1, 0, 1, 1, 1};
    s.inputs("softmax_cross_entropy", {s.rand({6, 3}, -3.0, 3.0)},
             [labels, mask](Graph&, auto& x) {
               return ad::softmax_cross_entropy(x[0], labels, mask);
             });
  }
  s.inputs("softmax_rows", {s.rand({4, 3}, -2.0, 2.0)},
           [](Graph& g, auto& x) { return project(g, ad::softmax_rows(x[0])); });
  const Tensor cube = s.rand({2, 3, 3});
  s.inputs("sum_over_cols", {cube},
           [](Graph& g, auto& x) { return project(g, ad::sum_over_cols(x[0])); });
  s.inputs("sum_over_rows", {cube},
           [](Graph& g, auto& x) { return project(g, ad::sum_over_rows(x[0])); });
  s.inputs("expand_rows", {s.rand({2, 3})},
           [](Graph& g, auto& x) { return project(g, ad::expand_rows(x[0])); });
  s.inputs("expand_cols", {s.rand({2, 3})},
           [](Graph& g, auto& x) { return project(g, ad::expand_cols(x[0])); });
  s.inputs("concat0", {cube, s.rand({1, 3, 3})},
           [](Graph& g, auto& x) { return project(g, ad::concat0({x[0], x[1]})); });
  s.inputs("concat_cols", {s.rand({3, 2}), s.rand({3, 4})},
           [](Graph& g, auto& x) { return project(g, ad::concat_cols({x[0], x[1]})); });
  for (int off : {-1, 1}) {
    s.inputs("shift_rows" + std::string(off < 0 ? "_minus1" : "_plus1"), {s.rand({4, 3})},
             [off](Graph& g, auto& x) { return project(g, ad::shift_rows(x[0], off)); });
  }
  {
    std::vector<Tensor> xs{s.rand({4, 3}), s.rand({4, 3})};
    for (int k = 0; k < 6; ++k) xs.push_back(s.rand({3, 3}));
    for (int k = 0; k < 3; ++k) xs.push_back(s.rand({3}));
    s.inputs("gru_cell", xs, [](Graph& g, auto& x) {
      return project(g, ad::gru_cell(x[0], x[1], {x[2], x[3], x[4], x[5], x[6], x[7], x[8], x[9],
                                                  x[10]}));
    });
  }
}

void layers(Suite& s) {
  for (bool normalize : {true, false}) {
    s.inputs(std::string("edge_to_edge_conv") + (normalize ? "" : "_unnormalized"),
             {s.rand({2, 4, 4}), s.rand({3, 2}), s.rand({3, 2})}, [normalize](Graph& g, auto& x) {
               return project(g, edge::edge_to_edge_conv(x[0], x[1], x[2], normalize));
             });
  }
  {
    ad::ParameterStore store;
    const auto p = edge::make_block_params(store, "blk", 2, 3, 2, s.rng());
    const Tensor a = s.rand({2, 5, 5});
    const std::vector<std::size_t> dil{1, 2};
    s.params("etp_block", store, [&](Graph& g) {
      return project(g, edge::etp_block(g, g.constant(a), p, dil));
    });
    s.inputs("etp_block_input", {a}, [&](Graph& g, auto& x) {
      return project(g, edge::etp_block(g, x[0], p, dil));
    });
  }
  {
    ad::ParameterStore store;
    features::SequenceConv1d conv(store, "seq", 3, 2, s.rng());
    const Tensor f = s.rand({5, 3});
    s.params("sequence_conv1d", store,
             [&](Graph& g) { return project(g, conv.forward(g, g.constant(f))); });
    s.inputs("pairwise_input", {f}, [&](Graph& g, auto& x) {
      return project(g, features::build_pairwise_input(g, x[0], std::nullopt, conv));
    });
  }
  {
    node::NodePathConfig cfg;
    cfg.node_dim = 3;
    cfg.hidden = 3;
    cfg.edge_hidden = 4;
    cfg.readout_hidden = 4;
    cfg.rounds = 1;
    cfg.bins = 3;
    ad::ParameterStore store;
    node::NodePath path(store, cfg, s.rng());
    const std::size_t n = 4;
    const Tensor h = s.rand({n, cfg.hidden});
    Tensor probs = s.rand({n * n, cfg.bins}, 0.05, 1.0);
    s.params("message_step", store, [&](Graph& g) {
      return project(g, node::message_step(g, g.constant(h), g.constant(probs), path.edge_network()));
    });
    s.inputs("message_step_inputs", {h, probs}, [&](Graph& g, auto& x) {
      return project(g, node::message_step(g, x[0], x[1], path.edge_network()));
    });
    s.params("readout", store, [&](Graph& g) {
      return project(g, node::readout(g, g.constant(h), path.readout_parameters()));
    });
  }
  {
    const std::size_t n = 4;
    std::mt19937_64 rng(3);
    std::vector<int> labels(n * n);
    std::vector<std::uint8_t> mask(n * n, 1);
    for (auto& l : labels) l = static_cast<int>(rng() % 2);
    mask[3] = 0;
    s.inputs("edge_loss", {s.rand({2, n, n}, -2.0, 2.0)}, [&](Graph&, auto& x) {
      return training::edge_loss(x[0], labels, mask);
    });
    std::vector<double> phi{10, -60, 150, -170}, psi{-40, 130, 20, 0};
    std::vector<std::uint8_t> phi_mask{0, 1, 1, 1}, psi_mask{1, 1, 1, 0};
    s.inputs("node_loss", {s.rand({n, 4})}, [&](Graph&, auto& x) {
      return training::node_loss(x[0], phi, psi, phi_mask, psi_mask);
    });
  }
}

void full_models(Suite& s) {
  {
    node::NodePathConfig cfg;
    cfg.node_dim = 4;
    cfg.hidden = 4;
    cfg.edge_hidden = 4;
    cfg.readout_hidden = 4;
    cfg.rounds = 6;
    cfg.bins = 2;
    ad::ParameterStore store;
    node::NodePath path(store, cfg, s.rng());
    const std::size_t n = 5;
    const Tensor f = s.rand({n, cfg.node_dim});
    Tensor probs = s.rand({n * n, 2}, 0.05, 1.0);
    s.params("node_path_six_rounds", store, [&](Graph& g) {
      return ad::sum(path.forward(g, g.constant(f), g.constant(probs)));
    });
  }
  {
    training::TrainingConfig cfg;
    cfg.channels = 8;
    cfg.pair_dim = 8;
    cfg.hidden_dim = 8;
    cfg.edge_hidden = 8;
    cfg.readout_hidden = 8;
    cfg.bin_boundaries = {8.0};
    cfg.node_dim = features::kOneHotWidth;
    cfg.edge_dim = 0;
    cfg.seed = 11;
    training::PgGnnModel model(cfg);
    std::mt19937_64 rng(5);
    const auto rec = protein::synthetic_protein("gradcheck", 6, rng);
    const training::Example ex = training::make_example(rec, cfg, features::FeatureSources{});
    s.params("joint_model", model.parameters(), [&](Graph& g) {
      const auto vars = model.forward(g, ex.input);
      const auto& t = ex.target;
      return training::total_loss(
          training::edge_loss(vars.edge.logits, t.bin_labels, t.contact_mask),
          training::node_loss(vars.v, t.phi, t.psi, t.phi_mask, t.psi_mask), cfg.lambda);
    });
  }
}

}  // namespace

GradcheckSuiteResult run_gradcheck_suite(bool full, std::uint64_t seed) {
  Suite s(seed);
  elementwise_ops(s);
  structural_ops(s);
  layers(s);
  if (full) full_models(s);
  return s.take();
}

}  // namespace pgnn::eval
