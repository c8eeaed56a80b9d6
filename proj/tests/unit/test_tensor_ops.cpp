#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"

#include "pgnn/autodiff/gradcheck.hpp"
#include "pgnn/autodiff/ops.hpp"
#include "pgnn/errors.hpp"

using namespace pgnn;
using ad::Graph;
using ad::Tensor;
using ad::Var;

TEST_CASE("tensor shape contract") {
  Tensor t({2, 3}, 1.5);
  CHECK(t.size() == 6);
  CHECK(t.rank() == 2);
  CHECK(ad::shape_str(t.shape()) == "[2x3]");
  CHECK_THROWS_AS(Tensor({2, 0}), DimensionError);
  CHECK_THROWS_AS(Tensor({2, 2}, std::vector<double>{1, 2, 3}), DimensionError);
  CHECK_THROWS_AS(t.reshaped({4, 2}), DimensionError);
  CHECK(t.reshaped({3, 2}).shape() == ad::Shape{3, 2});
}

TEST_CASE("channels_first moves the pair axis last to first") {
  Tensor e({2, 2, 3});
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = static_cast<double>(i);
  const Tensor c = ad::channels_first(e);
  CHECK(c.shape() == ad::Shape{3, 2, 2});
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      for (std::size_t k = 0; k < 3; ++k) CHECK(c(k, i, j) == e(i, j, k));
}

TEST_CASE("matmul closed forms and shape errors") {
  Graph g;
  const Var eye = g.constant(Tensor::matrix({{1, 0}, {0, 1}}));
  const Var m = g.constant(Tensor::matrix({{1, 2}, {3, 4}}));
  CHECK(ad::matmul(eye, m).value() == m.value());
  const Var r = ad::matmul(g.constant(Tensor::matrix({{1, 2}})), g.constant(Tensor::matrix({{3}, {4}})));
  CHECK(r.value().item() == 11.0);
  try {
    ad::matmul(m, g.constant(Tensor({3, 2})));
    FAIL("expected a dimension error");
  } catch (const DimensionError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("[2x2]") != std::string::npos);
    CHECK(msg.find("[3x2]") != std::string::npos);
  }
}

TEST_CASE("matmul gradient against finite differences") {
  Graph g;
  const Var a = g.input(Tensor::matrix({{1, 1}, {1, 1}}));
  const Var b = g.constant(Tensor::matrix({{2, 0}, {0, 2}}));
  g.backward(ad::sum(ad::matmul(a, b)));
  CHECK(a.grad() == Tensor::matrix({{2, 2}, {2, 2}}));
  const auto report = ad::finite_diff_check(
      [](Graph&, const std::vector<Var>& x) { return ad::sum(ad::matmul(x[0], x[1])); },
      {Tensor::matrix({{1, 1}, {1, 1}}), Tensor::matrix({{2, 0}, {0, 2}})}, 1e-6, 1e-9);
  CHECK(report.passed);
}

TEST_CASE("activation closed forms") {
  Graph g;
  CHECK(ad::activation(g.constant(Tensor::scalar(-1.0)), ad::Activation::elu).value().item() ==
        doctest::Approx(std::exp(-1.0) - 1.0).epsilon(1e-15));
  const Tensor r = ad::activation(g.constant(Tensor({3}, {-2, 0, 3})), ad::Activation::relu).value();
  CHECK(r == Tensor({3}, {0, 0, 3}));
  CHECK(ad::parse_activation("tanh") == ad::Activation::tanh);
  CHECK_THROWS_AS(ad::parse_activation("swish"), ValidationError);
}

TEST_CASE("activation gradients for all kinds at the listed points") {
  const Tensor x({4}, {-1.5, -0.1, 0.1, 2.0});
  for (auto kind : {ad::Activation::elu, ad::Activation::relu, ad::Activation::sigmoid,
                    ad::Activation::tanh}) {
    CAPTURE(ad::to_string(kind));
    const auto r = ad::finite_diff_check(
        [kind](Graph&, const std::vector<Var>& v) { return ad::sum(ad::activation(v[0], kind)); },
        {x}, 1e-6, 1e-10);
    CHECK(r.passed);
  }
}

TEST_CASE("instance norm closed forms and gradient") {
  Graph g;
  const Var one = g.constant(Tensor({1}, 1.0)), zero = g.constant(Tensor({1}, 0.0));
  const Tensor flat = ad::instance_norm(g.constant(Tensor({1, 3, 3}, 4.2)), one, zero).value();
  for (double v : flat.data()) CHECK(v == 0.0);

  std::mt19937_64 rng(1);
  const Tensor x = oracle::random_tensor({2, 4, 4}, rng);
  const Tensor five = ad::instance_norm(g.constant(x), g.constant(Tensor({2}, 0.0)),
                                        g.constant(Tensor({2}, 5.0)))
                          .value();
  for (double v : five.data()) CHECK(v == 5.0);

  const auto r = ad::finite_diff_check(
      [](Graph& gg, const std::vector<Var>& v) {
        std::mt19937_64 w(9);
        return ad::sum(ad::mul(ad::instance_norm(v[0], gg.constant(Tensor({2}, {1.3, -0.7})),
                                                 gg.constant(Tensor({2}, {0.2, 0.1}))),
                               gg.constant(oracle::random_tensor({2, 4, 4}, w))));
      },
      {x}, 1e-4, 1e-9);
  CHECK(r.passed);
}

TEST_CASE("softmax cross entropy closed forms and errors") {
  Graph g;
  const std::vector<int> labels{0, 1, 1};
  const std::vector<std::uint8_t> mask{1, 1, 1};
  Tensor perfect({3, 2});
  for (std::size_t p = 0; p < 3; ++p) perfect(p, static_cast<std::size_t>(labels[p])) = 100.0;
  CHECK(ad::softmax_cross_entropy(g.constant(perfect), labels, mask).value().item() < 1e-6);
  CHECK(ad::softmax_cross_entropy(g.constant(Tensor({3, 2})), labels, mask).value().item() ==
        doctest::Approx(std::log(2.0)).epsilon(1e-15));
  const std::vector<std::uint8_t> none{0, 0, 0};
  CHECK_THROWS_AS(ad::softmax_cross_entropy(g.constant(perfect), labels, none), EmptyLossError);
  const std::vector<int> bad{0, 2, 1};
  CHECK_THROWS(ad::softmax_cross_entropy(g.constant(perfect), bad, mask));
}

TEST_CASE("softmax cross entropy gradient on random 3x3x4 logits") {
  std::mt19937_64 rng(4);
  const Tensor logits = oracle::random_tensor({9, 4}, rng, -2, 2);
  std::vector<int> labels(9);
  std::vector<std::uint8_t> mask(9, 1);
  for (auto& l : labels) l = static_cast<int>(rng() % 4);
  mask[4] = 0;
  const auto r = ad::finite_diff_check(
      [&](Graph&, const std::vector<Var>& v) {
        return ad::softmax_cross_entropy(v[0], labels, mask);
      },
      {logits}, 1e-5, 1e-10);
  CHECK(r.passed);

  // masked row gets no gradient
  Graph g;
  const Var x = g.input(logits);
  g.backward(ad::softmax_cross_entropy(x, labels, mask));
  for (std::size_t b = 0; b < 4; ++b) CHECK(x.grad()(4, b) == 0.0);
}

TEST_CASE("gru cell closed forms") {
  Graph g;
  std::mt19937_64 rng(2);
  const Tensor h = oracle::random_tensor({2, 3}, rng);
  const Tensor m = oracle::random_tensor({2, 3}, rng);
  auto zeros = [&](ad::Shape s) { return g.constant(Tensor(std::move(s))); };
  const ad::GruParams zero{zeros({3, 3}), zeros({3, 3}), zeros({3, 3}), zeros({3, 3}), zeros({3, 3}),
                           zeros({3, 3}), zeros({3}),    zeros({3}),    zeros({3})};
  const Tensor half = ad::gru_cell(g.constant(h), g.constant(m), zero).value();
  for (std::size_t i = 0; i < h.size(); ++i) CHECK(half[i] == doctest::Approx(0.5 * h[i]).epsilon(1e-15));

  ad::GruParams carry = zero;
  carry.b_z = g.constant(Tensor({3}, 40.0));
  const Tensor kept = ad::gru_cell(g.constant(h), g.constant(Tensor({2, 3})), carry).value();
  CHECK(oracle::max_abs_diff(kept, h) < 1e-12);

  ad::GruParams bad = zero;
  bad.w_z = zeros({2, 3});
  CHECK_THROWS_AS(ad::gru_cell(g.constant(h), g.constant(m), bad), DimensionError);
}

TEST_CASE("gru cell gradients on a random 2x3 instance") {
  std::mt19937_64 rng(8);
  std::vector<Tensor> xs{oracle::random_tensor({2, 3}, rng), oracle::random_tensor({2, 3}, rng)};
  for (int k = 0; k < 6; ++k) xs.push_back(oracle::random_tensor({3, 3}, rng));
  for (int k = 0; k < 3; ++k) xs.push_back(oracle::random_tensor({3}, rng));
  const auto r = ad::finite_diff_check(
      [](Graph&, const std::vector<Var>& x) {
        return ad::sum(ad::gru_cell(x[0], x[1], {x[2], x[3], x[4], x[5], x[6], x[7], x[8], x[9], x[10]}));
      },
      xs, 1e-4, 1e-10);
  CHECK(r.passed);
}

TEST_CASE("structural ops") {
  Graph g;
  Tensor cube({2, 2, 3});
  for (std::size_t i = 0; i < cube.size(); ++i) cube[i] = static_cast<double>(i);
  CHECK_THROWS_AS(ad::transpose_last2(g.constant(cube)), DimensionError);

  const Tensor sq = Tensor({1, 2, 2}, {1, 2, 3, 4});
  CHECK(ad::transpose_last2(g.constant(sq)).value() == Tensor({1, 2, 2}, {1, 3, 2, 4}));
  CHECK(ad::sum_over_cols(g.constant(sq)).value() == Tensor({1, 2}, {3, 7}));
  CHECK(ad::sum_over_rows(g.constant(sq)).value() == Tensor({1, 2}, {4, 6}));
  CHECK(ad::expand_rows(g.constant(Tensor({1, 2}, {5, 6}))).value() == Tensor({1, 2, 2}, {5, 5, 6, 6}));
  CHECK(ad::expand_cols(g.constant(Tensor({1, 2}, {5, 6}))).value() == Tensor({1, 2, 2}, {5, 6, 5, 6}));
  CHECK(ad::shift_rows(g.constant(Tensor::matrix({{1}, {2}, {3}})), 1).value() ==
        Tensor::matrix({{2}, {3}, {0}}));
  CHECK(ad::shift_rows(g.constant(Tensor::matrix({{1}, {2}, {3}})), -1).value() ==
        Tensor::matrix({{0}, {1}, {2}}));
  CHECK(ad::concat_cols({g.constant(Tensor::matrix({{1}, {2}})), g.constant(Tensor::matrix({{3, 4}, {5, 6}}))})
            .value() == Tensor::matrix({{1, 3, 4}, {2, 5, 6}}));
  CHECK(ad::concat0({g.constant(sq), g.constant(sq)}).value().shape() == ad::Shape{2, 2, 2});
  const Tensor sm = ad::softmax_rows(g.constant(Tensor::matrix({{0, 0}, {1, 1}}))).value();
  for (double v : sm.data()) CHECK(v == 0.5);
}

TEST_CASE("forward results are bitwise deterministic") {
  std::mt19937_64 rng(5);
  const Tensor a = oracle::random_tensor({4, 6}, rng), b = oracle::random_tensor({6, 3}, rng);
  auto run = [&] {
    Graph g;
    return ad::activation(ad::matmul(g.constant(a), g.constant(b)), ad::Activation::elu).value();
  };
  CHECK(run() == run());
}

TEST_CASE("every differentiable op passes the checker at five seeds") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    CAPTURE(seed);
    std::mt19937_64 rng(seed);
    const Tensor a = oracle::random_tensor({3, 4}, rng), b = oracle::random_tensor({3, 4}, rng);
    const Tensor cube = oracle::random_tensor({2, 3, 3}, rng);
    std::mt19937_64 wrng(seed + 100);
    const Tensor w34 = oracle::random_tensor({3, 4}, wrng), w233 = oracle::random_tensor({2, 3, 3}, wrng);
    auto proj = [](Graph& g, const Var& v, const Tensor& w) { return ad::sum(ad::mul(v, g.constant(w))); };
    const double rtol = 1e-3, atol = 1e-6;
    CHECK(ad::finite_diff_check([&](Graph& g, const std::vector<Var>& x) { return proj(g, ad::mul(x[0], x[1]), w34); }, {a, b}, rtol, atol).passed);
    CHECK(ad::finite_diff_check([&](Graph& g, const std::vector<Var>& x) { return proj(g, ad::sub(x[0], x[1]), w34); }, {a, b}, rtol, atol).passed);
    CHECK(ad::finite_diff_check([&](Graph&, const std::vector<Var>& x) { return ad::mean(ad::mul(x[0], x[0])); }, {a}, rtol, atol).passed);
    CHECK(ad::finite_diff_check([&](Graph& g, const std::vector<Var>& x) { return proj(g, ad::transpose_last2(x[0]), w233); }, {cube}, rtol, atol).passed);
    CHECK(ad::finite_diff_check([&](Graph& g, const std::vector<Var>& x) { return proj(g, ad::softmax_rows(x[0]), w34); }, {a}, rtol, atol).passed);
    CHECK(ad::finite_diff_check([&](Graph& g, const std::vector<Var>& x) { return proj(g, ad::conv2d(x[0], x[1], 1 + seed % 2), w233); },
                                {cube, oracle::random_tensor({2, 2, 3, 3}, rng)}, rtol, atol).passed);
    CHECK(ad::finite_diff_check([&](Graph& g, const std::vector<Var>& x) {
            return proj(g, ad::instance_norm(x[0], x[1], x[2]), w233);
          }, {cube, oracle::random_tensor({2}, rng), oracle::random_tensor({2}, rng)}, rtol, atol).passed);
    for (auto kind : {ad::Activation::elu, ad::Activation::sigmoid, ad::Activation::tanh})
      CHECK(ad::finite_diff_check([&](Graph& g, const std::vector<Var>& x) { return proj(g, ad::activation(x[0], kind), w34); }, {a}, rtol, atol).passed);
  }
}
