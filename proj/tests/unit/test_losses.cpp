#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "oracles.hpp"

#include "pgnn/autodiff/gradcheck.hpp"
#include "pgnn/autodiff/ops.hpp"
#include "pgnn/errors.hpp"
#include "pgnn/training/losses.hpp"

using namespace pgnn;
using ad::Tensor;

namespace {

double rad(double deg) { return deg * std::numbers::pi / 180.0; }

}  // namespace

TEST_CASE("edge loss closed forms") {
  const std::size_t n = 3;
  std::vector<int> labels(n * n);
  std::vector<std::uint8_t> mask(n * n, 1);
  Tensor logits({2, n, n});
  for (std::size_t i = 0; i < n * n; ++i) {
    labels[i] = static_cast<int>(i % 2);
    logits[static_cast<std::size_t>(labels[i]) * n * n + i] = 100.0;
  }
  ad::Graph g;
  CHECK(training::edge_loss(g.constant(logits), labels, mask).value().item() < 1e-6);
  CHECK(training::edge_loss(g.constant(Tensor({2, n, n})), labels, mask).value().item() ==
        doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK_THROWS_AS(training::edge_loss(g.constant(logits), labels, std::vector<std::uint8_t>(n * n, 0)),
                  EmptyLossError);
}

TEST_CASE("edge loss matches the per-pair loop oracle") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t bins = 2 + trial % 3, n = 2 + trial % 5;
    const Tensor logits = oracle::random_tensor({bins, n, n}, rng, -5, 5);
    std::vector<int> labels(n * n);
    std::vector<std::uint8_t> mask(n * n);
    for (std::size_t i = 0; i < n * n; ++i) {
      labels[i] = static_cast<int>(rng() % bins);
      mask[i] = rng() % 4 != 0;
    }
    mask[0] = 1;
    ad::Graph g;
    CHECK(std::abs(training::edge_loss(g.constant(logits), labels, mask).value().item() -
                   oracle::edge_loss(logits, labels, mask)) < 1e-12);
  }
}

TEST_CASE("node loss closed forms") {
  const std::vector<double> phi{-60, 120, 33}, psi{-45, 10, 179};
  const std::vector<std::uint8_t> on(3, 1);
  Tensor exact({3, 4});
  for (std::size_t i = 0; i < 3; ++i) {
    exact(i, 0) = std::sin(rad(phi[i]));
    exact(i, 1) = std::cos(rad(phi[i]));
    exact(i, 2) = std::sin(rad(psi[i]));
    exact(i, 3) = std::cos(rad(psi[i]));
  }
  ad::Graph g;
  CHECK(training::node_loss(g.constant(exact), phi, psi, on, on).value().item() < 1e-28);
  CHECK(training::node_loss(g.constant(Tensor({3, 4})), phi, psi, on, on).value().item() ==
        doctest::Approx(2.0).epsilon(1e-15));
  const std::vector<std::uint8_t> off(3, 0);
  CHECK(training::node_loss(g.constant(Tensor({3, 4})), phi, psi, on, off).value().item() ==
        doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(training::node_loss(g.constant(Tensor({3, 4})), phi, psi, off, off), EmptyLossError);
}

TEST_CASE("node loss matches the direct formula oracle") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> ang(-180, 180);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + trial % 9;
    const Tensor v = oracle::random_tensor({n, 4}, rng);
    std::vector<double> phi(n), psi(n);
    std::vector<std::uint8_t> pm(n), sm(n);
    for (std::size_t i = 0; i < n; ++i) {
      phi[i] = ang(rng), psi[i] = ang(rng);
      pm[i] = rng() % 3 != 0, sm[i] = rng() % 3 != 0;
    }
    pm[1] = 1, pm[0] = 0, sm[n - 1] = 0;
    ad::Graph g;
    CHECK(std::abs(training::node_loss(g.constant(v), phi, psi, pm, sm).value().item() -
                   oracle::node_loss(v, phi, psi, pm, sm)) < 1e-12);
  }
}

TEST_CASE("total loss arithmetic") {
  ad::Graph g;
  const auto e = g.constant(Tensor::scalar(0.5)), f = g.constant(Tensor::scalar(0.25));
  CHECK(training::total_loss(e, f, 1.0).value().item() == 0.75);
  CHECK(training::total_loss(e, f, 0.0).value().item() == 0.5);
}

TEST_CASE("gradient through a shared upstream parameter adds the path-wise gradients") {
  std::mt19937_64 rng(3);
  const std::size_t n = 3;
  const Tensor x0 = oracle::random_tensor({2 * n * n}, rng);
  std::vector<int> labels(n * n);
  for (auto& l : labels) l = static_cast<int>(rng() % 2);
  const std::vector<std::uint8_t> mask(n * n, 1), on(n, 1);
  const std::vector<double> phi{10, 20, 30}, psi{-10, -20, -30};

  // Both losses read the same leaf x: logits = x, v = first 12 entries of x.
  auto edge_part = [&](const ad::Var& x) { return training::edge_loss(ad::reshape(x, {2, n, n}), labels, mask); };
  auto node_part = [&](const ad::Var& x) {
    return training::node_loss(ad::reshape(ad::matmul(ad::reshape(x, {1, 2 * n * n}),
                                                      x.graph().constant(Tensor({2 * n * n, 12}, 0.1))),
                                           {n, 4}),
                               phi, psi, on, on);
  };
  ad::Graph ge, gn, gt;
  const auto xe = ge.input(x0), xn = gn.input(x0), xt = gt.input(x0);
  ge.backward(edge_part(xe));
  gn.backward(ad::scale(node_part(xn), 0.7));
  gt.backward(training::total_loss(edge_part(xt), node_part(xt), 0.7));
  for (std::size_t i = 0; i < x0.size(); ++i)
    CHECK(xt.grad()[i] == doctest::Approx(xe.grad()[i] + xn.grad()[i]).epsilon(1e-12));

  const auto r = ad::finite_diff_check(
      [&](ad::Graph&, const std::vector<ad::Var>& v) {
        return training::total_loss(edge_part(v[0]), node_part(v[0]), 0.7);
      },
      {x0}, 1e-4, 1e-10);
  CHECK(r.passed);
}
