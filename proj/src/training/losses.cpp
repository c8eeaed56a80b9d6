#include "pgnn/training/losses.hpp"

#include <cmath>
#include <numbers>

#include "pgnn/autodiff/ops.hpp"
#include "pgnn/errors.hpp"

namespace pgnn::training {

ad::Var edge_loss(const ad::Var& logits, std::span<const int> bin_labels,
                  std::span<const std::uint8_t> contact_mask) {
  const auto& s = logits.shape();
  if (s.size() != 3 || s[1] != s[2])
    throw DimensionError("edge_loss expects [B x L x L] logits, got " + ad::shape_str(s));
  const std::size_t bins = s[0], n = s[1];
  if (bin_labels.size() != n * n || contact_mask.size() != n * n)
    throw DimensionError("edge_loss: labels and mask need L*L entries");
  const ad::Var pairs = ad::transpose(ad::reshape(logits, {bins, n * n}));
  return ad::softmax_cross_entropy(pairs, bin_labels, contact_mask);
}

ad::Var node_loss(const ad::Var& v, std::span<const double> phi, std::span<const double> psi,
                  std::span<const std::uint8_t> phi_mask, std::span<const std::uint8_t> psi_mask) {
  const auto& s = v.shape();
  if (s.size() != 2 || s[1] != 4)
    throw DimensionError("node_loss expects [L x 4], got " + ad::shape_str(s));
  const std::size_t n = s[0];
  if (phi.size() != n || psi.size() != n || phi_mask.size() != n || psi_mask.size() != n)
    throw DimensionError("node_loss: angle targets need L entries");
  std::size_t n_phi = 0, n_psi = 0;
  for (std::size_t i = 0; i < n; ++i) {
    n_phi += phi_mask[i] != 0;
    n_psi += psi_mask[i] != 0;
  }
  if (n_phi + n_psi == 0) throw EmptyLossError("node_loss: no residue has a defined angle");

  constexpr double rad = std::numbers::pi / 180.0;
  ad::Tensor target({n, 4});
  ad::Tensor weight({n, 4});
  for (std::size_t i = 0; i < n; ++i) {
    if (phi_mask[i]) {
      target(i, 0) = std::sin(phi[i] * rad);
      target(i, 1) = std::cos(phi[i] * rad);
      weight(i, 0) = weight(i, 1) = 1.0 / static_cast<double>(n_phi);
    }
    if (psi_mask[i]) {
      target(i, 2) = std::sin(psi[i] * rad);
      target(i, 3) = std::cos(psi[i] * rad);
      weight(i, 2) = weight(i, 3) = 1.0 / static_cast<double>(n_psi);
    }
  }
  ad::Graph& g = v.graph();
  const ad::Var diff = ad::sub(v, g.constant(std::move(target)));
  return ad::sum(ad::mul(ad::mul(diff, diff), g.constant(std::move(weight))));
}

ad::Var total_loss(const ad::Var& edge, const ad::Var& node, double lambda) {
  return ad::add(edge, ad::scale(node, lambda));
}

}  // namespace pgnn::training
