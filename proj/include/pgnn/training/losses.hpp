#pragma once

#include <cstdint>
#include <span>

#include "pgnn/autodiff/graph.hpp"

namespace pgnn::training {

/// Masked mean cross-entropy over all ordered pairs (i, j).
/// logits [B x L x L]; labels and mask [L x L] row-major.
ad::Var edge_loss(const ad::Var& logits, std::span<const int> bin_labels,
                  std::span<const std::uint8_t> contact_mask);

/// Sum over the two angles of the mean squared (sin, cos) error over that
/// angle's unmasked residues. v [L x 4]; angles in degrees.
/// Throws EmptyLossError when neither angle has an unmasked residue.
ad::Var node_loss(const ad::Var& v, std::span<const double> phi, std::span<const double> psi,
                  std::span<const std::uint8_t> phi_mask, std::span<const std::uint8_t> psi_mask);

/// L_E + lambda * L_F
ad::Var total_loss(const ad::Var& edge, const ad::Var& node, double lambda);

}  // namespace pgnn::training
