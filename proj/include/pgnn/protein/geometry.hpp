#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pgnn/autodiff/tensor.hpp"
#include "pgnn/protein/bins.hpp"
#include "pgnn/protein/record.hpp"

namespace pgnn::protein {

struct DistanceMap {
  ad::Tensor distance;                // [L x L], Angstrom
  std::vector<std::uint8_t> mask;     // [L x L], 0 where either CA is absent
};

DistanceMap ca_distance_matrix(const ProteinRecord& rec);

/// Signed dihedral of p0-p1-p2-p3 in degrees, (-180, 180]. nullopt when
/// either plane is degenerate (colinear triple).
std::optional<double> dihedral_degrees(const Vec3& p0, const Vec3& p1, const Vec3& p2,
                                       const Vec3& p3);

struct BackboneDihedrals {
  std::vector<double> phi;  // degrees; 0 where masked
  std::vector<double> psi;
  std::vector<std::uint8_t> phi_mask;  // 1 = defined
  std::vector<std::uint8_t> psi_mask;
  std::vector<std::string> warnings;
};

/// phi_i = dihedral(C_{i-1}, N_i, CA_i, C_i), psi_i = dihedral(N_i, CA_i, C_i, N_{i+1}).
BackboneDihedrals backbone_dihedrals(const ProteinRecord& rec);

/// Ground-truth edge and node attributes of one protein.
struct TargetGeometry {
  std::size_t length = 0;
  ad::Tensor distance;
  std::vector<int> bin_labels;
  std::vector<std::uint8_t> contact_mask;
  std::vector<double> phi, psi;
  std::vector<std::uint8_t> phi_mask, psi_mask;
};

TargetGeometry derive_targets(const ProteinRecord& rec, const DistanceBinSpec& spec);

// Applies x -> R x + t to every present atom.
ProteinRecord transformed(const ProteinRecord& rec, const std::array<Vec3, 3>& rotation,
                          const Vec3& translation);

}  // namespace pgnn::protein
