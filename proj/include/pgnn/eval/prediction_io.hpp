#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "pgnn/autodiff/tensor.hpp"
#include "pgnn/edge_path/edge_path.hpp"
#include "pgnn/node_path/node_path.hpp"

namespace pgnn::eval {

/// Contents of a `<id>.contacts` file. Only pairs i < j are stored; the
/// reader mirrors them and leaves the diagonal at zero.
struct ContactFile {
  std::size_t length = 0;
  std::size_t bins = 0;
  ad::Tensor contact_map;    // [L x L]
  ad::Tensor probabilities;  // [B x L x L]

  bool operator==(const ContactFile&) const = default;
};

/// Header `L B`, then `i j p_contact p_bin0 ... p_bin{B-1}` for every i < j,
/// 1-based, full double precision.
void write_contacts(const std::filesystem::path& path, const edge::EdgePathOutput& edge);
ContactFile read_contacts(const std::filesystem::path& path);

struct AngleFile {
  std::vector<double> phi, psi;  // degrees
  std::vector<std::uint8_t> phi_mask, psi_mask;

  bool operator==(const AngleFile&) const = default;
};

/// Header `L`, then `i phi psi` per residue with `NA` where masked.
void write_angles(const std::filesystem::path& path, const AngleFile& angles);
AngleFile read_angles(const std::filesystem::path& path);

/// Predicted angles with the chain-terminal phi/psi and undefined
/// predictions masked.
AngleFile predicted_angles(const node::NodePathOutput& node);

}  // namespace pgnn::eval
