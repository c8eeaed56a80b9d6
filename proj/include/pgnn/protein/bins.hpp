#pragma once

#include <vector>

#include "pgnn/autodiff/tensor.hpp"

namespace pgnn::protein {

inline constexpr double kContactThreshold = 8.0;  // Angstrom, contact iff d < 8

/// Distance discretization. label(d) = number of boundaries b with b <= d,
/// so a distance equal to a boundary falls into the higher label. The
/// boundary set must contain 8 A; labels up to and including the index of
/// that boundary are contacts.
class DistanceBinSpec {
 public:
  explicit DistanceBinSpec(std::vector<double> boundaries);

  static DistanceBinSpec binary();     // {8}
  static DistanceBinSpec multi_bin();  // {4, 6, ..., 20}

  int label(double distance) const;
  std::size_t bins() const { return boundaries_.size() + 1; }
  // Labels [0, contact_labels()) are contacts.
  std::size_t contact_labels() const { return contact_labels_; }
  const std::vector<double>& boundaries() const { return boundaries_; }

  bool operator==(const DistanceBinSpec&) const = default;

 private:
  std::vector<double> boundaries_;
  std::size_t contact_labels_ = 1;
};

/// Elementwise labels of an [L x L] distance matrix, row-major.
std::vector<int> bin_distances(const ad::Tensor& distance, const DistanceBinSpec& spec);

}  // namespace pgnn::protein
