#include "pgnn/protein/bins.hpp"

#include <algorithm>
#include <cmath>

#include "pgnn/errors.hpp"

namespace pgnn::protein {

DistanceBinSpec::DistanceBinSpec(std::vector<double> boundaries)
    : boundaries_(std::move(boundaries)) {
  if (boundaries_.empty()) throw ValidationError("distance bin spec needs at least one boundary");
  for (std::size_t i = 0; i < boundaries_.size(); ++i) {
    if (!(boundaries_[i] > 0.0) || !std::isfinite(boundaries_[i]))
      throw ValidationError("distance bin boundaries must be positive and finite");
    if (i > 0 && !(boundaries_[i] > boundaries_[i - 1]))
      throw ValidationError("distance bin boundaries must be strictly ascending");
  }
  const auto it = std::find(boundaries_.begin(), boundaries_.end(), kContactThreshold);
  if (it == boundaries_.end())
    throw ValidationError("distance bin boundaries must include the 8 A contact threshold");
  contact_labels_ = static_cast<std::size_t>(it - boundaries_.begin()) + 1;
}

DistanceBinSpec DistanceBinSpec::binary() { return DistanceBinSpec({kContactThreshold}); }

DistanceBinSpec DistanceBinSpec::multi_bin() {
  std::vector<double> b;
  for (int d = 4; d <= 20; d += 2) b.push_back(d);
  return DistanceBinSpec(std::move(b));
}

int DistanceBinSpec::label(double distance) const {
  return static_cast<int>(std::upper_bound(boundaries_.begin(), boundaries_.end(), distance) -
                          boundaries_.begin());
}

std::vector<int> bin_distances(const ad::Tensor& distance, const DistanceBinSpec& spec) {
  std::vector<int> labels(distance.size());
  for (std::size_t i = 0; i < distance.size(); ++i) {
    if (distance[i] < 0.0) throw ValidationError("bin_distances: negative distance");
    labels[i] = spec.label(distance[i]);
  }
  return labels;
}

}  // namespace pgnn::protein
