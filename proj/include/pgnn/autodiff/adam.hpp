#pragma once

#include <cstdint>
#include <vector>

#include "pgnn/autodiff/parameters.hpp"

namespace pgnn::ad {

struct AdamOptions {
  double learning_rate = 0.00013;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  bool operator==(const AdamOptions&) const = default;
};

struct AdamState {
  AdamOptions options;
  std::uint64_t step = 0;
  std::vector<Tensor> first_moment;   // one per parameter, store order
  std::vector<Tensor> second_moment;

  static AdamState for_parameters(const ParameterStore& params, AdamOptions options = {});
  bool operator==(const AdamState&) const = default;
};

/// Bias-corrected Adam update of every non-frozen parameter from its grad.
/// Throws NonFiniteError (and changes nothing) if any gradient is NaN/Inf.
void adam_step(ParameterStore& params, AdamState& state);

}  // namespace pgnn::ad
