#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "pgnn/autodiff/graph.hpp"

namespace pgnn::ad {

struct GradCheckReport {
  bool passed = true;
  double max_rel_error = 0.0;  // max |a - f| / (atol / rtol + max(|a|, |f|)); <= rtol iff passed
  double max_abs_error = 0.0;
  std::string worst_input;     // input index or parameter name
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t checked = 0;
};

// Builds a scalar from the given leaves on the supplied graph.
using ScalarFunction = std::function<Var(Graph&, const std::vector<Var>&)>;
// Builds a scalar from parameters registered via Graph::parameter.
using ParameterFunction = std::function<Var(Graph&)>;

/// Compares reverse-mode gradients of f with central differences
/// (f(x + h e_i) - f(x - h e_i)) / 2h for every coordinate of every input.
/// A coordinate passes when |analytic - numeric| <= atol + rtol * max(|analytic|, |numeric|).
/// Throws NonFiniteError if f evaluates to NaN/Inf.
GradCheckReport finite_diff_check(const ScalarFunction& f, const std::vector<Tensor>& inputs,
                                  double rtol, double atol, double h = 1e-5);

/// Same check with respect to the parameters of a store. stride > 1 checks
/// every stride-th coordinate of each parameter.
GradCheckReport finite_diff_check_parameters(const ParameterFunction& f, ParameterStore& params,
                                             double rtol, double atol, double h = 1e-5,
                                             std::size_t stride = 1);

}  // namespace pgnn::ad
