#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pgnn/autodiff/gradcheck.hpp"

namespace pgnn::eval {

struct GradcheckCase {
  std::string name;
  ad::GradCheckReport report;
  double seconds = 0.0;
};

struct GradcheckSuiteResult {
  std::vector<GradcheckCase> cases;
  bool passed = true;
  double max_rel_error = 0.0;
};

inline constexpr double kGradcheckRtol = 1e-3;
inline constexpr double kGradcheckAtol = 1e-8;
inline constexpr double kGradcheckStep = 1e-5;

/// Central-difference checks of every differentiable op and composite
/// layer. `full` adds the node path (six rounds, L = 5) and the joint
/// two-path model (L = 6, C = 8, d_h = 8, B = 2) against all parameters.
GradcheckSuiteResult run_gradcheck_suite(bool full, std::uint64_t seed = 7);

}  // namespace pgnn::eval
