#include "pgnn/autodiff/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "pgnn/errors.hpp"

namespace pgnn::ad {

namespace {

double checked_value(const Var& v) {
  if (v.size() != 1) throw ContractError("gradient check needs a scalar-valued function");
  const double x = v.value()[0];
  if (!std::isfinite(x)) throw NonFiniteError("gradient check: function value is not finite");
  return x;
}

void compare(GradCheckReport& r, const std::string& where, std::size_t index, double analytic,
             double numeric, double rtol, double atol) {
  const double diff = std::abs(analytic - numeric);
  const double scale = std::max(std::abs(analytic), std::abs(numeric));
  ++r.checked;
  if (diff > atol + rtol * scale) r.passed = false;
  // The atol / rtol floor makes "rel <= rtol" the same statement as the pass
  // test; without it, gradients near 1e-9 report roundoff as relative error.
  const double floor = rtol > 0.0 ? atol / rtol : atol;
  const double rel = floor + scale > 0.0 ? diff / (floor + scale) : 0.0;
  r.max_abs_error = std::max(r.max_abs_error, diff);
  if (rel > r.max_rel_error || r.checked == 1) {
    if (rel > r.max_rel_error) r.max_rel_error = rel;
    r.worst_input = where;
    r.worst_index = index;
    r.worst_analytic = analytic;
    r.worst_numeric = numeric;
  }
}

}  // namespace

GradCheckReport finite_diff_check(const ScalarFunction& f, const std::vector<Tensor>& inputs,
                                  double rtol, double atol, double h) {
  std::vector<Tensor> analytic;
  {
    Graph g;
    std::vector<Var> leaves;
    for (const auto& t : inputs) leaves.push_back(g.input(t));
    const Var out = f(g, leaves);
    checked_value(out);
    g.backward(out);
    for (const auto& l : leaves) analytic.push_back(l.grad());
  }

  auto evaluate = [&](const std::vector<Tensor>& xs) {
    Graph g(false);
    std::vector<Var> leaves;
    for (const auto& t : xs) leaves.push_back(g.constant(t));
    return checked_value(f(g, leaves));
  };

  GradCheckReport report;
  std::vector<Tensor> probe = inputs;
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    for (std::size_t i = 0; i < inputs[k].size(); ++i) {
      const double x0 = inputs[k][i];
      probe[k][i] = x0 + h;
      const double fp = evaluate(probe);
      probe[k][i] = x0 - h;
      const double fm = evaluate(probe);
      probe[k][i] = x0;
      compare(report, "input " + std::to_string(k), i, analytic[k][i], (fp - fm) / (2.0 * h),
              rtol, atol);
    }
  }
  return report;
}

GradCheckReport finite_diff_check_parameters(const ParameterFunction& f, ParameterStore& params,
                                             double rtol, double atol, double h,
                                             std::size_t stride) {
  params.zero_grad();
  {
    Graph g;
    const Var out = f(g);
    checked_value(out);
    g.backward(out);
  }
  auto evaluate = [&] {
    Graph g(false);
    return checked_value(f(g));
  };

  GradCheckReport report;
  for (auto& p : params) {
    if (p.frozen) continue;
    for (std::size_t i = 0; i < p.value.size(); i += std::max<std::size_t>(stride, 1)) {
      const double x0 = p.value[i];
      p.value[i] = x0 + h;
      const double fp = evaluate();
      p.value[i] = x0 - h;
      const double fm = evaluate();
      p.value[i] = x0;
      compare(report, p.name, i, p.grad[i], (fp - fm) / (2.0 * h), rtol, atol);
    }
  }
  return report;
}

}  // namespace pgnn::ad
