#include "pgnn/autodiff/adam.hpp"

#include <cmath>

#include "pgnn/errors.hpp"

namespace pgnn::ad {

AdamState AdamState::for_parameters(const ParameterStore& params, AdamOptions options) {
  AdamState s;
  s.options = options;
  for (const auto& p : params) {
    s.first_moment.emplace_back(p.value.shape());
    s.second_moment.emplace_back(p.value.shape());
  }
  return s;
}

void adam_step(ParameterStore& params, AdamState& state) {
  if (state.first_moment.size() != params.size() || state.second_moment.size() != params.size())
    throw ContractError("adam_step: state tracks " + std::to_string(state.first_moment.size()) +
                        " parameters, store has " + std::to_string(params.size()));
  std::size_t idx = 0;
  for (const auto& p : params) {
    if (state.first_moment[idx].shape() != p.value.shape())
      throw DimensionError("adam_step: moment shape " +
                           shape_str(state.first_moment[idx].shape()) + " for parameter " +
                           p.name + " " + shape_str(p.value.shape()));
    ++idx;
    if (p.frozen) continue;
    if (!p.grad.all_finite())
      throw NonFiniteError("adam_step rejected: non-finite gradient in parameter " + p.name);
  }

  const auto& o = state.options;
  state.step += 1;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(o.beta1, t);
  const double c2 = 1.0 - std::pow(o.beta2, t);
  idx = 0;
  for (auto& p : params) {
    auto& m = state.first_moment[idx].values();
    auto& v = state.second_moment[idx].values();
    ++idx;
    if (p.frozen) continue;
    auto& w = p.value.values();
    const auto& g = p.grad.values();
    for (std::size_t i = 0; i < w.size(); ++i) {
      m[i] = o.beta1 * m[i] + (1.0 - o.beta1) * g[i];
      v[i] = o.beta2 * v[i] + (1.0 - o.beta2) * g[i] * g[i];
      const double m_hat = m[i] / c1;
      const double v_hat = v[i] / c2;
      w[i] -= o.learning_rate * m_hat / (std::sqrt(v_hat) + o.epsilon);
    }
  }
}

}  // namespace pgnn::ad
