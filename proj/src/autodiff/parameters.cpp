#include "pgnn/autodiff/parameters.hpp"

#include <algorithm>
#include <cmath>

#include "pgnn/errors.hpp"

namespace pgnn::ad {

void Parameter::zero_grad() {
  if (grad.shape() != value.shape())
    grad = Tensor(value.shape());
  else
    std::fill(grad.values().begin(), grad.values().end(), 0.0);
}

Parameter& ParameterStore::add(std::string name, Tensor value) {
  if (contains(name)) throw ContractError("duplicate parameter name: " + name);
  Parameter& p = params_.emplace_back();
  p.name = std::move(name);
  p.grad = Tensor(value.shape());
  p.value = std::move(value);
  return p;
}

Parameter& ParameterStore::get(const std::string& name) {
  for (auto& p : params_)
    if (p.name == name) return p;
  throw ValidationError("unknown parameter: " + name);
}

const Parameter& ParameterStore::get(const std::string& name) const {
  return const_cast<ParameterStore*>(this)->get(name);
}

bool ParameterStore::contains(const std::string& name) const {
  return std::any_of(params_.begin(), params_.end(),
                     [&](const Parameter& p) { return p.name == name; });
}

std::size_t ParameterStore::scalar_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.value.size();
  return n;
}

void ParameterStore::zero_grad() {
  for (auto& p : params_) p.zero_grad();
}

double ParameterStore::grad_norm() const {
  double s = 0.0;
  for (const auto& p : params_)
    if (!p.frozen)
      for (double g : p.grad.values()) s += g * g;
  return std::sqrt(s);
}

void ParameterStore::scale_grads(double factor) {
  for (auto& p : params_)
    for (double& g : p.grad.values()) g *= factor;
}

void ParameterStore::set_frozen_prefix(const std::string& prefix, bool frozen) {
  for (auto& p : params_)
    if (p.name.rfind(prefix, 0) == 0) p.frozen = frozen;
}

Tensor xavier_uniform(Shape shape, std::size_t fan_in, std::size_t fan_out, std::mt19937_64& rng) {
  const double a = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::uniform_real_distribution<double> dist(-a, a);
  Tensor t(std::move(shape));
  for (double& v : t.values()) v = dist(rng);
  return t;
}

}  // namespace pgnn::ad
