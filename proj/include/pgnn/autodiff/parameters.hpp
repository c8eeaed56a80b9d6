#pragma once

#include <deque>
#include <random>
#include <string>
#include <vector>

#include "pgnn/autodiff/tensor.hpp"

namespace pgnn::ad {

struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;
  bool frozen = false;

  void zero_grad();
};

/// Named parameters in insertion order. References stay valid for the
/// lifetime of the store.
class ParameterStore {
 public:
  Parameter& add(std::string name, Tensor value);
  Parameter& get(const std::string& name);
  const Parameter& get(const std::string& name) const;
  bool contains(const std::string& name) const;

  std::size_t size() const { return params_.size(); }
  std::size_t scalar_count() const;

  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }

  void zero_grad();
  double grad_norm() const;
  void scale_grads(double factor);
  void set_frozen_prefix(const std::string& prefix, bool frozen);

 private:
  std::deque<Parameter> params_;
};

// Fan-balanced uniform init: U(-a, a), a = sqrt(6 / (fan_in + fan_out)).
Tensor xavier_uniform(Shape shape, std::size_t fan_in, std::size_t fan_out, std::mt19937_64& rng);

}  // namespace pgnn::ad
