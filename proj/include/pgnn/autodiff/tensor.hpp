#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace pgnn::ad {

using Shape = std::vector<std::size_t>;

std::size_t shape_size(const Shape& shape);
std::string shape_str(const Shape& shape);

/// Dense row-major array of doubles. Plain value type; differentiation state
/// lives on graph nodes (see graph.hpp), not here.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, double fill = 0.0);
  Tensor(Shape shape, std::vector<double> values);

  static Tensor scalar(double v) { return Tensor(Shape{1}, std::vector<double>{v}); }
  static Tensor matrix(std::initializer_list<std::initializer_list<double>> rows);

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t dim(std::size_t axis) const { return shape_.at(axis); }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  std::span<double> data() { return values_; }
  std::span<const double> data() const { return values_; }
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  double& operator()(std::size_t i, std::size_t j) { return values_[i * shape_[1] + j]; }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * shape_[1] + j]; }
  double& operator()(std::size_t i, std::size_t j, std::size_t k) {
    return values_[(i * shape_[1] + j) * shape_[2] + k];
  }
  double operator()(std::size_t i, std::size_t j, std::size_t k) const {
    return values_[(i * shape_[1] + j) * shape_[2] + k];
  }

  double item() const;
  Tensor reshaped(Shape shape) const;
  bool all_finite() const;

  bool operator==(const Tensor&) const = default;

 private:
  Shape shape_;
  std::vector<double> values_;
};

// [K x L x L] <- [L x L x K]; used to move per-pair feature vectors onto the channel axis.
Tensor channels_first(const Tensor& pairs_last);

}  // namespace pgnn::ad
