#include "pgnn/autodiff/tensor.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "pgnn/errors.hpp"

namespace pgnn::ad {

std::size_t shape_size(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::string shape_str(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? "x" : "") << shape[i];
  os << ']';
  return os.str();
}

Tensor::Tensor(Shape shape, double fill) : shape_(std::move(shape)) {
  for (auto e : shape_)
    if (e == 0) throw DimensionError("tensor extents must be positive, got " + shape_str(shape_));
  values_.assign(shape_size(shape_), fill);
}

Tensor::Tensor(Shape shape, std::vector<double> values)
    : shape_(std::move(shape)), values_(std::move(values)) {
  for (auto e : shape_)
    if (e == 0) throw DimensionError("tensor extents must be positive, got " + shape_str(shape_));
  if (values_.size() != shape_size(shape_))
    throw DimensionError("tensor " + shape_str(shape_) + " needs " +
                         std::to_string(shape_size(shape_)) + " values, got " +
                         std::to_string(values_.size()));
}

Tensor Tensor::matrix(std::initializer_list<std::initializer_list<double>> rows) {
  std::vector<double> v;
  std::size_t cols = rows.size() ? rows.begin()->size() : 0;
  for (const auto& r : rows) {
    if (r.size() != cols) throw DimensionError("ragged matrix literal");
    v.insert(v.end(), r.begin(), r.end());
  }
  return Tensor({rows.size(), cols}, std::move(v));
}

double Tensor::item() const {
  if (values_.size() != 1) throw ContractError("item() on tensor " + shape_str(shape_));
  return values_[0];
}

Tensor Tensor::reshaped(Shape shape) const {
  if (shape_size(shape) != values_.size())
    throw DimensionError("cannot reshape " + shape_str(shape_) + " to " + shape_str(shape));
  return Tensor(std::move(shape), values_);
}

bool Tensor::all_finite() const {
  for (double v : values_)
    if (!std::isfinite(v)) return false;
  return true;
}

Tensor channels_first(const Tensor& t) {
  if (t.rank() != 3 || t.dim(0) != t.dim(1))
    throw DimensionError("channels_first expects [L x L x K], got " + shape_str(t.shape()));
  const std::size_t n = t.dim(0), k = t.dim(2);
  Tensor out({k, n, n});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t c = 0; c < k; ++c) out(c, i, j) = t(i, j, c);
  return out;
}

}  // namespace pgnn::ad
