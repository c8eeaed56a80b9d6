// conv2d as nine shifted GEMMs: for each kernel tap (ky, kx) the input is
// shifted by ((ky-1)*dilation, (kx-1)*dilation) with zero fill and multiplied
// by that tap's [Cout x Cin] slice.

#include <Eigen/Dense>
#include <memory>

#include "pgnn/autodiff/ops.hpp"
#include "pgnn/errors.hpp"

namespace pgnn::ad {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatMap = Eigen::Map<RowMat>;
using ConstMatMap = Eigen::Map<const RowMat>;

constexpr std::size_t kTaps = 9;

// out(c, y, x) = in(c, y + dy, x + dx), zero outside.
void shift_into(const double* src, double* dst, std::size_t channels, long n, long dy, long dx) {
  std::fill_n(dst, channels * n * n, 0.0);
  const long x0 = std::max(0L, -dx), x1 = std::min(n, n - dx);
  if (x1 <= x0) return;
  for (std::size_t c = 0; c < channels; ++c) {
    for (long y = std::max(0L, -dy); y < std::min(n, n - dy); ++y) {
      const double* s = src + (c * n + (y + dy)) * n + dx;
      double* d = dst + (c * n + y) * n;
      std::copy(s + x0, s + x1, d + x0);
    }
  }
}

// in(c, y + dy, x + dx) += shifted(c, y, x) wherever the source is inside.
void unshift_add(const double* shifted, double* dst, std::size_t channels, long n, long dy,
                 long dx) {
  const long x0 = std::max(0L, -dx), x1 = std::min(n, n - dx);
  if (x1 <= x0) return;
  for (std::size_t c = 0; c < channels; ++c) {
    for (long y = std::max(0L, -dy); y < std::min(n, n - dy); ++y) {
      const double* s = shifted + (c * n + y) * n;
      double* d = dst + (c * n + (y + dy)) * n + dx;
      for (long x = x0; x < x1; ++x) d[x] += s[x];
    }
  }
}

// kernels [Cout x Cin x 3 x 3] -> nine [Cout x Cin] matrices, tap-major.
std::vector<double> split_taps(const Tensor& k, std::size_t cout, std::size_t cin) {
  std::vector<double> taps(kTaps * cout * cin);
  for (std::size_t o = 0; o < cout; ++o)
    for (std::size_t c = 0; c < cin; ++c)
      for (std::size_t t = 0; t < kTaps; ++t)
        taps[(t * cout + o) * cin + c] = k[(o * cin + c) * kTaps + t];
  return taps;
}

}  // namespace

Var conv2d(const Var& input, const Var& kernels, std::size_t dilation) {
  const Shape& is = input.shape();
  const Shape& ks = kernels.shape();
  if (is.size() != 3 || is[1] != is[2])
    throw DimensionError("conv2d: input must be [C x L x L], got " + shape_str(is));
  if (ks.size() != 4 || ks[2] != 3 || ks[3] != 3)
    throw DimensionError("conv2d: kernels must be [Cout x Cin x 3 x 3], got " + shape_str(ks));
  if (ks[1] != is[0])
    throw DimensionError("conv2d: kernels " + shape_str(ks) + " expect " + std::to_string(ks[1]) +
                         " input channels, input " + shape_str(is) + " has " +
                         std::to_string(is[0]));
  if (dilation == 0) throw ValidationError("conv2d: dilation must be positive");

  const std::size_t cin = is[0], cout = ks[0];
  const long n = static_cast<long>(is[1]);
  const long dil = static_cast<long>(dilation);
  const std::size_t area = static_cast<std::size_t>(n * n);

  const auto taps = split_taps(kernels.value(), cout, cin);
  Tensor out({cout, is[1], is[2]});
  std::vector<double> shifted(cin * area);
  MatMap out_m(out.data().data(), cout, area);
  for (std::size_t t = 0; t < kTaps; ++t) {
    const long dy = (static_cast<long>(t / 3) - 1) * dil;
    const long dx = (static_cast<long>(t % 3) - 1) * dil;
    if (std::abs(dy) >= n || std::abs(dx) >= n) continue;
    shift_into(input.value().data().data(), shifted.data(), cin, n, dy, dx);
    out_m.noalias() += ConstMatMap(taps.data() + t * cout * cin, cout, cin) *
                       ConstMatMap(shifted.data(), cin, area);
  }

  return input.graph().record(std::move(out), {input, kernels}, [cin, cout, n, dil,
                                                                 area](Node& self) {
    const Tensor& x = self.inputs[0]->value;
    const bool want_x = self.inputs[0]->requires_grad;
    const bool want_k = self.inputs[1]->requires_grad;
    const auto taps = split_taps(self.inputs[1]->value, cout, cin);
    ConstMatMap dout(self.grad.data(), cout, area);
    std::vector<double> buffer(cin * area);
    std::vector<double> dtaps(want_k ? kTaps * cout * cin : 0, 0.0);
    for (std::size_t t = 0; t < kTaps; ++t) {
      const long dy = (static_cast<long>(t / 3) - 1) * dil;
      const long dx = (static_cast<long>(t % 3) - 1) * dil;
      if (std::abs(dy) >= n || std::abs(dx) >= n) continue;
      if (want_k) {
        shift_into(x.data().data(), buffer.data(), cin, n, dy, dx);
        MatMap(dtaps.data() + t * cout * cin, cout, cin).noalias() =
            dout * ConstMatMap(buffer.data(), cin, area).transpose();
      }
      if (want_x) {
        MatMap(buffer.data(), cin, area).noalias() =
            ConstMatMap(taps.data() + t * cout * cin, cout, cin).transpose() * dout;
        unshift_add(buffer.data(), self.inputs[0]->grad_buffer().data(), cin, n, dy, dx);
      }
    }
    if (want_k) {
      auto& g = self.inputs[1]->grad_buffer();
      for (std::size_t o = 0; o < cout; ++o)
        for (std::size_t c = 0; c < cin; ++c)
          for (std::size_t t = 0; t < kTaps; ++t)
            g[(o * cin + c) * kTaps + t] += dtaps[(t * cout + o) * cin + c];
    }
  });
}

}  // namespace pgnn::ad
