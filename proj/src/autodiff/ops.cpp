#include "pgnn/autodiff/ops.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "pgnn/errors.hpp"

namespace pgnn::ad {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatMap = Eigen::Map<RowMat>;
using ConstMatMap = Eigen::Map<const RowMat>;

bool wants(const Node& self, std::size_t k) { return self.inputs[k]->requires_grad; }
std::vector<double>& gbuf(Node& self, std::size_t k) { return self.inputs[k]->grad_buffer(); }
const Tensor& in(const Node& self, std::size_t k) { return self.inputs[k]->value; }

void require_same_shape(const Var& a, const Var& b, const char* op) {
  if (a.shape() != b.shape())
    throw DimensionError(std::string(op) + ": shapes " + shape_str(a.shape()) + " and " +
                         shape_str(b.shape()) + " differ");
}

void require_rank(const Var& a, std::size_t rank, const char* op) {
  if (a.shape().size() != rank)
    throw DimensionError(std::string(op) + ": expected rank " + std::to_string(rank) +
                         ", got " + shape_str(a.shape()));
}

void require_square_maps(const Var& a, const char* op) {
  require_rank(a, 3, op);
  if (a.shape()[1] != a.shape()[2])
    throw DimensionError(std::string(op) + ": expected [C x L x L], got " + shape_str(a.shape()));
}

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

Activation parse_activation(const std::string& name) {
  if (name == "elu") return Activation::elu;
  if (name == "relu") return Activation::relu;
  if (name == "sigmoid") return Activation::sigmoid;
  if (name == "tanh") return Activation::tanh;
  throw ValidationError("unknown activation: " + name);
}

std::string to_string(Activation kind) {
  switch (kind) {
    case Activation::elu: return "elu";
    case Activation::relu: return "relu";
    case Activation::sigmoid: return "sigmoid";
    case Activation::tanh: return "tanh";
  }
  return "?";
}

Var add(const Var& a, const Var& b) {
  require_same_shape(a, b, "add");
  Tensor out = a.value();
  const auto& bv = b.value().values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += bv[i];
  return a.graph().record(std::move(out), {a, b}, [](Node& self) {
    for (std::size_t k = 0; k < 2; ++k) {
      if (!wants(self, k)) continue;
      auto& g = gbuf(self, k);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
    }
  });
}

Var sub(const Var& a, const Var& b) {
  require_same_shape(a, b, "sub");
  Tensor out = a.value();
  const auto& bv = b.value().values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= bv[i];
  return a.graph().record(std::move(out), {a, b}, [](Node& self) {
    if (wants(self, 0)) {
      auto& g = gbuf(self, 0);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
    }
    if (wants(self, 1)) {
      auto& g = gbuf(self, 1);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] -= self.grad[i];
    }
  });
}

Var mul(const Var& a, const Var& b) {
  require_same_shape(a, b, "mul");
  Tensor out = a.value();
  const auto& bv = b.value().values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= bv[i];
  return a.graph().record(std::move(out), {a, b}, [](Node& self) {
    const auto& av = in(self, 0).values();
    const auto& bv = in(self, 1).values();
    if (wants(self, 0)) {
      auto& g = gbuf(self, 0);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * bv[i];
    }
    if (wants(self, 1)) {
      auto& g = gbuf(self, 1);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * av[i];
    }
  });
}

Var scale(const Var& a, double factor) {
  Tensor out = a.value();
  for (double& v : out.values()) v *= factor;
  return a.graph().record(std::move(out), {a}, [factor](Node& self) {
    auto& g = gbuf(self, 0);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += factor * self.grad[i];
  });
}

Var sum(const Var& a) {
  double s = 0.0;
  for (double v : a.value().values()) s += v;
  return a.graph().record(Tensor::scalar(s), {a}, [](Node& self) {
    auto& g = gbuf(self, 0);
    for (double& v : g) v += self.grad[0];
  });
}

Var mean(const Var& a) { return scale(sum(a), 1.0 / static_cast<double>(a.size())); }

Var matmul(const Var& a, const Var& b) {
  require_rank(a, 2, "matmul");
  require_rank(b, 2, "matmul");
  const std::size_t m = a.shape()[0], k = a.shape()[1], n = b.shape()[1];
  if (b.shape()[0] != k)
    throw DimensionError("matmul: inner extents disagree for " + shape_str(a.shape()) + " and " +
                         shape_str(b.shape()));
  Tensor out({m, n});
  MatMap(out.data().data(), m, n).noalias() =
      ConstMatMap(a.value().data().data(), m, k) * ConstMatMap(b.value().data().data(), k, n);
  return a.graph().record(std::move(out), {a, b}, [m, k, n](Node& self) {
    ConstMatMap dc(self.grad.data(), m, n);
    if (wants(self, 0)) {
      MatMap(gbuf(self, 0).data(), m, k).noalias() +=
          dc * ConstMatMap(in(self, 1).data().data(), k, n).transpose();
    }
    if (wants(self, 1)) {
      MatMap(gbuf(self, 1).data(), k, n).noalias() +=
          ConstMatMap(in(self, 0).data().data(), m, k).transpose() * dc;
    }
  });
}

Var transpose(const Var& a) {
  require_rank(a, 2, "transpose");
  const std::size_t r = a.shape()[0], c = a.shape()[1];
  Tensor out({c, r});
  MatMap(out.data().data(), c, r) = ConstMatMap(a.value().data().data(), r, c).transpose();
  return a.graph().record(std::move(out), {a}, [r, c](Node& self) {
    MatMap(gbuf(self, 0).data(), r, c) += ConstMatMap(self.grad.data(), c, r).transpose();
  });
}

Var transpose_last2(const Var& a) {
  require_square_maps(a, "transpose_last2");
  const std::size_t ch = a.shape()[0], n = a.shape()[1];
  Tensor out(a.shape());
  const Tensor& x = a.value();
  for (std::size_t c = 0; c < ch; ++c)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) out(c, i, j) = x(c, j, i);
  return a.graph().record(std::move(out), {a}, [ch, n](Node& self) {
    auto& g = gbuf(self, 0);
    for (std::size_t c = 0; c < ch; ++c)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          g[(c * n + j) * n + i] += self.grad[(c * n + i) * n + j];
  });
}

Var reshape(const Var& a, Shape shape) {
  Tensor out = a.value().reshaped(std::move(shape));
  return a.graph().record(std::move(out), {a}, [](Node& self) {
    auto& g = gbuf(self, 0);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
  });
}

Var add_row_bias(const Var& x, const Var& b) {
  require_rank(x, 2, "add_row_bias");
  const std::size_t n = x.shape()[0], d = x.shape()[1];
  if (b.size() != d)
    throw DimensionError("add_row_bias: bias " + shape_str(b.shape()) + " for rows of " +
                         shape_str(x.shape()));
  Tensor out = x.value();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) out(i, j) += b.value()[j];
  return x.graph().record(std::move(out), {x, b}, [n, d](Node& self) {
    if (wants(self, 0)) {
      auto& g = gbuf(self, 0);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
    }
    if (wants(self, 1)) {
      auto& g = gbuf(self, 1);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) g[j] += self.grad[i * d + j];
    }
  });
}

Var add_channel_bias(const Var& x, const Var& b) {
  const std::size_t ch = x.shape()[0];
  if (b.size() != ch)
    throw DimensionError("add_channel_bias: bias " + shape_str(b.shape()) + " for " +
                         shape_str(x.shape()));
  const std::size_t inner = x.size() / ch;
  Tensor out = x.value();
  for (std::size_t c = 0; c < ch; ++c)
    for (std::size_t p = 0; p < inner; ++p) out[c * inner + p] += b.value()[c];
  return x.graph().record(std::move(out), {x, b}, [ch, inner](Node& self) {
    if (wants(self, 0)) {
      auto& g = gbuf(self, 0);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
    }
    if (wants(self, 1)) {
      auto& g = gbuf(self, 1);
      for (std::size_t c = 0; c < ch; ++c) {
        double s = 0.0;
        for (std::size_t p = 0; p < inner; ++p) s += self.grad[c * inner + p];
        g[c] += s;
      }
    }
  });
}

Var activation(const Var& x, Activation kind) {
  Tensor out = x.value();
  for (double& v : out.values()) {
    switch (kind) {
      case Activation::elu: v = v >= 0 ? v : std::expm1(v); break;
      case Activation::relu: v = v > 0 ? v : 0.0; break;
      case Activation::sigmoid: v = sigmoid(v); break;
      case Activation::tanh: v = std::tanh(v); break;
    }
  }
  return x.graph().record(std::move(out), {x}, [kind](Node& self) {
    const auto& xv = in(self, 0).values();
    const auto& yv = self.value.values();
    auto& g = gbuf(self, 0);
    for (std::size_t i = 0; i < g.size(); ++i) {
      double d = 0.0;
      switch (kind) {
        case Activation::elu: d = xv[i] >= 0 ? 1.0 : yv[i] + 1.0; break;
        case Activation::relu: d = xv[i] > 0 ? 1.0 : 0.0; break;
        case Activation::sigmoid: d = yv[i] * (1.0 - yv[i]); break;
        case Activation::tanh: d = 1.0 - yv[i] * yv[i]; break;
      }
      g[i] += d * self.grad[i];
    }
  });
}

Var instance_norm(const Var& x, const Var& gamma, const Var& beta, double eps) {
  require_square_maps(x, "instance_norm");
  const std::size_t ch = x.shape()[0];
  const std::size_t area = x.shape()[1] * x.shape()[2];
  if (gamma.size() != ch || beta.size() != ch)
    throw DimensionError("instance_norm: affine parameters must have " + std::to_string(ch) +
                         " entries");
  const Tensor& xv = x.value();
  Tensor out(x.shape());
  auto normalized = std::make_shared<std::vector<double>>(xv.size());
  auto inv_std = std::make_shared<std::vector<double>>(ch);
  for (std::size_t c = 0; c < ch; ++c) {
    const double* src = xv.data().data() + c * area;
    double mu = 0.0;
    for (std::size_t p = 0; p < area; ++p) mu += src[p];
    mu /= static_cast<double>(area);
    double var = 0.0;
    for (std::size_t p = 0; p < area; ++p) var += (src[p] - mu) * (src[p] - mu);
    var /= static_cast<double>(area);
    const double is = 1.0 / std::sqrt(var + eps);
    (*inv_std)[c] = is;
    const double gm = gamma.value()[c], bt = beta.value()[c];
    for (std::size_t p = 0; p < area; ++p) {
      const double xh = (src[p] - mu) * is;
      (*normalized)[c * area + p] = xh;
      out[c * area + p] = gm * xh + bt;
    }
  }
  return x.graph().record(
      std::move(out), {x, gamma, beta}, [ch, area, normalized, inv_std](Node& self) {
        const auto& xh = *normalized;
        const auto& gm = in(self, 1).values();
        const double inv_n = 1.0 / static_cast<double>(area);
        for (std::size_t c = 0; c < ch; ++c) {
          const double* dy = self.grad.data() + c * area;
          const double* xc = xh.data() + c * area;
          double sum_dy = 0.0, sum_dy_xh = 0.0;
          for (std::size_t p = 0; p < area; ++p) {
            sum_dy += dy[p];
            sum_dy_xh += dy[p] * xc[p];
          }
          if (wants(self, 0)) {
            double* dx = gbuf(self, 0).data() + c * area;
            const double k = gm[c] * (*inv_std)[c];
            const double mean_dy = sum_dy * inv_n, mean_dy_xh = sum_dy_xh * inv_n;
            for (std::size_t p = 0; p < area; ++p)
              dx[p] += k * (dy[p] - mean_dy - xc[p] * mean_dy_xh);
          }
          if (wants(self, 1)) gbuf(self, 1)[c] += sum_dy_xh;
          if (wants(self, 2)) gbuf(self, 2)[c] += sum_dy;
        }
      });
}

Var softmax_cross_entropy(const Var& logits, std::span<const int> labels,
                          std::span<const std::uint8_t> mask) {
  require_rank(logits, 2, "softmax_cross_entropy");
  const std::size_t rows = logits.shape()[0], bins = logits.shape()[1];
  if (labels.size() != rows || mask.size() != rows)
    throw DimensionError("softmax_cross_entropy: " + std::to_string(rows) +
                         " positions but " + std::to_string(labels.size()) + " labels and " +
                         std::to_string(mask.size()) + " mask entries");
  std::size_t count = 0;
  for (std::size_t p = 0; p < rows; ++p) {
    if (!mask[p]) continue;
    if (labels[p] < 0 || static_cast<std::size_t>(labels[p]) >= bins)
      throw ValidationError("softmax_cross_entropy: label " + std::to_string(labels[p]) +
                            " outside [0, " + std::to_string(bins) + ")");
    ++count;
  }
  if (count == 0) throw EmptyLossError("softmax_cross_entropy: every position is masked");

  const Tensor& z = logits.value();
  auto probs = std::make_shared<std::vector<double>>(z.size(), 0.0);
  double loss = 0.0;
  for (std::size_t p = 0; p < rows; ++p) {
    if (!mask[p]) continue;
    const double* row = z.data().data() + p * bins;
    const double mx = *std::max_element(row, row + bins);
    double s = 0.0;
    for (std::size_t b = 0; b < bins; ++b) s += std::exp(row[b] - mx);
    const double log_z = mx + std::log(s);
    loss += log_z - row[labels[p]];
    for (std::size_t b = 0; b < bins; ++b) (*probs)[p * bins + b] = std::exp(row[b] - log_z);
  }
  const double inv_count = 1.0 / static_cast<double>(count);
  std::vector<int> lab(labels.begin(), labels.end());
  std::vector<std::uint8_t> msk(mask.begin(), mask.end());
  return logits.graph().record(
      Tensor::scalar(loss * inv_count), {logits},
      [rows, bins, probs, inv_count, lab = std::move(lab), msk = std::move(msk)](Node& self) {
        auto& g = gbuf(self, 0);
        const double up = self.grad[0] * inv_count;
        for (std::size_t p = 0; p < rows; ++p) {
          if (!msk[p]) continue;
          for (std::size_t b = 0; b < bins; ++b) {
            const double onehot = static_cast<int>(b) == lab[p] ? 1.0 : 0.0;
            g[p * bins + b] += up * ((*probs)[p * bins + b] - onehot);
          }
        }
      });
}

Var softmax_rows(const Var& x) {
  require_rank(x, 2, "softmax_rows");
  const std::size_t rows = x.shape()[0], bins = x.shape()[1];
  Tensor out(x.shape());
  for (std::size_t p = 0; p < rows; ++p) {
    const double* row = x.value().data().data() + p * bins;
    const double mx = *std::max_element(row, row + bins);
    double s = 0.0;
    for (std::size_t b = 0; b < bins; ++b) s += (out[p * bins + b] = std::exp(row[b] - mx));
    for (std::size_t b = 0; b < bins; ++b) out[p * bins + b] /= s;
  }
  return x.graph().record(std::move(out), {x}, [rows, bins](Node& self) {
    auto& g = gbuf(self, 0);
    const auto& y = self.value.values();
    for (std::size_t p = 0; p < rows; ++p) {
      double dot = 0.0;
      for (std::size_t b = 0; b < bins; ++b) dot += self.grad[p * bins + b] * y[p * bins + b];
      for (std::size_t b = 0; b < bins; ++b)
        g[p * bins + b] += y[p * bins + b] * (self.grad[p * bins + b] - dot);
    }
  });
}

Var sum_over_cols(const Var& x) {
  require_square_maps(x, "sum_over_cols");
  const std::size_t ch = x.shape()[0], n = x.shape()[1];
  Tensor out({ch, n});
  const Tensor& xv = x.value();
  for (std::size_t c = 0; c < ch; ++c)
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += xv(c, i, j);
      out(c, i) = s;
    }
  return x.graph().record(std::move(out), {x}, [ch, n](Node& self) {
    auto& g = gbuf(self, 0);
    for (std::size_t c = 0; c < ch; ++c)
      for (std::size_t i = 0; i < n; ++i) {
        const double up = self.grad[c * n + i];
        for (std::size_t j = 0; j < n; ++j) g[(c * n + i) * n + j] += up;
      }
  });
}

Var sum_over_rows(const Var& x) {
  require_square_maps(x, "sum_over_rows");
  const std::size_t ch = x.shape()[0], n = x.shape()[1];
  Tensor out({ch, n});
  const Tensor& xv = x.value();
  for (std::size_t c = 0; c < ch; ++c)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) out(c, j) += xv(c, i, j);
  return x.graph().record(std::move(out), {x}, [ch, n](Node& self) {
    auto& g = gbuf(self, 0);
    for (std::size_t c = 0; c < ch; ++c)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) g[(c * n + i) * n + j] += self.grad[c * n + j];
  });
}

Var expand_rows(const Var& a) {
  require_rank(a, 2, "expand_rows");
  const std::size_t ch = a.shape()[0], n = a.shape()[1];
  Tensor out({ch, n, n});
  for (std::size_t c = 0; c < ch; ++c)
    for (std::size_t i = 0; i < n; ++i)
      std::fill_n(out.data().data() + (c * n + i) * n, n, a.value()(c, i));
  return a.graph().record(std::move(out), {a}, [ch, n](Node& self) {
    auto& g = gbuf(self, 0);
    for (std::size_t c = 0; c < ch; ++c)
      for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += self.grad[(c * n + i) * n + j];
        g[c * n + i] += s;
      }
  });
}

Var expand_cols(const Var& a) {
  require_rank(a, 2, "expand_cols");
  const std::size_t ch = a.shape()[0], n = a.shape()[1];
  Tensor out({ch, n, n});
  for (std::size_t c = 0; c < ch; ++c)
    for (std::size_t i = 0; i < n; ++i)
      std::copy_n(a.value().data().data() + c * n, n, out.data().data() + (c * n + i) * n);
  return a.graph().record(std::move(out), {a}, [ch, n](Node& self) {
    auto& g = gbuf(self, 0);
    for (std::size_t c = 0; c < ch; ++c)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) g[c * n + j] += self.grad[(c * n + i) * n + j];
  });
}

Var concat0(const std::vector<Var>& parts) {
  if (parts.empty()) throw ContractError("concat0 of nothing");
  Shape tail(parts[0].shape().begin() + 1, parts[0].shape().end());
  std::size_t lead = 0;
  for (const auto& p : parts) {
    Shape t(p.shape().begin() + 1, p.shape().end());
    if (t != tail)
      throw DimensionError("concat0: trailing extents " + shape_str(t) + " vs " + shape_str(tail));
    lead += p.shape()[0];
  }
  Shape shape = tail;
  shape.insert(shape.begin(), lead);
  std::vector<double> values;
  values.reserve(shape_size(shape));
  std::vector<std::size_t> offsets;
  for (const auto& p : parts) {
    offsets.push_back(values.size());
    values.insert(values.end(), p.value().values().begin(), p.value().values().end());
  }
  return parts[0].graph().record(Tensor(std::move(shape), std::move(values)), parts,
                                 [offsets](Node& self) {
                                   for (std::size_t k = 0; k < self.inputs.size(); ++k) {
                                     if (!wants(self, k)) continue;
                                     auto& g = gbuf(self, k);
                                     for (std::size_t i = 0; i < g.size(); ++i)
                                       g[i] += self.grad[offsets[k] + i];
                                   }
                                 });
}

Var concat_cols(const std::vector<Var>& parts) {
  if (parts.empty()) throw ContractError("concat_cols of nothing");
  const std::size_t rows = parts[0].shape().at(0);
  std::vector<std::size_t> widths;
  std::size_t total = 0;
  for (const auto& p : parts) {
    require_rank(p, 2, "concat_cols");
    if (p.shape()[0] != rows)
      throw DimensionError("concat_cols: row counts " + std::to_string(p.shape()[0]) + " vs " +
                           std::to_string(rows));
    widths.push_back(p.shape()[1]);
    total += p.shape()[1];
  }
  Tensor out({rows, total});
  std::size_t col = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    for (std::size_t i = 0; i < rows; ++i)
      std::copy_n(parts[k].value().data().data() + i * widths[k], widths[k],
                  out.data().data() + i * total + col);
    col += widths[k];
  }
  return parts[0].graph().record(std::move(out), parts, [rows, total, widths](Node& self) {
    std::size_t col = 0;
    for (std::size_t k = 0; k < self.inputs.size(); ++k) {
      if (wants(self, k)) {
        auto& g = gbuf(self, k);
        for (std::size_t i = 0; i < rows; ++i)
          for (std::size_t c = 0; c < widths[k]; ++c)
            g[i * widths[k] + c] += self.grad[i * total + col + c];
      }
      col += widths[k];
    }
  });
}

Var shift_rows(const Var& x, int offset) {
  require_rank(x, 2, "shift_rows");
  const long n = static_cast<long>(x.shape()[0]);
  const std::size_t d = x.shape()[1];
  Tensor out(x.shape());
  for (long i = 0; i < n; ++i) {
    const long src = i + offset;
    if (src < 0 || src >= n) continue;
    std::copy_n(x.value().data().data() + src * d, d, out.data().data() + i * d);
  }
  return x.graph().record(std::move(out), {x}, [n, d, offset](Node& self) {
    auto& g = gbuf(self, 0);
    for (long i = 0; i < n; ++i) {
      const long src = i + offset;
      if (src < 0 || src >= n) continue;
      for (std::size_t c = 0; c < d; ++c) g[src * d + c] += self.grad[i * d + c];
    }
  });
}

Var detach(const Var& x) { return x.graph().constant(x.value()); }

Var gru_cell(const Var& h, const Var& m, const GruParams& p) {
  require_rank(h, 2, "gru_cell");
  require_same_shape(h, m, "gru_cell");
  const std::size_t d = h.shape()[1];
  const Shape square{d, d};
  for (const Var* w : {&p.w_z, &p.w_r, &p.w_n, &p.u_z, &p.u_r, &p.u_n})
    if (w->shape() != square)
      throw DimensionError("gru_cell: weight " + shape_str(w->shape()) + ", expected " +
                           shape_str(square));
  for (const Var* b : {&p.b_z, &p.b_r, &p.b_n})
    if (b->size() != d)
      throw DimensionError("gru_cell: bias " + shape_str(b->shape()) + ", expected [" +
                           std::to_string(d) + "]");

  auto gate = [&](const Var& w, const Var& u, const Var& b) {
    return activation(add_row_bias(add(matmul(m, w), matmul(h, u)), b), Activation::sigmoid);
  };
  const Var z = gate(p.w_z, p.u_z, p.b_z);
  const Var r = gate(p.w_r, p.u_r, p.b_r);
  const Var n = activation(add_row_bias(add(matmul(m, p.w_n), mul(r, matmul(h, p.u_n))), p.b_n),
                           Activation::tanh);
  // (1 - z) * n + z * h == n + z * (h - n)
  return add(n, mul(z, sub(h, n)));
}

}  // namespace pgnn::ad
