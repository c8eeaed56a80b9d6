#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pgnn/autodiff/graph.hpp"

namespace pgnn::ad {

enum class Activation { elu, relu, sigmoid, tanh };

Activation parse_activation(const std::string& name);
std::string to_string(Activation kind);

// Elementwise, identical shapes.
Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);
Var scale(const Var& a, double factor);

Var sum(const Var& a);
Var mean(const Var& a);

/// [m x k] . [k x n] -> [m x n]
Var matmul(const Var& a, const Var& b);
Var transpose(const Var& a);
/// [C x L x L] -> [C x L x L] with the last two axes swapped.
Var transpose_last2(const Var& a);
Var reshape(const Var& a, Shape shape);

/// x [n x d] plus b [d] on every row.
Var add_row_bias(const Var& x, const Var& b);
/// x [C x ...] plus b [C] on every element of channel c.
Var add_channel_bias(const Var& x, const Var& b);

/// ELU uses alpha = 1.
Var activation(const Var& x, Activation kind);

/// 3x3 cross-correlation, zero padding of width `dilation`, so the spatial
/// extent is preserved. input [Cin x L x L], kernels [Cout x Cin x 3 x 3].
Var conv2d(const Var& input, const Var& kernels, std::size_t dilation);

/// Per-channel normalization over the spatial extent of one protein,
/// followed by gamma/beta. x [C x L x L], gamma and beta [C].
Var instance_norm(const Var& x, const Var& gamma, const Var& beta, double eps = 1e-5);

/// Mean over unmasked rows of -log softmax(logits[p, :])[labels[p]].
/// logits [P x B]; labels and mask have P entries.
Var softmax_cross_entropy(const Var& logits, std::span<const int> labels,
                          std::span<const std::uint8_t> mask);

/// Softmax along the last axis of [P x B].
Var softmax_rows(const Var& x);

/// [C x L x L] -> [C x L]: out(c, i) = sum_j x(c, i, j).
Var sum_over_cols(const Var& x);
/// [C x L x L] -> [C x L]: out(c, j) = sum_i x(c, i, j).
Var sum_over_rows(const Var& x);
/// [C x L] -> [C x L x L]: out(c, i, j) = a(c, i).
Var expand_rows(const Var& a);
/// [C x L] -> [C x L x L]: out(c, i, j) = a(c, j).
Var expand_cols(const Var& a);

/// Concatenation along axis 0; trailing extents must agree.
Var concat0(const std::vector<Var>& parts);

/// Concatenation of [n x d_k] matrices along columns -> [n x sum d_k].
Var concat_cols(const std::vector<Var>& parts);

/// [L x D]: out[i] = x[i + offset], zero where i + offset falls outside.
Var shift_rows(const Var& x, int offset);

/// Same value, no gradient flows back.
Var detach(const Var& x);

struct GruParams {
  Var w_z, w_r, w_n;  // [d x d] applied to the message
  Var u_z, u_r, u_n;  // [d x d] applied to the hidden state
  Var b_z, b_r, b_n;  // [d]
};

/// Row-wise GRU update:
///   z = sigmoid(m W_z + h U_z + b_z)
///   r = sigmoid(m W_r + h U_r + b_r)
///   n = tanh(m W_n + r * (h U_n) + b_n)
///   h' = (1 - z) * n + z * h
Var gru_cell(const Var& h, const Var& m, const GruParams& p);

}  // namespace pgnn::ad
