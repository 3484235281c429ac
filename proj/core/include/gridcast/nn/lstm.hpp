#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gridcast/tensor.hpp"

namespace gridcast::nn {

/// One weight matrix per gate, each acting on the concatenation [h_{t-1}, x_t].
struct LSTMParams {
  Tensor w_f, w_i, w_c, w_o;  ///< [hidden, hidden + input]
  Tensor b_f, b_i, b_c, b_o;  ///< [hidden]

  std::size_t hidden() const { return b_f.size(); }
  std::size_t input() const { return w_f.dim(1) - w_f.dim(0); }

  /// Throws ShapeError unless all four gates share one consistent shape.
  void validate() const;

  static LSTMParams zeros(std::size_t hidden, std::size_t input);

  bool operator==(const LSTMParams&) const = default;
};

struct LSTMState {
  std::vector<double> h;
  std::vector<double> c;

  static LSTMState zeros(std::size_t hidden) { return {std::vector<double>(hidden, 0.0), std::vector<double>(hidden, 0.0)}; }
};

/// Everything the backward pass of a single step needs.
struct LSTMCellCache {
  std::vector<double> z;        ///< [h_{t-1}, x_t]
  std::vector<double> f;
  std::vector<double> i;
  std::vector<double> c_tilde;
  std::vector<double> o;
  std::vector<double> c_prev;
  std::vector<double> tanh_c;
};

struct LSTMCellOutput {
  LSTMState state;
  LSTMCellCache cache;
};

/// One time step:
///   f = sigma(W_f z + b_f), i = sigma(W_i z + b_i), c~ = tanh(W_c z + b_c),
///   C = f*C_prev + i*c~, o = sigma(W_o z + b_o), h = o*tanh(C).
LSTMCellOutput lstm_cell_forward(std::span<const double> x, const LSTMState& state,
                                 const LSTMParams& p);

struct LSTMCellGrads {
  std::vector<double> dx;
  std::vector<double> dh_prev;
  std::vector<double> dc_prev;
  LSTMParams dparams;
};

/// Adjoint of lstm_cell_forward given gradients on the new h and C.
LSTMCellGrads lstm_cell_backward(std::span<const double> dh, std::span<const double> dc,
                                 const LSTMCellCache& cache, const LSTMParams& p);

/// Per-step activations for a whole batch, stored [step][batch][unit].
struct LSTMSequenceCache {
  std::size_t batch = 0;
  std::size_t steps = 0;
  std::size_t hidden = 0;
  std::size_t input = 0;
  std::vector<double> z;        ///< steps * batch * (hidden + input)
  std::vector<double> f, i, c_tilde, o, c, tanh_c;  ///< steps * batch * hidden
};

struct LSTMSequenceOutput {
  Tensor h_last;  ///< [batch, hidden]
  LSTMSequenceCache cache;
};

/// x_seq: [batch, T, input], zero initial state. Throws on T == 0.
LSTMSequenceOutput lstm_sequence_forward(const Tensor& x_seq, const LSTMParams& p);

struct LSTMSequenceGrads {
  Tensor grad_x_seq;  ///< [batch, T, input]
  LSTMParams grad_params;
};

/// Backpropagation through time from a gradient on h_last.
LSTMSequenceGrads lstm_backward(const Tensor& upstream_h_last, const LSTMSequenceCache& cache,
                                const LSTMParams& p);

}  // namespace gridcast::nn
