#include "gridcast/nn/lstm.hpp"

#include <algorithm>
#include <cmath>

#include "gridcast/error.hpp"
#include "kernels.hpp"

namespace gridcast::nn {
namespace {

using detail::accumulate_rows;
using detail::sigmoid_kernel;
using detail::tanh_kernel;

// The step kernels carry an AVX2 clone; every output element keeps the same
// operation order, so both clones produce identical bits.
#define GRIDCAST_VECTOR_CLONES __attribute__((target_clones("avx2", "default")))

constexpr std::size_t kGates = 4;

/// The four gates packed side by side, gate-major: entry j of a packed row is
/// gate j / hidden, unit j % hidden, in the order f, i, c~, o.
struct Packed {
  std::size_t hidden = 0;
  std::size_t width = 0;
  std::vector<double> wt;    ///< [width, 4*hidden]
  std::vector<double> w;     ///< [4*hidden, width]
  std::vector<double> bias;  ///< [4*hidden]

  explicit Packed(const LSTMParams& p) : hidden(p.hidden()), width(p.hidden() + p.input()) {
    const std::size_t rows = kGates * hidden;
    wt.resize(width * rows);
    w.resize(rows * width);
    bias.resize(rows);
    const Tensor* ws[kGates] = {&p.w_f, &p.w_i, &p.w_c, &p.w_o};
    const Tensor* bs[kGates] = {&p.b_f, &p.b_i, &p.b_c, &p.b_o};
    for (std::size_t g = 0; g < kGates; ++g) {
      for (std::size_t u = 0; u < hidden; ++u) {
        const std::size_t j = g * hidden + u;
        bias[j] = (*bs[g])[u];
        for (std::size_t k = 0; k < width; ++k) {
          const double v = ws[g]->data()[u * width + k];
          wt[k * rows + j] = v;
          w[j * width + k] = v;
        }
      }
    }
  }
};

/// Parameter gradients in the packed layout; unpacked once at the end.
struct PackedGrads {
  std::vector<double> wt;
  std::vector<double> bias;

  explicit PackedGrads(const Packed& pk) : wt(pk.wt.size(), 0.0), bias(pk.bias.size(), 0.0) {}

  LSTMParams unpack(const Packed& pk, std::size_t input) const {
    LSTMParams out = LSTMParams::zeros(pk.hidden, input);
    Tensor* ws[kGates] = {&out.w_f, &out.w_i, &out.w_c, &out.w_o};
    Tensor* bs[kGates] = {&out.b_f, &out.b_i, &out.b_c, &out.b_o};
    const std::size_t rows = kGates * pk.hidden;
    for (std::size_t g = 0; g < kGates; ++g) {
      for (std::size_t u = 0; u < pk.hidden; ++u) {
        const std::size_t j = g * pk.hidden + u;
        (*bs[g])[u] = bias[j];
        for (std::size_t k = 0; k < pk.width; ++k) ws[g]->data()[u * pk.width + k] = wt[k * rows + j];
      }
    }
    return out;
  }
};

/// Views into one step's activations; every array has `hidden` entries.
template <typename T>
struct StepView {
  const double* z;
  const double* c_prev;
  T* f;
  T* i;
  T* c_tilde;
  T* o;
  T* c;
  T* tanh_c;
};

using StepOut = StepView<double>;
using StepIn = StepView<const double>;

/// `scratch` needs 4*hidden entries.
GRIDCAST_VECTOR_CLONES void step_forward(const Packed& pk, const StepOut& s, double* h_out, double* scratch) {
  const std::size_t hidden = pk.hidden;
  const std::size_t rows = kGates * hidden;
  double* a = scratch;
  std::copy_n(pk.bias.data(), rows, a);
  accumulate_rows(s.z, pk.width, pk.wt.data(), rows, a, rows);
  for (std::size_t j = 0; j < 2 * hidden; ++j) a[j] = sigmoid_kernel(a[j]);
  for (std::size_t j = 2 * hidden; j < 3 * hidden; ++j) a[j] = tanh_kernel(a[j]);
  for (std::size_t j = 3 * hidden; j < rows; ++j) a[j] = sigmoid_kernel(a[j]);
  for (std::size_t u = 0; u < hidden; ++u) {
    s.f[u] = a[u];
    s.i[u] = a[hidden + u];
    s.c_tilde[u] = a[2 * hidden + u];
    s.o[u] = a[3 * hidden + u];
    s.c[u] = s.f[u] * s.c_prev[u] + s.i[u] * s.c_tilde[u];
  }
  for (std::size_t u = 0; u < hidden; ++u) {
    s.tanh_c[u] = tanh_kernel(s.c[u]);
    h_out[u] = s.o[u] * s.tanh_c[u];
  }
}

/// Adjoint of one step. `dc` holds the gradient on C_t on entry and on
/// C_{t-1} on exit; `dz` receives the gradient on [h_{t-1}, x_t] and `da` the
/// gradient on the 4*hidden gate pre-activations.
GRIDCAST_VECTOR_CLONES void step_backward(const Packed& pk, const StepIn& s, const double* dh, double* dc,
                                          double* dz, double* da) {
  const std::size_t hidden = pk.hidden;
  for (std::size_t u = 0; u < hidden; ++u) {
    const double d_o = dh[u] * s.tanh_c[u];
    const double d_c = dc[u] + dh[u] * s.o[u] * (1.0 - s.tanh_c[u] * s.tanh_c[u]);
    da[u] = d_c * s.c_prev[u] * s.f[u] * (1.0 - s.f[u]);
    da[hidden + u] = d_c * s.c_tilde[u] * s.i[u] * (1.0 - s.i[u]);
    da[2 * hidden + u] = d_c * s.i[u] * (1.0 - s.c_tilde[u] * s.c_tilde[u]);
    da[3 * hidden + u] = d_o * s.o[u] * (1.0 - s.o[u]);
    dc[u] = d_c * s.f[u];
  }
  std::fill_n(dz, pk.width, 0.0);
  accumulate_rows(da, kGates * hidden, pk.w.data(), pk.width, dz, pk.width);
}

/// Adds one step's parameter gradients for a whole batch, samples in order.
/// `zt` is [width, batch] (the step inputs transposed), `da` is [batch, 4*hidden]
/// and `ones` holds `batch` ones.
GRIDCAST_VECTOR_CLONES void accumulate_step_grads(const Packed& pk, const double* zt, const double* da,
                                                  const double* ones, std::size_t batch, PackedGrads& grads) {
  const std::size_t rows = kGates * pk.hidden;
  for (std::size_t k = 0; k < pk.width; ++k) {
    accumulate_rows(zt + k * batch, batch, da, rows, grads.wt.data() + k * rows, rows);
  }
  accumulate_rows(ones, batch, da, rows, grads.bias.data(), rows);
}

}  // namespace

void LSTMParams::validate() const {
  if (w_f.rank() != 2 || w_f.dim(1) <= w_f.dim(0)) {
    throw ShapeError("LSTM weights must be [hidden, hidden + input] with input >= 1, got " + shape_string(w_f.shape()));
  }
  for (const Tensor* w : {&w_i, &w_c, &w_o}) {
    if (w->shape() != w_f.shape()) throw ShapeError("LSTM gate weight matrices must share one shape");
  }
  for (const Tensor* b : {&b_f, &b_i, &b_c, &b_o}) {
    if (b->rank() != 1 || b->size() != w_f.dim(0)) throw ShapeError("LSTM gate biases must be [hidden]");
  }
}

LSTMParams LSTMParams::zeros(std::size_t hidden, std::size_t input) {
  const Tensor w({hidden, hidden + input});
  const Tensor b({hidden});
  return {w, w, w, w, b, b, b, b};
}

LSTMCellOutput lstm_cell_forward(std::span<const double> x, const LSTMState& state,
                                 const LSTMParams& p) {
  p.validate();
  const std::size_t hidden = p.hidden();
  if (x.size() != p.input() || state.h.size() != hidden || state.c.size() != hidden) {
    throw ShapeError("LSTM cell input or state size does not match the parameters");
  }
  LSTMCellOutput out;
  LSTMCellCache& cache = out.cache;
  cache.z.assign(state.h.begin(), state.h.end());
  cache.z.insert(cache.z.end(), x.begin(), x.end());
  cache.c_prev = state.c;
  for (auto* v : {&cache.f, &cache.i, &cache.c_tilde, &cache.o, &cache.tanh_c}) v->assign(hidden, 0.0);
  out.state = LSTMState::zeros(hidden);
  const Packed pk(p);
  std::vector<double> scratch(kGates * hidden);
  step_forward(pk, {cache.z.data(), cache.c_prev.data(), cache.f.data(), cache.i.data(), cache.c_tilde.data(),
                   cache.o.data(), out.state.c.data(), cache.tanh_c.data()},
               out.state.h.data(), scratch.data());
  return out;
}

LSTMCellGrads lstm_cell_backward(std::span<const double> dh, std::span<const double> dc,
                                 const LSTMCellCache& cache, const LSTMParams& p) {
  p.validate();
  const std::size_t hidden = p.hidden();
  if (dh.size() != hidden || dc.size() != hidden || cache.z.size() != hidden + p.input()) {
    throw ShapeError("LSTM cell gradient sizes do not match the cache");
  }
  const StepIn s{cache.z.data(), cache.c_prev.data(), cache.f.data(), cache.i.data(),
                 cache.c_tilde.data(), cache.o.data(), nullptr, cache.tanh_c.data()};

  const Packed pk(p);
  PackedGrads packed_grads(pk);
  std::vector<double> dc_work(dc.begin(), dc.end());
  std::vector<double> dz(hidden + p.input());
  std::vector<double> da(kGates * hidden);
  const double one = 1.0;
  step_backward(pk, s, dh.data(), dc_work.data(), dz.data(), da.data());
  accumulate_step_grads(pk, cache.z.data(), da.data(), &one, 1, packed_grads);
  LSTMCellGrads g;
  g.dparams = packed_grads.unpack(pk, p.input());
  g.dh_prev.assign(dz.begin(), dz.begin() + static_cast<std::ptrdiff_t>(hidden));
  g.dx.assign(dz.begin() + static_cast<std::ptrdiff_t>(hidden), dz.end());
  g.dc_prev = std::move(dc_work);
  return g;
}

LSTMSequenceOutput lstm_sequence_forward(const Tensor& x_seq, const LSTMParams& p) {
  p.validate();
  if (x_seq.rank() != 3) throw ShapeError("LSTM input must be [batch, T, input], got " + shape_string(x_seq.shape()));
  const std::size_t batch = x_seq.dim(0), steps = x_seq.dim(1), input = x_seq.dim(2);
  if (steps == 0) throw InvalidArgumentError("LSTM sequence is empty (T = 0)");
  if (input != p.input()) {
    throw ShapeError("LSTM input size " + std::to_string(input) + " does not match parameters (" +
                     std::to_string(p.input()) + ")");
  }
  const std::size_t hidden = p.hidden();
  const std::size_t width = hidden + input;

  LSTMSequenceOutput out;
  LSTMSequenceCache& cache = out.cache;
  cache.batch = batch;
  cache.steps = steps;
  cache.hidden = hidden;
  cache.input = input;
  cache.z.assign(steps * batch * width, 0.0);
  for (auto* v : {&cache.f, &cache.i, &cache.c_tilde, &cache.o, &cache.c, &cache.tanh_c})
    v->assign(steps * batch * hidden, 0.0);

  const Packed pk(p);
  std::vector<double> scratch(kGates * hidden);
  std::vector<double> h(batch * hidden, 0.0);
  const std::vector<double> zero_c(hidden, 0.0);
  for (std::size_t t = 0; t < steps; ++t) {
    for (std::size_t b = 0; b < batch; ++b) {
      const std::size_t slot = t * batch + b;
      double* z = cache.z.data() + slot * width;
      std::copy_n(h.data() + b * hidden, hidden, z);
      std::copy_n(x_seq.data() + (b * steps + t) * input, input, z + hidden);
      const double* c_prev = t == 0 ? zero_c.data() : cache.c.data() + ((t - 1) * batch + b) * hidden;
      const std::size_t off = slot * hidden;
      step_forward(pk, {z, c_prev, cache.f.data() + off, cache.i.data() + off, cache.c_tilde.data() + off,
                       cache.o.data() + off, cache.c.data() + off, cache.tanh_c.data() + off},
                   h.data() + b * hidden, scratch.data());
    }
  }
  out.h_last = Tensor({batch, hidden}, std::move(h));
  return out;
}

LSTMSequenceGrads lstm_backward(const Tensor& upstream_h_last, const LSTMSequenceCache& cache,
                                const LSTMParams& p) {
  p.validate();
  const std::size_t batch = cache.batch, steps = cache.steps, hidden = cache.hidden, input = cache.input;
  if (hidden != p.hidden() || input != p.input()) throw ShapeError("LSTM cache does not match parameters");
  if (upstream_h_last.shape() != Tensor::Shape{batch, hidden}) {
    throw ShapeError("LSTM upstream gradient has shape " + shape_string(upstream_h_last.shape()) +
                     ", expected " + shape_string({batch, hidden}));
  }
  const std::size_t width = hidden + input;

  const Packed pk(p);
  PackedGrads packed_grads(pk);
  Tensor grad_x_seq({batch, steps, input});
  std::vector<double> dh(upstream_h_last.values().begin(), upstream_h_last.values().end());
  std::vector<double> dc(batch * hidden, 0.0);
  std::vector<double> dz(width);
  std::vector<double> da(batch * kGates * hidden);
  std::vector<double> zt(width * batch);
  const std::vector<double> ones(batch, 1.0);
  const std::vector<double> zero_c(hidden, 0.0);
  for (std::size_t t = steps; t-- > 0;) {
    for (std::size_t b = 0; b < batch; ++b) {
      const std::size_t slot = t * batch + b;
      const std::size_t off = slot * hidden;
      const double* c_prev = t == 0 ? zero_c.data() : cache.c.data() + ((t - 1) * batch + b) * hidden;
      const StepIn s{cache.z.data() + slot * width, c_prev,
                     cache.f.data() + off,          cache.i.data() + off,
                     cache.c_tilde.data() + off,    cache.o.data() + off,
                     cache.c.data() + off,          cache.tanh_c.data() + off};
      step_backward(pk, s, dh.data() + b * hidden, dc.data() + b * hidden, dz.data(),
                    da.data() + b * kGates * hidden);
      std::copy_n(dz.data(), hidden, dh.data() + b * hidden);
      std::copy_n(dz.data() + hidden, input, grad_x_seq.data() + (b * steps + t) * input);
      for (std::size_t k = 0; k < width; ++k) zt[k * batch + b] = s.z[k];
    }
    accumulate_step_grads(pk, zt.data(), da.data(), ones.data(), batch, packed_grads);
  }
  return {std::move(grad_x_seq), packed_grads.unpack(pk, input)};
}

}  // namespace gridcast::nn
