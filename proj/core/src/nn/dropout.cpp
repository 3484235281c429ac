#include "gridcast/nn/dropout.hpp"

#include "gridcast/error.hpp"

namespace gridcast::nn {

DropoutOutput dropout_forward(const Tensor& x, double rate, Mode mode, util::Rng& rng) {
  if (!(rate >= 0.0 && rate < 1.0)) throw InvalidArgumentError("dropout rate must satisfy 0 <= rate < 1");
  DropoutOutput out{x, Tensor(x.shape(), 1.0)};
  if (mode == Mode::Eval || rate == 0.0) return out;
  const double keep_scale = 1.0 / (1.0 - rate);
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double m = rng.uniform01() < rate ? 0.0 : keep_scale;
    out.mask[k] = m;
    out.value[k] = x[k] * m;
  }
  return out;
}

Tensor dropout_backward(const Tensor& upstream, const Tensor& mask) {
  if (upstream.shape() != mask.shape()) throw ShapeError("dropout gradient and mask shapes differ");
  Tensor g = upstream;
  for (std::size_t k = 0; k < g.size(); ++k) g[k] *= mask[k];
  return g;
}

}  // namespace gridcast::nn
