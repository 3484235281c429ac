#include "gridcast/nn/dense.hpp"

#include "gridcast/error.hpp"
#include "kernels.hpp"

namespace gridcast::nn {
namespace {

void check(const Tensor& x, const DenseParams& p) {
  if (p.weight.rank() != 2 || p.bias.rank() != 1 || p.bias.size() != p.weight.dim(0)) {
    throw ShapeError("dense parameters must be weight [out, in] and bias [out]");
  }
  if (x.rank() != 2 || x.dim(1) != p.in()) {
    throw ShapeError("dense input has shape " + shape_string(x.shape()) + ", expected [batch, " +
                     std::to_string(p.in()) + "]");
  }
}

}  // namespace

DenseParams DenseParams::zeros(std::size_t out, std::size_t in) { return {Tensor({out, in}), Tensor({out})}; }

Tensor dense_forward(const Tensor& x, const DenseParams& p) {
  check(x, p);
  const std::size_t batch = x.dim(0), in = p.in(), out = p.out();
  Tensor y({batch, out});
  for (std::size_t b = 0; b < batch; ++b)
    for (std::size_t o = 0; o < out; ++o)
      y.at(b, o) = detail::dot(p.weight.data() + o * in, x.data() + b * in, in) + p.bias[o];
  return y;
}

DenseGrads dense_backward(const Tensor& upstream, const Tensor& x, const DenseParams& p) {
  check(x, p);
  const std::size_t batch = x.dim(0), in = p.in(), out = p.out();
  if (upstream.shape() != Tensor::Shape{batch, out}) {
    throw ShapeError("dense upstream gradient has shape " + shape_string(upstream.shape()));
  }
  DenseGrads g{Tensor::zeros_like(x), Tensor::zeros_like(p.weight), Tensor::zeros_like(p.bias)};
  for (std::size_t b = 0; b < batch; ++b) {
    const double* xb = x.data() + b * in;
    double* gx = g.grad_x.data() + b * in;
    for (std::size_t o = 0; o < out; ++o) {
      const double up = upstream.at(b, o);
      g.grad_bias[o] += up;
      detail::axpy(up, xb, g.grad_weight.data() + o * in, in);
      detail::axpy(up, p.weight.data() + o * in, gx, in);
    }
  }
  return g;
}

}  // namespace gridcast::nn
