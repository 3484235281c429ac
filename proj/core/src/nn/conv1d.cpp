#include "gridcast/nn/conv1d.hpp"

#include "gridcast/error.hpp"

namespace gridcast::nn {
namespace {

void check_params(const Conv1DParams& p) {
  if (p.kernels.rank() != 3) throw ShapeError("conv kernels must be rank 3, got " + shape_string(p.kernels.shape()));
  if (p.bias.size() != p.kernels.dim(0)) throw ShapeError("conv bias length does not match out_channels");
  if (p.stride == 0) throw ShapeError("conv stride must be positive");
  if (p.kernels.dim(2) == 0) throw ShapeError("conv kernel size must be positive");
}

std::size_t check_input(const Tensor& x, const Conv1DParams& p) {
  check_params(p);
  if (x.rank() != 3) throw ShapeError("conv input must be [batch, channels, length], got " + shape_string(x.shape()));
  if (x.dim(1) != p.in_channels()) {
    throw ShapeError("conv input has " + std::to_string(x.dim(1)) + " channels, kernels expect " +
                     std::to_string(p.in_channels()));
  }
  const std::size_t out_len = p.output_length(x.dim(2));
  if (out_len < 1) throw ShapeError("conv input length " + std::to_string(x.dim(2)) + " is shorter than the kernel");
  return out_len;
}

}  // namespace

std::size_t Conv1DParams::output_length(std::size_t input_length) const {
  const std::size_t padded = input_length + 2 * padding;
  if (padded < kernel_size() || stride == 0) return 0;
  return (padded - kernel_size()) / stride + 1;
}

Conv1DParams Conv1DParams::zeros(std::size_t out_channels, std::size_t in_channels,
                                 std::size_t kernel_size, std::size_t stride, std::size_t padding) {
  return {Tensor({out_channels, in_channels, kernel_size}), Tensor({out_channels}), stride, padding};
}

Tensor conv1d_forward(const Tensor& x, const Conv1DParams& p) {
  const std::size_t out_len = check_input(x, p);
  const std::size_t batch = x.dim(0), cin = x.dim(1), len = x.dim(2);
  const std::size_t cout = p.out_channels(), ks = p.kernel_size();
  Tensor y({batch, cout, out_len});
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t o = 0; o < cout; ++o) {
      for (std::size_t q = 0; q < out_len; ++q) {
        double acc = p.bias[o];
        const std::ptrdiff_t origin = static_cast<std::ptrdiff_t>(q * p.stride) - static_cast<std::ptrdiff_t>(p.padding);
        for (std::size_t c = 0; c < cin; ++c) {
          for (std::size_t k = 0; k < ks; ++k) {
            const std::ptrdiff_t pos = origin + static_cast<std::ptrdiff_t>(k);
            if (pos < 0 || pos >= static_cast<std::ptrdiff_t>(len)) continue;
            acc += p.kernels.at(o, c, k) * x.at(b, c, static_cast<std::size_t>(pos));
          }
        }
        y.at(b, o, q) = acc;
      }
    }
  }
  return y;
}

Conv1DGrads conv1d_backward(const Tensor& upstream, const Tensor& x, const Conv1DParams& p) {
  const std::size_t out_len = check_input(x, p);
  const std::size_t batch = x.dim(0), cin = x.dim(1), len = x.dim(2);
  const std::size_t cout = p.out_channels(), ks = p.kernel_size();
  if (upstream.shape() != Tensor::Shape{batch, cout, out_len}) {
    throw ShapeError("conv upstream gradient has shape " + shape_string(upstream.shape()) + ", expected " +
                     shape_string({batch, cout, out_len}));
  }
  Conv1DGrads g{Tensor::zeros_like(x), Tensor::zeros_like(p.kernels), Tensor::zeros_like(p.bias)};
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t o = 0; o < cout; ++o) {
      for (std::size_t q = 0; q < out_len; ++q) {
        const double up = upstream.at(b, o, q);
        if (up == 0.0) continue;
        g.grad_bias[o] += up;
        const std::ptrdiff_t origin = static_cast<std::ptrdiff_t>(q * p.stride) - static_cast<std::ptrdiff_t>(p.padding);
        for (std::size_t c = 0; c < cin; ++c) {
          for (std::size_t k = 0; k < ks; ++k) {
            const std::ptrdiff_t pos = origin + static_cast<std::ptrdiff_t>(k);
            if (pos < 0 || pos >= static_cast<std::ptrdiff_t>(len)) continue;
            const auto at = static_cast<std::size_t>(pos);
            g.grad_kernels.at(o, c, k) += up * x.at(b, c, at);
            g.grad_x.at(b, c, at) += up * p.kernels.at(o, c, k);
          }
        }
      }
    }
  }
  return g;
}

}  // namespace gridcast::nn
