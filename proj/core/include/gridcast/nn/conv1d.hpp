#pragma once

#include <cstddef>

#include "gridcast/tensor.hpp"

namespace gridcast::nn {

/// Cross-correlation with zero padding, as in most deep-learning libraries.
struct Conv1DParams {
  Tensor kernels;  ///< [out_channels, in_channels, kernel_size]
  Tensor bias;     ///< [out_channels]
  std::size_t stride = 1;
  std::size_t padding = 0;

  std::size_t out_channels() const { return kernels.dim(0); }
  std::size_t in_channels() const { return kernels.dim(1); }
  std::size_t kernel_size() const { return kernels.dim(2); }

  /// floor((L_in + 2 padding - kernel) / stride) + 1, or 0 when the padded
  /// input is shorter than the kernel.
  std::size_t output_length(std::size_t input_length) const;

  static Conv1DParams zeros(std::size_t out_channels, std::size_t in_channels,
                            std::size_t kernel_size, std::size_t stride, std::size_t padding);

  bool operator==(const Conv1DParams&) const = default;
};

/// x: [batch, in_channels, L_in] -> [batch, out_channels, L_out]
Tensor conv1d_forward(const Tensor& x, const Conv1DParams& p);

struct Conv1DGrads {
  Tensor grad_x;
  Tensor grad_kernels;
  Tensor grad_bias;
};

/// `x` is the forward input; `upstream` has the forward output's shape.
Conv1DGrads conv1d_backward(const Tensor& upstream, const Tensor& x, const Conv1DParams& p);

}  // namespace gridcast::nn
