#pragma once

#include <cstddef>

#include "gridcast/tensor.hpp"

namespace gridcast::nn {

struct DenseParams {
  Tensor weight;  ///< [out, in]
  Tensor bias;    ///< [out]

  std::size_t in() const { return weight.dim(1); }
  std::size_t out() const { return weight.dim(0); }

  static DenseParams zeros(std::size_t out, std::size_t in);

  bool operator==(const DenseParams&) const = default;
};

/// x: [batch, in] -> [batch, out], y = W x + b per row.
Tensor dense_forward(const Tensor& x, const DenseParams& p);

struct DenseGrads {
  Tensor grad_x;
  Tensor grad_weight;
  Tensor grad_bias;
};

DenseGrads dense_backward(const Tensor& upstream, const Tensor& x, const DenseParams& p);

}  // namespace gridcast::nn
