#pragma once

#include <cmath>
#include <functional>

#include "gridcast/tensor.hpp"

namespace gridcast::nn {

inline double sigmoid(double x) noexcept {
  // Split by sign so exp never overflows.
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

inline double relu(double x) noexcept { return x > 0.0 ? x : 0.0; }

/// Elementwise result plus a closure mapping the upstream gradient to the
/// input gradient.
struct ActivationOutput {
  Tensor value;
  std::function<Tensor(const Tensor&)> backward;
};

/// sigma' = sigma (1 - sigma)
ActivationOutput sigmoid(const Tensor& x);
/// tanh' = 1 - tanh^2
ActivationOutput tanh_op(const Tensor& x);
/// relu' = 1 for x > 0, else 0 (including x == 0)
ActivationOutput relu(const Tensor& x);

}  // namespace gridcast::nn
