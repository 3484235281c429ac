#include "gridcast/nn/activations.hpp"

namespace gridcast::nn {

ActivationOutput sigmoid(const Tensor& x) {
  Tensor y = Tensor::zeros_like(x);
  for (std::size_t k = 0; k < x.size(); ++k) y[k] = sigmoid(x[k]);
  return {y, [y](const Tensor& upstream) {
            Tensor g = Tensor::zeros_like(y);
            for (std::size_t k = 0; k < y.size(); ++k) g[k] = upstream[k] * y[k] * (1.0 - y[k]);
            return g;
          }};
}

ActivationOutput tanh_op(const Tensor& x) {
  Tensor y = Tensor::zeros_like(x);
  for (std::size_t k = 0; k < x.size(); ++k) y[k] = std::tanh(x[k]);
  return {y, [y](const Tensor& upstream) {
            Tensor g = Tensor::zeros_like(y);
            for (std::size_t k = 0; k < y.size(); ++k) g[k] = upstream[k] * (1.0 - y[k] * y[k]);
            return g;
          }};
}

ActivationOutput relu(const Tensor& x) {
  Tensor y = Tensor::zeros_like(x);
  for (std::size_t k = 0; k < x.size(); ++k) y[k] = relu(x[k]);
  return {y, [x](const Tensor& upstream) {
            Tensor g = Tensor::zeros_like(x);
            for (std::size_t k = 0; k < x.size(); ++k) g[k] = x[k] > 0.0 ? upstream[k] : 0.0;
            return g;
          }};
}

}  // namespace gridcast::nn
