#include "gridcast/train/adam.hpp"

#include <cmath>

#include "gridcast/error.hpp"

namespace gridcast::train {

AdamState AdamState::for_params(std::span<const Tensor* const> params) {
  AdamState s;
  for (const Tensor* p : params) {
    s.m.push_back(Tensor::zeros_like(*p));
    s.v.push_back(Tensor::zeros_like(*p));
  }
  return s;
}

AdamState AdamState::for_model(const model::ModelParams& params) {
  const auto tensors = params.tensors();
  return for_params(tensors);
}

void adam_step(std::span<Tensor* const> params, std::span<const Tensor* const> grads, AdamState& state,
               const AdamOptions& options) {
  if (params.size() != grads.size() || params.size() != state.m.size() || params.size() != state.v.size()) {
    throw ShapeError("Adam: parameter, gradient and moment counts differ");
  }
  for (std::size_t k = 0; k < params.size(); ++k) {
    if (params[k]->shape() != grads[k]->shape() || params[k]->shape() != state.m[k].shape() ||
        params[k]->shape() != state.v[k].shape()) {
      throw ShapeError("Adam: shape mismatch at tensor " + std::to_string(k));
    }
    if (!grads[k]->all_finite()) throw NonFiniteError("Adam: non-finite gradient at tensor " + std::to_string(k));
  }

  ++state.t;
  const double t = static_cast<double>(state.t);
  const double correction1 = 1.0 - std::pow(options.beta1, t);
  const double correction2 = 1.0 - std::pow(options.beta2, t);
  for (std::size_t k = 0; k < params.size(); ++k) {
    double* theta = params[k]->data();
    const double* g = grads[k]->data();
    double* m = state.m[k].data();
    double* v = state.v[k].data();
    for (std::size_t e = 0; e < params[k]->size(); ++e) {
      m[e] = options.beta1 * m[e] + (1.0 - options.beta1) * g[e];
      v[e] = options.beta2 * v[e] + (1.0 - options.beta2) * g[e] * g[e];
      const double m_hat = m[e] / correction1;
      const double v_hat = v[e] / correction2;
      theta[e] -= options.learning_rate * m_hat / (std::sqrt(v_hat) + options.epsilon);
    }
  }
}

void adam_step(model::ModelParams& params, const model::ModelParams& grads, AdamState& state,
               const AdamOptions& options) {
  const auto p = params.tensors();
  const auto g = grads.tensors();
  adam_step(p, g, state, options);
}

}  // namespace gridcast::train
