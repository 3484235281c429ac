#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gridcast/model/convlstm.hpp"
#include "gridcast/tensor.hpp"

namespace gridcast::train {

struct AdamOptions {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// First and second moments, one tensor per parameter tensor.
struct AdamState {
  std::vector<Tensor> m;
  std::vector<Tensor> v;
  std::uint64_t t = 0;

  static AdamState for_params(std::span<const Tensor* const> params);
  static AdamState for_model(const model::ModelParams& params);
};

/// One bias-corrected Adam update, in place. Throws NonFiniteError on a
/// non-finite gradient (before touching anything) and ShapeError on mismatch.
void adam_step(std::span<Tensor* const> params, std::span<const Tensor* const> grads,
               AdamState& state, const AdamOptions& options);

void adam_step(model::ModelParams& params, const model::ModelParams& grads, AdamState& state,
               const AdamOptions& options);

}  // namespace gridcast::train
