#pragma once

#include "gridcast/tensor.hpp"
#include "gridcast/util/random.hpp"

namespace gridcast::nn {

enum class Mode { Train, Eval };

struct DropoutOutput {
  Tensor value;
  Tensor mask;  ///< per-element multiplier: 0 or 1/(1-rate); all ones in eval mode
};

/// Inverted dropout: survivors are scaled at train time, eval is the identity.
/// Throws InvalidArgumentError unless 0 <= rate < 1.
DropoutOutput dropout_forward(const Tensor& x, double rate, Mode mode, util::Rng& rng);

Tensor dropout_backward(const Tensor& upstream, const Tensor& mask);

}  // namespace gridcast::nn
