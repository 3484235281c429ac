#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gridcast/data/features.hpp"
#include "gridcast/nn/conv1d.hpp"
#include "gridcast/nn/dense.hpp"
#include "gridcast/nn/dropout.hpp"
#include "gridcast/nn/loss.hpp"
#include "gridcast/nn/lstm.hpp"
#include "gridcast/tensor.hpp"
#include "gridcast/util/random.hpp"

namespace gridcast::model {

/// Architecture of one building model: Conv1D -> ReLU -> LSTM -> dropout ->
/// ReLU -> FC1 -> ReLU -> FC2 (linear output).
struct ConvLSTMConfig {
  std::size_t window_length = 7;
  std::size_t feature_count = data::kFeatureCount;
  std::size_t conv_out_channels = 64;
  std::size_t kernel_size = 3;
  std::size_t padding = 1;
  std::size_t stride = 1;
  std::size_t lstm_input = data::kFeatureCount;
  std::size_t lstm_hidden = 32;
  double dropout_rate = 0.1;
  std::size_t fc1_out = 10;
  std::size_t fc2_out = 1;

  /// Building presets: A (L 7, conv 64), B (L 5, conv 64), C (L 3, conv 32).
  static ConvLSTMConfig preset(std::string_view name);

  /// Length of the conv output along the feature axis.
  std::size_t conv_output_length() const;

  /// Throws ConfigError on non-positive or inconsistent dimensions.
  void validate() const;

  bool operator==(const ConvLSTMConfig&) const = default;
};

/// Default epoch count for a preset: 1500 for A and B, 2000 for C.
std::size_t preset_epochs(std::string_view name);

struct ModelParams {
  ConvLSTMConfig config;
  std::uint64_t seed = 0;
  nn::Conv1DParams conv;
  nn::LSTMParams lstm;
  nn::DenseParams fc1;
  nn::DenseParams fc2;

  /// Learnable tensors in declaration order.
  std::vector<Tensor*> tensors();
  std::vector<const Tensor*> tensors() const;
  static const std::vector<std::string>& tensor_names();

  /// Same config and shapes with every tensor zero.
  ModelParams zeros_like() const;

  std::size_t parameter_count() const;

  bool operator==(const ModelParams&) const = default;
};

/// Zero biases, Glorot-uniform weights (+-sqrt(6 / (fan_in + fan_out))).
ModelParams build_model(const ConvLSTMConfig& config, std::uint64_t seed);

/// The single point where tensor axes are reinterpreted. The window's L
/// timesteps become conv input channels over a spatial axis of the eight
/// features, and afterwards the conv output channels become the LSTM's time
/// axis with one step per channel. Both are pure relabelings of row-major
/// memory, so the backward pass is the inverse reshape.
Tensor window_as_conv_input(const Tensor& windows);
Tensor conv_output_as_sequence(const Tensor& conv_out);

struct ForwardCache {
  Tensor conv_input;       ///< [B, L, F]
  Tensor conv_pre;         ///< [B, C, F'] before ReLU
  nn::LSTMSequenceCache lstm;
  Tensor lstm_out;         ///< [B, H]
  Tensor dropout_mask;     ///< [B, H]
  Tensor fc1_in;           ///< [B, H] after dropout + ReLU
  Tensor fc1_pre;          ///< [B, 10]
  Tensor fc2_in;           ///< [B, 10]
};

struct ForwardResult {
  Tensor prediction;  ///< [B, 1]
  ForwardCache cache;
};

/// x: [batch, L, features]. Dropout draws from `rng` only in train mode.
ForwardResult forward(const ModelParams& params, const Tensor& x, nn::Mode mode, util::Rng& rng);

/// Eval-mode predictions for every window, evaluated in chunks.
std::vector<double> predict(const ModelParams& params, const Tensor& x,
                            std::size_t chunk_size = 256);

struct ForwardBackwardResult {
  double loss = 0.0;
  ModelParams grads;
  Tensor prediction;
};

/// Loss over the batch and its gradient with respect to every learnable
/// tensor. Throws NonFiniteError when the loss is NaN or infinite.
ForwardBackwardResult forward_backward(const ModelParams& params, const Tensor& x,
                                       std::span<const double> targets, nn::LossKind loss,
                                       nn::Mode mode, util::Rng& rng);

}  // namespace gridcast::model
