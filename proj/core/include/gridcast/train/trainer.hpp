#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "gridcast/data/window.hpp"
#include "gridcast/model/convlstm.hpp"
#include "gridcast/nn/loss.hpp"
#include "gridcast/train/adam.hpp"

namespace gridcast::train {

struct TrainConfig {
  double learning_rate = 1e-4;
  std::size_t epochs = 1500;
  std::size_t batch_size = 32;
  nn::LossKind loss = nn::LossKind::Mse;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t seed = 0;
  bool shuffle_each_epoch = true;

  AdamOptions adam() const { return {learning_rate, beta1, beta2, epsilon}; }
  /// Throws InvalidArgumentError for out-of-range values.
  void validate() const;
};

struct EpochLoss {
  std::size_t epoch = 0;
  double train_mse = 0.0;
  double test_mse = 0.0;
  double train_mae = 0.0;
  double test_mae = 0.0;

  bool operator==(const EpochLoss&) const = default;
};

struct LossCurve {
  std::vector<EpochLoss> epochs;

  /// `epoch,train_mse,test_mse,train_mae,test_mae`
  void write_csv(std::ostream& out) const;
  static LossCurve read_csv(std::istream& in);

  bool operator==(const LossCurve&) const = default;
};

struct SplitLoss {
  double mse = 0.0;
  double mae = 0.0;
};

/// Eval-mode MSE and MAE over every window. Throws on an empty dataset.
SplitLoss evaluate_split(const model::ModelParams& model, const data::WindowedDataset& dataset);

struct TrainResult {
  model::ModelParams params;
  LossCurve curve;
  AdamState optimizer;
};

using EpochCallback = std::function<void(const EpochLoss&)>;

/// Mini-batch Adam. Each epoch optionally shuffles (seeded), steps once per
/// batch in train mode, then records eval-mode losses on both full splits.
/// Throws NonFiniteError naming the epoch and batch if the loss diverges.
TrainResult train(model::ModelParams model, const data::WindowedDataset& train_set,
                  const data::WindowedDataset& test_set, const TrainConfig& config,
                  const EpochCallback& on_epoch = {});

}  // namespace gridcast::train
