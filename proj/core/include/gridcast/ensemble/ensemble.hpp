#pragma once

#include <span>
#include <string>
#include <vector>

#include "gridcast/data/scaler.hpp"
#include "gridcast/data/window.hpp"
#include "gridcast/model/convlstm.hpp"

namespace gridcast::ensemble {

struct EnsembleMember {
  std::string id;
  double weight = 0.0;
};

struct EnsembleSpec {
  std::vector<EnsembleMember> members;

  /// Campus default: A 0.3, B 0.4, C 0.3.
  static EnsembleSpec campus_default();

  std::vector<double> weights() const;
  /// Throws InvalidArgumentError unless weights are >= 0 and sum to 1 within 1e-9.
  void validate() const;
};

/// sum_k w_k p_k at every position, accumulated in member order.
std::vector<double> combine_predictions(std::span<const double> weights,
                                        const std::vector<std::vector<double>>& member_predictions);

/// Drops leading windows so every dataset targets the same timestamps (those
/// reachable by the longest window). Throws AlignmentError if the remaining
/// target timestamps still differ.
std::vector<data::WindowedDataset> align_to_common_targets(
    std::vector<data::WindowedDataset> datasets);

struct MemberInput {
  const model::ModelParams* model = nullptr;
  data::WindowedDataset windows;
  /// When set, member predictions are mapped back to physical units through
  /// this scaler's Freq column before weighting.
  const data::ScalerParams* output_scaler = nullptr;
};

struct EnsemblePrediction {
  std::vector<data::MinuteTime> timestamps;
  std::vector<std::vector<double>> member_predictions;
  std::vector<double> combined;
};

/// Eval-mode inference per member, then the weighted sum. Inputs must target
/// identical timestamps; otherwise AlignmentError lists the offending range.
EnsemblePrediction predict_ensemble(const EnsembleSpec& spec, std::span<const MemberInput> inputs);

}  // namespace gridcast::ensemble
