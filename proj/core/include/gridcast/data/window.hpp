#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <utility>
#include <vector>

#include "gridcast/data/frame.hpp"
#include "gridcast/tensor.hpp"

namespace gridcast::data {

/// Supervised pairs: window j holds rows j..j+L-1 of every feature and its
/// target is Freq at row j+L.
struct WindowedDataset {
  std::size_t window_length = 0;
  std::size_t feature_count = kFeatureCount;
  MinuteTime start{};                     ///< timestamp of frame row 0
  Tensor inputs;                          ///< [count, L, features]
  std::vector<double> targets;            ///< [count]
  std::vector<std::size_t> source_rows;   ///< frame row of each target

  std::size_t count() const noexcept { return targets.size(); }
  bool empty() const noexcept { return targets.empty(); }
  MinuteTime target_time(std::size_t j) const {
    return start + std::chrono::minutes(source_rows.at(j));
  }

  /// Windows [begin, end) as a new dataset.
  WindowedDataset slice(std::size_t begin, std::size_t end) const;
  /// Windows at the given positions, in the given order.
  WindowedDataset gather(const std::vector<std::size_t>& positions) const;

  bool operator==(const WindowedDataset&) const = default;
};

/// Returns an empty dataset (count 0) when the frame has no more than L rows.
WindowedDataset make_windows(const TimeSeriesFrame& frame, std::size_t window_length);

/// Number of windows that go to the training side for a given fraction.
std::size_t train_window_count(std::size_t count, double train_fraction);

/// First floor(count * fraction) windows train, the rest test. No shuffling.
std::pair<WindowedDataset, WindowedDataset> chronological_split(const WindowedDataset& dataset,
                                                                double train_fraction);

/// Rows [0, n) of the frame that feed training windows (inputs and targets)
/// when the frame is windowed with L and split at `train_fraction`.
std::size_t training_row_count(std::size_t frame_rows, std::size_t window_length,
                               double train_fraction);

void write_dataset(const WindowedDataset& dataset, std::ostream& out);
WindowedDataset read_dataset(std::istream& in);

}  // namespace gridcast::data
