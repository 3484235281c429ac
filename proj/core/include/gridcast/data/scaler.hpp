#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gridcast/data/frame.hpp"

namespace gridcast::data {

/// Half-open row interval [begin, end).
struct RowRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const noexcept { return end > begin ? end - begin : 0; }
};

/// Per-column min/max for min-max scaling.
struct ScalerParams {
  std::vector<std::string> columns;
  std::vector<double> min;
  std::vector<double> max;

  bool is_constant(std::size_t c) const { return max.at(c) == min.at(c); }
  std::size_t index_of(std::string_view column) const;

  bool operator==(const ScalerParams&) const = default;
};

/// Fits over `fit_range` only so rows outside it cannot influence scaling.
ScalerParams fit_scaler(const TimeSeriesFrame& frame, RowRange fit_range);

/// x -> (x - min) / (max - min); constant columns map to 0. Values outside
/// the fitted range land outside [0, 1].
TimeSeriesFrame apply_scaler(const TimeSeriesFrame& frame, const ScalerParams& scaler);

/// y -> y * (max - min) + min for the named column.
std::vector<double> invert_scaler(std::span<const double> values, const ScalerParams& scaler,
                                  std::string_view column);

/// Forward transform of a single named column.
std::vector<double> scale_values(std::span<const double> values, const ScalerParams& scaler,
                                 std::string_view column);

void write_scaler(const ScalerParams& scaler, std::ostream& out);
ScalerParams read_scaler(std::istream& in);

}  // namespace gridcast::data
