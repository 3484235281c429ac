#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "gridcast/data/csv.hpp"
#include "gridcast/data/features.hpp"
#include "gridcast/data/timestamp.hpp"

namespace gridcast::data {

/// Uniform one-minute table of the eight features. Row k is at start + k minutes.
class TimeSeriesFrame {
 public:
  TimeSeriesFrame() = default;
  /// Frame of `rows` rows with every cell missing.
  TimeSeriesFrame(std::string building_id, MinuteTime start, std::size_t rows);

  const std::string& building_id() const noexcept { return building_id_; }
  MinuteTime start() const noexcept { return start_; }
  std::size_t rows() const noexcept { return columns_[0].size(); }
  MinuteTime timestamp_at(std::size_t row) const { return start_ + std::chrono::minutes(row); }

  std::span<double> column(std::size_t c) { return columns_.at(c); }
  std::span<const double> column(std::size_t c) const { return columns_.at(c); }
  std::span<double> column(Feature f) { return column(index_of(f)); }
  std::span<const double> column(Feature f) const { return column(index_of(f)); }

  double& cell(std::size_t row, std::size_t c) { return columns_.at(c).at(row); }
  double cell(std::size_t row, std::size_t c) const { return columns_.at(c).at(row); }

  std::size_t missing_count() const;

  bool operator==(const TimeSeriesFrame& other) const;

 private:
  std::string building_id_;
  MinuteTime start_{};
  std::array<std::vector<double>, kFeatureCount> columns_;
};

/// Bins records by the minute of their timestamp and averages each cell over
/// the valid values in that minute. Minutes without data stay missing.
TimeSeriesFrame resample_1min(std::span<const RawRecord> records, std::string building_id = {});

struct ColumnGaps {
  std::string column;
  std::vector<std::size_t> run_lengths;

  std::size_t total() const;
};

struct GapReport {
  std::vector<ColumnGaps> columns;

  std::size_t total_missing() const;
};

struct GapFillResult {
  TimeSeriesFrame frame;
  GapReport report;
};

/// Linear interpolation inside each column, nearest valid value at the edges.
/// Throws UnfillableColumnError when a column has no valid value.
GapFillResult fill_gaps(const TimeSeriesFrame& frame);

/// `timestamp,I_a,...,Freq` with round-trip precision. Missing cells are empty.
void write_frame_csv(const TimeSeriesFrame& frame, std::ostream& out);
TimeSeriesFrame read_frame_csv(std::istream& in, std::string building_id = {});

}  // namespace gridcast::data
