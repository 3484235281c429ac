#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "gridcast/data/features.hpp"
#include "gridcast/data/timestamp.hpp"

namespace gridcast::data {

/// One raw measurement row. Missing cells hold `kMissing`.
struct RawRecord {
  TimePoint timestamp;
  std::array<double, kFeatureCount> values{};

  double i_a() const { return values[index_of(Feature::CurrentA)]; }
  double i_b() const { return values[index_of(Feature::CurrentB)]; }
  double i_c() const { return values[index_of(Feature::CurrentC)]; }
  double v_a() const { return values[index_of(Feature::VoltageA)]; }
  double v_b() const { return values[index_of(Feature::VoltageB)]; }
  double v_c() const { return values[index_of(Feature::VoltageC)]; }
  double pf() const { return values[index_of(Feature::PowerFactor)]; }
  double freq() const { return values[index_of(Feature::Frequency)]; }
};

/// Header names in the raw file for the timestamp and the eight features,
/// listed in canonical feature order.
struct ColumnMapping {
  std::string timestamp = "UpdateTime";
  std::array<std::string, kFeatureCount> features = {"Ia", "Ib", "Ic", "Va",
                                                     "Vb", "Vc", "PF", "Freq"};

  bool operator==(const ColumnMapping&) const = default;
};

struct ParseStats {
  std::size_t data_rows = 0;
  std::size_t dropped_bad_timestamp = 0;
  std::size_t missing_cells = 0;
};

/// Reads a comma-separated file with one header row. Columns not named in
/// `mapping` are ignored; numeric cells that fail to parse become missing.
/// Rows whose timestamp cannot be parsed are dropped and counted in `stats`.
/// Output is stably sorted by timestamp.
std::vector<RawRecord> parse_csv(std::istream& in, const ColumnMapping& mapping,
                                 ParseStats* stats = nullptr);
std::vector<RawRecord> parse_csv(const std::filesystem::path& path, const ColumnMapping& mapping,
                                 ParseStats* stats = nullptr);

}  // namespace gridcast::data
