#include "gridcast/data/scaler.hpp"

#include <algorithm>
#include <istream>
#include <json.hpp>
#include <ostream>

#include "gridcast/error.hpp"

namespace gridcast::data {
namespace {

void check_columns(const ScalerParams& scaler) {
  const bool match = scaler.columns.size() == kFeatureCount &&
                     std::equal(scaler.columns.begin(), scaler.columns.end(), kFeatureNames.begin());
  if (!match) throw SchemaError("scaler columns do not match the frame's eight feature columns");
  if (scaler.min.size() != kFeatureCount || scaler.max.size() != kFeatureCount) {
    throw SchemaError("scaler min/max arrays must have one entry per column");
  }
}

}  // namespace

std::size_t ScalerParams::index_of(std::string_view column) const {
  const auto it = std::find(columns.begin(), columns.end(), column);
  if (it == columns.end()) throw SchemaError("scaler has no column '" + std::string(column) + "'");
  return static_cast<std::size_t>(it - columns.begin());
}

ScalerParams fit_scaler(const TimeSeriesFrame& frame, RowRange fit_range) {
  if (fit_range.size() == 0) throw InvalidArgumentError("scaler fit range is empty");
  if (fit_range.end > frame.rows()) {
    throw InvalidArgumentError("scaler fit range ends at row " + std::to_string(fit_range.end) +
                               " but the frame has " + std::to_string(frame.rows()) + " rows");
  }
  ScalerParams scaler;
  for (std::size_t c = 0; c < kFeatureCount; ++c) {
    const auto col = frame.column(c);
    double lo = 0.0, hi = 0.0;
    bool seen = false;
    for (std::size_t r = fit_range.begin; r < fit_range.end; ++r) {
      const double v = col[r];
      if (is_missing(v)) continue;
      if (!seen) {
        lo = hi = v;
        seen = true;
      } else {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
    if (!seen) {
      throw InvalidArgumentError("column '" + std::string(kFeatureNames[c]) +
                                 "' has no valid values in the scaler fit range");
    }
    scaler.columns.emplace_back(kFeatureNames[c]);
    scaler.min.push_back(lo);
    scaler.max.push_back(hi);
  }
  return scaler;
}

TimeSeriesFrame apply_scaler(const TimeSeriesFrame& frame, const ScalerParams& scaler) {
  check_columns(scaler);
  TimeSeriesFrame out = frame;
  for (std::size_t c = 0; c < kFeatureCount; ++c) {
    const double lo = scaler.min[c];
    const double range = scaler.max[c] - lo;
    for (double& v : out.column(c)) {
      if (is_missing(v)) continue;
      v = range == 0.0 ? 0.0 : (v - lo) / range;
    }
  }
  return out;
}

std::vector<double> invert_scaler(std::span<const double> values, const ScalerParams& scaler,
                                  std::string_view column) {
  const std::size_t c = scaler.index_of(column);
  const double lo = scaler.min.at(c);
  const double range = scaler.max.at(c) - lo;
  std::vector<double> out(values.size());
  for (std::size_t k = 0; k < values.size(); ++k) out[k] = values[k] * range + lo;
  return out;
}

std::vector<double> scale_values(std::span<const double> values, const ScalerParams& scaler,
                                 std::string_view column) {
  const std::size_t c = scaler.index_of(column);
  const double lo = scaler.min.at(c);
  const double range = scaler.max.at(c) - lo;
  std::vector<double> out(values.size());
  for (std::size_t k = 0; k < values.size(); ++k) out[k] = range == 0.0 ? 0.0 : (values[k] - lo) / range;
  return out;
}

void write_scaler(const ScalerParams& scaler, std::ostream& out) {
  nlohmann::ordered_json j;
  j["format"] = "gridcast-minmax-scaler";
  j["version"] = 1;
  j["columns"] = nlohmann::ordered_json::array();
  for (std::size_t c = 0; c < scaler.columns.size(); ++c) {
    j["columns"].push_back({{"name", scaler.columns[c]},
                            {"min", scaler.min.at(c)},
                            {"max", scaler.max.at(c)},
                            {"constant", scaler.is_constant(c)}});
  }
  out << j.dump(2) << '\n';
}

ScalerParams read_scaler(std::istream& in) {
  ScalerParams scaler;
  try {
    const auto j = nlohmann::json::parse(in);
    if (j.value("format", "") != "gridcast-minmax-scaler") throw LoadError("not a scaler file");
    if (j.value("version", 0) != 1) throw LoadError("unsupported scaler file version");
    for (const auto& col : j.at("columns")) {
      scaler.columns.push_back(col.at("name").get<std::string>());
      scaler.min.push_back(col.at("min").get<double>());
      scaler.max.push_back(col.at("max").get<double>());
      if (scaler.max.back() < scaler.min.back()) throw LoadError("scaler column '" + scaler.columns.back() + "' has max < min");
    }
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(std::string("malformed scaler file: ") + e.what());
  }
  return scaler;
}

}  // namespace gridcast::data
