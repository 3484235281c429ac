#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gridcast/data/scaler.hpp"

namespace gridcast::ensemble {

double metric_mse(std::span<const double> pred, std::span<const double> actual);
double metric_mae(std::span<const double> pred, std::span<const double> actual);

/// Actuals with |a| < kMapeZeroGuard are skipped; how many is reported.
inline constexpr double kMapeZeroGuard = 1e-12;

struct MapeResult {
  double value = 0.0;        ///< fraction, not percent
  std::size_t excluded = 0;
};

/// Throws InvalidArgumentError when every actual is near zero.
MapeResult metric_mape(std::span<const double> pred, std::span<const double> actual);

enum class MetricSpace { Normalized, Hertz };

std::string to_string(MetricSpace space);

struct MetricsReport {
  double mse = 0.0;
  double mae = 0.0;
  double mape = 0.0;
  std::size_t n = 0;
  std::size_t mape_excluded = 0;
  MetricSpace space = MetricSpace::Normalized;
};

MetricsReport compute_report(std::span<const double> pred, std::span<const double> actual,
                             MetricSpace space);

/// Normalized-space report, followed by a hertz report when `scaler` is given
/// (both series are mapped back through the scaler's `column`).
std::vector<MetricsReport> evaluate_report(std::span<const double> pred,
                                           std::span<const double> actual,
                                           const data::ScalerParams* scaler = nullptr,
                                           std::string_view column = "Freq");

}  // namespace gridcast::ensemble
