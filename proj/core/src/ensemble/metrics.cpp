#include "gridcast/ensemble/metrics.hpp"

#include <cmath>

#include "gridcast/error.hpp"

namespace gridcast::ensemble {
namespace {

void check(std::span<const double> pred, std::span<const double> actual) {
  if (pred.size() != actual.size()) {
    throw InvalidArgumentError("length mismatch: " + std::to_string(pred.size()) + " predictions vs " +
                               std::to_string(actual.size()) + " actuals");
  }
  if (pred.empty()) throw EmptyInputError("metric over zero samples");
}

}  // namespace

double metric_mse(std::span<const double> pred, std::span<const double> actual) {
  check(pred, actual);
  double sum = 0.0;
  for (std::size_t k = 0; k < pred.size(); ++k) {
    const double r = pred[k] - actual[k];
    sum += r * r;
  }
  return sum / static_cast<double>(pred.size());
}

double metric_mae(std::span<const double> pred, std::span<const double> actual) {
  check(pred, actual);
  double sum = 0.0;
  for (std::size_t k = 0; k < pred.size(); ++k) sum += std::abs(pred[k] - actual[k]);
  return sum / static_cast<double>(pred.size());
}

MapeResult metric_mape(std::span<const double> pred, std::span<const double> actual) {
  check(pred, actual);
  MapeResult r;
  double sum = 0.0;
  std::size_t used = 0;
  for (std::size_t k = 0; k < pred.size(); ++k) {
    if (std::abs(actual[k]) < kMapeZeroGuard) {
      ++r.excluded;
      continue;
    }
    sum += std::abs((pred[k] - actual[k]) / actual[k]);
    ++used;
  }
  if (used == 0) throw InvalidArgumentError("MAPE is undefined: every actual value is zero");
  r.value = sum / static_cast<double>(used);
  return r;
}

std::string to_string(MetricSpace space) { return space == MetricSpace::Normalized ? "normalized" : "hertz"; }

MetricsReport compute_report(std::span<const double> pred, std::span<const double> actual, MetricSpace space) {
  const MapeResult mape = metric_mape(pred, actual);
  return {metric_mse(pred, actual), metric_mae(pred, actual), mape.value, pred.size(), mape.excluded, space};
}

std::vector<MetricsReport> evaluate_report(std::span<const double> pred, std::span<const double> actual,
                                           const data::ScalerParams* scaler, std::string_view column) {
  std::vector<MetricsReport> reports{compute_report(pred, actual, MetricSpace::Normalized)};
  if (scaler) {
    const auto pred_hz = data::invert_scaler(pred, *scaler, column);
    const auto actual_hz = data::invert_scaler(actual, *scaler, column);
    reports.push_back(compute_report(pred_hz, actual_hz, MetricSpace::Hertz));
  }
  return reports;
}

}  // namespace gridcast::ensemble
