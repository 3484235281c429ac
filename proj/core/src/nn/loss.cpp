#include <algorithm>
#include <cctype>
#include "gridcast/nn/loss.hpp"

#include <cmath>

#include "gridcast/error.hpp"

namespace gridcast::nn {
namespace {

void check(std::span<const double> pred, std::span<const double> target) {
  if (pred.size() != target.size()) throw ShapeError("loss inputs differ in length");
  if (pred.empty()) throw EmptyInputError("loss over zero samples");
}

}  // namespace

LossKind parse_loss_kind(std::string_view name) {
  std::string lower(name);
  std::ranges::transform(lower, lower.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "mse") return LossKind::Mse;
  if (lower == "mae") return LossKind::Mae;
  throw InvalidArgumentError("unknown loss '" + std::string(name) + "' (expected mse or mae)");
}

std::string to_string(LossKind kind) { return kind == LossKind::Mse ? "mse" : "mae"; }

LossOutput mse_loss(std::span<const double> pred, std::span<const double> target) {
  check(pred, target);
  const double n = static_cast<double>(pred.size());
  LossOutput out{0.0, std::vector<double>(pred.size())};
  for (std::size_t k = 0; k < pred.size(); ++k) {
    const double r = pred[k] - target[k];
    out.value += r * r;
    out.grad[k] = 2.0 * r / n;
  }
  out.value /= n;
  return out;
}

LossOutput mae_loss(std::span<const double> pred, std::span<const double> target) {
  check(pred, target);
  const double n = static_cast<double>(pred.size());
  LossOutput out{0.0, std::vector<double>(pred.size())};
  for (std::size_t k = 0; k < pred.size(); ++k) {
    const double r = pred[k] - target[k];
    out.value += std::abs(r);
    out.grad[k] = (r > 0.0 ? 1.0 : r < 0.0 ? -1.0 : 0.0) / n;
  }
  out.value /= n;
  return out;
}

LossOutput compute_loss(LossKind kind, std::span<const double> pred, std::span<const double> target) {
  return kind == LossKind::Mse ? mse_loss(pred, target) : mae_loss(pred, target);
}

}  // namespace gridcast::nn
