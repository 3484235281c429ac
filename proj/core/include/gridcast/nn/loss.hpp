#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gridcast::nn {

enum class LossKind { Mse, Mae };

LossKind parse_loss_kind(std::string_view name);
std::string to_string(LossKind kind);

struct LossOutput {
  double value = 0.0;
  std::vector<double> grad;  ///< d loss / d pred
};

/// sum (p - a)^2 / N, gradient 2 (p - a) / N
LossOutput mse_loss(std::span<const double> pred, std::span<const double> target);
/// sum |p - a| / N, gradient sign(p - a) / N with sign(0) = 0
LossOutput mae_loss(std::span<const double> pred, std::span<const double> target);

LossOutput compute_loss(LossKind kind, std::span<const double> pred,
                        std::span<const double> target);

}  // namespace gridcast::nn
