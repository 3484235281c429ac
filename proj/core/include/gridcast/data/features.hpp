#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <string_view>

namespace gridcast::data {

/// The eight model features in canonical column order.
enum class Feature : std::size_t {
  CurrentA = 0,
  CurrentB,
  CurrentC,
  VoltageA,
  VoltageB,
  VoltageC,
  PowerFactor,
  Frequency,
};

inline constexpr std::size_t kFeatureCount = 8;
inline constexpr std::size_t kFrequencyIndex = static_cast<std::size_t>(Feature::Frequency);

inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "I_a", "I_b", "I_c", "V_a", "V_b", "V_c", "PF", "Freq"};

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

inline bool is_missing(double v) noexcept { return std::isnan(v); }

constexpr std::size_t index_of(Feature f) noexcept { return static_cast<std::size_t>(f); }

}  // namespace gridcast::data
