#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>

#include "gridcast/model/convlstm.hpp"

namespace gridcast::model {

inline constexpr std::uint32_t kParamFormatVersion = 1;

/// Little-endian: magic `CLSTM1`, version, config fields, seed, then each
/// tensor in declaration order as rank, dims, values.
void save_params(const ModelParams& params, std::ostream& out);
void save_params(const ModelParams& params, const std::filesystem::path& path);

/// Throws LoadError naming the offending field, or ConfigMismatchError when
/// `expected` is given and the stored architecture differs.
ModelParams load_params(std::istream& in, const std::optional<ConvLSTMConfig>& expected = {});
ModelParams load_params(const std::filesystem::path& path,
                        const std::optional<ConvLSTMConfig>& expected = {});

}  // namespace gridcast::model
