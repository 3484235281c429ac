#include "gridcast/model/serialize.hpp"

#include <fstream>

#include "gridcast/error.hpp"
#include "gridcast/util/binary_io.hpp"
#include "gridcast/util/files.hpp"

namespace gridcast::model {
namespace {

constexpr std::string_view kMagic = "CLSTM1";
constexpr std::uint32_t kMaxRank = 8;

void write_config(util::BinaryWriter& w, const ConvLSTMConfig& c) {
  for (std::size_t v : {c.window_length, c.feature_count, c.conv_out_channels, c.kernel_size, c.padding,
                        c.stride, c.lstm_input, c.lstm_hidden, c.fc1_out, c.fc2_out}) {
    w.u64(v);
  }
  w.f64(c.dropout_rate);
}

ConvLSTMConfig read_config(util::BinaryReader& r) {
  ConvLSTMConfig c;
  c.window_length = r.u64("config.window_length");
  c.feature_count = r.u64("config.feature_count");
  c.conv_out_channels = r.u64("config.conv_out_channels");
  c.kernel_size = r.u64("config.kernel_size");
  c.padding = r.u64("config.padding");
  c.stride = r.u64("config.stride");
  c.lstm_input = r.u64("config.lstm_input");
  c.lstm_hidden = r.u64("config.lstm_hidden");
  c.fc1_out = r.u64("config.fc1_out");
  c.fc2_out = r.u64("config.fc2_out");
  c.dropout_rate = r.f64("config.dropout_rate");
  return c;
}

std::string describe(const ConvLSTMConfig& c) {
  return "L=" + std::to_string(c.window_length) + " conv_out=" + std::to_string(c.conv_out_channels) +
         " hidden=" + std::to_string(c.lstm_hidden);
}

}  // namespace

void save_params(const ModelParams& params, std::ostream& out) {
  util::BinaryWriter w(out);
  w.bytes(kMagic);
  w.u32(kParamFormatVersion);
  write_config(w, params.config);
  w.u64(params.seed);
  const auto tensors = params.tensors();
  w.u32(static_cast<std::uint32_t>(tensors.size()));
  for (const Tensor* t : tensors) {
    w.u32(static_cast<std::uint32_t>(t->rank()));
    for (std::size_t d : t->shape()) w.u64(d);
    for (double v : t->values()) w.f64(v);
  }
}

void save_params(const ModelParams& params, const std::filesystem::path& path) {
  util::write_file_atomic(path, [&](std::ostream& out) { save_params(params, out); }, true);
}

ModelParams load_params(std::istream& in, const std::optional<ConvLSTMConfig>& expected) {
  util::BinaryReader r(in);
  if (r.bytes(kMagic.size(), "magic") != kMagic) throw LoadError("bad magic: not a parameter file");
  const std::uint32_t version = r.u32("version");
  if (version != kParamFormatVersion) {
    throw LoadError("version mismatch: file has " + std::to_string(version) + ", expected " +
                    std::to_string(kParamFormatVersion));
  }
  const ConvLSTMConfig config = read_config(r);
  try {
    config.validate();
  } catch (const ConfigError& e) {
    throw LoadError(std::string("invalid config in parameter file: ") + e.what());
  }
  if (expected && !(*expected == config)) {
    throw ConfigMismatchError("config mismatch: file holds " + describe(config) + ", expected " +
                              describe(*expected));
  }
  // Shapes come from the config; the stored dims must agree with them.
  ModelParams params = build_model(config, 0).zeros_like();
  params.seed = r.u64("seed");
  const auto tensors = params.tensors();
  const auto& names = ModelParams::tensor_names();
  if (r.u32("tensor_count") != tensors.size()) throw LoadError("tensor count does not match the model layout");
  for (std::size_t k = 0; k < tensors.size(); ++k) {
    Tensor& t = *tensors[k];
    const std::uint32_t rank = r.u32(names[k] + ".rank");
    if (rank != t.rank() || rank > kMaxRank) throw LoadError("shape inconsistency in " + names[k] + ": bad rank");
    for (std::size_t d = 0; d < rank; ++d) {
      if (r.u64(names[k] + ".dims") != t.dim(d)) throw LoadError("shape inconsistency in " + names[k]);
    }
    for (double& v : t.values()) v = r.f64(names[k]);
  }
  return params;
}

ModelParams load_params(const std::filesystem::path& path, const std::optional<ConvLSTMConfig>& expected) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open parameter file " + path.string());
  return load_params(in, expected);
}

}  // namespace gridcast::model
