#include "gridcast/model/convlstm.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "gridcast/error.hpp"
#include "gridcast/nn/activations.hpp"

namespace gridcast::model {
namespace {

std::string upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

void glorot_uniform(Tensor& t, std::size_t fan_in, std::size_t fan_out, util::Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (double& v : t.values()) v = rng.uniform(-limit, limit);
}

Tensor relu_backward(const Tensor& upstream, const Tensor& activated) {
  Tensor g = upstream;
  for (std::size_t k = 0; k < g.size(); ++k)
    if (!(activated[k] > 0.0)) g[k] = 0.0;
  return g;
}

Tensor relu_forward(const Tensor& x) {
  Tensor y = x;
  for (double& v : y.values()) v = nn::relu(v);
  return y;
}

}  // namespace

ConvLSTMConfig ConvLSTMConfig::preset(std::string_view name) {
  ConvLSTMConfig c;
  const std::string key = upper(name);
  if (key == "A") {
    c.window_length = 7;
    c.conv_out_channels = 64;
  } else if (key == "B") {
    c.window_length = 5;
    c.conv_out_channels = 64;
  } else if (key == "C") {
    c.window_length = 3;
    c.conv_out_channels = 32;
  } else {
    throw ConfigError("unknown architecture preset '" + std::string(name) + "' (expected A, B or C)");
  }
  return c;
}

std::size_t preset_epochs(std::string_view name) {
  const std::string key = upper(name);
  if (key == "A" || key == "B") return 1500;
  if (key == "C") return 2000;
  throw ConfigError("unknown architecture preset '" + std::string(name) + "'");
}

std::size_t ConvLSTMConfig::conv_output_length() const {
  const std::size_t padded = feature_count + 2 * padding;
  if (stride == 0 || padded < kernel_size) return 0;
  return (padded - kernel_size) / stride + 1;
}

void ConvLSTMConfig::validate() const {
  auto positive = [](std::size_t v, const char* name) {
    if (v == 0) throw ConfigError(std::string(name) + " must be positive");
  };
  positive(window_length, "window_length");
  positive(feature_count, "feature_count");
  positive(conv_out_channels, "conv_out_channels");
  positive(kernel_size, "kernel_size");
  positive(stride, "stride");
  positive(lstm_hidden, "lstm_hidden");
  positive(fc1_out, "fc1_out");
  if (fc2_out != 1) throw ConfigError("fc2_out must be 1 (single frequency prediction)");
  if (conv_output_length() == 0) throw ConfigError("conv kernel is longer than the padded feature axis");
  if (lstm_input != conv_output_length()) {
    throw ConfigError("lstm_input (" + std::to_string(lstm_input) + ") must equal the conv output length (" +
                      std::to_string(conv_output_length()) + ")");
  }
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) throw ConfigError("dropout_rate must be in [0, 1)");
}

std::vector<Tensor*> ModelParams::tensors() {
  return {&conv.kernels, &conv.bias, &lstm.w_f, &lstm.w_i, &lstm.w_c, &lstm.w_o, &lstm.b_f,
          &lstm.b_i,     &lstm.b_c,  &lstm.b_o, &fc1.weight, &fc1.bias, &fc2.weight, &fc2.bias};
}

std::vector<const Tensor*> ModelParams::tensors() const {
  return {&conv.kernels, &conv.bias, &lstm.w_f, &lstm.w_i, &lstm.w_c, &lstm.w_o, &lstm.b_f,
          &lstm.b_i,     &lstm.b_c,  &lstm.b_o, &fc1.weight, &fc1.bias, &fc2.weight, &fc2.bias};
}

const std::vector<std::string>& ModelParams::tensor_names() {
  static const std::vector<std::string> names = {
      "conv.kernels", "conv.bias", "lstm.w_f", "lstm.w_i",   "lstm.w_c", "lstm.w_o",   "lstm.b_f",
      "lstm.b_i",     "lstm.b_c",  "lstm.b_o", "fc1.weight", "fc1.bias", "fc2.weight", "fc2.bias"};
  return names;
}

ModelParams ModelParams::zeros_like() const {
  ModelParams z = *this;
  for (Tensor* t : z.tensors()) t->fill(0.0);
  return z;
}

std::size_t ModelParams::parameter_count() const {
  std::size_t n = 0;
  for (const Tensor* t : tensors()) n += t->size();
  return n;
}

ModelParams build_model(const ConvLSTMConfig& config, std::uint64_t seed) {
  config.validate();
  ModelParams m;
  m.config = config;
  m.seed = seed;
  m.conv = nn::Conv1DParams::zeros(config.conv_out_channels, config.window_length, config.kernel_size,
                                   config.stride, config.padding);
  m.lstm = nn::LSTMParams::zeros(config.lstm_hidden, config.lstm_input);
  m.fc1 = nn::DenseParams::zeros(config.fc1_out, config.lstm_hidden);
  m.fc2 = nn::DenseParams::zeros(config.fc2_out, config.fc1_out);

  util::Rng rng(util::mix_seed(seed));
  glorot_uniform(m.conv.kernels, config.window_length * config.kernel_size,
                 config.conv_out_channels * config.kernel_size, rng);
  const std::size_t gate_fan_in = config.lstm_hidden + config.lstm_input;
  for (Tensor* w : {&m.lstm.w_f, &m.lstm.w_i, &m.lstm.w_c, &m.lstm.w_o})
    glorot_uniform(*w, gate_fan_in, config.lstm_hidden, rng);
  glorot_uniform(m.fc1.weight, config.lstm_hidden, config.fc1_out, rng);
  glorot_uniform(m.fc2.weight, config.fc1_out, config.fc2_out, rng);
  return m;
}

Tensor window_as_conv_input(const Tensor& windows) {
  // [B, L, F] is read as [B, channels = L, length = F]: no data movement.
  return windows.reshaped({windows.dim(0), windows.dim(1), windows.dim(2)});
}

Tensor conv_output_as_sequence(const Tensor& conv_out) {
  // [B, C, F'] is read as [B, T = C, input = F'].
  return conv_out.reshaped({conv_out.dim(0), conv_out.dim(1), conv_out.dim(2)});
}

ForwardResult forward(const ModelParams& params, const Tensor& x, nn::Mode mode, util::Rng& rng) {
  const ConvLSTMConfig& cfg = params.config;
  if (x.rank() != 3 || x.dim(1) != cfg.window_length || x.dim(2) != cfg.feature_count) {
    throw ShapeError("model input has shape " + shape_string(x.shape()) + ", expected [batch, " +
                     std::to_string(cfg.window_length) + ", " + std::to_string(cfg.feature_count) + "]");
  }
  ForwardResult r;
  ForwardCache& c = r.cache;
  c.conv_input = window_as_conv_input(x);
  c.conv_pre = nn::conv1d_forward(c.conv_input, params.conv);
  auto lstm_out = nn::lstm_sequence_forward(conv_output_as_sequence(relu_forward(c.conv_pre)), params.lstm);
  c.lstm = std::move(lstm_out.cache);
  c.lstm_out = std::move(lstm_out.h_last);
  auto dropped = nn::dropout_forward(c.lstm_out, cfg.dropout_rate, mode, rng);
  c.dropout_mask = std::move(dropped.mask);
  c.fc1_in = relu_forward(dropped.value);
  c.fc1_pre = nn::dense_forward(c.fc1_in, params.fc1);
  c.fc2_in = relu_forward(c.fc1_pre);
  r.prediction = nn::dense_forward(c.fc2_in, params.fc2);
  return r;
}

std::vector<double> predict(const ModelParams& params, const Tensor& x, std::size_t chunk_size) {
  if (x.rank() != 3) throw ShapeError("model input must be rank 3");
  chunk_size = std::max<std::size_t>(chunk_size, 1);
  const std::size_t n = x.dim(0);
  const std::size_t stride = x.dim(1) * x.dim(2);
  std::vector<double> out;
  out.reserve(n);
  util::Rng unused(0);
  for (std::size_t begin = 0; begin < n; begin += chunk_size) {
    const std::size_t end = std::min(n, begin + chunk_size);
    Tensor chunk({end - begin, x.dim(1), x.dim(2)},
                 std::vector<double>(x.data() + begin * stride, x.data() + end * stride));
    const auto r = forward(params, chunk, nn::Mode::Eval, unused);
    out.insert(out.end(), r.prediction.values().begin(), r.prediction.values().end());
  }
  return out;
}

ForwardBackwardResult forward_backward(const ModelParams& params, const Tensor& x,
                                       std::span<const double> targets, nn::LossKind loss,
                                       nn::Mode mode, util::Rng& rng) {
  ForwardResult fwd = forward(params, x, mode, rng);
  const ForwardCache& c = fwd.cache;
  if (targets.size() != fwd.prediction.dim(0)) {
    throw ShapeError("got " + std::to_string(targets.size()) + " targets for a batch of " +
                     std::to_string(fwd.prediction.dim(0)));
  }
  const nn::LossOutput l = nn::compute_loss(loss, fwd.prediction.values(), targets);
  if (!std::isfinite(l.value)) throw NonFiniteError("non-finite " + nn::to_string(loss) + " loss");

  ForwardBackwardResult r;
  r.loss = l.value;
  r.grads = params.zeros_like();

  const Tensor d_pred({targets.size(), 1}, l.grad);
  auto fc2 = nn::dense_backward(d_pred, c.fc2_in, params.fc2);
  r.grads.fc2.weight = std::move(fc2.grad_weight);
  r.grads.fc2.bias = std::move(fc2.grad_bias);

  auto fc1 = nn::dense_backward(relu_backward(fc2.grad_x, c.fc2_in), c.fc1_in, params.fc1);
  r.grads.fc1.weight = std::move(fc1.grad_weight);
  r.grads.fc1.bias = std::move(fc1.grad_bias);

  const Tensor d_lstm_out = nn::dropout_backward(relu_backward(fc1.grad_x, c.fc1_in), c.dropout_mask);
  auto lstm = nn::lstm_backward(d_lstm_out, c.lstm, params.lstm);
  r.grads.lstm = std::move(lstm.grad_params);

  // Inverse of conv_output_as_sequence is the same relabeling.
  const Tensor d_conv_act = lstm.grad_x_seq.reshaped(c.conv_pre.shape());
  auto conv = nn::conv1d_backward(relu_backward(d_conv_act, c.conv_pre), c.conv_input, params.conv);
  r.grads.conv.kernels = std::move(conv.grad_kernels);
  r.grads.conv.bias = std::move(conv.grad_bias);

  r.prediction = std::move(fwd.prediction);
  return r;
}

}  // namespace gridcast::model
