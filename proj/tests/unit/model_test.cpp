#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "gridcast/error.hpp"
#include "gridcast/model/convlstm.hpp"
#include "gridcast/model/serialize.hpp"
#include "gridcast_test/synthetic.hpp"

namespace gridcast::model {
namespace {

using testing::random_tensor;

TEST(Presets, MatchTheBuildingTable) {
  const auto a = ConvLSTMConfig::preset("A"), b = ConvLSTMConfig::preset("B"), c = ConvLSTMConfig::preset("c");
  EXPECT_EQ(a.window_length, 7u);
  EXPECT_EQ(a.conv_out_channels, 64u);
  EXPECT_EQ(b.window_length, 5u);
  EXPECT_EQ(b.conv_out_channels, 64u);
  EXPECT_EQ(c.window_length, 3u);
  EXPECT_EQ(c.conv_out_channels, 32u);
  for (const auto& cfg : {a, b, c}) {
    EXPECT_EQ(cfg.kernel_size, 3u);
    EXPECT_EQ(cfg.padding, 1u);
    EXPECT_EQ(cfg.stride, 1u);
    EXPECT_EQ(cfg.lstm_input, 8u);
    EXPECT_EQ(cfg.lstm_hidden, 32u);
    EXPECT_EQ(cfg.dropout_rate, 0.1);
    EXPECT_EQ(cfg.fc1_out, 10u);
    EXPECT_EQ(cfg.fc2_out, 1u);
  }
  EXPECT_EQ(preset_epochs("A"), 1500u);
  EXPECT_EQ(preset_epochs("B"), 1500u);
  EXPECT_EQ(preset_epochs("C"), 2000u);
  EXPECT_THROW(ConvLSTMConfig::preset("D"), ConfigError);
}

TEST(BuildModel, ShapesFollowTheConfig) {
  const auto a = build_model(ConvLSTMConfig::preset("A"), 1);
  EXPECT_EQ(a.conv.kernels.shape(), (Tensor::Shape{64, 7, 3}));
  EXPECT_EQ(a.lstm.w_f.shape(), (Tensor::Shape{32, 40}));
  EXPECT_EQ(a.fc1.weight.shape(), (Tensor::Shape{10, 32}));
  EXPECT_EQ(a.fc2.weight.shape(), (Tensor::Shape{1, 10}));
  const auto c = build_model(ConvLSTMConfig::preset("C"), 1);
  EXPECT_EQ(c.conv.kernels.shape(), (Tensor::Shape{32, 3, 3}));
  EXPECT_EQ(c.tensors().size(), ModelParams::tensor_names().size());
}

TEST(BuildModel, GlorotBoundsAndZeroBiases) {
  const auto m = build_model(ConvLSTMConfig::preset("B"), 99);
  const double conv_bound = std::sqrt(6.0 / (5 * 3 + 64 * 3));
  for (double v : m.conv.kernels.values()) EXPECT_LE(std::abs(v), conv_bound);
  const double gate_bound = std::sqrt(6.0 / (40 + 32));
  for (double v : m.lstm.w_c.values()) EXPECT_LE(std::abs(v), gate_bound);
  for (const Tensor* b : {&m.conv.bias, &m.lstm.b_f, &m.lstm.b_o, &m.fc1.bias, &m.fc2.bias}) {
    for (double v : b->values()) EXPECT_EQ(v, 0.0);
  }
  EXPECT_EQ(m.seed, 99u);
}

TEST(BuildModel, SeedDeterminesEverything) {
  const auto cfg = ConvLSTMConfig::preset("C");
  EXPECT_TRUE(build_model(cfg, 42) == build_model(cfg, 42));
  EXPECT_FALSE(build_model(cfg, 42) == build_model(cfg, 43));
}

TEST(BuildModel, RejectsInvalidConfigs) {
  auto cfg = ConvLSTMConfig::preset("A");
  cfg.conv_out_channels = 0;
  EXPECT_THROW(build_model(cfg, 1), ConfigError);
  cfg = ConvLSTMConfig::preset("A");
  cfg.lstm_input = 7;
  EXPECT_THROW(build_model(cfg, 1), ConfigError);
}

TEST(Forward, BuildingAShapes) {
  const auto m = build_model(ConvLSTMConfig::preset("A"), 3);
  util::Rng rng(1);
  const auto out = forward(m, random_tensor({4, 7, 8}, rng, 0, 1), nn::Mode::Train, rng);
  EXPECT_EQ(out.cache.conv_pre.shape(), (Tensor::Shape{4, 64, 8}));
  EXPECT_EQ(out.cache.lstm.steps, 64u);
  EXPECT_EQ(out.cache.lstm_out.shape(), (Tensor::Shape{4, 32}));
  EXPECT_EQ(out.cache.fc2_in.shape(), (Tensor::Shape{4, 10}));
  EXPECT_EQ(out.prediction.shape(), (Tensor::Shape{4, 1}));
}

TEST(Forward, ZeroNetworkPredictsZero) {
  const auto m = build_model(ConvLSTMConfig::preset("B"), 3).zeros_like();
  util::Rng rng(1);
  const auto out = forward(m, random_tensor({6, 5, 8}, rng, -3, 3), nn::Mode::Train, rng);
  for (double v : out.prediction.values()) EXPECT_EQ(v, 0.0);
}

TEST(Forward, EvalModeIsPure) {
  const auto m = build_model(ConvLSTMConfig::preset("C"), 5);
  util::Rng data(2);
  const auto x = random_tensor({9, 3, 8}, data, 0, 1);
  util::Rng r1(1), r2(12345);
  EXPECT_EQ(forward(m, x, nn::Mode::Eval, r1).prediction, forward(m, x, nn::Mode::Eval, r2).prediction);
  EXPECT_TRUE(r1 == util::Rng(1));
  const auto p = predict(m, x, 4);
  for (std::size_t k = 0; k < 9; ++k) EXPECT_EQ(p[k], forward(m, x, nn::Mode::Eval, r1).prediction[k]);
}

TEST(Forward, FiniteForFiniteInputs) {
  util::Rng rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    const auto m = build_model(ConvLSTMConfig::preset(trial % 2 ? "A" : "C"), rng.next());
    const std::size_t L = m.config.window_length, batch = 1 + rng.below(5);
    const auto out = forward(m, random_tensor({batch, L, 8}, rng, -50, 50), nn::Mode::Train, rng);
    EXPECT_EQ(out.prediction.shape(), (Tensor::Shape{batch, 1}));
    EXPECT_TRUE(out.prediction.all_finite());
  }
}

TEST(Forward, ShapeMismatch) {
  const auto m = build_model(ConvLSTMConfig::preset("A"), 1);
  util::Rng rng(1);
  EXPECT_THROW(forward(m, Tensor({2, 5, 8}), nn::Mode::Eval, rng), ShapeError);
  EXPECT_THROW(forward(m, Tensor({2, 7, 7}), nn::Mode::Eval, rng), ShapeError);
  const std::vector<double> targets = {0.0};
  EXPECT_THROW(forward_backward(m, Tensor({2, 7, 8}), targets, nn::LossKind::Mse, nn::Mode::Eval, rng), ShapeError);
}

TEST(Reshape, IsARelabelingOfMemory) {
  util::Rng rng(1);
  const auto w = random_tensor({2, 3, 8}, rng);
  const auto conv_in = window_as_conv_input(w);
  EXPECT_EQ(conv_in.shape(), (Tensor::Shape{2, 3, 8}));
  EXPECT_EQ(conv_in.at(1, 2, 5), w.at(1, 2, 5));
  const auto seq = conv_output_as_sequence(random_tensor({2, 4, 8}, rng));
  EXPECT_EQ(seq.shape(), (Tensor::Shape{2, 4, 8}));
}

TEST(ForwardBackward, ZeroResidualGivesZeroGradients) {
  auto m = build_model(ConvLSTMConfig::preset("C"), 7);
  util::Rng rng(4);
  const auto x = random_tensor({5, 3, 8}, rng, 0, 1);
  const auto targets = predict(m, x);
  const auto out = forward_backward(m, x, targets, nn::LossKind::Mse, nn::Mode::Eval, rng);
  EXPECT_EQ(out.loss, 0.0);
  for (const Tensor* g : out.grads.tensors()) {
    for (double v : g->values()) EXPECT_EQ(v, 0.0);
  }
}

TEST(ForwardBackward, MseAndMaeGradientsDiffer) {
  const auto m = build_model(ConvLSTMConfig::preset("C"), 7);
  util::Rng rng(4);
  const auto x = random_tensor({3, 3, 8}, rng, 0, 1);
  // Residuals of 0.25 make MSE's 2r/N differ from MAE's sign(r)/N.
  auto targets = predict(m, x);
  for (auto& t : targets) t -= 0.25;
  util::Rng r1(0), r2(0);
  const auto mse = forward_backward(m, x, targets, nn::LossKind::Mse, nn::Mode::Eval, r1);
  const auto mae = forward_backward(m, x, targets, nn::LossKind::Mae, nn::Mode::Eval, r2);
  EXPECT_NEAR(mse.loss, 0.0625, 1e-12);
  EXPECT_NEAR(mae.loss, 0.25, 1e-12);
  EXPECT_FALSE(mse.grads.fc2.bias == mae.grads.fc2.bias);
  EXPECT_NEAR(mse.grads.fc2.bias[0], 2 * 0.25, 1e-12);
  EXPECT_NEAR(mae.grads.fc2.bias[0], 1.0, 1e-12);
}

TEST(ForwardBackward, NonFiniteLossIsReported) {
  auto m = build_model(ConvLSTMConfig::preset("C"), 7);
  m.fc2.bias[0] = std::numeric_limits<double>::infinity();
  util::Rng rng(4);
  const std::vector<double> targets = {0.0};
  EXPECT_THROW(forward_backward(m, Tensor({1, 3, 8}), targets, nn::LossKind::Mse, nn::Mode::Eval, rng),
               NonFiniteError);
}

TEST(Serialize, RoundTripIsBitExact) {
  for (const char* name : {"A", "B", "C"}) {
    const auto m = build_model(ConvLSTMConfig::preset(name), 0xfeedULL);
    std::stringstream buffer;
    save_params(m, buffer);
    EXPECT_EQ(buffer.str().substr(0, 6), "CLSTM1");
    const auto back = load_params(buffer);
    EXPECT_TRUE(back == m);
  }
}

TEST(Serialize, CorruptMagicIsALoadError) {
  std::stringstream buffer;
  save_params(build_model(ConvLSTMConfig::preset("C"), 1), buffer);
  std::string bytes = buffer.str();
  bytes[0] = 'X';
  std::istringstream in(bytes);
  EXPECT_THROW(load_params(in), LoadError);
}

TEST(Serialize, TruncationNamesTheField) {
  std::stringstream buffer;
  save_params(build_model(ConvLSTMConfig::preset("C"), 1), buffer);
  const std::string bytes = buffer.str();
  for (std::size_t keep : {std::size_t{8}, std::size_t{40}, bytes.size() / 2, bytes.size() - 1}) {
    std::istringstream in(bytes.substr(0, keep));
    try {
      load_params(in);
      FAIL() << "expected LoadError at " << keep;
    } catch (const LoadError& e) {
      EXPECT_NE(std::string(e.what()).find("truncated"), std::string::npos) << e.what();
    }
  }
}

TEST(Serialize, VersionMismatch) {
  std::stringstream buffer;
  save_params(build_model(ConvLSTMConfig::preset("C"), 1), buffer);
  std::string bytes = buffer.str();
  bytes[6] = 9;
  std::istringstream in(bytes);
  try {
    load_params(in);
    FAIL();
  } catch (const LoadError& e) {
    EXPECT_NE(std::string(e.what()).find("version"), std::string::npos) << e.what();
  }
}

TEST(Serialize, ConfigMismatchIsGuarded) {
  std::stringstream buffer;
  save_params(build_model(ConvLSTMConfig::preset("A"), 1), buffer);
  std::istringstream in(buffer.str());
  EXPECT_THROW(load_params(in, ConvLSTMConfig::preset("B")), ConfigMismatchError);
  std::istringstream again(buffer.str());
  EXPECT_NO_THROW(load_params(again, ConvLSTMConfig::preset("A")));
}

}  // namespace
}  // namespace gridcast::model
