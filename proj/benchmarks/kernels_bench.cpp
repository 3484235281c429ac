#include <benchmark/benchmark.h>

#include "gridcast/model/convlstm.hpp"
#include "gridcast/nn/conv1d.hpp"
#include "gridcast/nn/lstm.hpp"
#include "gridcast/train/adam.hpp"
#include "gridcast/util/memory.hpp"

namespace {

using namespace gridcast;

Tensor filled(const Tensor::Shape& shape, util::Rng& rng) {
  Tensor t(shape);
  for (auto& v : t.values()) v = rng.uniform(-1.0, 1.0);
  return t;
}

model::ConvLSTMConfig preset_for(std::int64_t index) {
  static const char* names[] = {"A", "B", "C"};
  return model::ConvLSTMConfig::preset(names[index]);
}

void BM_Conv1DForward(benchmark::State& state) {
  util::Rng rng(1);
  const auto cfg = preset_for(state.range(0));
  auto p = nn::Conv1DParams::zeros(cfg.conv_out_channels, cfg.window_length, 3, 1, 1);
  p.kernels = filled(p.kernels.shape(), rng);
  const auto x = filled({32, cfg.window_length, 8}, rng);
  for (auto _ : state) benchmark::DoNotOptimize(nn::conv1d_forward(x, p));
  state.SetItemsProcessed(state.iterations() * 32);
}
BENCHMARK(BM_Conv1DForward)->DenseRange(0, 2)->ArgName("preset");

void BM_LSTMSequence(benchmark::State& state) {
  util::Rng rng(2);
  const std::size_t steps = static_cast<std::size_t>(state.range(0));
  auto p = nn::LSTMParams::zeros(32, 8);
  for (Tensor* t : {&p.w_f, &p.w_i, &p.w_c, &p.w_o}) *t = filled(t->shape(), rng);
  const auto x = filled({32, steps, 8}, rng);
  const bool backward = state.range(1) != 0;
  for (auto _ : state) {
    auto out = nn::lstm_sequence_forward(x, p);
    if (backward) benchmark::DoNotOptimize(nn::lstm_backward(out.h_last, out.cache, p));
    benchmark::DoNotOptimize(out);
  }
  state.SetItemsProcessed(state.iterations() * 32);
}
BENCHMARK(BM_LSTMSequence)->ArgsProduct({{32, 64}, {0, 1}})->ArgNames({"steps", "backward"});

void BM_TrainStep(benchmark::State& state) {
  util::Rng rng(3);
  auto params = model::build_model(preset_for(state.range(0)), 4);
  const auto x = filled({32, params.config.window_length, 8}, rng);
  std::vector<double> targets(32, 0.5);
  auto adam = train::AdamState::for_model(params);
  for (auto _ : state) {
    const auto fb = model::forward_backward(params, x, targets, nn::LossKind::Mse, nn::Mode::Train, rng);
    train::adam_step(params, fb.grads, adam, train::AdamOptions{});
  }
  state.SetItemsProcessed(state.iterations() * 32);
}
BENCHMARK(BM_TrainStep)->DenseRange(0, 2)->ArgName("preset");

void BM_Predict(benchmark::State& state) {
  util::Rng rng(5);
  const auto params = model::build_model(preset_for(state.range(0)), 6);
  const auto x = filled({1024, params.config.window_length, 8}, rng);
  for (auto _ : state) benchmark::DoNotOptimize(model::predict(params, x));
  state.SetItemsProcessed(state.iterations() * 1024);
}
BENCHMARK(BM_Predict)->DenseRange(0, 2)->ArgName("preset");

}  // namespace

int main(int argc, char** argv) {
  gridcast::util::retain_freed_memory();
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
