#include "gridcast/train/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "gridcast/error.hpp"
#include "gridcast/util/text.hpp"

namespace gridcast::train {
namespace {

// Copies the selected windows into a contiguous batch tensor.
void gather_batch(const data::WindowedDataset& ds, std::span<const std::size_t> positions, Tensor& x,
                  std::vector<double>& y) {
  const std::size_t stride = ds.window_length * ds.feature_count;
  x = Tensor({positions.size(), ds.window_length, ds.feature_count});
  y.resize(positions.size());
  for (std::size_t k = 0; k < positions.size(); ++k) {
    std::copy_n(ds.inputs.data() + positions[k] * stride, stride, x.data() + k * stride);
    y[k] = ds.targets[positions[k]];
  }
}

void check_dataset(const model::ModelParams& model, const data::WindowedDataset& ds, const char* which) {
  if (ds.window_length != model.config.window_length || ds.feature_count != model.config.feature_count) {
    throw ShapeError(std::string(which) + " set windows are " + std::to_string(ds.window_length) + "x" +
                     std::to_string(ds.feature_count) + " but the model expects " +
                     std::to_string(model.config.window_length) + "x" + std::to_string(model.config.feature_count));
  }
}

}  // namespace

void TrainConfig::validate() const {
  if (epochs < 1) throw InvalidArgumentError("epochs must be at least 1");
  if (batch_size < 1) throw InvalidArgumentError("batch_size must be at least 1");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw InvalidArgumentError("learning_rate must be positive");
  if (!(beta1 >= 0.0 && beta1 < 1.0)) throw InvalidArgumentError("beta1 must be in [0, 1)");
  if (!(beta2 >= 0.0 && beta2 < 1.0)) throw InvalidArgumentError("beta2 must be in [0, 1)");
  if (!(epsilon > 0.0)) throw InvalidArgumentError("epsilon must be positive");
}

void LossCurve::write_csv(std::ostream& out) const {
  out << "epoch,train_mse,test_mse,train_mae,test_mae\n";
  for (const EpochLoss& e : epochs) {
    out << e.epoch << ',' << util::format_double(e.train_mse) << ','
        << util::format_double(e.test_mse) << ',' << util::format_double(e.train_mae) << ','
        << util::format_double(e.test_mae) << '\n';
  }
}

LossCurve LossCurve::read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || util::trim_cell(line) != "epoch,train_mse,test_mse,train_mae,test_mae") {
    throw LoadError("loss curve CSV has an unexpected header");
  }
  LossCurve curve;
  while (std::getline(in, line)) {
    if (util::trim_cell(line).empty()) continue;
    const auto cells = util::split_commas(line);
    if (cells.size() != 5) throw LoadError("loss curve row has " + std::to_string(cells.size()) + " cells");
    EpochLoss e;
    const auto epoch = util::parse_double(cells[0]);
    double* fields[] = {&e.train_mse, &e.test_mse, &e.train_mae, &e.test_mae};
    if (!epoch) throw LoadError("loss curve row has a bad epoch");
    e.epoch = static_cast<std::size_t>(*epoch);
    for (std::size_t k = 0; k < 4; ++k) {
      const auto v = util::parse_double(cells[k + 1]);
      if (!v) throw LoadError("loss curve row has a bad value");
      *fields[k] = *v;
    }
    curve.epochs.push_back(e);
  }
  return curve;
}

SplitLoss evaluate_split(const model::ModelParams& model, const data::WindowedDataset& dataset) {
  if (dataset.empty()) throw EmptyInputError("cannot evaluate an empty dataset");
  check_dataset(model, dataset, "evaluation");
  const std::vector<double> pred = model::predict(model, dataset.inputs);
  return {nn::mse_loss(pred, dataset.targets).value, nn::mae_loss(pred, dataset.targets).value};
}

TrainResult train(model::ModelParams model, const data::WindowedDataset& train_set,
                  const data::WindowedDataset& test_set, const TrainConfig& config,
                  const EpochCallback& on_epoch) {
  config.validate();
  if (train_set.empty()) throw EmptyInputError("training set is empty");
  if (test_set.empty()) throw EmptyInputError("test set is empty");
  check_dataset(model, train_set, "training");
  check_dataset(model, test_set, "test");

  TrainResult result;
  result.optimizer = AdamState::for_model(model);
  util::Rng shuffle_rng(util::mix_seed(config.seed ^ 0x73687566666c65ULL));
  util::Rng dropout_rng(util::mix_seed(config.seed ^ 0x64726f706f7574ULL));
  const AdamOptions adam = config.adam();

  const std::size_t n = train_set.count();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Tensor x;
  std::vector<double> y;

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    if (config.shuffle_each_epoch) {
      for (std::size_t k = n; k > 1; --k) std::swap(order[k - 1], order[shuffle_rng.below(k)]);
    }
    std::size_t batch_index = 0;
    for (std::size_t begin = 0; begin < n; begin += config.batch_size, ++batch_index) {
      const std::size_t end = std::min(n, begin + config.batch_size);
      gather_batch(train_set, std::span(order).subspan(begin, end - begin), x, y);
      try {
        const auto fb = model::forward_backward(model, x, y, config.loss, nn::Mode::Train, dropout_rng);
        adam_step(model, fb.grads, result.optimizer, adam);
      } catch (const NonFiniteError& e) {
        throw NonFiniteError(std::string(e.what()) + " at epoch " + std::to_string(epoch) + ", batch " +
                             std::to_string(batch_index + 1));
      }
    }

    const SplitLoss tr = evaluate_split(model, train_set);
    const SplitLoss te = evaluate_split(model, test_set);
    const EpochLoss record{epoch, tr.mse, te.mse, tr.mae, te.mae};
    if (!std::isfinite(tr.mse) || !std::isfinite(te.mse) || !std::isfinite(tr.mae) || !std::isfinite(te.mae)) {
      throw NonFiniteError("non-finite evaluation loss after epoch " + std::to_string(epoch));
    }
    result.curve.epochs.push_back(record);
    if (on_epoch) on_epoch(record);
  }
  result.params = std::move(model);
  return result;
}

}  // namespace gridcast::train
