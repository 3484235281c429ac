#include "gridcast/data/window.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include "gridcast/error.hpp"
#include "gridcast/util/binary_io.hpp"

namespace gridcast::data {
namespace {

constexpr std::string_view kDatasetMagic = "CLWDS1";
constexpr std::uint32_t kDatasetVersion = 1;

}  // namespace

WindowedDataset WindowedDataset::slice(std::size_t begin, std::size_t end) const {
  if (begin > end || end > count()) throw InvalidArgumentError("dataset slice out of range");
  std::vector<std::size_t> positions(end - begin);
  for (std::size_t k = 0; k < positions.size(); ++k) positions[k] = begin + k;
  return gather(positions);
}

WindowedDataset WindowedDataset::gather(const std::vector<std::size_t>& positions) const {
  WindowedDataset out;
  out.window_length = window_length;
  out.feature_count = feature_count;
  out.start = start;
  const std::size_t stride = window_length * feature_count;
  std::vector<double> values;
  values.reserve(positions.size() * stride);
  for (std::size_t p : positions) {
    if (p >= count()) throw InvalidArgumentError("dataset index out of range");
    const auto row = inputs.row(p);
    values.insert(values.end(), row.begin(), row.end());
    out.targets.push_back(targets[p]);
    out.source_rows.push_back(source_rows[p]);
  }
  out.inputs = Tensor({positions.size(), window_length, feature_count}, std::move(values));
  return out;
}

WindowedDataset make_windows(const TimeSeriesFrame& frame, std::size_t window_length) {
  if (window_length < 1) throw InvalidArgumentError("window length must be at least 1");
  WindowedDataset ds;
  ds.window_length = window_length;
  ds.feature_count = kFeatureCount;
  ds.start = frame.start();
  const std::size_t n = frame.rows();
  const std::size_t count = n > window_length ? n - window_length : 0;
  ds.inputs = Tensor({count, window_length, kFeatureCount});
  ds.targets.resize(count);
  ds.source_rows.resize(count);
  const auto freq = frame.column(kFrequencyIndex);
  for (std::size_t j = 0; j < count; ++j) {
    for (std::size_t t = 0; t < window_length; ++t)
      for (std::size_t f = 0; f < kFeatureCount; ++f) ds.inputs.at(j, t, f) = frame.cell(j + t, f);
    ds.source_rows[j] = j + window_length;
    ds.targets[j] = freq[j + window_length];
  }
  return ds;
}

std::size_t train_window_count(std::size_t count, double train_fraction) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw InvalidArgumentError("train fraction must lie strictly between 0 and 1");
  }
  // The small offset keeps e.g. 100 * 0.29 from flooring to 28.
  return static_cast<std::size_t>(std::floor(static_cast<double>(count) * train_fraction + 1e-9));
}

std::pair<WindowedDataset, WindowedDataset> chronological_split(const WindowedDataset& dataset,
                                                                double train_fraction) {
  const std::size_t n_train = train_window_count(dataset.count(), train_fraction);
  return {dataset.slice(0, n_train), dataset.slice(n_train, dataset.count())};
}

std::size_t training_row_count(std::size_t frame_rows, std::size_t window_length,
                               double train_fraction) {
  const std::size_t count = frame_rows > window_length ? frame_rows - window_length : 0;
  const std::size_t n_train = train_window_count(count, train_fraction);
  if (n_train == 0) return 0;
  return std::min(frame_rows, n_train + window_length);
}

void write_dataset(const WindowedDataset& dataset, std::ostream& out) {
  util::BinaryWriter w(out);
  w.bytes(kDatasetMagic);
  w.u32(kDatasetVersion);
  w.u64(dataset.count());
  w.u64(dataset.window_length);
  w.u64(dataset.feature_count);
  w.i64(dataset.start.time_since_epoch().count());
  for (double v : dataset.inputs.values()) w.f64(v);
  for (double v : dataset.targets) w.f64(v);
  for (std::size_t r : dataset.source_rows) w.u64(r);
}

WindowedDataset read_dataset(std::istream& in) {
  util::BinaryReader r(in);
  if (r.bytes(kDatasetMagic.size(), "magic") != kDatasetMagic) throw LoadError("bad dataset magic");
  if (const auto version = r.u32("version"); version != kDatasetVersion) {
    throw LoadError("unsupported dataset version " + std::to_string(version));
  }
  WindowedDataset ds;
  const std::uint64_t count = r.u64("count");
  ds.window_length = r.u64("window_length");
  ds.feature_count = r.u64("feature_count");
  ds.start = MinuteTime(std::chrono::minutes(r.i64("start")));
  if (ds.window_length == 0 || ds.feature_count == 0) throw LoadError("dataset header has a zero dimension");
  if (count > (std::uint64_t{1} << 40) / (ds.window_length * ds.feature_count)) {
    throw LoadError("dataset header count is implausibly large");
  }
  std::vector<double> values(count * ds.window_length * ds.feature_count);
  for (double& v : values) v = r.f64("inputs");
  ds.inputs = Tensor({count, ds.window_length, ds.feature_count}, std::move(values));
  ds.targets.resize(count);
  for (double& v : ds.targets) v = r.f64("targets");
  ds.source_rows.resize(count);
  for (std::size_t& s : ds.source_rows) s = r.u64("source_rows");
  return ds;
}

}  // namespace gridcast::data
