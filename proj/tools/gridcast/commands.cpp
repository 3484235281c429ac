#include "commands.hpp"

#include <algorithm>
#include <fstream>
#include <future>
#include <json.hpp>
#include <sstream>

#include "gridcast/data/csv.hpp"
#include "gridcast/data/frame.hpp"
#include "gridcast/data/scaler.hpp"
#include "gridcast/data/window.hpp"
#include "gridcast/ensemble/ensemble.hpp"
#include "gridcast/ensemble/metrics.hpp"
#include "gridcast/error.hpp"
#include "gridcast/model/serialize.hpp"
#include "gridcast/train/trainer.hpp"
#include "gridcast/util/files.hpp"
#include "gridcast/util/text.hpp"

namespace gridcast::cli {
namespace {

namespace fs = std::filesystem;
using util::format_double;

/// Ordered `key = value` lines.
class KeyValueText {
 public:
  void add(const std::string& key, const std::string& value) { lines_.emplace_back(key, value); }
  void add(const std::string& key, double value) { add(key, format_double(value)); }
  void add(const std::string& key, std::size_t value) { add(key, std::to_string(value)); }

  void write(std::ostream& out) const {
    for (const auto& [k, v] : lines_) out << k << " = " << v << '\n';
  }

 private:
  std::vector<std::pair<std::string, std::string>> lines_;
};

fs::path frame_path(const fs::path& out, const std::string& id) { return out / ("frame_" + id + ".csv"); }
fs::path dataset_path(const fs::path& out, const std::string& id) { return out / ("dataset_" + id + ".bin"); }
fs::path scaler_path(const fs::path& out, const std::string& id) { return out / ("scaler_" + id + ".json"); }
fs::path model_path(const fs::path& out, const std::string& id) { return out / ("model_" + id + ".clstm"); }
fs::path meta_path(const fs::path& out, const std::string& id) { return out / ("model_" + id + ".meta.json"); }
fs::path curve_path(const fs::path& out, const std::string& id) { return out / ("curve_" + id + ".csv"); }

template <typename Fn>
auto with_context(const std::string& context, Fn&& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    throw Error(context + ": " + e.what());
  }
}

data::WindowedDataset load_dataset(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("missing dataset " + path.string() + " (run ingest first)");
  return data::read_dataset(in);
}

data::ScalerParams load_scaler(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("missing scaler " + path.string() + " (run ingest first)");
  return data::read_scaler(in);
}

/// Raw CSV -> gap-free physical-unit frame.
data::GapFillResult load_physical_frame(const fs::path& csv, const data::ColumnMapping& mapping,
                                        const std::string& id, data::ParseStats* stats) {
  const auto records = with_context(csv.string(), [&] { return data::parse_csv(csv, mapping, stats); });
  const auto frame = with_context(csv.string(), [&] { return data::resample_1min(records, id); });
  return with_context(csv.string(), [&] { return data::fill_gaps(frame); });
}

std::string config_fingerprint(const BuildingConfig& b, double train_fraction) {
  std::ostringstream os;
  const auto& a = b.architecture;
  const auto& t = b.training;
  os << a.window_length << ',' << a.feature_count << ',' << a.conv_out_channels << ',' << a.kernel_size << ','
     << a.padding << ',' << a.stride << ',' << a.lstm_input << ',' << a.lstm_hidden << ','
     << format_double(a.dropout_rate) << ',' << a.fc1_out << ',' << a.fc2_out << ';' << t.epochs << ','
     << t.batch_size << ',' << format_double(t.learning_rate) << ',' << nn::to_string(t.loss) << ','
     << format_double(t.beta1) << ',' << format_double(t.beta2) << ',' << format_double(t.epsilon) << ','
     << t.seed << ',' << t.shuffle_each_epoch << ';' << format_double(train_fraction);
  return util::hex64(util::fnv1a64(os.str()));
}

void write_text(const fs::path& path, const std::function<void(std::ostream&)>& fn) {
  util::write_file_atomic(path, fn);
}

/// Runs `fn` for each id, reporting failures and continuing with the rest.
int for_each_building(const CommandContext& ctx, const std::vector<std::string>& ids, const char* verb,
                      const std::function<void(const BuildingConfig&)>& fn) {
  int status = 0;
  for (const auto& id : ids) {
    try {
      fn(ctx.config.building(id));
    } catch (const std::exception& e) {
      ctx.err << verb << " failed for building " << id << ": " << e.what() << '\n';
      status = 1;
    }
  }
  return status;
}

void ingest_one(const CommandContext& ctx, const BuildingConfig& b) {
  data::ParseStats stats;
  const auto filled = load_physical_frame(b.csv_path, b.mapping, b.id, &stats);
  const auto& frame = filled.frame;
  const std::size_t L = b.architecture.window_length;
  const std::size_t fit_rows = data::training_row_count(frame.rows(), L, ctx.config.train_fraction);
  if (fit_rows == 0) {
    throw Error(b.csv_path.string() + ": " + std::to_string(frame.rows()) +
                " resampled rows are too few for window length " + std::to_string(L));
  }
  const auto scaler = data::fit_scaler(frame, {0, fit_rows});
  const auto dataset = data::make_windows(data::apply_scaler(frame, scaler), L);
  if (dataset.empty()) throw Error("no windows: frame has " + std::to_string(frame.rows()) + " rows, L = " + std::to_string(L));

  write_text(frame_path(ctx.out_dir, b.id), [&](std::ostream& out) { data::write_frame_csv(frame, out); });
  util::write_file_atomic(dataset_path(ctx.out_dir, b.id), [&](std::ostream& out) { data::write_dataset(dataset, out); }, true);
  write_text(scaler_path(ctx.out_dir, b.id), [&](std::ostream& out) { data::write_scaler(scaler, out); });

  const std::size_t n_train = data::train_window_count(dataset.count(), ctx.config.train_fraction);
  KeyValueText summary;
  summary.add("building", b.id);
  summary.add("csv_path", b.csv_path.string());
  summary.add("raw_rows", stats.data_rows);
  summary.add("dropped_bad_timestamp", stats.dropped_bad_timestamp);
  summary.add("missing_raw_cells", stats.missing_cells);
  summary.add("start", data::format_timestamp(frame.start()));
  summary.add("end", data::format_timestamp(frame.timestamp_at(frame.rows() - 1)));
  summary.add("n_rows", frame.rows());
  summary.add("filled_cells", filled.report.total_missing());
  for (const auto& col : filled.report.columns) {
    const auto longest = col.run_lengths.empty() ? 0 : *std::max_element(col.run_lengths.begin(), col.run_lengths.end());
    summary.add("gaps." + col.column + ".runs", col.run_lengths.size());
    summary.add("gaps." + col.column + ".cells", col.total());
    summary.add("gaps." + col.column + ".longest_run", longest);
  }
  summary.add("window_length", L);
  summary.add("windows", dataset.count());
  summary.add("train_fraction", ctx.config.train_fraction);
  summary.add("train_windows", n_train);
  summary.add("test_windows", dataset.count() - n_train);
  summary.add("scaler_fit_rows", fit_rows);
  for (std::size_t c = 0; c < data::kFeatureCount; ++c) {
    const std::string name(data::kFeatureNames[c]);
    summary.add("scaler." + name + ".min", scaler.min[c]);
    summary.add("scaler." + name + ".max", scaler.max[c]);
    if (scaler.is_constant(c)) summary.add("scaler." + name + ".constant", std::string("true"));
  }
  write_text(ctx.out_dir / ("ingest_" + b.id + ".txt"), [&](std::ostream& out) { summary.write(out); });
  ctx.log << "ingest " << b.id << ": " << frame.rows() << " rows, " << dataset.count() << " windows (L=" << L
          << "), " << filled.report.total_missing() << " cells gap-filled\n";
}

void train_one(const CommandContext& ctx, const BuildingConfig& b, std::ostream& log) {
  const fs::path ds_path = dataset_path(ctx.out_dir, b.id);
  const auto dataset = load_dataset(ds_path);
  if (dataset.window_length != b.architecture.window_length) {
    throw Error("dataset window length " + std::to_string(dataset.window_length) + " differs from configured " +
                std::to_string(b.architecture.window_length) + " (re-run ingest)");
  }
  auto [train_set, test_set] = data::chronological_split(dataset, ctx.config.train_fraction);
  const std::uint64_t seed = ctx.config.model_seed(b.id);
  const auto initial = model::build_model(b.architecture, seed);

  const std::size_t every = std::max<std::size_t>(1, b.training.epochs / 10);
  const auto result = train::train(initial, train_set, test_set, b.training, [&](const train::EpochLoss& e) {
    if (e.epoch == 1 || e.epoch % every == 0 || e.epoch == b.training.epochs) {
      log << "train " << b.id << " epoch " << e.epoch << "/" << b.training.epochs << " train_mse "
          << format_double(e.train_mse) << " test_mse " << format_double(e.test_mse) << '\n';
    }
  });

  model::save_params(result.params, model_path(ctx.out_dir, b.id));
  write_text(curve_path(ctx.out_dir, b.id), [&](std::ostream& out) { result.curve.write_csv(out); });

  const auto& a = b.architecture;
  const auto& t = b.training;
  nlohmann::ordered_json meta;
  meta["building"] = b.id;
  meta["preset"] = b.preset;
  meta["architecture"] = {{"window_length", a.window_length},   {"feature_count", a.feature_count},
                          {"conv_out_channels", a.conv_out_channels}, {"kernel_size", a.kernel_size},
                          {"padding", a.padding},               {"stride", a.stride},
                          {"lstm_input", a.lstm_input},         {"lstm_hidden", a.lstm_hidden},
                          {"dropout_rate", a.dropout_rate},     {"fc1_out", a.fc1_out},
                          {"fc2_out", a.fc2_out}};
  meta["training"] = {{"epochs", t.epochs},       {"batch_size", t.batch_size}, {"learning_rate", t.learning_rate},
                      {"loss", nn::to_string(t.loss)}, {"optimizer", "adam"},  {"beta1", t.beta1},
                      {"beta2", t.beta2},          {"epsilon", t.epsilon},     {"shuffle_each_epoch", t.shuffle_each_epoch}};
  meta["overrides"] = b.overrides;
  meta["global_seed"] = ctx.config.seed;
  meta["model_seed"] = seed;
  meta["train_seed"] = t.seed;
  meta["train_fraction"] = ctx.config.train_fraction;
  meta["train_windows"] = train_set.count();
  meta["test_windows"] = test_set.count();
  meta["parameter_count"] = result.params.parameter_count();
  meta["config_hash"] = config_fingerprint(b, ctx.config.train_fraction);
  meta["data_fingerprint"] = util::hex64(util::fnv1a64(util::read_file(ds_path)));
  const auto& last = result.curve.epochs.back();
  meta["final"] = {{"train_mse", last.train_mse}, {"test_mse", last.test_mse},
                   {"train_mae", last.train_mae}, {"test_mae", last.test_mae}};
  write_text(meta_path(ctx.out_dir, b.id), [&](std::ostream& out) { out << meta.dump(2) << '\n'; });
  log << "train " << b.id << ": wrote " << model_path(ctx.out_dir, b.id).string() << '\n';
}

void add_report(KeyValueText& kv, const std::string& prefix, const ensemble::MetricsReport& r) {
  kv.add(prefix + "mse", r.mse);
  kv.add(prefix + "mae", r.mae);
  kv.add(prefix + "mape", r.mape);
  kv.add(prefix + "mape_excluded", r.mape_excluded);
}

void evaluate_one(const CommandContext& ctx, const BuildingConfig& b, const EvalSplit& split) {
  const auto params = model::load_params(model_path(ctx.out_dir, b.id), b.architecture);
  const auto scaler = load_scaler(scaler_path(ctx.out_dir, b.id));
  data::WindowedDataset windows;
  if (split.kind == EvalSplit::Kind::File) {
    const auto filled = load_physical_frame(split.file, b.mapping, b.id, nullptr);
    windows = data::make_windows(data::apply_scaler(filled.frame, scaler), b.architecture.window_length);
  } else {
    auto parts = data::chronological_split(load_dataset(dataset_path(ctx.out_dir, b.id)), ctx.config.train_fraction);
    windows = split.kind == EvalSplit::Kind::Train ? std::move(parts.first) : std::move(parts.second);
  }
  if (windows.empty()) throw Error("no windows to evaluate in split " + split.label());

  const auto pred = model::predict(params, windows.inputs);
  const auto reports = ensemble::evaluate_report(pred, windows.targets, &scaler);
  const std::string scope = b.id + "_" + (split.kind == EvalSplit::Kind::File ? std::string("file") : split.label());

  KeyValueText kv;
  kv.add("scope", scope);
  kv.add("building", b.id);
  kv.add("split", split.label());
  kv.add("n", reports.front().n);
  for (const auto& r : reports) add_report(kv, ensemble::to_string(r.space) + ".", r);
  write_text(ctx.out_dir / ("report_" + scope + ".txt"), [&](std::ostream& out) { kv.write(out); });

  const auto pred_hz = data::invert_scaler(pred, scaler, "Freq");
  const auto actual_hz = data::invert_scaler(windows.targets, scaler, "Freq");
  write_text(ctx.out_dir / ("pred_" + scope + ".csv"), [&](std::ostream& out) {
    out << "timestamp,actual,predicted,actual_hz,predicted_hz\n";
    for (std::size_t j = 0; j < pred.size(); ++j) {
      out << data::format_timestamp(windows.target_time(j)) << ',' << format_double(windows.targets[j]) << ','
          << format_double(pred[j]) << ',' << format_double(actual_hz[j]) << ',' << format_double(pred_hz[j]) << '\n';
    }
  });
  ctx.log << "evaluate " << scope << ": n " << reports.front().n << " mse " << format_double(reports.front().mse)
          << " mae " << format_double(reports.front().mae) << " mape " << format_double(reports.front().mape) << '\n';
}

}  // namespace

EvalSplit EvalSplit::parse(const std::string& text) {
  if (text == "train") return {Kind::Train, {}};
  if (text == "test") return {Kind::Test, {}};
  if (text.starts_with("file=") && text.size() > 5) return {Kind::File, fs::path(text.substr(5))};
  throw InvalidArgumentError("--split must be train, test or file=PATH (got '" + text + "')");
}

std::string EvalSplit::label() const {
  switch (kind) {
    case Kind::Train: return "train";
    case Kind::Test: return "test";
    case Kind::File: return "file=" + file.string();
  }
  return {};
}

int cmd_ingest(const CommandContext& ctx, const std::vector<std::string>& ids) {
  return for_each_building(ctx, ids, "ingest", [&](const BuildingConfig& b) { ingest_one(ctx, b); });
}

int cmd_train(const CommandContext& ctx, const std::vector<std::string>& ids, bool parallel) {
  if (!parallel || ids.size() < 2) {
    return for_each_building(ctx, ids, "train", [&](const BuildingConfig& b) { train_one(ctx, b, ctx.log); });
  }
  struct Job {
    std::string id;
    std::ostringstream log;
    std::future<void> done;
  };
  std::vector<std::unique_ptr<Job>> jobs;
  for (const auto& id : ids) {
    auto job = std::make_unique<Job>();
    job->id = id;
    Job* raw = job.get();
    job->done = std::async(std::launch::async, [&ctx, raw] { train_one(ctx, ctx.config.building(raw->id), raw->log); });
    jobs.push_back(std::move(job));
  }
  int status = 0;
  for (auto& job : jobs) {
    try {
      job->done.get();
    } catch (const std::exception& e) {
      ctx.err << "train failed for building " << job->id << ": " << e.what() << '\n';
      status = 1;
    }
    ctx.log << job->log.str();
  }
  return status;
}

int cmd_evaluate(const CommandContext& ctx, const std::vector<std::string>& ids, const EvalSplit& split) {
  return for_each_building(ctx, ids, "evaluate", [&](const BuildingConfig& b) { evaluate_one(ctx, b, split); });
}

int cmd_ensemble(const CommandContext& ctx, const std::optional<fs::path>& source) {
  try {
    const RunConfig& cfg = ctx.config;
    const fs::path csv = source ? *source
                                : cfg.ensemble_source.csv_path.value_or(fs::path());
    if (csv.empty()) throw Error("no ensemble data source: pass --split file=PATH or set [ensemble] csv_path");
    const auto& spec = cfg.ensemble;
    const data::ColumnMapping mapping =
        cfg.ensemble_source.mapping.value_or(cfg.building(spec.members.front().id).mapping);
    const auto filled = load_physical_frame(csv, mapping, "campus", nullptr);

    std::vector<model::ModelParams> models;
    std::vector<data::ScalerParams> scalers;
    std::vector<data::WindowedDataset> windows;
    for (const auto& member : spec.members) {
      const auto& b = cfg.building(member.id);
      models.push_back(with_context("member " + b.id, [&] {
        return model::load_params(model_path(ctx.out_dir, b.id), b.architecture);
      }));
      scalers.push_back(with_context("member " + b.id, [&] { return load_scaler(scaler_path(ctx.out_dir, b.id)); }));
      windows.push_back(data::make_windows(data::apply_scaler(filled.frame, scalers.back()), b.architecture.window_length));
    }
    windows = ensemble::align_to_common_targets(std::move(windows));

    std::vector<ensemble::MemberInput> inputs;
    for (std::size_t m = 0; m < spec.members.size(); ++m) inputs.push_back({&models[m], windows[m], &scalers[m]});
    const auto prediction = ensemble::predict_ensemble(spec, inputs);

    // Actuals in hertz straight from the gap-filled frame.
    std::vector<double> actual_hz;
    const auto freq = filled.frame.column(data::Feature::Frequency);
    for (std::size_t row : windows.front().source_rows) actual_hz.push_back(freq[row]);

    // One reference scaling (the first member's) puts all columns in a common normalized space.
    const auto& reference = scalers.front();
    const auto actual_norm = data::scale_values(actual_hz, reference, "Freq");

    KeyValueText kv;
    kv.add("scope", std::string("ensemble"));
    kv.add("evaluation_source", csv.string());
    kv.add("normalized_reference", spec.members.front().id);
    kv.add("n", actual_hz.size());
    kv.add("start", data::format_timestamp(prediction.timestamps.front()));
    kv.add("end", data::format_timestamp(prediction.timestamps.back()));
    std::string members;
    for (const auto& m : spec.members) members += (members.empty() ? "" : ",") + m.id;
    kv.add("members", members);
    for (const auto& m : spec.members) kv.add("weight." + m.id, m.weight);
    kv.add("weights_source", std::string(cfg.ensemble_weights_overridden ? "override" : "default"));

    std::vector<std::string> columns;
    std::vector<const std::vector<double>*> series;
    for (std::size_t m = 0; m < spec.members.size(); ++m) {
      columns.push_back(spec.members[m].id);
      series.push_back(&prediction.member_predictions[m]);
    }
    columns.emplace_back("ensemble");
    series.push_back(&prediction.combined);

    double min_member_mse = std::numeric_limits<double>::infinity();
    double ensemble_mse = 0.0;
    for (std::size_t k = 0; k < columns.size(); ++k) {
      const auto norm = data::scale_values(*series[k], reference, "Freq");
      const auto normalized = ensemble::compute_report(norm, actual_norm, ensemble::MetricSpace::Normalized);
      const auto hertz = ensemble::compute_report(*series[k], actual_hz, ensemble::MetricSpace::Hertz);
      add_report(kv, "normalized." + columns[k] + ".", normalized);
      add_report(kv, "hertz." + columns[k] + ".", hertz);
      if (k + 1 < columns.size()) min_member_mse = std::min(min_member_mse, normalized.mse);
      else ensemble_mse = normalized.mse;
    }
    kv.add("ensemble_mse_le_min_member", std::string(ensemble_mse <= min_member_mse ? "true" : "false"));
    write_text(ctx.out_dir / "report_ensemble.txt", [&](std::ostream& out) { kv.write(out); });

    write_text(ctx.out_dir / "pred_ensemble.csv", [&](std::ostream& out) {
      out << "timestamp,actual_hz";
      for (const auto& c : columns) out << ",pred_" << c;
      out << '\n';
      for (std::size_t j = 0; j < actual_hz.size(); ++j) {
        out << data::format_timestamp(prediction.timestamps[j]) << ',' << format_double(actual_hz[j]);
        for (const auto* s : series) out << ',' << format_double((*s)[j]);
        out << '\n';
      }
    });
    ctx.log << "ensemble: n " << actual_hz.size() << " normalized mse " << format_double(ensemble_mse)
            << " (best member " << format_double(min_member_mse) << ")\n";
    return 0;
  } catch (const std::exception& e) {
    ctx.err << "ensemble failed: " << e.what() << '\n';
    return 1;
  }
}

int cmd_export_curves(const CommandContext& ctx, const std::vector<std::string>& ids) {
  std::ostringstream body;
  const int status = for_each_building(ctx, ids, "export-curves", [&](const BuildingConfig& b) {
    std::ifstream in(curve_path(ctx.out_dir, b.id));
    if (!in) throw Error("missing loss curve " + curve_path(ctx.out_dir, b.id).string() + " (run train first)");
    const auto curve = train::LossCurve::read_csv(in);
    for (const auto& e : curve.epochs) {
      const std::pair<const char*, double> cells[] = {
          {"train,mse", e.train_mse}, {"test,mse", e.test_mse}, {"train,mae", e.train_mae}, {"test,mae", e.test_mae}};
      for (const auto& [what, v] : cells) body << b.id << ',' << e.epoch << ',' << what << ',' << format_double(v) << '\n';
    }
    ctx.log << "export-curves " << b.id << ": " << curve.epochs.size() << " epochs\n";
  });
  write_text(ctx.out_dir / "curves_long.csv", [&](std::ostream& out) {
    out << "building,epoch,split,metric,loss\n" << body.str();
  });
  return status;
}

}  // namespace gridcast::cli
