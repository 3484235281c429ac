// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
// Usage: gridcast_acceptance [criterion numbers...]   (default: all)

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "gridcast/data/csv.hpp"
#include "gridcast/data/frame.hpp"
#include "gridcast/data/scaler.hpp"
#include "gridcast/data/window.hpp"
#include "gridcast/ensemble/ensemble.hpp"
#include "gridcast/ensemble/metrics.hpp"
#include "gridcast/model/convlstm.hpp"
#include "gridcast/nn/lstm.hpp"
#include "gridcast/train/trainer.hpp"
#include "gridcast/util/files.hpp"
#include "gridcast/util/memory.hpp"
#include "gridcast/util/text.hpp"
#include "gridcast_test/gradient_suites.hpp"
#include "gridcast_test/synthetic.hpp"

#ifndef GRIDCAST_CLI_PATH
#error "GRIDCAST_CLI_PATH must point at the gridcast executable"
#endif

namespace {

using namespace gridcast;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

// 1. Analytic gradients vs central differences.
Outcome gradient_correctness() {
  const auto t0 = Clock::now();
  util::Rng rng(20240601);
  std::ostringstream detail;
  bool ok = true;
  double overall = 0.0;
  for (const auto& target : testing::gradcheck_targets()) {
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) worst = std::max(worst, target.check(rng));
    overall = std::max(overall, worst);
    if (!(worst < 1e-4)) {
      ok = false;
      detail << target.name << " max rel err " << sci(worst) << "; ";
    }
  }
  const double elapsed = seconds_since(t0);
  if (elapsed >= 60.0) ok = false;
  detail << "10 targets x 20 instances, max rel err " << sci(overall) << " (< 1e-4), " << elapsed << " s (< 60 s)";
  return {ok, detail.str()};
}

// 2. Zero-parameter closed forms of the cell.
Outcome equation_fidelity() {
  const std::size_t hidden = 4, input = 3;
  const auto p = nn::LSTMParams::zeros(hidden, input);
  double worst = 0.0;
  util::Rng rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    nn::LSTMState s{testing::random_vector(hidden, rng), testing::random_vector(hidden, rng, -5, 5)};
    const auto out = nn::lstm_cell_forward(testing::random_vector(input, rng, -9, 9), s, p);
    for (std::size_t k = 0; k < hidden; ++k) {
      worst = std::max({worst, std::abs(out.cache.f[k] - 0.5), std::abs(out.cache.i[k] - 0.5),
                        std::abs(out.cache.o[k] - 0.5), std::abs(out.state.c[k] - 0.5 * s.c[k]),
                        std::abs(out.state.h[k] - 0.5 * std::tanh(0.5 * s.c[k]))});
    }
  }
  return {worst <= 1e-12, "max deviation from f=i=o=0.5, C=0.5c, h=0.5 tanh(0.5c): " + sci(worst) + " (<= 1e-12)"};
}

// 3. Metrics vs loop oracles.
Outcome metric_oracles() {
  const std::vector<double> hp = {1, 2}, ha = {2, 2};
  const bool hand = ensemble::metric_mse(hp, ha) == 0.5 && ensemble::metric_mae(hp, ha) == 0.5 &&
                    ensemble::metric_mape(hp, ha).value == 0.25;
  util::Rng rng(3);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng.below(500);
    const auto p = testing::random_vector(n, rng, -2, 2), a = testing::random_vector(n, rng, 0.05, 2);
    double se = 0, ae = 0, pe = 0;
    for (std::size_t k = 0; k < n; ++k) {
      const double d = a[k] - p[k];
      se += d * d;
      ae += std::abs(d);
      pe += std::abs(d / a[k]);
    }
    const double N = static_cast<double>(n);
    worst = std::max({worst, std::abs(ensemble::metric_mse(p, a) - se / N),
                      std::abs(ensemble::metric_mae(p, a) - ae / N),
                      std::abs(ensemble::metric_mape(p, a).value - pe / N)});
  }
  return {hand && worst <= 1e-12,
          std::string("hand case (0.5, 0.5, 0.25) ") + (hand ? "ok" : "WRONG") + "; 100 random vectors max |diff| " +
              sci(worst) + " (<= 1e-12)"};
}

// 4. Pipeline properties.
Outcome pipeline_invariants() {
  util::Rng rng(4);
  std::size_t failures = 0;
  double worst_round_trip = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto frame = testing::random_frame(2 + rng.below(120), rng);
    const std::size_t fit_end = 1 + rng.below(frame.rows());
    const auto s = data::fit_scaler(frame, {0, fit_end});
    const auto scaled = data::apply_scaler(frame, s);
    for (std::size_t c = 0; c < data::kFeatureCount; ++c) {
      for (std::size_t r = 0; r < fit_end; ++r) failures += scaled.cell(r, c) < 0.0 || scaled.cell(r, c) > 1.0;
      if (s.is_constant(c)) continue;
      const auto back = data::invert_scaler(scaled.column(c), s, s.columns[c]);
      for (std::size_t r = 0; r < frame.rows(); ++r) {
        worst_round_trip = std::max(worst_round_trip, std::abs(back[r] - frame.cell(r, c)) / std::abs(frame.cell(r, c)));
      }
    }

    const std::size_t L = 1 + rng.below(8);
    const auto ds = data::make_windows(frame, L);
    if (frame.rows() <= L) {
      failures += !ds.empty();
    } else {
      failures += ds.count() != frame.rows() - L;
      for (std::size_t j = 0; j < ds.count(); ++j) {
        failures += ds.targets[j] != frame.cell(j + L, data::kFrequencyIndex);
        for (std::size_t c = 0; c < data::kFeatureCount; ++c) failures += ds.inputs.at(j, L - 1, c) != frame.cell(j + L - 1, c);
      }
      const double fraction = rng.uniform(0.05, 0.95);
      const auto [train, test] = data::chronological_split(ds, fraction);
      failures += train.count() + test.count() != ds.count();
      if (!train.empty() && !test.empty()) failures += train.source_rows.back() >= test.source_rows.front();
    }

    std::vector<data::RawRecord> records;
    const auto base = *data::parse_timestamp("2024-01-01 00:00");
    for (std::size_t k = 0, n = 1 + rng.below(150); k < n; ++k) {
      data::RawRecord r;
      r.timestamp = base + std::chrono::milliseconds(rng.below(30 * 60 * 1000));
      for (auto& v : r.values) v = rng.uniform01() < 0.05 ? data::kMissing : rng.uniform(-100, 100);
      records.push_back(r);
    }
    const auto reference = data::resample_1min(records);
    for (std::size_t k = records.size(); k > 1; --k) std::swap(records[k - 1], records[rng.below(k)]);
    failures += !(data::resample_1min(records) == reference);
  }
  const bool ok = failures == 0 && worst_round_trip <= 1e-9;
  return {ok, "200 random frames: " + std::to_string(failures) +
                  " violations (unit range, off-by-one, split order, permutation), round-trip rel err " +
                  sci(worst_round_trip) + " (<= 1e-9)"};
}

// Synthetic campus data: 60-minute sinusoid in frequency with measurement noise.
testing::SyntheticCsv learnability_data() {
  testing::SyntheticCsv spec;
  spec.minutes = 5000;
  spec.period_minutes = 60.0;
  spec.freq_amplitude = 0.05;
  spec.freq_noise = 0.02;
  spec.seed = 5;
  return spec;
}

// 5. Building C preset beats persistence after 300 epochs.
Outcome learnability(const fs::path& work) {
  const auto t0 = Clock::now();
  const auto csv = work / "learn.csv";
  testing::write_csv_file(csv, learnability_data());
  const auto filled = data::fill_gaps(data::resample_1min(data::parse_csv(csv, data::ColumnMapping{}), "C"));
  const auto config = model::ConvLSTMConfig::preset("C");
  const double fraction = 0.8;
  const std::size_t fit_rows = data::training_row_count(filled.frame.rows(), config.window_length, fraction);
  const auto scaler = data::fit_scaler(filled.frame, {0, fit_rows});
  const auto ds = data::make_windows(data::apply_scaler(filled.frame, scaler), config.window_length);
  const auto [train_set, test_set] = data::chronological_split(ds, fraction);

  std::vector<double> persistence;
  for (std::size_t j = 0; j < test_set.count(); ++j) {
    persistence.push_back(test_set.inputs.at(j, config.window_length - 1, data::kFrequencyIndex));
  }
  const double baseline = ensemble::metric_mse(persistence, test_set.targets);

  train::TrainConfig cfg;
  cfg.epochs = 300;
  cfg.seed = 55;
  const auto result = train::train(model::build_model(config, 5), train_set, test_set, cfg);
  const double test_mse = result.curve.epochs.back().test_mse;
  const double elapsed = seconds_since(t0);
  std::ostringstream detail;
  detail << filled.frame.rows() << " rows, " << train_set.count() << "/" << test_set.count()
         << " windows; test MSE " << sci(test_mse) << " vs persistence " << sci(baseline) << " (must be lower); "
         << elapsed << " s (target < 600 s)";
  return {test_mse < baseline && elapsed < 600.0, detail.str()};
}

// 6. Ensemble algebra.
Outcome ensemble_algebra() {
  util::Rng rng(6);
  std::size_t violations = 0;
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> w(3);
    double sum = 0;
    for (auto& x : w) sum += x = rng.uniform01();
    for (auto& x : w) x /= sum;
    std::vector<std::vector<double>> preds;
    for (int m = 0; m < 3; ++m) preds.push_back(testing::random_vector(40, rng, -1, 2));
    const auto out = ensemble::combine_predictions(w, preds);
    for (std::size_t t = 0; t < 40; ++t) {
      const double lo = std::min({preds[0][t], preds[1][t], preds[2][t]});
      const double hi = std::max({preds[0][t], preds[1][t], preds[2][t]});
      // One ulp of slack for the rounding of a convex combination.
      violations += out[t] < std::nextafter(lo, -1e300) || out[t] > std::nextafter(hi, 1e300);
    }
    violations += ensemble::combine_predictions(std::vector<double>{1, 0, 0}, preds) != preds[0];
  }
  const auto def = ensemble::EnsembleSpec::campus_default();
  const bool defaults = def.members.size() == 3 && def.members[0].id == "A" && def.members[0].weight == 0.3 &&
                        def.members[1].id == "B" && def.members[1].weight == 0.4 && def.members[2].id == "C" &&
                        def.members[2].weight == 0.3;
  return {violations == 0 && defaults, std::to_string(violations) +
                                           " convexity/one-hot violations over 500 draws; default weights " +
                                           (defaults ? "A 0.3, B 0.4, C 0.3" : "WRONG")};
}

std::map<std::string, std::string> read_report(const fs::path& path) {
  std::map<std::string, std::string> kv;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find(" = ");
    if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 3);
  }
  return kv;
}

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string("\"") + GRIDCAST_CLI_PATH + "\" " + args + " > \"" + log.string() + "\" 2>&1";
  return std::system(cmd.c_str());
}

void write_campus(const fs::path& dir, std::size_t epochs) {
  for (int k = 0; k < 3; ++k) {
    auto spec = learnability_data();
    spec.minutes = 1500;
    spec.seed = 70 + k;
    spec.phase = 0.5 * k;
    spec.blank_freq_every = 97;
    testing::write_csv_file(dir / (std::string(1, char('A' + k)) + ".csv"), spec);
  }
  auto unseen = learnability_data();
  unseen.minutes = 600;
  unseen.seed = 80;
  unseen.start = "2024-05-01 00:00";
  testing::write_csv_file(dir / "unseen.csv", unseen);
  std::ofstream cfg(dir / "campus.ini");
  cfg << "seed = 2024\ntrain_fraction = 0.8\nensemble_weights = A:0.3, B:0.4, C:0.3\nout_dir = out\n\n"
      << "[ensemble]\ncsv_path = unseen.csv\n";
  for (const char* id : {"A", "B", "C"}) {
    cfg << "\n[" << id << "]\ncsv_path = " << id << ".csv\npreset = " << id << "\nepochs = " << epochs
        << "\nbatch_size = 32\nlearning_rate = 0.001\nloss = mse\n";
  }
}

// 7. Dataset unavailable offline: criterion 5 plus a synthetic three-building CLI run.
Outcome campus_fallback(const fs::path& work, const Outcome& learn) {
  const auto dir = work / "campus";
  fs::create_directories(dir);
  write_campus(dir, 40);
  const auto cfg = (dir / "campus.ini").string();
  const std::vector<std::string> steps = {"ingest --config \"" + cfg + "\" --all",
                                          "train --config \"" + cfg + "\" --all",
                                          "evaluate --config \"" + cfg + "\" --all --split test",
                                          "ensemble --config \"" + cfg + "\"",
                                          "export-curves --config \"" + cfg + "\" --all"};
  for (std::size_t k = 0; k < steps.size(); ++k) {
    const auto log = dir / ("step" + std::to_string(k) + ".log");
    if (run_cli(steps[k], log) != 0) {
      return {false, "CLI step failed: gridcast " + steps[k] + "\n" + util::read_file(log)};
    }
  }
  const auto report = read_report(dir / "out" / "report_ensemble.txt");
  bool complete = report.size() > 0;
  for (const char* who : {"A", "B", "C", "ensemble"}) {
    for (const char* metric : {"mse", "mae", "mape"}) {
      complete = complete && report.contains(std::string("normalized.") + who + "." + metric);
    }
  }
  if (!complete) return {false, "report_ensemble.txt lacks a member or metric"};
  std::ostringstream detail;
  detail << "dataset offline, fallback: criterion 5 " << (learn.pass ? "passed" : "FAILED")
         << "; CLI ingest/train/evaluate/ensemble/export-curves on 3 synthetic buildings ok; normalized MSE A "
         << report.at("normalized.A.mse") << ", B " << report.at("normalized.B.mse") << ", C "
         << report.at("normalized.C.mse") << ", ensemble " << report.at("normalized.ensemble.mse")
         << "; ensemble <= min member: " << report.at("ensemble_mse_le_min_member") << " (reported, not asserted)";
  return {learn.pass, detail.str()};
}

// 8. Two identical end-to-end runs give identical bytes.
Outcome determinism(const fs::path& work) {
  std::vector<fs::path> runs;
  for (int run = 0; run < 2; ++run) {
    const auto dir = work / ("repeat" + std::to_string(run));
    fs::create_directories(dir);
    write_campus(dir, 5);
    const auto cfg = (dir / "campus.ini").string();
    for (const char* cmd : {"ingest", "train"}) {
      const auto log = dir / (std::string(cmd) + ".log");
      // The first run trains the buildings in parallel, the second one by one.
      const std::string sel = run == 0 || std::string(cmd) == "ingest" ? " --all" : " --building A --building B --building C";
      if (run_cli(std::string(cmd) + " --config \"" + cfg + "\"" + sel, log) != 0) {
        return {false, std::string(cmd) + " failed:\n" + util::read_file(log)};
      }
    }
    runs.push_back(dir / "out");
  }
  std::size_t compared = 0;
  for (const char* id : {"A", "B", "C"}) {
    for (const std::string name : {std::string("model_") + id + ".clstm", std::string("curve_") + id + ".csv"}) {
      if (util::read_file(runs[0] / name) != util::read_file(runs[1] / name)) return {false, name + " differs"};
      ++compared;
    }
  }
  return {true, std::to_string(compared) + " parameter and loss-curve files bit-identical across two runs"};
}

}  // namespace

int main(int argc, char** argv) {
  util::retain_freed_memory();
  std::set<int> selected;
  for (int k = 1; k < argc; ++k) selected.insert(std::atoi(argv[k]));
  const auto wanted = [&](int n) { return selected.empty() || selected.contains(n); };

  testing::TempDir work("acceptance");
  int failures = 0;
  Outcome learn;
  const auto report = [&](int n, const char* name, const std::function<Outcome()>& fn) {
    if (!wanted(n)) return;
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s  [%d] %-26s %s  (%.1f s)\n", o.pass ? "PASS" : "FAIL", n, name, o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
    if (n == 5) learn = o;
  };

  report(1, "gradient correctness", gradient_correctness);
  report(2, "equation fidelity", equation_fidelity);
  report(3, "metric oracle equivalence", metric_oracles);
  report(4, "pipeline invariants", pipeline_invariants);
  if (wanted(5) || wanted(7)) {
    const bool show = wanted(5);
    if (!show) selected.insert(5);
    report(5, "learnability smoke test", [&] { return learnability(work.path()); });
  }
  report(6, "ensemble algebra", ensemble_algebra);
  report(7, "reproduction (fallback)", [&] { return campus_fallback(work.path(), learn); });
  report(8, "determinism", [&] { return determinism(work.path()); });

  std::printf("%s: %d criterion(s) failed\n", failures ? "FAILED" : "ALL PASSED", failures);
  return failures ? 1 : 0;
}
