#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gridcast/data/csv.hpp"
#include "gridcast/ensemble/ensemble.hpp"
#include "gridcast/model/convlstm.hpp"
#include "gridcast/train/trainer.hpp"

namespace gridcast::cli {

struct BuildingConfig {
  std::string id;
  std::filesystem::path csv_path;
  data::ColumnMapping mapping;
  std::string preset;
  model::ConvLSTMConfig architecture;
  train::TrainConfig training;
  /// `key=value` for every setting that differs from the preset default.
  std::vector<std::string> overrides;
};

/// Data source for campus-level ensemble scoring.
struct EnsembleSource {
  std::optional<std::filesystem::path> csv_path;
  std::optional<data::ColumnMapping> mapping;
};

struct RunConfig {
  std::vector<BuildingConfig> buildings;
  ensemble::EnsembleSpec ensemble;
  bool ensemble_weights_overridden = false;
  EnsembleSource ensemble_source;
  double train_fraction = 0.8;
  std::uint64_t seed = 0;
  std::filesystem::path out_dir = "out";

  const BuildingConfig& building(const std::string& id) const;
  std::vector<std::string> building_ids() const;

  /// Applies a new global seed and re-derives every building's seeds.
  void set_seed(std::uint64_t seed);

  /// Seed for the initial weights of a building's model.
  std::uint64_t model_seed(const std::string& id) const;

  /// Parses key-value text with `[section]` headers; relative paths resolve
  /// against `base_dir`. Throws ConfigError on unknown or malformed keys.
  static RunConfig parse(std::istream& in, const std::filesystem::path& base_dir);
  static RunConfig load(const std::filesystem::path& path);
};

}  // namespace gridcast::cli
