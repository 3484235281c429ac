#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "run_config.hpp"

namespace gridcast::cli {

/// Which windows `evaluate` scores.
struct EvalSplit {
  enum class Kind { Train, Test, File };
  Kind kind = Kind::Test;
  std::filesystem::path file;

  /// `train`, `test` or `file=PATH`.
  static EvalSplit parse(const std::string& text);
  std::string label() const;
};

/// Shared inputs for every command. Each command returns the process exit
/// status: 0 only if every requested building succeeded.
struct CommandContext {
  RunConfig config;
  std::filesystem::path out_dir;
  std::ostream& log;
  std::ostream& err;
};

/// parse -> resample -> fill -> scale -> window for each building.
int cmd_ingest(const CommandContext& ctx, const std::vector<std::string>& ids);
/// Trains each building; with `parallel` the buildings run as concurrent jobs.
int cmd_train(const CommandContext& ctx, const std::vector<std::string>& ids, bool parallel = false);
int cmd_evaluate(const CommandContext& ctx, const std::vector<std::string>& ids, const EvalSplit& split);
/// Scores every member and the weighted ensemble on one data source.
int cmd_ensemble(const CommandContext& ctx, const std::optional<std::filesystem::path>& source);
/// Merges per-building loss curves into one long-format CSV.
int cmd_export_curves(const CommandContext& ctx, const std::vector<std::string>& ids);

}  // namespace gridcast::cli
