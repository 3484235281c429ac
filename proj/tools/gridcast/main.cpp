#include <CLI11.hpp>
#include <iostream>
#include <optional>

#include "commands.hpp"
#include "gridcast/error.hpp"
#include "gridcast/util/memory.hpp"

namespace {

struct Options {
  std::string config;
  std::vector<std::string> buildings;
  bool all = false;
  std::string split = "test";
  std::optional<std::uint64_t> seed;
  std::string out;
};

void add_common(CLI::App* cmd, Options& o, bool building_flags) {
  cmd->add_option("--config", o.config, "Run configuration file")->required();
  cmd->add_option("--seed", o.seed, "Override the global seed");
  cmd->add_option("--out", o.out, "Output directory (default: out_dir from the config)");
  if (building_flags) {
    cmd->add_option("--building", o.buildings, "Building id (repeatable)");
    cmd->add_flag("--all", o.all, "Every configured building");
  }
}

}  // namespace

int main(int argc, char** argv) {
  gridcast::util::retain_freed_memory();
  CLI::App app{"gridcast: ConvLSTM grid-frequency forecasting per building, with a weighted campus ensemble"};
  app.require_subcommand(1);
  Options o;

  auto* ingest = app.add_subcommand("ingest", "Parse, resample, gap-fill, scale and window raw CSV data");
  auto* train = app.add_subcommand("train", "Train building models with Adam");
  auto* evaluate = app.add_subcommand("evaluate", "Score trained models on a split");
  auto* ens = app.add_subcommand("ensemble", "Score members and the weighted ensemble on one data source");
  auto* curves = app.add_subcommand("export-curves", "Merge loss curves into one long-format CSV");
  for (auto* cmd : {ingest, train, evaluate, curves}) add_common(cmd, o, true);
  add_common(ens, o, false);
  evaluate->add_option("--split", o.split, "train, test or file=PATH")->capture_default_str();
  ens->add_option("--split", o.split, "file=PATH with unseen data");

  CLI11_PARSE(app, argc, argv);

  using namespace gridcast::cli;
  try {
    RunConfig config = RunConfig::load(o.config);
    if (o.seed) config.set_seed(*o.seed);
    const std::filesystem::path out = o.out.empty() ? config.out_dir : std::filesystem::path(o.out);
    const CommandContext ctx{config, out, std::cout, std::cerr};

    std::vector<std::string> ids = o.all || o.buildings.empty() ? config.building_ids() : o.buildings;
    for (const auto& id : ids) config.building(id);

    if (*ingest) return cmd_ingest(ctx, ids);
    if (*train) return cmd_train(ctx, ids, o.all);
    if (*evaluate) return cmd_evaluate(ctx, ids, EvalSplit::parse(o.split));
    if (*curves) return cmd_export_curves(ctx, ids);
    if (*ens) {
      std::optional<std::filesystem::path> source;
      if (ens->count("--split")) {
        const auto split = EvalSplit::parse(o.split);
        if (split.kind != EvalSplit::Kind::File) throw gridcast::InvalidArgumentError("ensemble --split must be file=PATH");
        source = split.file;
      }
      return cmd_ensemble(ctx, source);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
