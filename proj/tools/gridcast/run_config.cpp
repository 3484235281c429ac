#include "run_config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fstream>
#include <set>

#include "gridcast/error.hpp"
#include "gridcast/util/files.hpp"
#include "gridcast/util/random.hpp"
#include "gridcast/util/text.hpp"

namespace gridcast::cli {
namespace {

namespace pt = boost::property_tree;

const std::set<std::string> kTopLevelKeys = {"ensemble_weights", "train_fraction", "seed", "out_dir"};
const std::set<std::string> kBuildingKeys = {"csv_path",   "timestamp_col", "feature_cols", "window_length", "preset",
                                             "epochs",     "learning_rate", "batch_size",   "loss"};
const std::set<std::string> kEnsembleKeys = {"csv_path", "timestamp_col", "feature_cols"};

std::string where(const std::string& section, const std::string& key) {
  return section.empty() ? key : "[" + section + "] " + key;
}

double to_double(const std::string& text, const std::string& section, const std::string& key) {
  const auto v = util::parse_double(util::trim_cell(text));
  if (!v) throw ConfigError(where(section, key) + ": '" + text + "' is not a number");
  return *v;
}

std::uint64_t to_u64(const std::string& text, const std::string& section, const std::string& key) {
  const std::string_view s = util::trim_cell(text);
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw ConfigError(where(section, key) + ": '" + text + "' is not a nonnegative integer");
  }
  return v;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  for (auto cell : util::split_commas(text)) out.emplace_back(cell);
  return out;
}

data::ColumnMapping parse_mapping(const pt::ptree& section, const std::string& name) {
  data::ColumnMapping mapping;
  if (auto ts = section.get_optional<std::string>("timestamp_col")) mapping.timestamp = std::string(util::trim_cell(*ts));
  if (auto cols = section.get_optional<std::string>("feature_cols")) {
    const auto names = split_list(*cols);
    if (names.size() != data::kFeatureCount) {
      throw ConfigError(where(name, "feature_cols") + ": expected 8 column names, got " + std::to_string(names.size()));
    }
    std::copy(names.begin(), names.end(), mapping.features.begin());
  }
  return mapping;
}

void check_keys(const pt::ptree& section, const std::set<std::string>& allowed, const std::string& name) {
  for (const auto& [key, child] : section) {
    if (!child.empty()) throw ConfigError("nested section under [" + name + "] is not supported");
    if (!allowed.contains(key)) throw ConfigError("unknown key " + where(name, key));
  }
}

bool is_preset_name(const std::string& id) { return id == "A" || id == "B" || id == "C"; }

BuildingConfig parse_building(const std::string& id, const pt::ptree& section, const std::filesystem::path& base_dir) {
  check_keys(section, kBuildingKeys, id);
  BuildingConfig b;
  b.id = id;
  const auto csv = section.get_optional<std::string>("csv_path");
  if (!csv) throw ConfigError("[" + id + "] is missing csv_path");
  b.csv_path = std::filesystem::path(std::string(util::trim_cell(*csv)));
  if (b.csv_path.is_relative()) b.csv_path = base_dir / b.csv_path;
  b.mapping = parse_mapping(section, id);
  if (b.mapping.timestamp != data::ColumnMapping{}.timestamp) b.overrides.push_back("timestamp_col=" + b.mapping.timestamp);
  if (b.mapping.features != data::ColumnMapping{}.features) b.overrides.push_back("feature_cols");

  if (auto p = section.get_optional<std::string>("preset")) {
    b.preset = std::string(util::trim_cell(*p));
  } else if (is_preset_name(id)) {
    b.preset = id;
  } else {
    throw ConfigError("[" + id + "] needs a preset (A, B or C)");
  }
  b.architecture = model::ConvLSTMConfig::preset(b.preset);
  b.training.epochs = model::preset_epochs(b.preset);
  if (b.preset != id) b.overrides.push_back("preset=" + b.preset);

  if (auto v = section.get_optional<std::string>("window_length")) {
    const auto L = to_u64(*v, id, "window_length");
    if (L != b.architecture.window_length) b.overrides.push_back("window_length=" + std::to_string(L));
    b.architecture.window_length = L;
  }
  if (auto v = section.get_optional<std::string>("epochs")) {
    const auto e = to_u64(*v, id, "epochs");
    if (e != b.training.epochs) b.overrides.push_back("epochs=" + std::to_string(e));
    b.training.epochs = e;
  }
  if (auto v = section.get_optional<std::string>("learning_rate")) {
    const double lr = to_double(*v, id, "learning_rate");
    if (lr != b.training.learning_rate) b.overrides.push_back("learning_rate=" + util::format_double(lr));
    b.training.learning_rate = lr;
  }
  if (auto v = section.get_optional<std::string>("batch_size")) {
    const auto bs = to_u64(*v, id, "batch_size");
    if (bs != b.training.batch_size) b.overrides.push_back("batch_size=" + std::to_string(bs));
    b.training.batch_size = bs;
  }
  if (auto v = section.get_optional<std::string>("loss")) {
    try {
      b.training.loss = nn::parse_loss_kind(util::trim_cell(*v));
    } catch (const Error& e) {
      throw ConfigError("[" + id + "] loss: " + e.what());
    }
    if (b.training.loss != nn::LossKind::Mse) b.overrides.push_back("loss=" + nn::to_string(b.training.loss));
  }
  try {
    b.architecture.validate();
    b.training.validate();
  } catch (const Error& e) {
    throw ConfigError("[" + id + "] " + e.what());
  }
  return b;
}

ensemble::EnsembleSpec parse_weights(const std::string& text, const std::vector<std::string>& ids) {
  ensemble::EnsembleSpec spec;
  const auto items = split_list(text);
  const bool named = !items.empty() && items.front().find(':') != std::string::npos;
  if (named) {
    for (const auto& item : items) {
      const auto colon = item.find(':');
      if (colon == std::string::npos) throw ConfigError("ensemble_weights: mix of named and positional entries");
      const std::string id(util::trim_cell(std::string_view(item).substr(0, colon)));
      if (std::find(ids.begin(), ids.end(), id) == ids.end()) {
        throw ConfigError("ensemble_weights names unknown building '" + id + "'");
      }
      spec.members.push_back({id, to_double(item.substr(colon + 1), "", "ensemble_weights")});
    }
  } else {
    if (items.size() != ids.size()) {
      throw ConfigError("ensemble_weights lists " + std::to_string(items.size()) + " weights for " +
                        std::to_string(ids.size()) + " buildings");
    }
    for (std::size_t k = 0; k < items.size(); ++k)
      spec.members.push_back({ids[k], to_double(items[k], "", "ensemble_weights")});
  }
  try {
    spec.validate();
  } catch (const Error& e) {
    throw ConfigError(std::string("ensemble_weights: ") + e.what());
  }
  return spec;
}

}  // namespace

const BuildingConfig& RunConfig::building(const std::string& id) const {
  for (const auto& b : buildings)
    if (b.id == id) return b;
  throw ConfigError("building '" + id + "' is not configured");
}

std::vector<std::string> RunConfig::building_ids() const {
  std::vector<std::string> ids;
  for (const auto& b : buildings) ids.push_back(b.id);
  return ids;
}

std::uint64_t RunConfig::model_seed(const std::string& id) const { return util::mix_seed(seed ^ util::fnv1a64(id)); }

void RunConfig::set_seed(std::uint64_t new_seed) {
  seed = new_seed;
  for (auto& b : buildings) b.training.seed = util::mix_seed(model_seed(b.id) + 1);
}

RunConfig RunConfig::parse(std::istream& in, const std::filesystem::path& base_dir) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }

  RunConfig cfg;
  std::optional<std::string> weights_text;
  for (const auto& [key, child] : tree) {
    if (!child.empty()) {
      if (key == "ensemble") {
        check_keys(child, kEnsembleKeys, key);
        if (auto csv = child.get_optional<std::string>("csv_path")) {
          std::filesystem::path p(std::string(util::trim_cell(*csv)));
          cfg.ensemble_source.csv_path = p.is_relative() ? base_dir / p : p;
        }
        if (child.count("timestamp_col") || child.count("feature_cols")) {
          cfg.ensemble_source.mapping = parse_mapping(child, key);
        }
      } else {
        cfg.buildings.push_back(parse_building(key, child, base_dir));
      }
      continue;
    }
    if (!kTopLevelKeys.contains(key)) throw ConfigError("unknown top-level key " + key);
    const std::string value = child.data();
    if (key == "train_fraction") {
      cfg.train_fraction = to_double(value, "", key);
      if (!(cfg.train_fraction > 0.0 && cfg.train_fraction < 1.0)) {
        throw ConfigError("train_fraction must lie strictly between 0 and 1");
      }
    } else if (key == "seed") {
      cfg.seed = to_u64(value, "", key);
    } else if (key == "out_dir") {
      std::filesystem::path p(std::string(util::trim_cell(value)));
      cfg.out_dir = p.is_relative() ? base_dir / p : p;
    } else {
      weights_text = value;
    }
  }
  if (cfg.buildings.empty()) throw ConfigError("config defines no building sections");

  const auto ids = cfg.building_ids();
  if (weights_text) {
    cfg.ensemble = parse_weights(*weights_text, ids);
    const auto def = ensemble::EnsembleSpec::campus_default();
    cfg.ensemble_weights_overridden = cfg.ensemble.members.size() != def.members.size();
    for (std::size_t k = 0; !cfg.ensemble_weights_overridden && k < def.members.size(); ++k) {
      cfg.ensemble_weights_overridden = cfg.ensemble.members[k].id != def.members[k].id ||
                                        cfg.ensemble.members[k].weight != def.members[k].weight;
    }
  } else if (ids == std::vector<std::string>{"A", "B", "C"}) {
    cfg.ensemble = ensemble::EnsembleSpec::campus_default();
  } else {
    const double w = 1.0 / static_cast<double>(ids.size());
    for (const auto& id : ids) cfg.ensemble.members.push_back({id, w});
    cfg.ensemble_weights_overridden = true;
  }
  cfg.set_seed(cfg.seed);
  return cfg;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse(in, path.has_parent_path() ? path.parent_path() : std::filesystem::path("."));
}

}  // namespace gridcast::cli
