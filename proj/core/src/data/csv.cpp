#include "gridcast/data/csv.hpp"

#include <algorithm>
#include <fstream>
#include <istream>

#include "gridcast/error.hpp"
#include "gridcast/util/text.hpp"

namespace gridcast::data {

std::vector<RawRecord> parse_csv(std::istream& in, const ColumnMapping& mapping, ParseStats* stats) {
  std::string line;
  if (!std::getline(in, line)) throw EmptyInputError("CSV input is empty");
  if (line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
  if (util::trim_cell(line).empty()) throw EmptyInputError("CSV input has an empty header row");

  const auto header = util::split_commas(line);
  auto find_column = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), std::string_view(name));
    if (it == header.end()) throw SchemaError("CSV header is missing column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t ts_col = find_column(mapping.timestamp);
  std::array<std::size_t, kFeatureCount> feature_cols{};
  for (std::size_t f = 0; f < kFeatureCount; ++f) feature_cols[f] = find_column(mapping.features[f]);

  ParseStats local;
  std::vector<RawRecord> records;
  while (std::getline(in, line)) {
    if (util::trim_cell(line).empty()) continue;
    ++local.data_rows;
    const auto cells = util::split_commas(line);
    const auto ts = ts_col < cells.size() ? parse_timestamp(cells[ts_col]) : std::nullopt;
    if (!ts) {
      ++local.dropped_bad_timestamp;
      continue;
    }
    RawRecord rec;
    rec.timestamp = *ts;
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
      const std::size_t c = feature_cols[f];
      const auto v = c < cells.size() ? util::parse_double(cells[c]) : std::nullopt;
      rec.values[f] = v.value_or(kMissing);
      if (!v) ++local.missing_cells;
    }
    records.push_back(rec);
  }
  std::stable_sort(records.begin(), records.end(),
                   [](const RawRecord& a, const RawRecord& b) { return a.timestamp < b.timestamp; });
  if (stats) *stats = local;
  return records;
}

std::vector<RawRecord> parse_csv(const std::filesystem::path& path, const ColumnMapping& mapping,
                                 ParseStats* stats) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open CSV file " + path.string());
  return parse_csv(in, mapping, stats);
}

}  // namespace gridcast::data
