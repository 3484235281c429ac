#include "gridcast/data/frame.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>

#include "gridcast/error.hpp"
#include "gridcast/util/text.hpp"

namespace gridcast::data {

TimeSeriesFrame::TimeSeriesFrame(std::string building_id, MinuteTime start, std::size_t rows)
    : building_id_(std::move(building_id)), start_(start) {
  for (auto& col : columns_) col.assign(rows, kMissing);
}

std::size_t TimeSeriesFrame::missing_count() const {
  std::size_t n = 0;
  for (const auto& col : columns_) n += static_cast<std::size_t>(std::count_if(col.begin(), col.end(), is_missing));
  return n;
}

bool TimeSeriesFrame::operator==(const TimeSeriesFrame& other) const {
  if (building_id_ != other.building_id_ || start_ != other.start_ || rows() != other.rows()) return false;
  for (std::size_t c = 0; c < kFeatureCount; ++c) {
    for (std::size_t r = 0; r < rows(); ++r) {
      const double a = columns_[c][r];
      const double b = other.columns_[c][r];
      if (is_missing(a) != is_missing(b)) return false;
      if (!is_missing(a) && std::bit_cast<std::uint64_t>(a) != std::bit_cast<std::uint64_t>(b)) return false;
    }
  }
  return true;
}

namespace {

// Total order on records so that per-minute sums do not depend on the order
// the records arrived in. Missing sorts after every number.
bool record_less(const RawRecord& a, const RawRecord& b) {
  if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
  for (std::size_t f = 0; f < kFeatureCount; ++f) {
    const double x = a.values[f];
    const double y = b.values[f];
    const bool mx = is_missing(x);
    const bool my = is_missing(y);
    if (mx != my) return my;
    if (!mx && x != y) return x < y;
  }
  return false;
}

constexpr std::size_t kMaxFrameRows = 100'000'000;

}  // namespace

TimeSeriesFrame resample_1min(std::span<const RawRecord> records, std::string building_id) {
  if (records.empty()) throw EmptyInputError("no records to resample");

  std::vector<RawRecord> sorted(records.begin(), records.end());
  std::sort(sorted.begin(), sorted.end(), record_less);

  const MinuteTime first = floor_to_minute(sorted.front().timestamp);
  const MinuteTime last = floor_to_minute(sorted.back().timestamp);
  const auto span_minutes = static_cast<std::size_t>((last - first).count());
  if (span_minutes >= kMaxFrameRows) {
    throw InvalidArgumentError("record time span of " + std::to_string(span_minutes) +
                               " minutes is too large to resample");
  }
  const std::size_t rows = span_minutes + 1;

  TimeSeriesFrame frame(std::move(building_id), first, rows);
  std::vector<std::size_t> counts(rows * kFeatureCount, 0);
  std::vector<double> sums(rows * kFeatureCount, 0.0);
  for (const RawRecord& rec : sorted) {
    const auto row = static_cast<std::size_t>((floor_to_minute(rec.timestamp) - first).count());
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
      if (is_missing(rec.values[f])) continue;
      sums[row * kFeatureCount + f] += rec.values[f];
      ++counts[row * kFeatureCount + f];
    }
  }
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
      const std::size_t n = counts[r * kFeatureCount + f];
      if (n > 0) frame.cell(r, f) = sums[r * kFeatureCount + f] / static_cast<double>(n);
    }
  }
  return frame;
}

std::size_t ColumnGaps::total() const {
  std::size_t n = 0;
  for (auto len : run_lengths) n += len;
  return n;
}

std::size_t GapReport::total_missing() const {
  std::size_t n = 0;
  for (const auto& c : columns) n += c.total();
  return n;
}

GapFillResult fill_gaps(const TimeSeriesFrame& frame) {
  GapFillResult result{frame, {}};
  const std::size_t rows = frame.rows();
  for (std::size_t c = 0; c < kFeatureCount; ++c) {
    auto col = result.frame.column(c);
    ColumnGaps gaps{std::string(kFeatureNames[c]), {}};

    std::size_t prev_valid = rows;  // sentinel: none seen yet
    std::size_t r = 0;
    while (r < rows) {
      if (!is_missing(col[r])) {
        prev_valid = r;
        ++r;
        continue;
      }
      std::size_t run_end = r;
      while (run_end < rows && is_missing(col[run_end])) ++run_end;
      gaps.run_lengths.push_back(run_end - r);

      const bool has_prev = prev_valid != rows;
      const bool has_next = run_end < rows;
      if (!has_prev && !has_next) {
        throw UnfillableColumnError("column '" + gaps.column + "' has no valid values");
      }
      for (std::size_t k = r; k < run_end; ++k) {
        if (has_prev && has_next) {
          const double a = col[prev_valid];
          const double b = col[run_end];
          const double t = static_cast<double>(k - prev_valid) / static_cast<double>(run_end - prev_valid);
          col[k] = a + (b - a) * t;
        } else {
          col[k] = has_prev ? col[prev_valid] : col[run_end];
        }
      }
      r = run_end;
    }
    result.report.columns.push_back(std::move(gaps));
  }
  return result;
}

void write_frame_csv(const TimeSeriesFrame& frame, std::ostream& out) {
  out << "timestamp";
  for (auto name : kFeatureNames) out << ',' << name;
  out << '\n';
  for (std::size_t r = 0; r < frame.rows(); ++r) {
    out << format_timestamp(frame.timestamp_at(r));
    for (std::size_t c = 0; c < kFeatureCount; ++c) {
      out << ',';
      const double v = frame.cell(r, c);
      if (!is_missing(v)) out << util::format_double(v);
    }
    out << '\n';
  }
}

TimeSeriesFrame read_frame_csv(std::istream& in, std::string building_id) {
  std::string line;
  if (!std::getline(in, line)) throw EmptyInputError("frame CSV is empty");
  const auto header = util::split_commas(line);
  if (header.size() != kFeatureCount + 1 || header[0] != "timestamp") {
    throw SchemaError("frame CSV header must be timestamp followed by the eight features");
  }
  for (std::size_t c = 0; c < kFeatureCount; ++c) {
    if (header[c + 1] != kFeatureNames[c]) {
      throw SchemaError("frame CSV column " + std::to_string(c + 1) + " should be '" +
                        std::string(kFeatureNames[c]) + "'");
    }
  }
  std::vector<std::array<double, kFeatureCount>> rows;
  std::optional<MinuteTime> start;
  while (std::getline(in, line)) {
    if (util::trim_cell(line).empty()) continue;
    const auto cells = util::split_commas(line);
    if (cells.size() != kFeatureCount + 1) throw LoadError("frame CSV row " + std::to_string(rows.size() + 1) + " has wrong cell count");
    const auto ts = parse_timestamp(cells[0]);
    if (!ts) throw LoadError("frame CSV row " + std::to_string(rows.size() + 1) + " has a bad timestamp");
    const MinuteTime minute = floor_to_minute(*ts);
    if (!start) start = minute;
    if (minute != *start + std::chrono::minutes(rows.size())) {
      throw LoadError("frame CSV rows are not consecutive minutes at row " + std::to_string(rows.size() + 1));
    }
    std::array<double, kFeatureCount> values{};
    for (std::size_t c = 0; c < kFeatureCount; ++c) values[c] = util::parse_double(cells[c + 1]).value_or(kMissing);
    rows.push_back(values);
  }
  if (!start) throw EmptyInputError("frame CSV has no rows");
  TimeSeriesFrame frame(std::move(building_id), *start, rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < kFeatureCount; ++c) frame.cell(r, c) = rows[r][c];
  return frame;
}

}  // namespace gridcast::data
