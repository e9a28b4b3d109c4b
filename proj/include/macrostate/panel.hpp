#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "macrostate/period.hpp"

namespace macrostate {

/// One column of the panel: a series (country or asset) carrying a feature.
struct SeriesKey {
  std::string series;
  std::string feature;

  std::string column_label() const { return series + "_" + feature; }

  friend bool operator==(const SeriesKey& a, const SeriesKey& b) {
    return a.series == b.series && a.feature == b.feature;
  }
  friend bool operator<(const SeriesKey& a, const SeriesKey& b) {
    if (a.series != b.series) return a.series < b.series;
    return a.feature < b.feature;
  }
};

/// Immutable countries x features x time grid with an availability mask.
/// Timestamps are strictly increasing and share one granularity; values are
/// finite wherever the mask is set.
class TimeSeriesPanel {
 public:
  TimeSeriesPanel() = default;
  TimeSeriesPanel(std::vector<SeriesKey> columns, std::vector<PeriodLabel> timestamps,
                  std::vector<double> values, std::vector<std::uint8_t> available);

  std::size_t column_count() const { return columns_.size(); }
  std::size_t time_count() const { return timestamps_.size(); }
  const std::vector<SeriesKey>& columns() const { return columns_; }
  const std::vector<PeriodLabel>& timestamps() const { return timestamps_; }

  /// Granularity of the time axis; requires at least one timestamp.
  Granularity granularity() const;

  double value(std::size_t t, std::size_t c) const { return values_[t * columns_.size() + c]; }
  bool available(std::size_t t, std::size_t c) const {
    return available_[t * columns_.size() + c] != 0;
  }

  std::optional<std::size_t> find_column(std::string_view series, std::string_view feature) const;
  std::vector<std::size_t> columns_with_feature(std::string_view feature) const;

  /// Distinct series identifiers in first-appearance order.
  std::vector<std::string> series_names() const;
  /// Distinct feature kinds in first-appearance order.
  std::vector<std::string> feature_kinds() const;

  std::vector<double> column_values(std::size_t c) const;
  std::vector<std::uint8_t> column_mask(std::size_t c) const;

 private:
  std::vector<SeriesKey> columns_;
  std::vector<PeriodLabel> timestamps_;
  std::vector<double> values_;            // row-major: [t * columns + c]
  std::vector<std::uint8_t> available_;   // same layout
};

/// Column name -> (series, feature).
using Schema = std::map<std::string, SeriesKey, std::less<>>;

Schema schema_from_json_text(std::string_view json_text);
Schema schema_from_json_file(const std::filesystem::path& path);
/// Fallback schema: split each column name at its last underscore.
Schema schema_from_headers(const std::vector<std::string>& column_names);

/// Parse the panel CSV (first column `date`, empty cell = missing). Rows with
/// equal dates are merged; a cell filled twice is a conflict. Timestamps come
/// out sorted, deduplicated, and of one granularity.
TimeSeriesPanel load_panel(std::istream& in, const Schema& schema);

TimeSeriesPanel load_panel_file(const std::filesystem::path& csv_path,
                                const std::optional<std::filesystem::path>& schema_path);

/// Inverse of load_panel: same CSV layout, masked cells written empty.
void save_panel(const TimeSeriesPanel& panel, std::ostream& out);
void save_panel_file(const TimeSeriesPanel& panel, const std::filesystem::path& path);

struct ResampledSeries {
  std::vector<PeriodLabel> timestamps;
  std::vector<double> values;
  std::vector<std::uint8_t> available;
  bool already_quarterly = false;  // input was quarterly; values passed through
};

/// Average monthly values over calendar quarters. A quarter takes the mean of
/// its available months and is masked only when every month is missing.
ResampledSeries resample_quarterly(std::span<const PeriodLabel> timestamps,
                                   std::span<const double> values,
                                   std::span<const std::uint8_t> available);

TimeSeriesPanel resample_panel_quarterly(const TimeSeriesPanel& panel,
                                         bool* already_quarterly = nullptr);

/// Union of columns over the intersection of timestamps.
TimeSeriesPanel align(const std::vector<TimeSeriesPanel>& panels);

}  // namespace macrostate
