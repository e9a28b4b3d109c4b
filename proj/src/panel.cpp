#include "macrostate/panel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "macrostate/error.hpp"
#include "macrostate/log.hpp"
#include "macrostate/util.hpp"

namespace macrostate {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string::size_type start = 0;
  while (true) {
    auto pos = line.find(',', start);
    if (pos == std::string::npos) {
      fields.push_back(trim(std::string_view(line).substr(start)));
      break;
    }
    fields.push_back(trim(std::string_view(line).substr(start, pos - start)));
    start = pos + 1;
  }
  return fields;
}

double parse_cell(const std::string& cell, std::size_t row, const std::string& column) {
  double v = 0.0;
  auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (res.ec != std::errc() || res.ptr != cell.data() + cell.size()) {
    fail(ErrorKind::parse,
         "row " + std::to_string(row) + ", column " + column + ": cannot parse '" + cell + "'");
  }
  if (!std::isfinite(v)) {
    fail(ErrorKind::parse,
         "row " + std::to_string(row) + ", column " + column + ": non-finite value '" + cell + "'");
  }
  return v;
}

}  // namespace

TimeSeriesPanel::TimeSeriesPanel(std::vector<SeriesKey> columns,
                                 std::vector<PeriodLabel> timestamps,
                                 std::vector<double> values,
                                 std::vector<std::uint8_t> available)
    : columns_(std::move(columns)),
      timestamps_(std::move(timestamps)),
      values_(std::move(values)),
      available_(std::move(available)) {
  const std::size_t cells = columns_.size() * timestamps_.size();
  if (values_.size() != cells || available_.size() != cells) {
    fail(ErrorKind::dimension, "panel cell buffers do not match columns x timestamps");
  }
  for (std::size_t t = 1; t < timestamps_.size(); ++t) {
    if (timestamps_[t].granularity != timestamps_[0].granularity) {
      fail(ErrorKind::format, "mixed granularities in panel timestamps");
    }
    if (!(timestamps_[t - 1] < timestamps_[t])) {
      fail(ErrorKind::format, "panel timestamps not strictly increasing at " + timestamps_[t].str());
    }
  }
  for (std::size_t i = 0; i < cells; ++i) {
    if (available_[i] && !std::isfinite(values_[i])) {
      fail(ErrorKind::data, "non-finite value marked available");
    }
  }
}

Granularity TimeSeriesPanel::granularity() const {
  if (timestamps_.empty()) fail(ErrorKind::insufficient_data, "empty panel has no granularity");
  return timestamps_[0].granularity;
}

std::optional<std::size_t> TimeSeriesPanel::find_column(std::string_view series,
                                                        std::string_view feature) const {
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    if (columns_[c].series == series && columns_[c].feature == feature) return c;
  }
  return std::nullopt;
}

std::vector<std::size_t> TimeSeriesPanel::columns_with_feature(std::string_view feature) const {
  std::vector<std::size_t> out;
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    if (columns_[c].feature == feature) out.push_back(c);
  }
  return out;
}

std::vector<std::string> TimeSeriesPanel::series_names() const {
  std::vector<std::string> out;
  for (const auto& key : columns_) {
    if (std::find(out.begin(), out.end(), key.series) == out.end()) out.push_back(key.series);
  }
  return out;
}

std::vector<std::string> TimeSeriesPanel::feature_kinds() const {
  std::vector<std::string> out;
  for (const auto& key : columns_) {
    if (std::find(out.begin(), out.end(), key.feature) == out.end()) out.push_back(key.feature);
  }
  return out;
}

std::vector<double> TimeSeriesPanel::column_values(std::size_t c) const {
  std::vector<double> out(timestamps_.size());
  for (std::size_t t = 0; t < timestamps_.size(); ++t) out[t] = value(t, c);
  return out;
}

std::vector<std::uint8_t> TimeSeriesPanel::column_mask(std::size_t c) const {
  std::vector<std::uint8_t> out(timestamps_.size());
  for (std::size_t t = 0; t < timestamps_.size(); ++t) out[t] = available(t, c) ? 1 : 0;
  return out;
}

Schema schema_from_json_text(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::parse, std::string("schema JSON: ") + e.what());
  }
  if (!doc.is_object()) fail(ErrorKind::format, "schema must be a JSON object");
  Schema schema;
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const auto& entry = it.value();
    if (!entry.is_object() || !entry.contains("series") || !entry.contains("feature")) {
      fail(ErrorKind::format, "schema entry for '" + it.key() + "' needs series and feature");
    }
    schema[it.key()] = SeriesKey{entry["series"].get<std::string>(),
                                 entry["feature"].get<std::string>()};
  }
  return schema;
}

Schema schema_from_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io, "cannot open schema file " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return schema_from_json_text(text);
}

Schema schema_from_headers(const std::vector<std::string>& column_names) {
  Schema schema;
  for (const auto& name : column_names) {
    auto pos = name.rfind('_');
    if (pos == std::string::npos || pos == 0 || pos + 1 == name.size()) {
      fail(ErrorKind::format, "column '" + name + "' is not of the form <SERIES>_<feature>");
    }
    schema[name] = SeriesKey{name.substr(0, pos), name.substr(pos + 1)};
  }
  return schema;
}

TimeSeriesPanel load_panel(std::istream& in, const Schema& schema) {
  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::format, "empty input: missing header row");
  std::vector<std::string> header = split_csv_line(line);
  if (header.empty() || header[0] != "date") {
    fail(ErrorKind::format, "first column must be 'date'");
  }

  std::vector<SeriesKey> columns;
  columns.reserve(header.size() - 1);
  for (std::size_t c = 1; c < header.size(); ++c) {
    auto it = schema.find(header[c]);
    if (it == schema.end()) {
      fail(ErrorKind::format, "schema does not map column '" + header[c] + "'");
    }
    if (std::find(columns.begin(), columns.end(), it->second) != columns.end()) {
      fail(ErrorKind::conflict, "two columns map to series '" + it->second.series +
                                    "', feature '" + it->second.feature + "'");
    }
    columns.push_back(it->second);
  }

  struct Row {
    std::vector<double> values;
    std::vector<std::uint8_t> available;
  };
  std::map<std::pair<int, int>, Row> rows;  // (year, sub) -> merged row
  std::optional<Granularity> granularity;

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      fail(ErrorKind::parse, "row " + std::to_string(line_no) + " has " +
                                 std::to_string(fields.size()) + " fields, expected " +
                                 std::to_string(header.size()));
    }
    PeriodLabel date;
    try {
      date = PeriodLabel::parse(fields[0]);
    } catch (const Error& e) {
      fail(ErrorKind::parse, "row " + std::to_string(line_no) + ": " + e.what());
    }
    if (!granularity) {
      granularity = date.granularity;
    } else if (date.granularity != *granularity) {
      fail(ErrorKind::format, "row " + std::to_string(line_no) +
                                  ": mixed granularities in one file (" + fields[0] + ")");
    }

    auto [it, inserted] = rows.try_emplace(std::make_pair(date.year, date.sub));
    Row& row = it->second;
    if (inserted) {
      row.values.assign(columns.size(), 0.0);
      row.available.assign(columns.size(), 0);
    }
    for (std::size_t c = 1; c < fields.size(); ++c) {
      if (fields[c].empty()) continue;
      if (row.available[c - 1]) {
        fail(ErrorKind::conflict, "duplicate value for date " + date.str() + ", column '" +
                                      header[c] + "' (row " + std::to_string(line_no) + ")");
      }
      row.values[c - 1] = parse_cell(fields[c], line_no, header[c]);
      row.available[c - 1] = 1;
    }
  }

  std::vector<PeriodLabel> timestamps;
  std::vector<double> values;
  std::vector<std::uint8_t> available;
  timestamps.reserve(rows.size());
  values.reserve(rows.size() * columns.size());
  available.reserve(rows.size() * columns.size());
  for (const auto& [key, row] : rows) {
    PeriodLabel label;
    label.year = key.first;
    label.sub = key.second;
    label.granularity = *granularity;
    timestamps.push_back(label);
    values.insert(values.end(), row.values.begin(), row.values.end());
    available.insert(available.end(), row.available.begin(), row.available.end());
  }
  return TimeSeriesPanel(std::move(columns), std::move(timestamps), std::move(values),
                         std::move(available));
}

TimeSeriesPanel load_panel_file(const std::filesystem::path& csv_path,
                                const std::optional<std::filesystem::path>& schema_path) {
  std::ifstream in(csv_path);
  if (!in) fail(ErrorKind::io, "cannot open panel file " + csv_path.string());
  if (schema_path) {
    return load_panel(in, schema_from_json_file(*schema_path));
  }
  // No schema file: derive one from the header row, then rewind.
  std::string header_line;
  if (!std::getline(in, header_line)) fail(ErrorKind::format, "empty input: missing header row");
  std::vector<std::string> header = split_csv_line(header_line);
  if (header.empty() || header[0] != "date") fail(ErrorKind::format, "first column must be 'date'");
  Schema schema = schema_from_headers(std::vector<std::string>(header.begin() + 1, header.end()));
  in.clear();
  in.seekg(0);
  return load_panel(in, schema);
}

void save_panel(const TimeSeriesPanel& panel, std::ostream& out) {
  out << "date";
  for (const auto& key : panel.columns()) out << "," << key.column_label();
  out << "\n";
  for (std::size_t t = 0; t < panel.time_count(); ++t) {
    out << panel.timestamps()[t].str();
    for (std::size_t c = 0; c < panel.column_count(); ++c) {
      out << ",";
      if (panel.available(t, c)) out << format_double(panel.value(t, c));
    }
    out << "\n";
  }
}

void save_panel_file(const TimeSeriesPanel& panel, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::io, "cannot write " + path.string());
  save_panel(panel, out);
}

ResampledSeries resample_quarterly(std::span<const PeriodLabel> timestamps,
                                   std::span<const double> values,
                                   std::span<const std::uint8_t> available) {
  if (timestamps.size() != values.size() || timestamps.size() != available.size()) {
    fail(ErrorKind::dimension, "resample inputs differ in length");
  }
  ResampledSeries out;
  if (timestamps.empty()) return out;
  if (timestamps[0].granularity == Granularity::quarterly) {
    out.timestamps.assign(timestamps.begin(), timestamps.end());
    out.values.assign(values.begin(), values.end());
    out.available.assign(available.begin(), available.end());
    out.already_quarterly = true;
    log_info("resample_quarterly: input already quarterly, passing through");
    return out;
  }

  // (year, quarter) -> (sum over available months, count)
  std::map<std::pair<int, int>, std::pair<double, int>> quarters;
  for (std::size_t t = 0; t < timestamps.size(); ++t) {
    auto key = std::make_pair(timestamps[t].year, timestamps[t].quarter());
    auto& slot = quarters[key];
    if (available[t]) {
      slot.first += values[t];
      slot.second += 1;
    }
  }
  for (const auto& [key, slot] : quarters) {
    PeriodLabel label;
    label.year = key.first;
    label.sub = key.second;
    label.granularity = Granularity::quarterly;
    out.timestamps.push_back(label);
    if (slot.second > 0) {
      out.values.push_back(slot.first / slot.second);
      out.available.push_back(1);
    } else {
      out.values.push_back(0.0);
      out.available.push_back(0);
    }
  }
  return out;
}

TimeSeriesPanel resample_panel_quarterly(const TimeSeriesPanel& panel, bool* already_quarterly) {
  if (already_quarterly) *already_quarterly = false;
  if (panel.time_count() == 0) return panel;
  if (panel.granularity() == Granularity::quarterly) {
    if (already_quarterly) *already_quarterly = true;
    return panel;
  }
  std::vector<PeriodLabel> timestamps;
  std::vector<double> values;
  std::vector<std::uint8_t> available;
  for (std::size_t c = 0; c < panel.column_count(); ++c) {
    auto series = resample_quarterly(panel.timestamps(), panel.column_values(c),
                                     panel.column_mask(c));
    if (c == 0) {
      timestamps = series.timestamps;
      values.assign(timestamps.size() * panel.column_count(), 0.0);
      available.assign(timestamps.size() * panel.column_count(), 0);
    }
    for (std::size_t t = 0; t < series.timestamps.size(); ++t) {
      values[t * panel.column_count() + c] = series.values[t];
      available[t * panel.column_count() + c] = series.available[t];
    }
  }
  return TimeSeriesPanel(panel.columns(), std::move(timestamps), std::move(values),
                         std::move(available));
}

TimeSeriesPanel align(const std::vector<TimeSeriesPanel>& panels) {
  if (panels.empty()) fail(ErrorKind::argument, "align requires at least one panel");
  for (const auto& p : panels) {
    if (p.time_count() == 0) fail(ErrorKind::alignment, "cannot align an empty panel");
    if (p.granularity() != panels[0].granularity()) {
      fail(ErrorKind::format, "align requires a uniform granularity across panels");
    }
  }

  // Intersection of timestamps, preserving order from the first panel.
  std::vector<PeriodLabel> common;
  for (const auto& ts : panels[0].timestamps()) {
    bool everywhere = true;
    for (std::size_t p = 1; p < panels.size() && everywhere; ++p) {
      const auto& other = panels[p].timestamps();
      everywhere = std::find(other.begin(), other.end(), ts) != other.end();
    }
    if (everywhere) common.push_back(ts);
  }
  if (common.empty()) fail(ErrorKind::alignment, "panels share no timestamps");

  std::vector<SeriesKey> columns;
  for (const auto& p : panels) {
    for (const auto& key : p.columns()) {
      if (std::find(columns.begin(), columns.end(), key) != columns.end()) {
        fail(ErrorKind::conflict, "series '" + key.series + "', feature '" + key.feature +
                                      "' appears in more than one panel");
      }
      columns.push_back(key);
    }
  }

  std::vector<double> values(common.size() * columns.size(), 0.0);
  std::vector<std::uint8_t> available(common.size() * columns.size(), 0);
  std::size_t col_base = 0;
  for (const auto& p : panels) {
    // Map common timestamps into this panel's time index.
    for (std::size_t t = 0; t < common.size(); ++t) {
      auto it = std::find(p.timestamps().begin(), p.timestamps().end(), common[t]);
      std::size_t src_t = static_cast<std::size_t>(it - p.timestamps().begin());
      for (std::size_t c = 0; c < p.column_count(); ++c) {
        values[t * columns.size() + col_base + c] = p.value(src_t, c);
        available[t * columns.size() + col_base + c] = p.available(src_t, c) ? 1 : 0;
      }
    }
    col_base += p.column_count();
  }
  return TimeSeriesPanel(std::move(columns), std::move(common), std::move(values),
                         std::move(available));
}

}  // namespace macrostate
