#include "macrostate/similarity.hpp"

#include <cmath>
#include <ostream>
#include <utility>

#include "macrostate/error.hpp"
#include "macrostate/kernels.hpp"
#include "macrostate/transform.hpp"
#include "macrostate/util.hpp"

namespace macrostate {

const char* to_string(MatrixKind kind) {
  return kind == MatrixKind::distance ? "distance" : "similarity";
}

SquareMatrix::SquareMatrix(MatrixKind kind, std::vector<std::string> labels,
                           std::vector<double> entries)
    : kind_(kind), labels_(std::move(labels)), entries_(std::move(entries)) {
  validate();
}

SquareMatrix SquareMatrix::distance(std::vector<std::string> labels,
                                    std::vector<double> entries) {
  return SquareMatrix(MatrixKind::distance, std::move(labels), std::move(entries));
}

SquareMatrix SquareMatrix::similarity(std::vector<std::string> labels,
                                      std::vector<double> entries) {
  return SquareMatrix(MatrixKind::similarity, std::move(labels), std::move(entries));
}

void SquareMatrix::validate() const {
  const std::size_t n = labels_.size();
  if (entries_.size() != n * n) {
    fail(ErrorKind::dimension, "matrix entries do not form a square over the labels");
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double v = entries_[i * n + j];
      if (!std::isfinite(v)) {
        fail(ErrorKind::data, "non-finite matrix entry at (" + std::to_string(i) + ", " +
                                  std::to_string(j) + ")");
      }
      if (std::abs(v - entries_[j * n + i]) > 1e-12) {
        fail(ErrorKind::data, "matrix not symmetric at (" + std::to_string(i) + ", " +
                                  std::to_string(j) + ")");
      }
    }
    double d = entries_[i * n + i];
    if (kind_ == MatrixKind::distance && std::abs(d) > 1e-12) {
      fail(ErrorKind::data, "distance matrix diagonal nonzero at " + std::to_string(i));
    }
    if (kind_ == MatrixKind::similarity && std::abs(d - 1.0) > 1e-12) {
      fail(ErrorKind::data, "similarity matrix diagonal not 1 at " + std::to_string(i));
    }
  }
  if (kind_ == MatrixKind::distance) {
    for (double v : entries_) {
      if (v < 0.0) fail(ErrorKind::data, "negative entry in a distance matrix");
    }
  }
}

void SquareMatrix::write_csv(std::ostream& out) const {
  const std::size_t n = size();
  out << "label";
  for (const auto& label : labels_) out << "," << label;
  out << "\n";
  for (std::size_t i = 0; i < n; ++i) {
    out << labels_[i];
    for (std::size_t j = 0; j < n; ++j) out << "," << format_double(at(i, j));
    out << "\n";
  }
}

nlohmann::json SquareMatrix::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < size(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t j = 0; j < size(); ++j) row.push_back(at(i, j));
    rows.push_back(std::move(row));
  }
  return nlohmann::json{{"kind", to_string(kind_)}, {"labels", labels_}, {"entries", rows}};
}

SquareMatrix driver_distance_matrix(const std::vector<LabeledSeries>& trajectories) {
  if (trajectories.empty()) {
    fail(ErrorKind::insufficient_data, "driver matrix needs at least one trajectory");
  }
  const std::size_t n = trajectories.size();
  const std::size_t dim = trajectories[0].values.size();
  if (dim == 0) fail(ErrorKind::insufficient_data, "empty trajectories");

  std::vector<double> points(n * dim);
  std::vector<std::string> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (trajectories[i].values.size() != dim) {
      fail(ErrorKind::dimension, "trajectory '" + trajectories[i].label + "' has length " +
                                     std::to_string(trajectories[i].values.size()) +
                                     ", expected " + std::to_string(dim));
    }
    std::vector<double> normalized = l1_normalize(trajectories[i].values);
    std::copy(normalized.begin(), normalized.end(), points.begin() + i * dim);
    labels[i] = trajectories[i].label;
  }
  std::vector<double> entries(n * n);
  kernels::pairwise_l1(points.data(), n, dim, entries.data());
  return SquareMatrix::distance(std::move(labels), std::move(entries));
}

std::vector<LabeledSeries> driver_trajectories(const TimeSeriesPanel& panel) {
  if (panel.column_count() == 0) {
    fail(ErrorKind::insufficient_data, "panel has no columns");
  }
  const std::size_t T = panel.time_count();
  bool any_equity = false;
  for (const auto& key : panel.columns()) any_equity |= key.feature == "equity";

  // Equity trajectories are log returns, defined from the second timestamp on,
  // so the common grid starts there whenever an equity column is present.
  const std::size_t first = any_equity ? 1 : 0;
  if (T <= first) fail(ErrorKind::insufficient_data, "too few timestamps for trajectories");

  std::vector<std::size_t> usable;
  for (std::size_t t = first; t < T; ++t) {
    bool ok = true;
    for (std::size_t c = 0; c < panel.column_count() && ok; ++c) {
      if (panel.columns()[c].feature == "equity") {
        ok = panel.available(t - 1, c) && panel.available(t, c);
      } else {
        ok = panel.available(t, c);
      }
    }
    if (ok) usable.push_back(t);
  }
  if (usable.empty()) {
    fail(ErrorKind::insufficient_data, "no timestamp has every trajectory defined");
  }

  std::vector<LabeledSeries> out;
  out.reserve(panel.column_count());
  for (std::size_t c = 0; c < panel.column_count(); ++c) {
    const SeriesKey& key = panel.columns()[c];
    LabeledSeries series;
    series.label = key.column_label();
    series.values.reserve(usable.size());
    if (key.feature == "equity") {
      for (std::size_t t : usable) {
        double prev = panel.value(t - 1, c), cur = panel.value(t, c);
        if (!(prev > 0.0) || !(cur > 0.0)) {
          fail(ErrorKind::domain, "equity prices must be positive for log returns ('" +
                                      series.label + "')");
        }
        series.values.push_back(std::log(cur / prev));
      }
    } else {
      for (std::size_t t : usable) series.values.push_back(panel.value(t, c));
    }
    out.push_back(std::move(series));
  }
  return out;
}

SquareMatrix temporal_self_similarity(const TimeSeriesPanel& panel, std::string_view feature) {
  auto cols = panel.columns_with_feature(feature);
  if (cols.empty()) {
    fail(ErrorKind::unknown_feature, "no columns carry feature '" + std::string(feature) + "'");
  }
  const bool equity = feature == "equity";

  std::vector<std::vector<double>> values;
  std::vector<std::vector<std::uint8_t>> masks;
  std::vector<PeriodLabel> times;
  if (equity) {
    if (panel.time_count() < 2) {
      fail(ErrorKind::insufficient_data, "equity self-similarity needs at least two periods");
    }
    for (std::size_t c : cols) {
      auto returns = masked_log_returns(panel.column_values(c), panel.column_mask(c));
      values.push_back(std::move(returns.values));
      masks.push_back(std::move(returns.available));
    }
    times.assign(panel.timestamps().begin() + 1, panel.timestamps().end());
  } else {
    for (std::size_t c : cols) {
      values.push_back(panel.column_values(c));
      masks.push_back(panel.column_mask(c));
    }
    times = panel.timestamps();
  }

  // Keep only times where the full cross-country vector is observed.
  std::vector<std::size_t> usable;
  for (std::size_t t = 0; t < times.size(); ++t) {
    bool all = true;
    for (const auto& mask : masks) {
      if (!mask[t]) {
        all = false;
        break;
      }
    }
    if (all) usable.push_back(t);
  }
  if (usable.size() < 2) {
    fail(ErrorKind::insufficient_data,
         "fewer than 2 timestamps have the full cross-series vector for feature '" +
             std::string(feature) + "'");
  }

  const std::size_t n = usable.size();
  const std::size_t dim = cols.size();
  std::vector<double> points(n * dim);
  std::vector<std::string> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    labels[i] = times[usable[i]].str();
    for (std::size_t c = 0; c < dim; ++c) points[i * dim + c] = values[c][usable[i]];
  }
  std::vector<double> entries(n * n);
  kernels::pairwise_l1(points.data(), n, dim, entries.data());
  return SquareMatrix::distance(std::move(labels), std::move(entries));
}

SquareMatrix economic_state_similarity(const std::vector<StateSeries>& states) {
  if (states.empty()) fail(ErrorKind::insufficient_data, "no state series given");
  const std::size_t n = states.size();
  const std::size_t len = states[0].states.size();
  if (len == 0) fail(ErrorKind::insufficient_data, "empty state series");
  for (const auto& s : states) {
    if (s.states.size() != len) {
      fail(ErrorKind::dimension, "state series '" + s.country + "' has length " +
                                     std::to_string(s.states.size()) + ", expected " +
                                     std::to_string(len));
    }
  }

  std::vector<std::string> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = states[i].country;

  std::vector<double> entries(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    entries[i * n + i] = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      // Inner product over the times both series observe; states are >= 1 so
      // any shared time makes the entry strictly positive.
      double dot = 0.0, ni = 0.0, nj = 0.0;
      std::size_t shared = 0;
      for (std::size_t t = 0; t < len; ++t) {
        if (!states[i].observed[t] || !states[j].observed[t]) continue;
        double a = states[i].states[t];
        double b = states[j].states[t];
        dot += a * b;
        ni += a * a;
        nj += b * b;
        ++shared;
      }
      if (shared == 0) {
        fail(ErrorKind::insufficient_data, "state series '" + states[i].country + "' and '" +
                                               states[j].country +
                                               "' share no observed timestamps");
      }
      double cosine = dot / (std::sqrt(ni) * std::sqrt(nj));
      if (cosine > 1.0) cosine = 1.0;  // rounding guard; Cauchy-Schwarz caps at 1
      entries[i * n + j] = cosine;
      entries[j * n + i] = cosine;
    }
  }
  return SquareMatrix::similarity(std::move(labels), std::move(entries));
}

}  // namespace macrostate
