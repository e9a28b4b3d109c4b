#include "macrostate/transform.hpp"

#include <cmath>

#include "macrostate/error.hpp"

namespace macrostate {

std::vector<double> log_returns(std::span<const double> prices) {
  if (prices.size() < 2) {
    fail(ErrorKind::insufficient_data, "log returns need at least two prices");
  }
  std::vector<double> out(prices.size() - 1);
  for (std::size_t t = 1; t < prices.size(); ++t) {
    if (!(prices[t - 1] > 0.0) || !(prices[t] > 0.0)) {
      fail(ErrorKind::domain, "log returns require strictly positive prices");
    }
    out[t - 1] = std::log(prices[t] / prices[t - 1]);
  }
  return out;
}

MaskedReturns masked_log_returns(std::span<const double> prices,
                                 std::span<const std::uint8_t> available) {
  if (prices.size() != available.size()) {
    fail(ErrorKind::dimension, "price and mask lengths differ");
  }
  if (prices.size() < 2) {
    fail(ErrorKind::insufficient_data, "log returns need at least two prices");
  }
  for (std::size_t t = 0; t < prices.size(); ++t) {
    if (available[t] && !(prices[t] > 0.0)) {
      fail(ErrorKind::domain,
           "log returns require strictly positive prices (index " + std::to_string(t) + ")");
    }
  }
  MaskedReturns out;
  out.values.assign(prices.size() - 1, 0.0);
  out.available.assign(prices.size() - 1, 0);
  for (std::size_t t = 1; t < prices.size(); ++t) {
    if (!available[t - 1] || !available[t]) continue;
    out.values[t - 1] = std::log(prices[t] / prices[t - 1]);
    out.available[t - 1] = 1;
  }
  return out;
}

std::vector<double> l1_normalize(std::span<const double> values) {
  double total = 0.0;
  for (double v : values) total += std::abs(v);
  if (!(total > 0.0)) {
    fail(ErrorKind::normalization, "cannot L1-normalize a series with zero absolute sum");
  }
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = values[i] / total;
  return out;
}

GlobalSumSeries global_sum(const TimeSeriesPanel& panel, std::string_view feature) {
  auto cols = panel.columns_with_feature(feature);
  if (cols.empty()) {
    fail(ErrorKind::unknown_feature, "no columns carry feature '" + std::string(feature) + "'");
  }
  GlobalSumSeries out;
  out.feature = std::string(feature);
  for (std::size_t c : cols) out.contributing_series.push_back(panel.columns()[c].series);

  const bool equity = feature == "equity";
  std::vector<std::vector<double>> per_column;
  std::vector<std::vector<std::uint8_t>> per_mask;
  per_column.reserve(cols.size());
  per_mask.reserve(cols.size());
  std::vector<PeriodLabel> times;
  if (equity) {
    if (panel.time_count() < 2) {
      fail(ErrorKind::insufficient_data, "equity aggregation needs at least two periods");
    }
    for (std::size_t c : cols) {
      auto returns = masked_log_returns(panel.column_values(c), panel.column_mask(c));
      per_column.push_back(std::move(returns.values));
      per_mask.push_back(std::move(returns.available));
    }
    times.assign(panel.timestamps().begin() + 1, panel.timestamps().end());
  } else {
    for (std::size_t c : cols) {
      per_column.push_back(panel.column_values(c));
      per_mask.push_back(panel.column_mask(c));
    }
    times.assign(panel.timestamps().begin(), panel.timestamps().end());
  }

  for (std::size_t t = 0; t < times.size(); ++t) {
    bool all = true;
    double sum = 0.0;
    for (std::size_t i = 0; i < per_column.size(); ++i) {
      if (!per_mask[i][t]) {
        all = false;
        break;
      }
      sum += per_column[i][t];
    }
    if (all) {
      out.timestamps.push_back(times[t]);
      out.values.push_back(sum);
    }
  }
  if (out.timestamps.empty()) {
    fail(ErrorKind::insufficient_data,
         "no period has all series observed for feature '" + std::string(feature) + "'");
  }
  return out;
}

}  // namespace macrostate
