#include "macrostate/regime.hpp"

#include <cmath>
#include <utility>

#include "macrostate/error.hpp"

namespace macrostate {

StateSeries classify_states(std::string country,
                            std::span<const double> gdp,
                            std::span<const std::uint8_t> gdp_available,
                            std::span<const double> inflation,
                            std::span<const std::uint8_t> inflation_available) {
  const std::size_t T = gdp.size();
  if (gdp_available.size() != T || inflation.size() != T || inflation_available.size() != T) {
    fail(ErrorKind::dimension, "gdp and inflation sequences differ in length");
  }
  if (T < 2) {
    fail(ErrorKind::insufficient_data, "state classification needs at least 2 periods");
  }

  // Full-sample threshold: mean minus population standard deviation of the
  // available growth values.
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t t = 0; t < T; ++t) {
    if (gdp_available[t]) {
      sum += gdp[t];
      ++count;
    }
  }
  if (count < 2) {
    fail(ErrorKind::insufficient_data,
         "state classification needs at least 2 available growth points ('" + country + "')");
  }
  const double mean = sum / static_cast<double>(count);
  double sq = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    if (gdp_available[t]) {
      double d = gdp[t] - mean;
      sq += d * d;
    }
  }
  const double stdev = std::sqrt(sq / static_cast<double>(count));

  StateSeries out;
  out.country = std::move(country);
  out.mean_gdp = mean;
  out.std_gdp = stdev;
  out.threshold = mean - stdev;
  out.states.assign(T, 0);
  out.observed.assign(T, 0);
  for (std::size_t t = 0; t < T; ++t) {
    if (!gdp_available[t] || !inflation_available[t]) continue;
    int state;
    if (gdp[t] > out.threshold) {
      state = inflation[t] > 0.0 ? 1 : 2;
    } else {
      state = inflation[t] > 0.0 ? 3 : 4;
    }
    out.states[t] = state;
    out.observed[t] = 1;
  }
  return out;
}

StateSeries classify_states(std::string country,
                            std::span<const double> gdp,
                            std::span<const double> inflation) {
  std::vector<std::uint8_t> all(gdp.size(), 1);
  std::vector<std::uint8_t> all_c(inflation.size(), 1);
  return classify_states(std::move(country), gdp, all, inflation, all_c);
}

StateIntegral state_integral(const StateSeries& series) {
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t t = 0; t < series.states.size(); ++t) {
    if (series.observed[t]) {
      sum += series.states[t];
      ++count;
    }
  }
  if (count == 0) {
    fail(ErrorKind::insufficient_data,
         "state integral of a fully masked series ('" + series.country + "')");
  }
  return StateIntegral{series.country, sum / static_cast<double>(count)};
}

TransitionMatrix transition_matrix(const StateSeries& series) {
  TransitionMatrix out;
  out.country = series.country;

  std::size_t pairs = 0;
  for (std::size_t t = 1; t < series.states.size(); ++t) {
    // A masked period on either side breaks adjacency: no transition is
    // counted across an unobserved gap.
    if (!series.observed[t - 1] || !series.observed[t]) continue;
    int from = series.states[t - 1] - 1;
    int to = series.states[t] - 1;
    ++out.counts[from][to];
    ++pairs;
  }
  if (pairs == 0) {
    fail(ErrorKind::insufficient_data,
         "no adjacent observed state pair ('" + series.country + "')");
  }
  for (int j = 0; j < 4; ++j) {
    std::int64_t row = 0;
    for (int k = 0; k < 4; ++k) row += out.counts[j][k];
    if (row == 0) continue;  // probs stay zero, visited stays false
    out.visited[j] = true;
    for (int k = 0; k < 4; ++k) {
      out.probs[j][k] = static_cast<double>(out.counts[j][k]) / static_cast<double>(row);
    }
  }
  return out;
}

nlohmann::json TransitionMatrix::to_json() const {
  nlohmann::json probs_json = nlohmann::json::array();
  nlohmann::json counts_json = nlohmann::json::array();
  for (int j = 0; j < 4; ++j) {
    probs_json.push_back(std::vector<double>(probs[j].begin(), probs[j].end()));
    counts_json.push_back(std::vector<std::int64_t>(counts[j].begin(), counts[j].end()));
  }
  return nlohmann::json{{"country", country},
                        {"probs", probs_json},
                        {"counts", counts_json},
                        {"visited", std::vector<bool>(visited.begin(), visited.end())}};
}

}  // namespace macrostate
