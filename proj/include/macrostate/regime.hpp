#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace macrostate {

// Four-state classification of a country's (growth, inflation) path:
//   1 ascending growth    g above threshold, inflation positive
//   2 descending growth   g above threshold, inflation <= 0
//   3 stagflation         g at/below threshold, inflation positive
//   4 contraction         g at/below threshold, inflation <= 0
// Threshold is mean(gdp) - population stdev(gdp) over the full sample.

struct StateSeries {
  std::string country;
  std::vector<int> states;              // 1..4 where observed, 0 where masked
  std::vector<std::uint8_t> observed;   // set iff both inputs were available
  double mean_gdp = 0.0;
  double std_gdp = 0.0;
  double threshold = 0.0;               // mean_gdp - std_gdp
};

StateSeries classify_states(std::string country,
                            std::span<const double> gdp,
                            std::span<const std::uint8_t> gdp_available,
                            std::span<const double> inflation,
                            std::span<const std::uint8_t> inflation_available);

/// Fully-observed convenience overload.
StateSeries classify_states(std::string country,
                            std::span<const double> gdp,
                            std::span<const double> inflation);

struct StateIntegral {
  std::string country;
  double value = 0.0;  // in [1, 4]
};

/// Time-average of the observed state labels.
StateIntegral state_integral(const StateSeries& series);

/// Empirical first-order transition estimate over the four states. Rows of
/// `probs` are counts normalized per source state; a state never seen as a
/// source keeps a zero row with visited=false. Masked gaps break adjacency.
struct TransitionMatrix {
  std::string country;
  std::array<std::array<double, 4>, 4> probs{};
  std::array<std::array<std::int64_t, 4>, 4> counts{};
  std::array<bool, 4> visited{};

  nlohmann::json to_json() const;
};

TransitionMatrix transition_matrix(const StateSeries& series);

}  // namespace macrostate
