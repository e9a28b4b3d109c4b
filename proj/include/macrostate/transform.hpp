#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "macrostate/panel.hpp"

namespace macrostate {

/// log(p[t] / p[t-1]) for t = 1..n-1. Prices must be strictly positive.
std::vector<double> log_returns(std::span<const double> prices);

struct MaskedReturns {
  std::vector<double> values;            // length n-1
  std::vector<std::uint8_t> available;   // set iff both endpoints available
};

/// Masked variant: return t is available iff prices t and t+1 both are.
/// An available nonpositive price is a domain error.
MaskedReturns masked_log_returns(std::span<const double> prices,
                                 std::span<const std::uint8_t> available);

/// Scale so the sum of absolute values is 1; signs preserved.
std::vector<double> l1_normalize(std::span<const double> series);

/// Cross-series signed sum of one feature, kept only at times where every
/// contributing series is available.
struct GlobalSumSeries {
  std::string feature;
  std::vector<PeriodLabel> timestamps;
  std::vector<double> values;
  std::vector<std::string> contributing_series;
};

/// Sum the feature across all series carrying it. Equity series contribute
/// log returns (dropping the first timestamp); other features enter raw.
GlobalSumSeries global_sum(const TimeSeriesPanel& panel, std::string_view feature);

}  // namespace macrostate
