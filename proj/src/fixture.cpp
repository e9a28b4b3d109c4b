#include "macrostate/fixture.hpp"

#include <cmath>
#include <random>
#include <string>
#include <vector>

namespace macrostate {

namespace {

// Box-Muller on raw engine bits; keeps the stream independent of the
// standard library's normal_distribution implementation.
double normal(std::mt19937_64& rng) {
  const double u1 = (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
  const double u2 = static_cast<double>(rng() >> 11) * 0x1.0p-53;          // [0, 1)
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

}  // namespace

TimeSeriesPanel synthetic_six_decade_panel(std::uint64_t seed) {
  const std::vector<std::string> countries = {"AUS", "CAN", "CHE", "DEU",
                                              "FRA", "GBR", "JPN", "USA"};
  std::vector<PeriodLabel> timestamps;
  for (int year = 1960; year <= 2021; ++year) {
    for (int month = 1; month <= 12; ++month) {
      timestamps.push_back(PeriodLabel{year, month, Granularity::monthly});
    }
  }
  const std::size_t T = timestamps.size();  // 744 months

  std::vector<SeriesKey> columns;
  for (const auto& country : countries) {
    columns.push_back({country, "cpi"});
    columns.push_back({country, "gdp"});
    columns.push_back({country, "equity"});
  }
  columns.push_back({"GOLD", "price"});
  columns.push_back({"CRB", "price"});
  columns.push_back({"OIL", "price"});

  const std::size_t C = columns.size();
  std::vector<double> values(T * C, 0.0);
  std::vector<std::uint8_t> available(T * C, 0);
  std::mt19937_64 rng(seed);
  auto put = [&](std::size_t t, std::size_t c, double v) {
    values[t * C + c] = v;
    available[t * C + c] = 1;
  };

  for (std::size_t ci = 0; ci < countries.size(); ++ci) {
    const std::size_t base = ci * 3;
    const double cpi_level = 0.0020 + 0.0005 * static_cast<double>(ci);
    const double gdp_level = 0.0040 + 0.0003 * static_cast<double>(ci);
    const double equity_drift = 0.0050 + 0.0004 * static_cast<double>(ci);
    const double equity_vol = 0.035 + 0.002 * static_cast<double>(ci);

    double cpi = cpi_level;
    double gdp = gdp_level;
    double price = 100.0 * static_cast<double>(ci + 1);
    for (std::size_t t = 0; t < T; ++t) {
      cpi = cpi_level + 0.70 * (cpi - cpi_level) + 0.0025 * normal(rng);
      // A six-month growth slump roughly every seven years, staggered per
      // country, so below-threshold states actually occur.
      const bool slump = (t + 29 * ci) % 84 < 6;
      gdp = gdp_level + 0.60 * (gdp - gdp_level) + 0.0030 * normal(rng) - (slump ? 0.012 : 0.0);
      price *= std::exp(equity_drift + equity_vol * normal(rng));

      // Australia reports inflation only quarterly before 1965.
      const bool aus_gap = ci == 0 && timestamps[t].year < 1965 && timestamps[t].sub % 3 != 0;
      if (!aus_gap) put(t, base + 0, cpi);
      put(t, base + 1, gdp);
      put(t, base + 2, price);
    }
  }

  struct CommodityPath {
    double start;
    double drift;
    double vol;
    std::size_t first;  // first month with data
  };
  const std::size_t oil_start = static_cast<std::size_t>((1980 - 1960) * 12);
  const CommodityPath commodities[] = {
      {35.0, 0.0040, 0.045, 0},          // GOLD
      {100.0, 0.0035, 0.030, 0},         // CRB
      {30.0, 0.0050, 0.060, oil_start},  // OIL: no data before 1980
  };
  for (std::size_t a = 0; a < 3; ++a) {
    const std::size_t col = countries.size() * 3 + a;
    double price = commodities[a].start;
    for (std::size_t t = commodities[a].first; t < T; ++t) {
      if (t > commodities[a].first) price *= std::exp(commodities[a].drift + commodities[a].vol * normal(rng));
      put(t, col, price);
    }
  }

  return TimeSeriesPanel(std::move(columns), std::move(timestamps), std::move(values),
                         std::move(available));
}

}  // namespace macrostate
