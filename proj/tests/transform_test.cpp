#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "test_support.hpp"

#include "macrostate/error.hpp"
#include "macrostate/transform.hpp"
#include "macrostate/util.hpp"

using namespace macrostate;
using testsupport::close;
using testsupport::error_kind_of;

TEST_CASE("log_returns on hand-checked prices") {
  std::vector<double> a = {1.0, std::exp(1.0)};
  auto ra = log_returns(a);
  REQUIRE(ra.size() == 1);
  CHECK(close(ra[0], 1.0));

  std::vector<double> b = {100.0, 100.0, 100.0};
  auto rb = log_returns(b);
  REQUIRE(rb.size() == 2);
  CHECK(rb[0] == 0.0);
  CHECK(rb[1] == 0.0);

  std::vector<double> c = {2.0, 4.0, 8.0};
  auto rc = log_returns(c);
  REQUIRE(rc.size() == 2);
  CHECK(close(rc[0], std::log(2.0)));
  CHECK(close(rc[1], std::log(2.0)));
}

TEST_CASE("log_returns rejects short and nonpositive input") {
  CHECK(error_kind_of([] { log_returns(std::vector<double>{5.0}); }) ==
        ErrorKind::insufficient_data);
  CHECK(error_kind_of([] { log_returns(std::vector<double>{}); }) ==
        ErrorKind::insufficient_data);
  CHECK(error_kind_of([] { log_returns(std::vector<double>{1.0, 0.0}); }) == ErrorKind::domain);
  CHECK(error_kind_of([] { log_returns(std::vector<double>{1.0, -2.0, 3.0}); }) ==
        ErrorKind::domain);
}

TEST_CASE("log returns telescope to the endpoint ratio") {
  std::mt19937_64 rng(90125);
  for (int path = 0; path < 200; ++path) {
    std::size_t n = 2 + rng() % 120;
    std::vector<double> prices(n);
    for (auto& p : prices) p = std::exp(uniform_range(rng, -2.0, 2.0));
    auto r = log_returns(prices);
    double total = std::accumulate(r.begin(), r.end(), 0.0);
    double expected = std::log(prices.back() / prices.front());
    CHECK(std::abs(total - expected) <= 1e-10 * std::max(1.0, std::abs(expected)));
  }
}

TEST_CASE("masked_log_returns keeps a return only when both endpoints exist") {
  std::vector<double> prices = {1.0, 2.0, 4.0, 8.0};
  std::vector<std::uint8_t> avail = {1, 1, 0, 1};
  MaskedReturns r = masked_log_returns(prices, avail);
  REQUIRE(r.values.size() == 3);
  CHECK(r.available[0]);
  CHECK_FALSE(r.available[1]);
  CHECK_FALSE(r.available[2]);
  CHECK(close(r.values[0], std::log(2.0)));
}

TEST_CASE("masked_log_returns domain handling") {
  SUBCASE("an available nonpositive price is rejected") {
    std::vector<double> prices = {1.0, -5.0, 2.0};
    std::vector<std::uint8_t> avail = {1, 1, 1};
    CHECK(error_kind_of([&] { masked_log_returns(prices, avail); }) == ErrorKind::domain);
  }
  SUBCASE("a masked nonpositive price is ignored") {
    std::vector<double> prices = {1.0, -5.0, 2.0};
    std::vector<std::uint8_t> avail = {1, 0, 1};
    MaskedReturns r = masked_log_returns(prices, avail);
    CHECK_FALSE(r.available[0]);
    CHECK_FALSE(r.available[1]);
  }
  SUBCASE("mask and price lengths must agree") {
    std::vector<double> prices = {1.0, 2.0};
    std::vector<std::uint8_t> avail = {1};
    CHECK(error_kind_of([&] { masked_log_returns(prices, avail); }) == ErrorKind::dimension);
  }
}

TEST_CASE("l1_normalize scales absolute mass to one") {
  std::vector<double> v = {1.0, -1.0, 2.0};
  auto n = l1_normalize(v);
  REQUIRE(n.size() == 3);
  CHECK(n[0] == 0.25);
  CHECK(n[1] == -0.25);
  CHECK(n[2] == 0.5);

  SUBCASE("idempotent") {
    auto again = l1_normalize(n);
    for (std::size_t i = 0; i < n.size(); ++i) CHECK(close(again[i], n[i]));
  }
  SUBCASE("scale invariant") {
    std::vector<double> scaled = {7.0, -7.0, 14.0};
    auto ns = l1_normalize(scaled);
    for (std::size_t i = 0; i < n.size(); ++i) CHECK(close(ns[i], n[i]));
  }
  SUBCASE("all-zero input cannot be normalized") {
    CHECK(error_kind_of([] { l1_normalize(std::vector<double>{0.0, 0.0}); }) ==
          ErrorKind::normalization);
    CHECK(error_kind_of([] { l1_normalize(std::vector<double>{}); }) == ErrorKind::normalization);
  }
}

TEST_CASE("global_sum adds raw features across countries") {
  auto panel = testsupport::make_panel({{"USA", "cpi"}, {"JPN", "cpi"}, {"USA", "gdp"}},
                                       testsupport::monthly_timestamps(1960, 1, 3),
                                       {{1.0, 2.0, 3.0}, {10.0, 20.0, 30.0}, {5.0, 5.0, 5.0}});
  GlobalSumSeries g = global_sum(panel, "cpi");
  CHECK(g.feature == "cpi");
  REQUIRE(g.values.size() == 3);
  CHECK(g.values[0] == 11.0);
  CHECK(g.values[1] == 22.0);
  CHECK(g.values[2] == 33.0);
  CHECK(g.contributing_series == std::vector<std::string>{"USA", "JPN"});
}

TEST_CASE("global_sum drops times with any contributor missing") {
  std::vector<SeriesKey> cols = {{"USA", "cpi"}, {"JPN", "cpi"}};
  auto stamps = testsupport::monthly_timestamps(1960, 1, 3);
  std::vector<double> values = {1.0, 10.0, 2.0, 20.0, 3.0, 30.0};
  std::vector<std::uint8_t> avail = {1, 1, 0, 1, 1, 1};
  TimeSeriesPanel panel(cols, stamps, values, avail);

  GlobalSumSeries g = global_sum(panel, "cpi");
  REQUIRE(g.values.size() == 2);
  CHECK(g.timestamps[0].str() == "1960-01");
  CHECK(g.timestamps[1].str() == "1960-03");
  CHECK(g.values[0] == 11.0);
  CHECK(g.values[1] == 33.0);
}

TEST_CASE("global_sum turns equity prices into log returns first") {
  auto panel = testsupport::make_panel({{"USA", "equity"}, {"JPN", "equity"}},
                                       testsupport::monthly_timestamps(1960, 1, 3),
                                       {{1.0, 2.0, 4.0}, {1.0, 1.0, 1.0}});
  GlobalSumSeries g = global_sum(panel, "equity");
  REQUIRE(g.values.size() == 2);
  CHECK(g.timestamps[0].str() == "1960-02");
  CHECK(g.timestamps[1].str() == "1960-03");
  CHECK(close(g.values[0], std::log(2.0)));
  CHECK(close(g.values[1], std::log(2.0)));
}

TEST_CASE("global_sum is additive over countries") {
  std::mt19937_64 rng(552);
  for (int trial = 0; trial < 25; ++trial) {
    int T = 4 + static_cast<int>(rng() % 20);
    auto stamps = testsupport::monthly_timestamps(1970, 1, T);
    std::vector<double> a(T), b(T), c(T);
    for (int t = 0; t < T; ++t) {
      a[t] = uniform_range(rng, -3.0, 3.0);
      b[t] = uniform_range(rng, -3.0, 3.0);
      c[t] = uniform_range(rng, -3.0, 3.0);
    }
    auto p3 = testsupport::make_panel({{"A", "cpi"}, {"B", "cpi"}, {"C", "cpi"}}, stamps,
                                      {a, b, c});
    GlobalSumSeries g = global_sum(p3, "cpi");
    REQUIRE(g.values.size() == static_cast<std::size_t>(T));
    for (int t = 0; t < T; ++t) {
      CHECK(close(g.values[t], a[t] + b[t] + c[t], 1e-12, 1e-12));
    }
  }
}

TEST_CASE("global_sum error cases") {
  auto panel = testsupport::make_panel({{"USA", "cpi"}}, testsupport::monthly_timestamps(1960, 1, 2),
                                       {{1.0, 2.0}});
  CHECK(error_kind_of([&] { global_sum(panel, "ppi"); }) == ErrorKind::unknown_feature);

  // A feature whose shared availability is empty cannot be summed.
  std::vector<SeriesKey> cols = {{"USA", "cpi"}, {"JPN", "cpi"}};
  auto stamps = testsupport::monthly_timestamps(1960, 1, 2);
  std::vector<double> values = {1.0, 1.0, 1.0, 1.0};
  std::vector<std::uint8_t> avail = {1, 0, 0, 1};
  TimeSeriesPanel holey(cols, stamps, values, avail);
  CHECK(error_kind_of([&] { global_sum(holey, "cpi"); }) == ErrorKind::insufficient_data);
}
