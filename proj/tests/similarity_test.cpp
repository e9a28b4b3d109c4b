#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "test_support.hpp"

#include "macrostate/error.hpp"
#include "macrostate/similarity.hpp"
#include "macrostate/util.hpp"

using namespace macrostate;
using testsupport::close;
using testsupport::error_kind_of;

TEST_CASE("square matrix factories validate their invariants") {
  SUBCASE("entry buffer must be square") {
    CHECK(error_kind_of([] {
            SquareMatrix::distance({"a", "b"}, {0.0, 1.0, 1.0});
          }) == ErrorKind::dimension);
  }
  SUBCASE("asymmetry is rejected") {
    CHECK(error_kind_of([] {
            SquareMatrix::distance({"a", "b"}, {0.0, 1.0, 2.0, 0.0});
          }) == ErrorKind::data);
  }
  SUBCASE("distance diagonal must be zero") {
    CHECK(error_kind_of([] {
            SquareMatrix::distance({"a", "b"}, {0.5, 1.0, 1.0, 0.0});
          }) == ErrorKind::data);
  }
  SUBCASE("distance entries must be nonnegative") {
    CHECK(error_kind_of([] {
            SquareMatrix::distance({"a", "b"}, {0.0, -1.0, -1.0, 0.0});
          }) == ErrorKind::data);
  }
  SUBCASE("similarity diagonal must be one") {
    CHECK(error_kind_of([] {
            SquareMatrix::similarity({"a", "b"}, {1.0, 0.5, 0.5, 0.9});
          }) == ErrorKind::data);
  }
  SUBCASE("entries must be finite") {
    CHECK(error_kind_of([] {
            SquareMatrix::distance(
                {"a", "b"}, {0.0, std::numeric_limits<double>::infinity(),
                             std::numeric_limits<double>::infinity(), 0.0});
          }) == ErrorKind::data);
  }
  SUBCASE("a valid matrix passes") {
    SquareMatrix m = SquareMatrix::distance({"a", "b"}, {0.0, 1.5, 1.5, 0.0});
    CHECK(m.size() == 2);
    CHECK(m.kind() == MatrixKind::distance);
    CHECK(m.at(0, 1) == 1.5);
  }
}

TEST_CASE("square matrix csv and json layout") {
  SquareMatrix m = SquareMatrix::distance({"x", "y"}, {0.0, 0.25, 0.25, 0.0});

  std::ostringstream out;
  m.write_csv(out);
  CHECK(out.str() ==
        "label,x,y\n"
        "x,0,0.25\n"
        "y,0.25,0\n");

  nlohmann::json j = m.to_json();
  CHECK(j["kind"] == "distance");
  CHECK(j["labels"] == nlohmann::json::array({"x", "y"}));
  CHECK(j["entries"][0][1] == 0.25);
  CHECK(j["entries"][1][1] == 0.0);
}

TEST_CASE("driver distance between normalized trajectories") {
  SUBCASE("identical trajectories sit at distance zero") {
    std::vector<LabeledSeries> ts = {{"a", {1.0, 2.0, 3.0}}, {"b", {2.0, 4.0, 6.0}}};
    SquareMatrix m = driver_distance_matrix(ts);
    CHECK(m.at(0, 1) == 0.0);  // same shape after normalization
  }
  SUBCASE("hand-checked pair") {
    // [1,1] -> [.5,.5]; [3,1] -> [.75,.25]; L1 gap = .25 + .25
    std::vector<LabeledSeries> ts = {{"a", {1.0, 1.0}}, {"b", {3.0, 1.0}}};
    SquareMatrix m = driver_distance_matrix(ts);
    CHECK(close(m.at(0, 1), 0.5));
    CHECK(m.at(0, 0) == 0.0);
  }
  SUBCASE("opposite signs reach the maximum of two") {
    std::vector<LabeledSeries> ts = {{"a", {1.0}}, {"b", {-1.0}}};
    SquareMatrix m = driver_distance_matrix(ts);
    CHECK(close(m.at(0, 1), 2.0));
  }
  SUBCASE("entries stay within [0, 2] on random input") {
    std::mt19937_64 rng(77);
    std::vector<LabeledSeries> ts;
    for (int i = 0; i < 12; ++i) {
      LabeledSeries s;
      s.label = "s" + std::to_string(i);
      for (int t = 0; t < 40; ++t) s.values.push_back(uniform_range(rng, -4.0, 4.0));
      ts.push_back(std::move(s));
    }
    SquareMatrix m = driver_distance_matrix(ts);
    for (std::size_t i = 0; i < m.size(); ++i) {
      for (std::size_t j = 0; j < m.size(); ++j) {
        CHECK(m.at(i, j) >= 0.0);
        CHECK(m.at(i, j) <= 2.0 + 1e-12);
        CHECK(m.at(i, j) == m.at(j, i));
      }
    }
  }
  SUBCASE("scaling any trajectory leaves the matrix unchanged") {
    std::vector<LabeledSeries> ts = {{"a", {1.0, -2.0, 3.0}}, {"b", {0.5, 0.25, -1.0}}};
    SquareMatrix base = driver_distance_matrix(ts);
    ts[0].values = {10.0, -20.0, 30.0};
    SquareMatrix scaled = driver_distance_matrix(ts);
    CHECK(close(base.at(0, 1), scaled.at(0, 1)));
  }
  SUBCASE("trajectories must share a length") {
    std::vector<LabeledSeries> ts = {{"a", {1.0, 2.0}}, {"b", {1.0}}};
    CHECK(error_kind_of([&] { driver_distance_matrix(ts); }) == ErrorKind::dimension);
  }
}

TEST_CASE("driver trajectories from a panel") {
  // Equity contributes log returns, so everything is cut to timestamps 1..T-1.
  auto panel = testsupport::make_panel(
      {{"USA", "cpi"}, {"USA", "gdp"}, {"USA", "equity"}},
      testsupport::monthly_timestamps(1960, 1, 4),
      {{1.0, 2.0, 3.0, 4.0}, {5.0, 6.0, 7.0, 8.0}, {1.0, 2.0, 4.0, 8.0}});
  std::vector<LabeledSeries> ts = driver_trajectories(panel);
  REQUIRE(ts.size() == 3);
  CHECK(ts[0].label == "USA_cpi");
  CHECK(ts[2].label == "USA_equity");
  REQUIRE(ts[0].values.size() == 3);
  CHECK(ts[0].values == std::vector<double>{2.0, 3.0, 4.0});
  CHECK(ts[1].values == std::vector<double>{6.0, 7.0, 8.0});
  CHECK(close(ts[2].values[0], std::log(2.0)));
  CHECK(close(ts[2].values[2], std::log(2.0)));
}

TEST_CASE("driver trajectories skip times missing anywhere") {
  std::vector<SeriesKey> cols = {{"USA", "cpi"}, {"JPN", "cpi"}};
  auto stamps = testsupport::monthly_timestamps(1960, 1, 4);
  std::vector<double> values = {1.0, 9.0, 2.0, 8.0, 3.0, 7.0, 4.0, 6.0};
  std::vector<std::uint8_t> avail = {1, 1, 1, 0, 1, 1, 1, 1};
  TimeSeriesPanel panel(cols, stamps, values, avail);

  std::vector<LabeledSeries> ts = driver_trajectories(panel);
  REQUIRE(ts.size() == 2);
  CHECK(ts[0].values == std::vector<double>{1.0, 3.0, 4.0});
  CHECK(ts[1].values == std::vector<double>{9.0, 7.0, 6.0});
}

TEST_CASE("temporal self-similarity is an L1 distance across dates") {
  auto panel = testsupport::make_panel({{"USA", "cpi"}, {"JPN", "cpi"}},
                                       testsupport::monthly_timestamps(1960, 1, 2),
                                       {{1.0, 4.0}, {2.0, 2.0}});
  SquareMatrix m = temporal_self_similarity(panel, "cpi");
  REQUIRE(m.size() == 2);
  CHECK(m.labels()[0] == "1960-01");
  CHECK(m.labels()[1] == "1960-02");
  CHECK(m.at(0, 0) == 0.0);
  CHECK(close(m.at(0, 1), 3.0));  // |1-4| + |2-2|
}

TEST_CASE("temporal self-similarity drops dates with gaps") {
  std::vector<SeriesKey> cols = {{"USA", "cpi"}, {"JPN", "cpi"}};
  auto stamps = testsupport::monthly_timestamps(1960, 1, 3);
  std::vector<double> values = {1.0, 2.0, 5.0, 5.0, 2.0, 4.0};
  std::vector<std::uint8_t> avail = {1, 1, 0, 1, 1, 1};
  TimeSeriesPanel panel(cols, stamps, values, avail);

  SquareMatrix m = temporal_self_similarity(panel, "cpi");
  REQUIRE(m.size() == 2);
  CHECK(m.labels()[0] == "1960-01");
  CHECK(m.labels()[1] == "1960-03");
  CHECK(close(m.at(0, 1), std::abs(1.0 - 2.0) + std::abs(2.0 - 4.0)));
}

TEST_CASE("temporal self-similarity under equity uses log returns") {
  auto panel = testsupport::make_panel({{"USA", "equity"}, {"JPN", "equity"}},
                                       testsupport::monthly_timestamps(1960, 1, 3),
                                       {{1.0, 2.0, 8.0}, {1.0, 1.0, 1.0}});
  SquareMatrix m = temporal_self_similarity(panel, "equity");
  REQUIRE(m.size() == 2);
  CHECK(m.labels()[0] == "1960-02");
  // Cross-country return vectors: [ln2, 0] and [ln4, 0].
  CHECK(close(m.at(0, 1), std::log(2.0)));
}

TEST_CASE("temporal self-similarity satisfies the triangle inequality") {
  std::mt19937_64 rng(1201);
  const int T = 20;
  auto stamps = testsupport::monthly_timestamps(1970, 1, T);
  std::vector<std::vector<double>> by_col(3, std::vector<double>(T));
  for (auto& col : by_col)
    for (auto& v : col) v = uniform_range(rng, -2.0, 2.0);
  auto panel = testsupport::make_panel({{"A", "cpi"}, {"B", "cpi"}, {"C", "cpi"}}, stamps, by_col);

  SquareMatrix m = temporal_self_similarity(panel, "cpi");
  REQUIRE(m.size() == static_cast<std::size_t>(T));
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j)
      for (std::size_t k = 0; k < m.size(); ++k)
        CHECK(m.at(i, k) <= m.at(i, j) + m.at(j, k) + 1e-10);
}

TEST_CASE("temporal self-similarity error cases") {
  auto panel = testsupport::make_panel({{"USA", "cpi"}}, testsupport::monthly_timestamps(1960, 1, 3),
                                       {{1.0, 2.0, 3.0}});
  CHECK(error_kind_of([&] { temporal_self_similarity(panel, "ppi"); }) ==
        ErrorKind::unknown_feature);

  std::vector<SeriesKey> cols = {{"USA", "cpi"}};
  auto stamps = testsupport::monthly_timestamps(1960, 1, 3);
  std::vector<double> values = {1.0, 2.0, 3.0};
  std::vector<std::uint8_t> avail = {1, 0, 0};
  TimeSeriesPanel sparse(cols, stamps, values, avail);
  CHECK(error_kind_of([&] { temporal_self_similarity(sparse, "cpi"); }) ==
        ErrorKind::insufficient_data);
}

namespace {

StateSeries make_states(std::string country, std::vector<int> states) {
  StateSeries s;
  s.country = std::move(country);
  s.observed.assign(states.size(), 1);
  s.states = std::move(states);
  return s;
}

}  // namespace

TEST_CASE("state similarity is the cosine between label series") {
  StateSeries a = make_states("A", {1, 1});
  StateSeries b = make_states("B", {1, 2});
  SquareMatrix m = economic_state_similarity({a, b});

  REQUIRE(m.size() == 2);
  CHECK(m.at(0, 0) == 1.0);
  CHECK(m.at(1, 1) == 1.0);
  // (1*1 + 1*2) / (sqrt(2) * sqrt(5))
  CHECK(std::abs(m.at(0, 1) - 3.0 / std::sqrt(10.0)) <= 1e-12);
}

TEST_CASE("state similarity entries stay in (0, 1]") {
  std::mt19937_64 rng(42);
  std::vector<StateSeries> all;
  for (int c = 0; c < 6; ++c) {
    std::vector<int> states(30);
    for (auto& s : states) s = 1 + static_cast<int>(rng() % 4);
    all.push_back(make_states("C" + std::to_string(c), std::move(states)));
  }
  SquareMatrix m = economic_state_similarity(all);
  for (std::size_t i = 0; i < m.size(); ++i) {
    CHECK(m.at(i, i) == 1.0);
    for (std::size_t j = 0; j < m.size(); ++j) {
      CHECK(m.at(i, j) > 0.0);
      CHECK(m.at(i, j) <= 1.0);
      CHECK(m.at(i, j) == m.at(j, i));
    }
  }
}

TEST_CASE("state similarity uses only co-observed times") {
  StateSeries a = make_states("A", {1, 3, 2});
  a.observed = {1, 1, 0};
  StateSeries b = make_states("B", {1, 3, 4});
  b.observed = {0, 1, 1};
  // Only t=1 is shared: cos(3, 3) = 1.
  SquareMatrix m = economic_state_similarity({a, b});
  CHECK(m.at(0, 1) == 1.0);
}

TEST_CASE("state similarity error cases") {
  StateSeries a = make_states("A", {1, 2});
  StateSeries b = make_states("B", {1, 2, 3});
  CHECK(error_kind_of([&] { economic_state_similarity({a, b}); }) == ErrorKind::dimension);

  StateSeries c = make_states("C", {1, 2});
  c.observed = {1, 0};
  StateSeries d = make_states("D", {1, 2});
  d.observed = {0, 1};
  try {
    economic_state_similarity({c, d});
    FAIL("expected an insufficient-data error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::insufficient_data);
    CHECK(std::string(e.what()).find("C") != std::string::npos);
    CHECK(std::string(e.what()).find("D") != std::string::npos);
  }
}

TEST_CASE("state similarity is permutation consistent") {
  std::mt19937_64 rng(9);
  std::vector<StateSeries> all;
  for (int c = 0; c < 4; ++c) {
    std::vector<int> states(12);
    for (auto& s : states) s = 1 + static_cast<int>(rng() % 4);
    all.push_back(make_states("C" + std::to_string(c), std::move(states)));
  }
  SquareMatrix m = economic_state_similarity(all);
  std::vector<StateSeries> reversed(all.rbegin(), all.rend());
  SquareMatrix r = economic_state_similarity(reversed);
  std::size_t n = all.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      CHECK(m.at(i, j) == r.at(n - 1 - i, n - 1 - j));
}
