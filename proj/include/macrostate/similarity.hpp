#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "macrostate/panel.hpp"
#include "macrostate/regime.hpp"

namespace macrostate {

enum class MatrixKind { distance, similarity };

const char* to_string(MatrixKind kind);

/// Labeled symmetric matrix. Distance matrices have a zero diagonal and
/// nonnegative entries; similarity matrices have a unit diagonal.
class SquareMatrix {
 public:
  static SquareMatrix distance(std::vector<std::string> labels, std::vector<double> entries);
  static SquareMatrix similarity(std::vector<std::string> labels, std::vector<double> entries);

  std::size_t size() const { return labels_.size(); }
  MatrixKind kind() const { return kind_; }
  double at(std::size_t i, std::size_t j) const { return entries_[i * labels_.size() + j]; }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<double>& entries() const { return entries_; }

  /// Header row/column of labels, then the full square matrix.
  void write_csv(std::ostream& out) const;
  nlohmann::json to_json() const;

 private:
  SquareMatrix(MatrixKind kind, std::vector<std::string> labels, std::vector<double> entries);
  void validate() const;

  MatrixKind kind_;
  std::vector<std::string> labels_;
  std::vector<double> entries_;  // row-major size*size
};

struct LabeledSeries {
  std::string label;
  std::vector<double> values;
};

/// Pairwise L1 distance between L1-normalized trajectories. Entries lie in
/// [0, 2]; scale of any input cancels.
SquareMatrix driver_distance_matrix(const std::vector<LabeledSeries>& trajectories);

/// The per-(series, feature) trajectories a panel contributes to the driver
/// matrix: cpi and gdp raw, equity as log returns, all cut to the timestamps
/// where every trajectory is defined.
std::vector<LabeledSeries> driver_trajectories(const TimeSeriesPanel& panel);

/// T x T matrix of L1 distances between the cross-country feature vectors at
/// each pair of times. Only timestamps with full cross-country availability
/// enter; equity uses log returns.
SquareMatrix temporal_self_similarity(const TimeSeriesPanel& panel, std::string_view feature);

/// Normalized inner product (cosine) between state label series. States are
/// >= 1, so entries are strictly positive; diagonal is exactly 1.
SquareMatrix economic_state_similarity(const std::vector<StateSeries>& states);

}  // namespace macrostate
