#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "macrostate/panel.hpp"

namespace macrostate {

enum class SharpeDenominator { variance, stdev };

SharpeDenominator denominator_from_string(std::string_view name);
const char* to_string(SharpeDenominator d);

struct OptimizerConfig {
  double lower_bound = 0.025;
  double upper_bound = 0.4;
  int window = 120;                  // periods per evaluation window
  int step = 120;                    // periods between evaluations
  double stationarity_tol = 1e-8;    // projected-gradient residual target
  double ridge = 1e-10;              // added to the covariance diagonal
  SharpeDenominator denominator = SharpeDenominator::variance;
  std::uint64_t seed = 0;            // multi-start schedule seed
  int starts = 16;
  int max_iterations = 4000;
};

struct MeanCov {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

/// Per-asset mean and sample covariance (divisor tau-1) of a K x tau return
/// matrix, with ridge added to the diagonal.
MeanCov mean_and_cov(const Eigen::MatrixXd& returns, double ridge);

/// mu.w / (w'Sigma w), or divided by its square root for the stdev form.
double sharpe_objective(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov,
                        const Eigen::VectorXd& weights, SharpeDenominator denominator);

/// Euclidean projection onto { w : sum w = 1, lo <= w <= hi }.
Eigen::VectorXd project_capped_simplex(const Eigen::VectorXd& v, double lo, double hi);

struct MaxSharpeResult {
  Eigen::VectorXd weights;
  double objective = 0.0;
  double stationarity = 0.0;  // ||P(w + grad) - w||_2 at the returned point
};

/// Maximize the ratio objective over the box-bounded simplex. Multi-start
/// projected-gradient ascent with an active-set ratio polish; deterministic
/// for a given config. Infeasible bounds raise a feasibility error naming
/// the violated inequality.
MaxSharpeResult max_sharpe(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov,
                           const OptimizerConfig& config);

struct PortfolioSolution {
  PeriodLabel window_end;
  std::vector<std::string> assets;     // included column labels
  Eigen::VectorXd weights;
  double objective = 0.0;
  double stationarity = 0.0;
  Eigen::VectorXd mean_vector;
  Eigen::MatrixXd covariance;
  std::vector<std::string> excluded;   // dropped for missing data in-window
};

struct WindowFailure {
  PeriodLabel window_end;
  std::string message;
};

struct BacktestResult {
  std::vector<PortfolioSolution> solutions;
  std::vector<WindowFailure> failures;
};

/// Rolling evaluation on a monthly panel: at each scheduled end period the
/// window holds the `window` most recent prices; assets missing any price in
/// the window sit that window out. Window-level failures (no assets left,
/// infeasible bounds for the reduced count) are recorded and the run
/// continues.
BacktestResult decade_backtest(const TimeSeriesPanel& panel,
                               const std::vector<std::string>& assets,
                               const OptimizerConfig& config);

struct AssetAverage {
  std::string asset;
  double mean_included = 0.0;   // mean over windows where the asset ran
  int windows_included = 0;
  double mean_over_all = 0.0;   // exclusions count as zero weight
};

std::vector<AssetAverage> average_weights(const std::vector<PortfolioSolution>& solutions);

}  // namespace macrostate
