#include "macrostate/portfolio.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "macrostate/error.hpp"
#include "macrostate/log.hpp"
#include "macrostate/util.hpp"

namespace macrostate {

SharpeDenominator denominator_from_string(std::string_view name) {
  if (name == "variance") return SharpeDenominator::variance;
  if (name == "stdev") return SharpeDenominator::stdev;
  fail(ErrorKind::argument,
       "unknown denominator '" + std::string(name) + "' (expected variance or stdev)");
}

const char* to_string(SharpeDenominator d) {
  return d == SharpeDenominator::variance ? "variance" : "stdev";
}

MeanCov mean_and_cov(const Eigen::MatrixXd& returns, double ridge) {
  const Eigen::Index K = returns.rows();
  const Eigen::Index tau = returns.cols();
  if (K < 1) fail(ErrorKind::argument, "no return series given");
  if (tau < 2) fail(ErrorKind::insufficient_data, "covariance needs at least 2 periods");
  if (!returns.allFinite()) fail(ErrorKind::data, "return matrix has a missing or non-finite cell");
  MeanCov out;
  out.mean = returns.rowwise().mean();
  Eigen::MatrixXd centered = returns.colwise() - out.mean;
  out.cov = centered * centered.transpose() / static_cast<double>(tau - 1);
  out.cov += ridge * Eigen::MatrixXd::Identity(K, K);
  return out;
}

double sharpe_objective(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov,
                        const Eigen::VectorXd& weights, SharpeDenominator denominator) {
  if (cov.rows() != mean.size() || cov.cols() != mean.size() || weights.size() != mean.size()) {
    fail(ErrorKind::dimension, "objective inputs disagree in size");
  }
  const double n = mean.dot(weights);
  const double d = weights.dot(cov * weights);
  if (!(d > 0.0)) fail(ErrorKind::domain, "portfolio variance is not positive");
  return denominator == SharpeDenominator::variance ? n / d : n / std::sqrt(d);
}

Eigen::VectorXd project_capped_simplex(const Eigen::VectorXd& v, double lo, double hi) {
  const Eigen::Index n = v.size();
  if (n == 0) fail(ErrorKind::argument, "cannot project an empty vector");
  if (!(lo <= hi)) fail(ErrorKind::argument, "projection bounds are inverted");
  const double K = static_cast<double>(n);
  if (lo * K > 1.0 + 1e-12) {
    fail(ErrorKind::feasibility, "lower_bound*K = " + format_double(lo * K) + " > 1 (K = " +
                                     std::to_string(n) + ")");
  }
  if (hi * K < 1.0 - 1e-12) {
    fail(ErrorKind::feasibility, "upper_bound*K = " + format_double(hi * K) + " < 1 (K = " +
                                     std::to_string(n) + ")");
  }
  if (!v.allFinite()) fail(ErrorKind::data, "cannot project a non-finite vector");

  // sum_i clamp(v_i - lambda, lo, hi) is non-increasing in lambda; bisect.
  double a = v.minCoeff() - hi;
  double b = v.maxCoeff() - lo;
  auto mass = [&](double lambda) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) s += std::clamp(v[i] - lambda, lo, hi);
    return s;
  };
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (a + b);
    if (mass(mid) > 1.0) {
      a = mid;
    } else {
      b = mid;
    }
  }
  const double lambda = 0.5 * (a + b);
  Eigen::VectorXd w(n);
  for (Eigen::Index i = 0; i < n; ++i) w[i] = std::clamp(v[i] - lambda, lo, hi);

  // Spread the last eps of mass over the strictly interior coordinates.
  double r = 1.0 - w.sum();
  if (r != 0.0) {
    std::vector<Eigen::Index> free;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (w[i] > lo + 1e-13 && w[i] < hi - 1e-13) free.push_back(i);
    }
    if (!free.empty()) {
      const double share = r / static_cast<double>(free.size());
      for (Eigen::Index i : free) w[i] = std::clamp(w[i] + share, lo, hi);
    }
  }
  return w;
}

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct RatioObjective {
  const Eigen::VectorXd& mean;
  const Eigen::MatrixXd& cov;
  SharpeDenominator denominator;

  double value(const Eigen::VectorXd& w) const {
    const double n = mean.dot(w);
    const double d = w.dot(cov * w);
    if (!(d > 0.0)) return kNegInf;
    return denominator == SharpeDenominator::variance ? n / d : n / std::sqrt(d);
  }

  Eigen::VectorXd gradient(const Eigen::VectorXd& w) const {
    const Eigen::VectorXd Sw = cov * w;
    const double n = mean.dot(w);
    const double d = w.dot(Sw);
    if (denominator == SharpeDenominator::variance) {
      return (mean * d - 2.0 * n * Sw) / (d * d);
    }
    const double rd = std::sqrt(d);
    return mean / rd - (n / (d * rd)) * Sw;
  }
};

double stationarity_residual(const RatioObjective& obj, const Eigen::VectorXd& w, double lo,
                             double hi) {
  Eigen::VectorXd g = obj.gradient(w);
  if (!g.allFinite()) return std::numeric_limits<double>::infinity();
  return (project_capped_simplex(w + g, lo, hi) - w).norm();
}

Eigen::VectorXd projected_gradient_ascent(const RatioObjective& obj, Eigen::VectorXd w, double lo,
                                          double hi, int max_iterations, double target) {
  double alpha = 1.0;
  for (int it = 0; it < max_iterations; ++it) {
    const Eigen::VectorXd g = obj.gradient(w);
    if (!g.allFinite()) break;
    const double fw = obj.value(w);
    bool moved = false;
    alpha = std::min(alpha * 2.0, 1e6);
    while (alpha > 1e-18) {
      Eigen::VectorXd cand = project_capped_simplex(w + alpha * g, lo, hi);
      const double fc = obj.value(cand);
      const double gain = g.dot(cand - w);
      if (fc > fw && fc >= fw + 1e-4 * gain) {
        w = std::move(cand);
        moved = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!moved) break;
    if (stationarity_residual(obj, w, lo, hi) <= target) break;
  }
  return w;
}

// Active-set refinement. On the current free face a stationary point solves
//   [theta*s*Sigma_FF  1] [w_F   ]   [mu_F - theta*s*Sigma_FA w_A]
//   [1^T              0] [lambda] = [1 - sum(w_A)]
// with s = (mu.w)/(w'Sigma w) refreshed between solves (theta = 2 for the
// variance denominator, 1 for stdev). Bound hits shrink the face, multiplier
// signs grow it back; iterates are kept only while the objective holds.
Eigen::VectorXd active_set_polish(const RatioObjective& obj, Eigen::VectorXd w, double lo,
                                  double hi) {
  const Eigen::Index K = w.size();
  const double theta = obj.denominator == SharpeDenominator::variance ? 2.0 : 1.0;
  std::vector<int> state(K);  // -1 at lower bound, +1 at upper, 0 free
  for (Eigen::Index i = 0; i < K; ++i) {
    state[i] = w[i] <= lo + 1e-10 ? -1 : (w[i] >= hi - 1e-10 ? +1 : 0);
  }

  Eigen::VectorXd best = w;
  double best_f = obj.value(w);

  for (int outer = 0; outer < 120; ++outer) {
    for (Eigen::Index i = 0; i < K; ++i) {
      if (state[i] == -1) w[i] = lo;
      if (state[i] == +1) w[i] = hi;
    }
    const Eigen::VectorXd Sw = obj.cov * w;
    const double n = obj.mean.dot(w);
    const double d = w.dot(Sw);
    if (!(d > 0.0)) break;
    const double s = n / d;

    std::vector<Eigen::Index> F;
    for (Eigen::Index i = 0; i < K; ++i) {
      if (state[i] == 0) F.push_back(i);
    }

    bool on_face_optimum = F.empty();
    if (!F.empty()) {
      const Eigen::Index m = static_cast<Eigen::Index>(F.size());
      Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m + 1, m + 1);
      Eigen::VectorXd rhs(m + 1);
      double fixed_sum = 0.0;
      for (Eigen::Index i = 0; i < K; ++i) {
        if (state[i] != 0) fixed_sum += w[i];
      }
      for (Eigen::Index a = 0; a < m; ++a) {
        for (Eigen::Index b = 0; b < m; ++b) A(a, b) = theta * s * obj.cov(F[a], F[b]);
        A(a, m) = 1.0;
        A(m, a) = 1.0;
        double off = 0.0;
        for (Eigen::Index i = 0; i < K; ++i) {
          if (state[i] != 0) off += obj.cov(F[a], i) * w[i];
        }
        rhs(a) = obj.mean(F[a]) - theta * s * off;
      }
      rhs(m) = 1.0 - fixed_sum;

      Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
      if (!lu.isInvertible()) break;
      const Eigen::VectorXd sol = lu.solve(rhs);
      Eigen::VectorXd z = w;
      for (Eigen::Index a = 0; a < m; ++a) z[F[a]] = sol(a);

      // Cut the move at the first bound it would cross.
      double step = 1.0;
      Eigen::Index blocker = -1;
      int blocker_dir = 0;
      for (Eigen::Index a = 0; a < m; ++a) {
        const Eigen::Index i = F[a];
        const double delta = z[i] - w[i];
        if (delta > 0.0 && z[i] > hi) {
          const double t = (hi - w[i]) / delta;
          if (t < step) {
            step = t;
            blocker = i;
            blocker_dir = +1;
          }
        } else if (delta < 0.0 && z[i] < lo) {
          const double t = (lo - w[i]) / delta;
          if (t < step) {
            step = t;
            blocker = i;
            blocker_dir = -1;
          }
        }
      }
      if (blocker >= 0) {
        for (Eigen::Index a = 0; a < m; ++a) {
          const Eigen::Index i = F[a];
          w[i] += step * (z[i] - w[i]);
        }
        state[blocker] = blocker_dir;
        const double f = obj.value(w);
        if (f > best_f) {
          best = w;
          best_f = f;
        }
        continue;
      }

      const double fw = obj.value(w);
      double fz = obj.value(z);
      if (fz >= fw - 1e-14 * (1.0 + std::abs(fw))) {
        w = std::move(z);
        on_face_optimum = true;
      } else {
        // Ratio dipped on the full step (possible when mu.w <= 0); backtrack.
        const Eigen::VectorXd dir = z - w;
        double frac = 0.5;
        bool improved = false;
        for (int h = 0; h < 40; ++h, frac *= 0.5) {
          Eigen::VectorXd cand = w + frac * dir;
          if (obj.value(cand) > fw) {
            w = std::move(cand);
            improved = true;
            break;
          }
        }
        on_face_optimum = !improved;
      }
      const double f = obj.value(w);
      if (f > best_f) {
        best = w;
        best_f = f;
      }
    }

    if (!on_face_optimum) continue;

    // Multiplier signs: a bound coordinate whose reduced gradient points
    // into the box gets released.
    const Eigen::VectorXd Sw2 = obj.cov * w;
    const double n2 = obj.mean.dot(w);
    const double d2 = w.dot(Sw2);
    if (!(d2 > 0.0)) break;
    const Eigen::VectorXd g = obj.mean - theta * (n2 / d2) * Sw2;
    double lambda;
    if (!F.empty()) {
      double acc = 0.0;
      for (Eigen::Index i : F) acc += g[i];
      lambda = acc / static_cast<double>(F.size());
    } else {
      double lo_max = kNegInf, hi_min = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < K; ++i) {
        if (state[i] == -1) lo_max = std::max(lo_max, g[i]);
        if (state[i] == +1) hi_min = std::min(hi_min, g[i]);
      }
      if (lo_max == kNegInf) {
        lambda = hi_min;
      } else if (hi_min == std::numeric_limits<double>::infinity()) {
        lambda = lo_max;
      } else {
        lambda = 0.5 * (lo_max + hi_min);
      }
    }
    const double tol = 1e-10 * std::max(1.0, g.lpNorm<Eigen::Infinity>());
    Eigen::Index worst = -1;
    double worst_violation = tol;
    for (Eigen::Index i = 0; i < K; ++i) {
      double violation = 0.0;
      if (state[i] == -1) violation = g[i] - lambda;
      if (state[i] == +1) violation = lambda - g[i];
      if (violation > worst_violation) {
        worst_violation = violation;
        worst = i;
      }
    }
    if (worst >= 0) {
      state[worst] = 0;
      continue;
    }
    break;  // KKT holds on this face
  }

  const double f_final = obj.value(w);
  if (f_final >= best_f - 1e-12 * (1.0 + std::abs(best_f))) return w;
  return best;
}

bool lexicographically_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(),
                                      b.data() + b.size());
}

}  // namespace

MaxSharpeResult max_sharpe(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov,
                           const OptimizerConfig& config) {
  const Eigen::Index K = mean.size();
  if (K < 1) fail(ErrorKind::argument, "optimizer needs at least one asset");
  if (cov.rows() != K || cov.cols() != K) {
    fail(ErrorKind::dimension, "covariance is " + std::to_string(cov.rows()) + "x" +
                                   std::to_string(cov.cols()) + " for " + std::to_string(K) +
                                   " assets");
  }
  if (!mean.allFinite() || !cov.allFinite()) {
    fail(ErrorKind::data, "optimizer inputs must be finite");
  }
  if ((cov - cov.transpose()).lpNorm<Eigen::Infinity>() >
      1e-8 * std::max(1.0, cov.lpNorm<Eigen::Infinity>())) {
    fail(ErrorKind::data, "covariance matrix is not symmetric");
  }
  const double lo = config.lower_bound;
  const double hi = config.upper_bound;
  if (!(lo >= 0.0 && lo < hi && hi <= 1.0)) {
    fail(ErrorKind::argument, "bounds must satisfy 0 <= lower < upper <= 1");
  }
  const double Kd = static_cast<double>(K);
  if (lo * Kd > 1.0 + 1e-12) {
    fail(ErrorKind::feasibility, "lower_bound*K = " + format_double(lo * Kd) + " > 1 (K = " +
                                     std::to_string(K) + ")");
  }
  if (hi * Kd < 1.0 - 1e-12) {
    fail(ErrorKind::feasibility, "upper_bound*K = " + format_double(hi * Kd) + " < 1 (K = " +
                                     std::to_string(K) + ")");
  }
  if (config.max_iterations < 1) fail(ErrorKind::argument, "max_iterations must be positive");

  const RatioObjective obj{mean, cov, config.denominator};

  // Start set: equal weight, every one-hot corner, then seeded random fills.
  std::vector<Eigen::VectorXd> starts;
  starts.push_back(project_capped_simplex(Eigen::VectorXd::Constant(K, 1.0 / Kd), lo, hi));
  for (Eigen::Index i = 0; i < K; ++i) {
    Eigen::VectorXd corner = Eigen::VectorXd::Zero(K);
    corner[i] = 1.0;
    starts.push_back(project_capped_simplex(corner, lo, hi));
  }
  std::mt19937_64 rng(config.seed);
  while (starts.size() < static_cast<std::size_t>(std::max(config.starts, 1))) {
    Eigen::VectorXd v(K);
    for (Eigen::Index i = 0; i < K; ++i) v[i] = uniform01(rng);
    starts.push_back(project_capped_simplex(v, lo, hi));
  }

  std::optional<Eigen::VectorXd> best;
  double best_f = kNegInf;
  const double tol = config.stationarity_tol;
  for (const Eigen::VectorXd& w0 : starts) {
    Eigen::VectorXd w =
        projected_gradient_ascent(obj, w0, lo, hi, std::min(config.max_iterations, 500), tol * 1e-2);
    w = active_set_polish(obj, w, lo, hi);
    if (stationarity_residual(obj, w, lo, hi) > tol) {
      w = projected_gradient_ascent(obj, w, lo, hi, config.max_iterations, tol * 1e-2);
      w = active_set_polish(obj, w, lo, hi);
    }
    const double f = obj.value(w);
    if (!best || f > best_f || (f == best_f && lexicographically_less(w, *best))) {
      best = std::move(w);
      best_f = f;
    }
  }

  MaxSharpeResult out;
  out.weights = *best;
  out.objective = best_f;
  out.stationarity = stationarity_residual(obj, *best, lo, hi);
  if (out.stationarity > tol) {
    log_info("max_sharpe stationarity residual " + format_double(out.stationarity) +
             " above target " + format_double(tol));
  }
  return out;
}

namespace {

std::size_t price_column_for_asset(const TimeSeriesPanel& panel, const std::string& asset) {
  for (std::size_t c = 0; c < panel.column_count(); ++c) {
    if (panel.columns()[c].column_label() == asset) return c;
  }
  if (auto c = panel.find_column(asset, "equity")) return *c;
  if (auto c = panel.find_column(asset, "price")) return *c;
  std::size_t found = 0, count = 0;
  for (std::size_t c = 0; c < panel.column_count(); ++c) {
    if (panel.columns()[c].series == asset) {
      found = c;
      ++count;
    }
  }
  if (count == 1) return found;
  fail(ErrorKind::unknown_feature,
       count == 0 ? "no price column for asset '" + asset + "'"
                  : "asset '" + asset + "' matches several columns; use the full column label");
}

}  // namespace

BacktestResult decade_backtest(const TimeSeriesPanel& panel,
                               const std::vector<std::string>& assets,
                               const OptimizerConfig& config) {
  if (panel.time_count() == 0) fail(ErrorKind::insufficient_data, "empty panel");
  if (panel.granularity() != Granularity::monthly) {
    fail(ErrorKind::format, "decade backtest expects a monthly panel");
  }
  if (assets.empty()) fail(ErrorKind::argument, "no assets given");
  if (config.window < 2) fail(ErrorKind::argument, "window must be at least 2 periods");
  if (config.step < 1) fail(ErrorKind::argument, "step must be at least 1 period");

  std::vector<std::size_t> columns;
  columns.reserve(assets.size());
  for (const auto& asset : assets) columns.push_back(price_column_for_asset(panel, asset));

  const int T = static_cast<int>(panel.time_count());
  std::vector<int> ends;  // 1-based schedule: window, window+step, ...
  for (int t = config.window; t <= T; t += config.step) ends.push_back(t);
  if (ends.empty()) {
    fail(ErrorKind::insufficient_data, "panel holds " + std::to_string(T) +
                                           " periods, shorter than one " +
                                           std::to_string(config.window) + "-period window");
  }

  std::vector<std::optional<PortfolioSolution>> solutions(ends.size());
  std::vector<std::optional<WindowFailure>> failures(ends.size());

  const std::ptrdiff_t W = static_cast<std::ptrdiff_t>(ends.size());
  // Windows are independent; each writes only its own slot, so the result is
  // identical at any thread count. max_sharpe itself stays single-threaded.
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (std::ptrdiff_t wi = 0; wi < W; ++wi) {
    const int end = ends[wi];
    const int begin = end - config.window;  // 0-based first price index
    const PeriodLabel window_end = panel.timestamps()[end - 1];
    try {
      std::vector<std::string> included, excluded;
      std::vector<std::size_t> included_cols;
      for (std::size_t a = 0; a < assets.size(); ++a) {
        bool complete = true;
        for (int t = begin; t < end && complete; ++t) {
          complete = panel.available(static_cast<std::size_t>(t), columns[a]);
        }
        if (complete) {
          included.push_back(assets[a]);
          included_cols.push_back(columns[a]);
        } else {
          excluded.push_back(assets[a]);
        }
      }
      if (included.empty()) {
        fail(ErrorKind::insufficient_data, "no asset has complete data in the window");
      }

      const Eigen::Index K = static_cast<Eigen::Index>(included.size());
      Eigen::MatrixXd returns(K, config.window - 1);
      for (Eigen::Index k = 0; k < K; ++k) {
        const std::size_t c = included_cols[k];
        for (int t = 1; t < config.window; ++t) {
          const double prev = panel.value(static_cast<std::size_t>(begin + t - 1), c);
          const double cur = panel.value(static_cast<std::size_t>(begin + t), c);
          if (!(prev > 0.0) || !(cur > 0.0)) {
            fail(ErrorKind::domain,
                 "nonpositive price for asset '" + included[k] + "' in the window");
          }
          returns(k, t - 1) = std::log(cur / prev);
        }
      }

      MeanCov mc = mean_and_cov(returns, config.ridge);
      MaxSharpeResult opt = max_sharpe(mc.mean, mc.cov, config);

      PortfolioSolution sol;
      sol.window_end = window_end;
      sol.assets = std::move(included);
      sol.weights = std::move(opt.weights);
      sol.objective = opt.objective;
      sol.stationarity = opt.stationarity;
      sol.mean_vector = std::move(mc.mean);
      sol.covariance = std::move(mc.cov);
      sol.excluded = std::move(excluded);
      solutions[wi] = std::move(sol);
    } catch (const Error& e) {
      failures[wi] = WindowFailure{window_end, e.what()};
    } catch (const std::exception& e) {
      failures[wi] = WindowFailure{window_end, std::string("unexpected: ") + e.what()};
    }
  }

  BacktestResult out;
  for (std::size_t wi = 0; wi < ends.size(); ++wi) {
    if (solutions[wi]) out.solutions.push_back(std::move(*solutions[wi]));
    if (failures[wi]) {
      log_info("window " + failures[wi]->window_end.str() + " skipped: " + failures[wi]->message);
      out.failures.push_back(std::move(*failures[wi]));
    }
  }
  return out;
}

std::vector<AssetAverage> average_weights(const std::vector<PortfolioSolution>& solutions) {
  if (solutions.empty()) fail(ErrorKind::argument, "no solutions to average");
  std::vector<AssetAverage> out;
  auto slot = [&](const std::string& asset) -> AssetAverage& {
    for (auto& e : out) {
      if (e.asset == asset) return e;
    }
    out.push_back(AssetAverage{asset, 0.0, 0, 0.0});
    return out.back();
  };
  for (const auto& sol : solutions) {
    for (std::size_t k = 0; k < sol.assets.size(); ++k) {
      AssetAverage& e = slot(sol.assets[k]);
      e.mean_included += sol.weights[static_cast<Eigen::Index>(k)];
      e.windows_included += 1;
    }
    for (const auto& asset : sol.excluded) slot(asset);  // keep it in the table
  }
  for (auto& e : out) {
    e.mean_over_all = e.mean_included / static_cast<double>(solutions.size());
    if (e.windows_included > 0) {
      e.mean_included /= static_cast<double>(e.windows_included);
    }
  }
  return out;
}

}  // namespace macrostate
