#include "macrostate/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>
#include <json.hpp>

#include "macrostate/cluster.hpp"
#include "macrostate/error.hpp"
#include "macrostate/log.hpp"
#include "macrostate/panel.hpp"
#include "macrostate/portfolio.hpp"
#include "macrostate/regime.hpp"
#include "macrostate/similarity.hpp"
#include "macrostate/transform.hpp"
#include "macrostate/util.hpp"

namespace macrostate::cli {

namespace {

namespace fs = std::filesystem;

struct Ctx {
  std::string panel;
  std::string schema;
  std::string out;
  bool quarterly = false;
  std::string feature;
  std::string country;
  std::string linkage = "average";
  int kmax = 0;  // 0 = one less than the item count
  int window = 120;
  int step = 120;
  double lo = 0.025;
  double hi = 0.4;
  std::string denominator = "variance";
  std::uint64_t seed = 0;
  int threads = 0;
};

void apply_threads(const Ctx& ctx) {
  if (ctx.threads <= 0) return;
#ifdef _OPENMP
  omp_set_num_threads(ctx.threads);
#else
  log_debug("built without OpenMP; --threads ignored");
#endif
}

TimeSeriesPanel load_input(const Ctx& ctx) {
  apply_threads(ctx);
  std::optional<fs::path> schema;
  if (!ctx.schema.empty()) schema = fs::path(ctx.schema);
  return load_panel_file(ctx.panel, schema);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::io, "cannot write " + path.string());
  out << text;
  if (!out) fail(ErrorKind::io, "write failed for " + path.string());
}

fs::path ensure_out_dir(const Ctx& ctx) {
  fs::path dir(ctx.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorKind::io, "cannot create output directory " + dir.string());
  return dir;
}

void write_manifest(const Ctx& ctx, const std::string& command, nlohmann::json config,
                    std::vector<std::string> outputs) {
  nlohmann::json inputs = nlohmann::json::object();
  inputs[ctx.panel] = file_digest(ctx.panel);
  if (!ctx.schema.empty()) inputs[ctx.schema] = file_digest(ctx.schema);
  std::sort(outputs.begin(), outputs.end());
  nlohmann::json manifest{{"command", command},
                          {"config", std::move(config)},
                          {"inputs", std::move(inputs)},
                          {"outputs", outputs},
                          {"seed", ctx.seed}};
  write_text(fs::path(ctx.out) / "manifest.json", manifest.dump(2) + "\n");
  log_info(command + ": wrote " + std::to_string(outputs.size()) + " output file(s) to " +
           ctx.out);
}

std::string matrix_csv(const SquareMatrix& m) {
  std::ostringstream s;
  m.write_csv(s);
  return s.str();
}

/// Countries able to run the state classification: series carrying both a
/// gdp and a cpi column, in panel order.
std::vector<std::string> state_countries(const TimeSeriesPanel& panel) {
  std::vector<std::string> out;
  for (const auto& series : panel.series_names()) {
    if (panel.find_column(series, "gdp") && panel.find_column(series, "cpi")) {
      out.push_back(series);
    }
  }
  if (out.empty()) {
    fail(ErrorKind::insufficient_data, "no series carries both gdp and cpi columns");
  }
  return out;
}

StateSeries states_for(const TimeSeriesPanel& panel, const std::string& country) {
  const auto gdp = panel.find_column(country, "gdp");
  const auto cpi = panel.find_column(country, "cpi");
  if (!gdp || !cpi) {
    fail(ErrorKind::argument, "series '" + country + "' lacks a gdp or cpi column");
  }
  return classify_states(country, panel.column_values(*gdp), panel.column_mask(*gdp),
                         panel.column_values(*cpi), panel.column_mask(*cpi));
}

/// Assets for the backtest, in panel order: every series with an equity
/// column, then priced assets (a `price` column and no equity).
std::vector<std::string> default_assets(const TimeSeriesPanel& panel) {
  std::vector<std::string> out;
  for (const auto& series : panel.series_names()) {
    if (panel.find_column(series, "equity") || panel.find_column(series, "price")) {
      out.push_back(series);
    }
  }
  if (out.empty()) {
    fail(ErrorKind::insufficient_data, "no series carries an equity or price column");
  }
  return out;
}

// ---- subcommands ----------------------------------------------------------

void cmd_load(const Ctx& ctx) {
  ensure_out_dir(ctx);
  TimeSeriesPanel panel = load_input(ctx);
  bool already_quarterly = false;
  if (ctx.quarterly) {
    panel = resample_panel_quarterly(panel, &already_quarterly);
    if (already_quarterly) log_info("panel is already quarterly; resample skipped");
  }
  save_panel_file(panel, fs::path(ctx.out) / "panel.csv");

  std::size_t missing = 0;
  for (std::size_t t = 0; t < panel.time_count(); ++t) {
    for (std::size_t c = 0; c < panel.column_count(); ++c) {
      if (!panel.available(t, c)) ++missing;
    }
  }
  std::cout << "panel: " << panel.column_count() << " columns ("
            << panel.series_names().size() << " series), " << panel.time_count() << " "
            << to_string(panel.granularity()) << " periods";
  if (panel.time_count() > 0) {
    std::cout << " from " << panel.timestamps().front().str() << " to "
              << panel.timestamps().back().str();
  }
  std::cout << ", " << missing << " missing cells\n";

  write_manifest(ctx, "load",
                 nlohmann::json{{"quarterly", ctx.quarterly}}, {"panel.csv"});
}

void cmd_norms(const Ctx& ctx) {
  ensure_out_dir(ctx);
  TimeSeriesPanel panel = load_input(ctx);
  std::vector<std::string> outputs;
  for (const char* feature : {"cpi", "gdp", "equity"}) {
    if (panel.columns_with_feature(feature).empty()) continue;
    GlobalSumSeries sum = global_sum(panel, feature);
    std::ostringstream csv;
    csv << "date,value\n";
    for (std::size_t t = 0; t < sum.timestamps.size(); ++t) {
      csv << sum.timestamps[t].str() << "," << format_double(sum.values[t]) << "\n";
    }
    std::string name = std::string("norm_") + feature + ".csv";
    write_text(fs::path(ctx.out) / name, csv.str());
    outputs.push_back(name);
  }
  if (outputs.empty()) {
    fail(ErrorKind::unknown_feature, "panel has no cpi, gdp, or equity columns");
  }
  write_manifest(ctx, "norms", nlohmann::json::object(), std::move(outputs));
}

void cmd_drivers(const Ctx& ctx) {
  ensure_out_dir(ctx);
  TimeSeriesPanel panel = load_input(ctx);
  SquareMatrix m = driver_distance_matrix(driver_trajectories(panel));
  write_text(fs::path(ctx.out) / "driver_distance.csv", matrix_csv(m));
  write_text(fs::path(ctx.out) / "driver_distance.json", m.to_json().dump(2) + "\n");
  write_manifest(ctx, "drivers", nlohmann::json::object(),
                 {"driver_distance.csv", "driver_distance.json"});
}

void cmd_selfsim(const Ctx& ctx) {
  ensure_out_dir(ctx);
  TimeSeriesPanel panel = load_input(ctx);
  SquareMatrix m = temporal_self_similarity(panel, ctx.feature);
  std::string base = "selfsim_" + ctx.feature;
  write_text(fs::path(ctx.out) / (base + ".csv"), matrix_csv(m));
  write_text(fs::path(ctx.out) / (base + ".json"), m.to_json().dump(2) + "\n");
  write_manifest(ctx, "selfsim", nlohmann::json{{"feature", ctx.feature}},
                 {base + ".csv", base + ".json"});
}

void cmd_states(const Ctx& ctx) {
  ensure_out_dir(ctx);
  TimeSeriesPanel panel = load_input(ctx);
  std::vector<std::string> outputs;
  std::ostringstream integrals;
  integrals << "country,integral\n";
  for (const auto& country : state_countries(panel)) {
    StateSeries s = states_for(panel, country);
    std::ostringstream csv;
    csv << "date,state,masked\n";
    for (std::size_t t = 0; t < s.states.size(); ++t) {
      csv << panel.timestamps()[t].str() << ",";
      if (s.observed[t]) {
        csv << s.states[t] << ",0\n";
      } else {
        csv << ",1\n";
      }
    }
    std::string name = "states_" + country + ".csv";
    write_text(fs::path(ctx.out) / name, csv.str());
    outputs.push_back(name);
    integrals << country << "," << format_double(state_integral(s).value) << "\n";
  }
  write_text(fs::path(ctx.out) / "integrals.csv", integrals.str());
  outputs.push_back("integrals.csv");
  write_manifest(ctx, "states", nlohmann::json::object(), std::move(outputs));
}

void cmd_transitions(const Ctx& ctx) {
  ensure_out_dir(ctx);
  TimeSeriesPanel panel = load_input(ctx);
  std::vector<std::string> countries =
      ctx.country.empty() ? state_countries(panel) : std::vector<std::string>{ctx.country};
  std::vector<std::string> outputs;
  for (const auto& country : countries) {
    TransitionMatrix t = transition_matrix(states_for(panel, country));
    std::string name = "transitions_" + country + ".json";
    write_text(fs::path(ctx.out) / name, t.to_json().dump(2) + "\n");
    outputs.push_back(name);
  }
  write_manifest(ctx, "transitions",
                 nlohmann::json{{"country", ctx.country.empty() ? nlohmann::json() : nlohmann::json(ctx.country)}},
                 std::move(outputs));
}

void cmd_cluster(const Ctx& ctx) {
  ensure_out_dir(ctx);
  TimeSeriesPanel panel = load_input(ctx);
  std::vector<StateSeries> states;
  for (const auto& country : state_countries(panel)) {
    states.push_back(states_for(panel, country));
  }
  SquareMatrix similarity = economic_state_similarity(states);
  SquareMatrix dist = similarity_to_distance(similarity);
  Linkage linkage = linkage_from_string(ctx.linkage);
  Dendrogram dendrogram = hierarchical_cluster(dist, linkage);

  const int n = static_cast<int>(dist.size());
  int k_max = ctx.kmax > 0 ? ctx.kmax : n - 1;
  int selected = 2;
  double silhouette = 0.0;
  if (n >= 3) {
    selected = select_k(dist, dendrogram, k_max);
    silhouette = mean_silhouette(dist, cut_tree(dendrogram, selected));
  }
  std::vector<int> labels = cut_tree(dendrogram, selected);

  std::ostringstream csv;
  csv << "label,cluster\n";
  for (std::size_t i = 0; i < dendrogram.leaf_labels.size(); ++i) {
    csv << dendrogram.leaf_labels[i] << "," << labels[i] << "\n";
  }
  write_text(fs::path(ctx.out) / "dendrogram.json", dendrogram.to_json().dump(2) + "\n");
  write_text(fs::path(ctx.out) / "clusters.csv", csv.str());
  nlohmann::json summary{{"selected_k", selected},
                         {"linkage", to_string(linkage)},
                         {"silhouette", silhouette},
                         {"k_max", k_max}};
  write_text(fs::path(ctx.out) / "cluster_summary.json", summary.dump(2) + "\n");
  write_manifest(ctx, "cluster",
                 nlohmann::json{{"linkage", to_string(linkage)}, {"k_max", k_max}},
                 {"dendrogram.json", "clusters.csv", "cluster_summary.json"});
}

void cmd_optimize(const Ctx& ctx) {
  ensure_out_dir(ctx);
  TimeSeriesPanel panel = load_input(ctx);
  std::vector<std::string> assets = default_assets(panel);

  OptimizerConfig config;
  config.lower_bound = ctx.lo;
  config.upper_bound = ctx.hi;
  config.window = ctx.window;
  config.step = ctx.step;
  config.denominator = denominator_from_string(ctx.denominator);
  config.seed = ctx.seed;

  BacktestResult result = decade_backtest(panel, assets, config);

  std::ostringstream sol_csv;
  sol_csv << "window_end,asset,weight,objective\n";
  for (const auto& sol : result.solutions) {
    for (std::size_t k = 0; k < sol.assets.size(); ++k) {
      sol_csv << sol.window_end.str() << "," << sol.assets[k] << ","
              << format_double(sol.weights[static_cast<Eigen::Index>(k)]) << ","
              << format_double(sol.objective) << "\n";
    }
  }
  write_text(fs::path(ctx.out) / "solutions.csv", sol_csv.str());

  std::vector<AssetAverage> averages;
  if (!result.solutions.empty()) averages = average_weights(result.solutions);
  std::ostringstream avg_csv;
  avg_csv << "asset,mean_included,windows_included,mean_over_all\n";
  for (const auto& row : averages) {
    avg_csv << row.asset << "," << format_double(row.mean_included) << ","
            << row.windows_included << "," << format_double(row.mean_over_all) << "\n";
  }
  write_text(fs::path(ctx.out) / "average_weights.csv", avg_csv.str());

  nlohmann::json windows = nlohmann::json::array();
  for (const auto& sol : result.solutions) {
    nlohmann::json weights = nlohmann::json::array();
    for (Eigen::Index i = 0; i < sol.weights.size(); ++i) weights.push_back(sol.weights[i]);
    windows.push_back(nlohmann::json{{"window_end", sol.window_end.str()},
                                     {"assets", sol.assets},
                                     {"excluded", sol.excluded},
                                     {"weights", weights},
                                     {"objective", sol.objective},
                                     {"stationarity", sol.stationarity}});
  }
  nlohmann::json failures = nlohmann::json::array();
  for (const auto& f : result.failures) {
    failures.push_back(nlohmann::json{{"window_end", f.window_end.str()}, {"message", f.message}});
  }
  write_text(fs::path(ctx.out) / "windows.json",
             nlohmann::json{{"windows", windows}, {"failures", failures}}.dump(2) + "\n");

  nlohmann::json config_json{{"lower_bound", config.lower_bound},
                             {"upper_bound", config.upper_bound},
                             {"window", config.window},
                             {"step", config.step},
                             {"denominator", to_string(config.denominator)},
                             {"ridge", config.ridge},
                             {"stationarity_tol", config.stationarity_tol},
                             {"starts", config.starts},
                             {"assets", assets}};
  write_manifest(ctx, "optimize", std::move(config_json),
                 {"solutions.csv", "average_weights.csv", "windows.json"});
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"economic state classification, similarity, and portfolio toolkit"};
  app.require_subcommand(1);

  Ctx ctx;
  auto add_common = [&](CLI::App* cmd, bool needs_out) {
    cmd->add_option("--panel", ctx.panel, "panel CSV (first column `date`)")->required();
    cmd->add_option("--schema", ctx.schema,
                    "JSON mapping of column name to {series, feature}; default splits "
                    "column names at the last underscore");
    auto* out = cmd->add_option("--out", ctx.out, "output directory");
    if (needs_out) out->required();
    cmd->add_option("--seed", ctx.seed, "seed for stochastic components");
    cmd->add_option("--threads", ctx.threads, "worker thread cap (0 = library default)");
  };

  CLI::App* load = app.add_subcommand("load", "validate a panel and echo its summary");
  add_common(load, true);
  load->add_flag("--quarterly", ctx.quarterly, "resample monthly input to quarterly");
  load->callback([&] { cmd_load(ctx); });

  CLI::App* norms = app.add_subcommand("norms", "cross-series sum per feature over time");
  add_common(norms, true);
  norms->callback([&] { cmd_norms(ctx); });

  CLI::App* drivers =
      app.add_subcommand("drivers", "pairwise distance between normalized trajectories");
  add_common(drivers, true);
  drivers->callback([&] { cmd_drivers(ctx); });

  CLI::App* selfsim =
      app.add_subcommand("selfsim", "time-by-time distance matrix for one feature");
  add_common(selfsim, true);
  selfsim->add_option("--feature", ctx.feature, "feature kind (cpi, gdp, equity, ...)")
      ->required();
  selfsim->callback([&] { cmd_selfsim(ctx); });

  CLI::App* states =
      app.add_subcommand("states", "four-state classification and state integrals");
  add_common(states, true);
  states->callback([&] { cmd_states(ctx); });

  CLI::App* transitions =
      app.add_subcommand("transitions", "empirical state transition matrices");
  add_common(transitions, true);
  transitions->add_option("--country", ctx.country, "restrict to one country");
  transitions->callback([&] { cmd_transitions(ctx); });

  CLI::App* cluster =
      app.add_subcommand("cluster", "hierarchical clustering of state similarity");
  add_common(cluster, true);
  cluster->add_option("--linkage", ctx.linkage, "single, complete, or average");
  cluster->add_option("--kmax", ctx.kmax, "largest cluster count scanned (default n-1)");
  cluster->callback([&] { cmd_cluster(ctx); });

  CLI::App* optimize =
      app.add_subcommand("optimize", "rolling constrained ratio-optimal weights");
  add_common(optimize, true);
  optimize->add_option("--window", ctx.window, "periods per window (default 120)");
  optimize->add_option("--step", ctx.step, "periods between windows (default 120)");
  optimize->add_option("--lo", ctx.lo, "per-asset weight floor (default 0.025)");
  optimize->add_option("--hi", ctx.hi, "per-asset weight ceiling (default 0.4)");
  optimize->add_option("--denominator", ctx.denominator, "variance (default) or stdev");
  optimize->callback([&] { cmd_optimize(ctx); });

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("macrostate");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const Error& e) {
    std::cerr << "macrostate: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "macrostate: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace macrostate::cli
