// Command-line front end: solve / compare / rate-fit / gen-spam-data /
// ingest-adult. Exit codes: 0 success, 2 config error, 3 divergence,
// 4 I/O error.
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "csspa/fair_classification.hpp"
#include "csspa/fair_spam.hpp"
#include "csspa/harness.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::string seed_list;
  std::int64_t horizon = -1;
  double theta0 = -1.0;
  std::string out_dir;
  std::int64_t stride = -1;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "experiment config (JSON)")
      ->required();
  cmd->add_option("--seed", flags.seed_list, "seed or comma-separated list");
  cmd->add_option("--horizon", flags.horizon, "iteration budget T");
  cmd->add_option("--theta0", flags.theta0,
                  "tightening policy multiplier, theta = theta0 * T^(-1/4)");
  cmd->add_option("--out", flags.out_dir, "output directory");
  cmd->add_option("--stride", flags.stride, "trace stride");
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    seeds.push_back(std::stoull(item));
  }
  if (seeds.empty()) throw csspa::ConfigError("empty seed list");
  return seeds;
}

csspa::ExperimentConfig load_with_overrides(const CommonFlags& flags) {
  csspa::ExperimentConfig config = csspa::load_config(flags.config_path);
  if (!flags.seed_list.empty()) config.seeds = parse_seed_list(flags.seed_list);
  if (flags.horizon > 0) config.schedule.horizon = flags.horizon;
  if (flags.theta0 >= 0.0) config.theta0 = flags.theta0;
  if (!flags.out_dir.empty()) config.out_dir = flags.out_dir;
  if (flags.stride > 0) config.trace_stride = flags.stride;
  return config;
}

void print_summary(const csspa::ExperimentSummary& summary) {
  std::cout << "solver " << csspa::solver_name(summary.solver) << ": ";
  if (summary.mean_gap) std::cout << "mean gap " << *summary.mean_gap << ", ";
  std::cout << "mean violation " << summary.mean_violation;
  if (summary.any_diverged) std::cout << " [divergence recorded]";
  std::cout << "\n  summary: " << summary.summary_path << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"compositional stochastic saddle point experiments"};
  app.require_subcommand(1);

  CommonFlags solve_flags, compare_flags;
  auto* solve_cmd = app.add_subcommand("solve", "run one solver over seeds");
  add_common_flags(solve_cmd, solve_flags);

  auto* compare_cmd =
      app.add_subcommand("compare", "run two solvers under matched budgets");
  add_common_flags(compare_cmd, compare_flags);

  std::vector<std::string> fit_files;
  std::string fit_column = "gap_running";
  std::int64_t fit_tmin = 1000, fit_tmax = 100000;
  auto* fit_cmd = app.add_subcommand("rate-fit",
                                     "log-log slope over a trace window");
  fit_cmd->add_option("traces", fit_files, "trace CSV files")->required();
  fit_cmd->add_option("--column", fit_column, "trace column to fit");
  fit_cmd->add_option("--tmin", fit_tmin, "window start (iteration)");
  fit_cmd->add_option("--tmax", fit_tmax, "window end (iteration)");

  csspa::SpamSyntheticSpec spam_spec;
  std::string spam_out = "spam_data.csv";
  std::int64_t spam_n = 2000, spam_d = 30;
  std::uint64_t spam_seed = 0;
  auto* gen_cmd = app.add_subcommand("gen-spam-data",
                                     "write a synthetic regression dataset");
  gen_cmd->add_option("--out", spam_out, "output CSV path");
  gen_cmd->add_option("--n", spam_n, "number of points");
  gen_cmd->add_option("--d", spam_d, "number of features");
  gen_cmd->add_option("--noise-std", spam_spec.noise_std, "noise std");
  gen_cmd->add_option("--seed", spam_seed, "generator seed");

  std::string adult_csv, adult_schema;
  auto* adult_cmd = app.add_subcommand("ingest-adult",
                                       "validate and report a dataset CSV");
  adult_cmd->add_option("--csv", adult_csv, "dataset CSV")->required();
  adult_cmd->add_option("--schema", adult_schema, "column schema (JSON)")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve_cmd->parsed()) {
      const auto config = load_with_overrides(solve_flags);
      const auto summary = csspa::run_experiment(config);
      print_summary(summary);
      return summary.any_diverged ? 3 : 0;
    }
    if (compare_cmd->parsed()) {
      const auto config = load_with_overrides(compare_flags);
      const auto cmp = csspa::compare_solvers(config);
      print_summary(cmp.first);
      print_summary(cmp.second);
      std::cout << "comparison: " << cmp.comparison_path << "\n";
      return (cmp.first.any_diverged || cmp.second.any_diverged) ? 3 : 0;
    }
    if (fit_cmd->parsed()) {
      const auto fit = csspa::fit_rate(fit_files, fit_column, fit_tmin,
                                       fit_tmax);
      nlohmann::json j;
      j["column"] = fit_column;
      j["slope"] = fit.slope;
      j["intercept"] = fit.intercept;
      j["r_squared"] = fit.r_squared;
      j["window"] = {fit.t_min, fit.t_max};
      std::cout << j.dump(2) << "\n";
      return 0;
    }
    if (gen_cmd->parsed()) {
      spam_spec.n_points = std::size_t(spam_n);
      spam_spec.d_features = spam_d;
      spam_spec.seed = spam_seed;
      csspa::SpamSyntheticSpec realized;
      const auto data = csspa::generate_spam_synthetic(spam_spec, &realized);
      csspa::write_spam_csv(spam_out, data, &realized);
      std::cout << "wrote " << data.n_points() << " points, "
                << data.n_features() << " features to " << spam_out << "\n";
      return 0;
    }
    if (adult_cmd->parsed()) {
      const auto schema = csspa::load_schema(adult_schema);
      csspa::IngestReport report;
      csspa::ingest_adult_csv(adult_csv, schema, &report);
      nlohmann::json j;
      j["rows_read"] = report.rows_read;
      j["rows_skipped"] = report.rows_skipped;
      j["feature_dim"] = report.feature_dim;
      j["s_plus"] = report.n_s_plus;
      j["s_minus"] = report.n_s_minus;
      j["positive_labels"] = report.n_positive_labels;
      std::cout << j.dump(2) << "\n";
      return 0;
    }
  } catch (const csspa::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const csspa::DivergenceError& e) {
    std::cerr << "divergence: " << e.what() << "\n";
    return 3;
  } catch (const csspa::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 4;
  } catch (const std::domain_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
