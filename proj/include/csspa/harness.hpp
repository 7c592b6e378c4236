#ifndef CSSPA_HARNESS_HPP
#define CSSPA_HARNESS_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "csspa/baselines.hpp"
#include "csspa/solver.hpp"

namespace csspa {

enum class SolverKind { csspa, scgd, penalty };

std::string solver_name(SolverKind kind);
SolverKind solver_from_name(const std::string& name);

// One experiment: a problem, one or two solvers, a schedule, a tightening
// policy, and the seeds to replicate over. Parsed from a JSON config file;
// CLI flags override individual fields.
struct ExperimentConfig {
  nlohmann::json problem;  // problem block, see build_problem
  std::vector<SolverKind> solvers = {SolverKind::csspa};
  Schedule schedule;
  double theta = 0.0;
  double theta0 = 0.0;  // when > 0, theta = theta0 * T^(-1/4) wins
  std::vector<std::uint64_t> seeds = {1};
  std::int64_t trace_stride = 100;
  std::string out_dir = "out";
  PenaltyConfig penalty;
  bool reference_enabled = true;
  double reference_tol = 1e-8;
  bool reference_cache = true;
};

ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);
double effective_theta(const ExperimentConfig& config);

// Problem block formats:
//   {"kind": "quadratic_test", "noise_std": 0.1, "with_constraint": true}
//   {"kind": "fair_spam", "dataset": {"synthetic": {...}} | {"csv": path},
//    "basis_p": 4, "mu": 1.0, "tau": 0.5, "ball_radius": 10.0}
//   {"kind": "fair_clf", "dataset": {"csv": p, "schema": p} |
//    {"two_group": {...}}, "approximation": "A1", "tau": 0.2, "c": 0.5,
//    "mu": 1.0, "huber_eps": 0.05, "ball_radius": 5.0, "preset": false}
//   {"kind": "custom", "file": "problem.json"}
struct BuiltProblem {
  std::shared_ptr<ProblemInstance> problem;
  std::string cache_key;  // problem hash including theta
  std::uint64_t dataset_seed = 0;
};
BuiltProblem build_problem(const nlohmann::json& spec, double theta);

struct SeedOutcome {
  std::uint64_t seed = 0;
  bool diverged = false;
  std::string error;
  std::optional<double> gap;
  double violation = 0.0;
  double wall_ms = 0.0;
  std::string trace_path;
  Vector x_hat;
};

struct ExperimentSummary {
  SolverKind solver = SolverKind::csspa;
  double theta = 0.0;
  std::optional<ReferenceSolution> reference;
  std::vector<SeedOutcome> outcomes;
  std::optional<double> mean_gap;
  double mean_violation = 0.0;
  bool any_diverged = false;
  std::string summary_path;
};

// Runs solvers[0] over every seed: solves (or loads) the reference, writes
// one trace CSV per seed plus a summary file, and reports final metrics for
// the averaged iterate. Divergence is recorded per seed, not thrown.
ExperimentSummary run_experiment(const ExperimentConfig& config);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::int64_t t_min = 0;
  std::int64_t t_max = 0;
};

// Least-squares slope of log|column| against log t over [t_min, t_max],
// fitted per trace file and averaged. Zero values are dropped; a file whose
// window is left empty is an error.
RateFit fit_rate(const std::vector<std::string>& trace_files,
                 const std::string& column, std::int64_t t_min,
                 std::int64_t t_max);

struct ComparisonSummary {
  ExperimentSummary first;
  ExperimentSummary second;
  std::optional<RateFit> first_rate, second_rate;
  std::string comparison_path;
};

// Runs both configured solvers under matched budgets and seeds and writes a
// side-by-side summary.
ComparisonSummary compare_solvers(const ExperimentConfig& config);

// Trace CSV schema:
// t,alpha,beta,delta,lambda_norm,gap_running,violation_running,
// tracker_err_y,tracker_err_w with empty cells for absent values. Writing
// then parsing reproduces the records exactly.
void write_trace_csv(const std::string& path,
                     const std::vector<TraceRecord>& trace);
std::vector<TraceRecord> read_trace_csv(const std::string& path);

}  // namespace csspa

#endif
