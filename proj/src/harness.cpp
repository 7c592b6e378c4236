#include "csspa/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include "csspa/fair_classification.hpp"
#include "csspa/fair_spam.hpp"
#include "csspa/quadratic_test.hpp"

namespace csspa {

namespace fs = std::filesystem;
using nlohmann::json;

std::string solver_name(SolverKind kind) {
  switch (kind) {
    case SolverKind::csspa: return "csspa";
    case SolverKind::scgd: return "scgd";
    case SolverKind::penalty: return "penalty";
  }
  return "unknown";
}

SolverKind solver_from_name(const std::string& name) {
  if (name == "csspa") return SolverKind::csspa;
  if (name == "scgd") return SolverKind::scgd;
  if (name == "penalty") return SolverKind::penalty;
  throw ConfigError("unknown solver '" + name + "'");
}

namespace {

Schedule schedule_from_json(const json& j) {
  Schedule s;
  s.horizon = j.value("horizon", std::int64_t(0));
  s.alpha0 = j.value("alpha0", s.alpha0);
  s.a = j.value("a", s.a);
  s.beta0 = j.value("beta0", s.beta0);
  s.b = j.value("b", s.b);
  s.delta_scale = j.value("delta_scale", s.delta_scale);
  const std::string mode = j.value("mode", std::string("per_iteration"));
  if (mode == "per_iteration") s.mode = ScheduleMode::per_iteration;
  else if (mode == "constant_in_t") s.mode = ScheduleMode::constant_in_t;
  else throw ConfigError("unknown schedule mode '" + mode + "'");
  return s;
}

PenaltyConfig penalty_from_json(const json& j) {
  PenaltyConfig p;
  p.weight = j.value("weight", p.weight);
  const std::string form = j.value("form", std::string("squared_hinge"));
  if (form == "squared_hinge") p.form = PenaltyForm::squared_hinge;
  else if (form == "hinge") p.form = PenaltyForm::hinge;
  else throw ConfigError("unknown penalty form '" + form + "'");
  return p;
}

}  // namespace

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig config;
  if (!j.contains("problem"))
    throw ConfigError("config: missing 'problem' block");
  config.problem = j.at("problem");
  if (j.contains("solvers")) {
    config.solvers.clear();
    for (const auto& name : j.at("solvers"))
      config.solvers.push_back(solver_from_name(name.get<std::string>()));
  } else if (j.contains("solver")) {
    config.solvers = {solver_from_name(j.at("solver").get<std::string>())};
  }
  if (config.solvers.empty())
    throw ConfigError("config: at least one solver is required");
  if (!j.contains("schedule"))
    throw ConfigError("config: missing 'schedule' block");
  config.schedule = schedule_from_json(j.at("schedule"));
  config.theta = j.value("theta", 0.0);
  config.theta0 = j.value("theta0", 0.0);
  if (j.contains("seeds"))
    config.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  if (config.seeds.empty()) throw ConfigError("config: seeds must be nonempty");
  config.trace_stride = j.value("trace_stride", config.trace_stride);
  if (config.trace_stride < 1)
    throw ConfigError("config: trace_stride must be >= 1");
  config.out_dir = j.value("out_dir", config.out_dir);
  if (j.contains("penalty"))
    config.penalty = penalty_from_json(j.at("penalty"));
  if (j.contains("reference")) {
    const auto& r = j.at("reference");
    config.reference_enabled = r.value("enable", true);
    config.reference_tol = r.value("tol", config.reference_tol);
    config.reference_cache = r.value("cache", config.reference_cache);
  }
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("malformed config file " + path + ": " + e.what());
  }
  return config_from_json(j);
}

double effective_theta(const ExperimentConfig& config) {
  if (config.theta0 > 0.0)
    return theta_policy(config.theta0, config.schedule.horizon);
  if (config.theta < 0.0) throw ConfigError("config: theta must be >= 0");
  return config.theta;
}

BuiltProblem build_problem(const json& spec, double theta) {
  if (!spec.contains("kind")) throw ConfigError("problem: missing 'kind'");
  const std::string kind = spec.at("kind").get<std::string>();

  BuiltProblem built;
  if (kind == "custom") {
    const std::string path = spec.at("file").get<std::string>();
    std::ifstream in(path);
    if (!in) throw IoError("cannot read problem file: " + path);
    json inner;
    try {
      in >> inner;
    } catch (const json::exception& e) {
      throw ConfigError("malformed problem file " + path + ": " + e.what());
    }
    if (inner.value("kind", std::string()) == "custom")
      throw ConfigError("custom problem files cannot nest another 'custom'");
    return build_problem(inner, theta);
  }

  if (kind == "quadratic_test") {
    QuadraticTestOptions opts;
    opts.noise_std = spec.value("noise_std", opts.noise_std);
    opts.with_constraint = spec.value("with_constraint", true);
    opts.box_halfwidth = spec.value("box_halfwidth", opts.box_halfwidth);
    built.problem = std::make_shared<ProblemInstance>(
        make_quadratic_test(opts).with_tightening(theta));
  } else if (kind == "fair_spam") {
    const auto& ds = spec.at("dataset");
    std::shared_ptr<RegressionDataset> data;
    if (ds.contains("synthetic")) {
      const auto& sj = ds.at("synthetic");
      SpamSyntheticSpec s;
      s.n_points = sj.value("n_points", s.n_points);
      s.d_features = sj.value("d_features", s.d_features);
      s.noise_std = sj.value("noise_std", s.noise_std);
      s.seed = sj.value("seed", s.seed);
      if (sj.contains("r")) {
        const auto r = sj.at("r").get<std::vector<double>>();
        if (r.size() != 4) throw ConfigError("spam synthetic: r needs 4 values");
        s.coefficients = std::array<double, 4>{r[0], r[1], r[2], r[3]};
      }
      if (sj.contains("a")) s.a = sj.at("a").get<double>();
      if (sj.contains("b")) s.b = sj.at("b").get<double>();
      data = std::make_shared<RegressionDataset>(generate_spam_synthetic(s));
      built.dataset_seed = s.seed;
    } else if (ds.contains("csv")) {
      data = std::make_shared<RegressionDataset>(
          read_spam_csv(ds.at("csv").get<std::string>()));
    } else {
      throw ConfigError("fair_spam: dataset needs 'synthetic' or 'csv'");
    }
    const SpamBasis basis = SpamBasis::polynomial(spec.value("basis_p", 4));
    built.problem = std::make_shared<ProblemInstance>(
        make_fair_spam_problem(data, basis, spec.value("mu", 1.0),
                               spec.value("tau", 0.5),
                               spec.value("ball_radius", 10.0),
                               spec.value("with_constraint", true))
            .with_tightening(theta));
  } else if (kind == "fair_clf") {
    const auto& ds = spec.at("dataset");
    ClassificationDataset raw;
    if (ds.contains("two_group")) {
      const auto& tj = ds.at("two_group");
      TwoGroupSpec t;
      t.n_rows = tj.value("n_rows", t.n_rows);
      t.group_shift = tj.value("group_shift", t.group_shift);
      t.noise_feature_weight =
          tj.value("noise_feature_weight", t.noise_feature_weight);
      t.seed = tj.value("seed", t.seed);
      raw = make_two_group_synthetic(t);
      built.dataset_seed = t.seed;
    } else if (ds.contains("csv")) {
      const auto schema = load_schema(ds.at("schema").get<std::string>());
      raw = ingest_adult_csv(ds.at("csv").get<std::string>(), schema);
    } else {
      throw ConfigError("fair_clf: dataset needs 'two_group' or 'csv'");
    }
    FairClfConfig cfg;
    const std::string approx = spec.value("approximation", std::string("A1"));
    if (approx == "A1") cfg.approximation = Approximation::A1;
    else if (approx == "A2") cfg.approximation = Approximation::A2;
    else if (approx == "A3") cfg.approximation = Approximation::A3;
    else throw ConfigError("unknown approximation '" + approx + "'");
    cfg.tau = spec.value("tau", cfg.tau);
    if (spec.value("preset", false))
      cfg = preset_config(cfg.approximation, cfg.tau);
    cfg.mu = spec.value("mu", cfg.mu);
    cfg.c = spec.value("c", cfg.c);
    cfg.huber_eps = spec.value("huber_eps", cfg.huber_eps);
    cfg.weight_ball_radius = spec.value("ball_radius", cfg.weight_ball_radius);
    auto data = std::make_shared<ClassificationDataset>(
        spec.value("add_bias", true) ? with_bias_feature(raw) : raw);
    built.problem = std::make_shared<ProblemInstance>(
        make_fair_clf_problem(data, cfg, spec.value("with_constraint", true))
            .with_tightening(theta));
  } else {
    throw ConfigError("unknown problem kind '" + kind + "'");
  }

  char theta_buf[32];
  std::snprintf(theta_buf, sizeof theta_buf, "%.17g", theta);
  const std::size_t h =
      std::hash<std::string>{}(spec.dump() + "|" + theta_buf);
  char key[24];
  std::snprintf(key, sizeof key, "%016zx", h);
  built.cache_key = key;
  return built;
}

// ---- trace CSV ----

namespace {

const char* kTraceHeader =
    "t,alpha,beta,delta,lambda_norm,gap_running,violation_running,"
    "tracker_err_y,tracker_err_w";

void append_cell(std::string& line, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  line += buf;
}

void append_cell(std::string& line, const std::optional<double>& v) {
  if (v) append_cell(line, *v);
}

}  // namespace

void write_trace_csv(const std::string& path,
                     const std::vector<TraceRecord>& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write trace file: " + path);
  out << kTraceHeader << "\n";
  std::string line;
  for (const auto& rec : trace) {
    line.clear();
    line += std::to_string(rec.t);
    line += ',';
    append_cell(line, rec.alpha);
    line += ',';
    append_cell(line, rec.beta);
    line += ',';
    append_cell(line, rec.delta);
    line += ',';
    append_cell(line, rec.lambda_norm);
    line += ',';
    append_cell(line, rec.gap_running);
    line += ',';
    append_cell(line, rec.violation_running);
    line += ',';
    append_cell(line, rec.tracker_err_y);
    line += ',';
    append_cell(line, rec.tracker_err_w);
    out << line << "\n";
  }
}

std::vector<TraceRecord> read_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read trace file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty trace file: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kTraceHeader)
    throw IoError("unexpected trace header in " + path);

  std::vector<TraceRecord> trace;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    while (cells.size() < 9) cells.emplace_back();
    if (cells.size() != 9) throw IoError("malformed trace row in " + path);
    TraceRecord rec;
    rec.t = std::stoll(cells[0]);
    rec.alpha = std::stod(cells[1]);
    rec.beta = std::stod(cells[2]);
    rec.delta = std::stod(cells[3]);
    auto opt = [](const std::string& s) -> std::optional<double> {
      if (s.empty()) return std::nullopt;
      return std::stod(s);
    };
    rec.lambda_norm = opt(cells[4]);
    rec.gap_running = opt(cells[5]);
    rec.violation_running = opt(cells[6]);
    rec.tracker_err_y = opt(cells[7]);
    rec.tracker_err_w = opt(cells[8]);
    trace.push_back(rec);
  }
  return trace;
}

// ---- experiments ----

namespace {

json outcome_to_json(const SeedOutcome& o) {
  json j;
  j["seed"] = o.seed;
  j["diverged"] = o.diverged;
  if (!o.error.empty()) j["error"] = o.error;
  if (o.gap) j["gap"] = *o.gap;
  j["violation"] = o.violation;
  j["wall_ms"] = o.wall_ms;
  if (!o.trace_path.empty()) j["trace"] = o.trace_path;
  if (o.x_hat.size() > 0 && o.x_hat.size() <= 16)
    j["x_hat"] = std::vector<double>(o.x_hat.begin(), o.x_hat.end());
  return j;
}

ExperimentSummary run_one_solver(const ExperimentConfig& config,
                                 SolverKind solver,
                                 const BuiltProblem& built,
                                 const FullBatchEvaluator& eval,
                                 const std::optional<ReferenceSolution>& ref) {
  const auto& problem = *built.problem;
  ExperimentSummary summary;
  summary.solver = solver;
  summary.theta = problem.tightening();
  summary.reference = ref;

  RunOptions ropts;
  ropts.trace_stride = config.trace_stride;
  ropts.evaluator = &eval;
  ropts.reference = ref ? &*ref : nullptr;

  double gap_sum = 0.0, viol_sum = 0.0;
  std::size_t completed = 0;

  for (const auto seed : config.seeds) {
    SeedOutcome outcome;
    outcome.seed = seed;
    OracleRng rng(seed);
    const auto start = std::chrono::steady_clock::now();
    try {
      RunResult result;
      switch (solver) {
        case SolverKind::csspa:
          result = run_csspa(problem, config.schedule, rng, {}, ropts);
          break;
        case SolverKind::scgd:
          result = run_scgd(problem, config.schedule, rng, {}, ropts);
          break;
        case SolverKind::penalty:
          result = run_penalty_cscgd(problem, config.penalty, config.schedule,
                                     rng, {}, ropts);
          break;
      }
      outcome.wall_ms = std::chrono::duration<double, std::milli>(
                            std::chrono::steady_clock::now() - start)
                            .count();
      outcome.x_hat = result.x_hat;
      if (ref) outcome.gap = eval.objective(result.x_hat) - ref->f_star;
      if (problem.num_constraints() > 0) {
        Vector lvals;
        eval.constraints(result.x_hat, lvals);
        for (Index j = 0; j < lvals.size(); ++j)
          outcome.violation = std::max(outcome.violation,
                                       std::max(0.0, lvals[j]));
      }
      const fs::path trace_path =
          fs::path(config.out_dir) /
          ("trace_" + solver_name(solver) + "_seed" + std::to_string(seed) +
           ".csv");
      write_trace_csv(trace_path.string(), result.trace);
      outcome.trace_path = trace_path.string();
      if (outcome.gap) gap_sum += *outcome.gap;
      viol_sum += outcome.violation;
      ++completed;
    } catch (const DivergenceError& e) {
      outcome.diverged = true;
      outcome.error = e.what();
      summary.any_diverged = true;
    }
    summary.outcomes.push_back(std::move(outcome));
  }

  if (completed > 0) {
    if (ref) summary.mean_gap = gap_sum / double(completed);
    summary.mean_violation = viol_sum / double(completed);
  }

  json j;
  j["solver"] = solver_name(summary.solver);
  j["theta"] = summary.theta;
  j["horizon"] = config.schedule.horizon;
  j["trace_stride"] = config.trace_stride;
  if (ref) {
    j["f_star"] = ref->f_star;
    j["kkt_residual"] = ref->kkt_residual;
  }
  if (summary.mean_gap) j["mean_gap"] = *summary.mean_gap;
  j["mean_violation"] = summary.mean_violation;
  j["any_diverged"] = summary.any_diverged;
  j["seeds"] = json::array();
  for (const auto& o : summary.outcomes) j["seeds"].push_back(outcome_to_json(o));

  const fs::path path = fs::path(config.out_dir) /
                        ("summary_" + solver_name(solver) + ".json");
  std::ofstream out(path);
  if (!out) throw IoError("cannot write summary file: " + path.string());
  out << j.dump(2) << "\n";
  summary.summary_path = path.string();
  return summary;
}

std::optional<ReferenceSolution> obtain_reference(
    const ExperimentConfig& config, const BuiltProblem& built,
    const FullBatchEvaluator& eval) {
  if (!config.reference_enabled) return std::nullopt;
  const fs::path cache_path =
      fs::path(config.out_dir) / ("ref_" + built.cache_key + ".json");
  if (config.reference_cache && fs::exists(cache_path))
    return load_reference(cache_path.string());
  ReferenceSolution ref =
      solve_reference(eval, built.problem->feasible_set(),
                      built.problem->tightening(), config.reference_tol);
  ref.seed = built.dataset_seed;
  if (config.reference_cache) save_reference(cache_path.string(), ref);
  return ref;
}

}  // namespace

ExperimentSummary run_experiment(const ExperimentConfig& config) {
  validate(config.schedule);
  const double theta = effective_theta(config);
  const BuiltProblem built = build_problem(config.problem, theta);
  fs::create_directories(config.out_dir);
  FullBatchEvaluator eval(*built.problem);
  const auto ref = obtain_reference(config, built, eval);
  return run_one_solver(config, config.solvers.front(), built, eval, ref);
}

RateFit fit_rate(const std::vector<std::string>& trace_files,
                 const std::string& column, std::int64_t t_min,
                 std::int64_t t_max) {
  if (trace_files.empty()) throw ConfigError("rate fit: no trace files");
  if (!(t_min < t_max)) throw ConfigError("rate fit: requires t_min < t_max");

  auto read_column = [&column](const TraceRecord& rec) -> std::optional<double> {
    if (column == "gap_running") return rec.gap_running;
    if (column == "violation_running") return rec.violation_running;
    if (column == "lambda_norm") return rec.lambda_norm;
    if (column == "tracker_err_y") return rec.tracker_err_y;
    if (column == "tracker_err_w") return rec.tracker_err_w;
    if (column == "alpha") return rec.alpha;
    if (column == "beta") return rec.beta;
    throw ConfigError("rate fit: unknown column '" + column + "'");
  };

  double slope_sum = 0.0, intercept_sum = 0.0, r2_sum = 0.0;
  for (const auto& file : trace_files) {
    const auto trace = read_trace_csv(file);
    std::vector<double> xs, ys;
    for (const auto& rec : trace) {
      if (rec.t < t_min || rec.t > t_max) continue;
      const auto v = read_column(rec);
      if (!v || *v == 0.0) continue;  // zeros dropped from the log fit
      xs.push_back(std::log(double(rec.t)));
      ys.push_back(std::log(std::abs(*v)));
    }
    if (xs.size() < 2)
      throw ConfigError("rate fit: empty window after filtering in " + file);
    const double n = double(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      mx += xs[i];
      my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxx += (xs[i] - mx) * (xs[i] - mx);
      sxy += (xs[i] - mx) * (ys[i] - my);
      syy += (ys[i] - my) * (ys[i] - my);
    }
    const double slope = sxy / sxx;
    const double intercept = my - slope * mx;
    double r2 = 1.0;
    if (syy > 1e-30) {
      double ss_res = 0.0;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        const double e = ys[i] - (intercept + slope * xs[i]);
        ss_res += e * e;
      }
      r2 = 1.0 - ss_res / syy;
    }
    slope_sum += slope;
    intercept_sum += intercept;
    r2_sum += r2;
  }

  RateFit fit;
  const double k = double(trace_files.size());
  fit.slope = slope_sum / k;
  fit.intercept = intercept_sum / k;
  fit.r_squared = r2_sum / k;
  fit.t_min = t_min;
  fit.t_max = t_max;
  return fit;
}

ComparisonSummary compare_solvers(const ExperimentConfig& config) {
  if (config.solvers.size() != 2)
    throw ConfigError("compare: exactly two solvers are required");
  validate(config.schedule);
  const double theta = effective_theta(config);
  const BuiltProblem built = build_problem(config.problem, theta);
  fs::create_directories(config.out_dir);
  FullBatchEvaluator eval(*built.problem);
  const auto ref = obtain_reference(config, built, eval);

  ComparisonSummary cmp;
  cmp.first = run_one_solver(config, config.solvers[0], built, eval, ref);
  cmp.second = run_one_solver(config, config.solvers[1], built, eval, ref);

  auto fit_for = [&](const ExperimentSummary& s) -> std::optional<RateFit> {
    if (!ref) return std::nullopt;
    std::vector<std::string> files;
    for (const auto& o : s.outcomes)
      if (!o.diverged) files.push_back(o.trace_path);
    if (files.empty()) return std::nullopt;
    const std::int64_t t_max = config.schedule.horizon;
    const std::int64_t t_min = std::max<std::int64_t>(10, t_max / 100);
    try {
      return fit_rate(files, "gap_running", t_min, t_max);
    } catch (const ConfigError&) {
      return std::nullopt;
    }
  };
  cmp.first_rate = fit_for(cmp.first);
  cmp.second_rate = fit_for(cmp.second);

  auto side = [](const ExperimentSummary& s,
                 const std::optional<RateFit>& fit) {
    json j;
    j["solver"] = solver_name(s.solver);
    if (s.mean_gap) j["mean_gap"] = *s.mean_gap;
    j["mean_violation"] = s.mean_violation;
    j["any_diverged"] = s.any_diverged;
    if (fit) {
      j["rate_slope"] = fit->slope;
      j["rate_r_squared"] = fit->r_squared;
    }
    return j;
  };

  json j;
  j["first"] = side(cmp.first, cmp.first_rate);
  j["second"] = side(cmp.second, cmp.second_rate);
  const fs::path path = fs::path(config.out_dir) / "comparison.json";
  std::ofstream out(path);
  if (!out) throw IoError("cannot write comparison file: " + path.string());
  out << j.dump(2) << "\n";
  cmp.comparison_path = path.string();
  return cmp;
}

}  // namespace csspa
