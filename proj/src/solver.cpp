#include "csspa/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace csspa {

bool operator==(const TraceRecord& a, const TraceRecord& b) {
  return a.t == b.t && a.alpha == b.alpha && a.beta == b.beta &&
         a.delta == b.delta && a.lambda_norm == b.lambda_norm &&
         a.gap_running == b.gap_running &&
         a.violation_running == b.violation_running &&
         a.tracker_err_y == b.tracker_err_y &&
         a.tracker_err_w == b.tracker_err_w;
}

namespace {

void check_finite(const Vector& v, const char* what, std::int64_t t) {
  if (!v.allFinite()) {
    throw DivergenceError(std::string(what) + " became non-finite at t = " +
                          std::to_string(t));
  }
}

}  // namespace

void update_trackers(const Vector& y, const Vector& w, double beta_t,
                     const Vector& g_sample, const Vector& h_sample,
                     Vector& y_next, Vector& w_next) {
  if (!(beta_t > 0.0 && beta_t <= 1.0))
    throw std::domain_error("update_trackers: beta must lie in (0, 1]");
  require_dim(g_sample, y.size(), "update_trackers: g sample");
  require_dim(h_sample, w.size(), "update_trackers: h sample");
  y_next = (1.0 - beta_t) * y + beta_t * g_sample;
  w_next = (1.0 - beta_t) * w + beta_t * h_sample;
}

QuasiGradient assemble_quasi_gradient(const SolverState& state,
                                      const StepSamples& samples, double theta,
                                      double alpha_t, double delta_t) {
  QuasiGradient qg;
  qg.primal = samples.g_jacobian * samples.f_grad;
  const Index num_con = samples.l_values.size();
  if (num_con > 0) {
    require_dim(state.lambda, num_con, "assemble_quasi_gradient: lambda");
    qg.primal.noalias() += samples.h_jacobian * (samples.l_grads * state.lambda);
    qg.dual = samples.l_values.array() + theta -
              alpha_t * delta_t * state.lambda.array();
  } else {
    qg.dual.resize(0);
  }
  return qg;
}

SolverState init_state(const ProblemInstance& problem, OracleRng& rng,
                       const InitOptions& init) {
  SolverState state;
  state.t = 1;
  const Index n = problem.decision_dim();
  const auto& set = problem.oracles();

  if (init.x1) {
    require_dim(*init.x1, n, "init x1");
    require_finite(*init.x1, "init x1");
    state.x = project(problem.feasible_set(), *init.x1);
  } else {
    state.x = project(problem.feasible_set(), Vector::Zero(n));
  }

  Matrix scratch;
  if (init.y1) {
    require_dim(*init.y1, problem.objective_inner_dim(), "init y1");
    state.y = *init.y1;
  } else {
    set.objective_inner->sample(state.x, rng.xi(), state.y, scratch);
  }

  if (problem.num_constraints() > 0) {
    if (init.w1) {
      require_dim(*init.w1, problem.constraint_inner_dim(), "init w1");
      state.w = *init.w1;
    } else {
      set.constraint_inner->sample(state.x, rng.phi(), state.w, scratch);
    }
    if (init.lambda1) {
      require_dim(*init.lambda1, problem.num_constraints(), "init lambda1");
      if ((init.lambda1->array() < 0.0).any())
        throw ConfigError("init lambda1 must be >= 0 componentwise");
      state.lambda = *init.lambda1;
    } else {
      state.lambda = Vector::Zero(problem.num_constraints());
    }
  } else {
    state.w.resize(0);
    state.lambda.resize(0);
  }

  state.x_sum = Vector::Zero(n);
  return state;
}

TraceRecord step(SolverState& state, const ProblemInstance& problem,
                 const Schedule& schedule, OracleRng& rng) {
  const std::int64_t t = state.t;
  if (t < 1 || t > schedule.horizon)
    throw std::domain_error("step: iteration counter outside [1, horizon]");

  const double alpha = alpha_at(schedule, t);
  const double beta = beta_at(schedule, t);
  const double delta = delta_at(schedule, t);
  const double theta = problem.tightening();
  const auto& set = problem.oracles();
  const bool constrained = problem.num_constraints() > 0;

  StepSamples samples;
  sample_objective_inner(set, state.x, rng.xi(), samples.g_value,
                         samples.g_jacobian);
  if (constrained) {
    sample_constraint_inner(set, state.x, rng.phi(), samples.h_value,
                            samples.h_jacobian);
  } else {
    samples.h_value.resize(0);
    samples.h_jacobian.resize(problem.decision_dim(), 0);
    samples.l_values.resize(0);
    samples.l_grads.resize(0, 0);
  }

  // Trackers advance first; the outer gradients below are taken at the new
  // values y_{t+1}, w_{t+1}.
  update_trackers(state.y, state.w, beta, samples.g_value, samples.h_value,
                  state.y, state.w);
  check_finite(state.y, "tracker y", t);
  if (constrained) check_finite(state.w, "tracker w", t);

  sample_objective_outer_grad(set, state.y, rng.zeta(), samples.f_grad);
  if (constrained) {
    sample_constraint_outer(set, state.w, rng.psi(), samples.l_values,
                            samples.l_grads);
  }

  const QuasiGradient qg =
      assemble_quasi_gradient(state, samples, theta, alpha, delta);
  check_finite(qg.primal, "quasi-gradient", t);

  state.x_sum += state.x;
  state.x = project(problem.feasible_set(), state.x - alpha * qg.primal);
  check_finite(state.x, "primal iterate", t);
  if (!problem.feasible_set().contains(state.x))
    throw DivergenceError("primal iterate left the feasible set at t = " +
                          std::to_string(t));

  if (constrained) {
    for (Index j = 0; j < state.lambda.size(); ++j) {
      state.lambda[j] =
          std::max(0.0, state.lambda[j] * (1.0 - alpha * alpha * delta) +
                            alpha * (samples.l_values[j] + theta));
    }
    check_finite(state.lambda, "dual variable", t);
  }

  state.t = t + 1;

  TraceRecord rec;
  rec.t = t;
  rec.alpha = alpha;
  rec.beta = beta;
  rec.delta = delta;
  if (constrained) rec.lambda_norm = state.lambda.norm();
  return rec;
}

namespace detail {

void enrich_trace(TraceRecord& rec, const SolverState& state,
                  const Vector& x_before, const ProblemInstance& problem,
                  const RunOptions& opts) {
  if (!opts.evaluator) return;
  const auto& eval = *opts.evaluator;
  const Vector x_bar = state.x_sum / double(rec.t);
  if (problem.num_constraints() > 0) {
    Vector lvals;
    eval.constraints(x_bar, lvals);
    double violation = 0.0;
    for (Index j = 0; j < lvals.size(); ++j)
      violation = std::max(violation, std::max(0.0, lvals[j]));
    rec.violation_running = violation;
  }
  if (opts.reference)
    rec.gap_running = eval.objective(x_bar) - opts.reference->f_star;
  Vector gbar;
  eval.inner_objective_mean(x_before, gbar);
  rec.tracker_err_y = (state.y - gbar).norm();
  if (problem.num_constraints() > 0) {
    Vector hbar;
    eval.inner_constraint_mean(x_before, hbar);
    rec.tracker_err_w = (state.w - hbar).norm();
  }
}

}  // namespace detail

RunResult run_csspa(const ProblemInstance& problem, const Schedule& schedule,
                    OracleRng& rng, const InitOptions& init,
                    const RunOptions& opts) {
  validate(schedule);
  SolverState state = init_state(problem, rng, init);
  const std::int64_t horizon = schedule.horizon;
  const std::int64_t stride = std::max<std::int64_t>(1, opts.trace_stride);

  std::vector<TraceRecord> trace;
  Vector x_before;
  for (std::int64_t t = 1; t <= horizon; ++t) {
    const bool traced = (t % stride == 0) || t == 1 || t == horizon;
    if (traced && opts.evaluator) x_before = state.x;
    TraceRecord rec = step(state, problem, schedule, rng);
    if (traced) {
      detail::enrich_trace(rec, state, x_before, problem, opts);
      trace.push_back(rec);
    }
  }

  RunResult result;
  result.x_hat = state.x_sum / double(horizon);
  result.trace = std::move(trace);
  result.final_state = std::move(state);
  return result;
}

}  // namespace csspa
