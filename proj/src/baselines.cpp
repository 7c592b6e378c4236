#include "csspa/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace csspa {

namespace detail {
void enrich_trace(TraceRecord& rec, const SolverState& state,
                  const Vector& x_before, const ProblemInstance& problem,
                  const RunOptions& opts);
}

namespace {

void check_finite(const Vector& v, const char* what, std::int64_t t) {
  if (!v.allFinite()) {
    throw DivergenceError(std::string(what) + " became non-finite at t = " +
                          std::to_string(t));
  }
}

double penalty_slope(const PenaltyConfig& cfg, double u) {
  switch (cfg.form) {
    case PenaltyForm::squared_hinge:
      return cfg.weight * 2.0 * std::max(0.0, u);
    case PenaltyForm::hinge:
      return u > 0.0 ? cfg.weight : 0.0;
  }
  return 0.0;
}

// Shared loop for both comparators. The penalty pointer switches between
// plain SCGD (null) and the penalty method.
RunResult run_primal_only(const ProblemInstance& problem,
                          const Schedule& schedule, OracleRng& rng,
                          const InitOptions& init, const RunOptions& opts,
                          const PenaltyConfig* penalty) {
  validate(schedule);
  SolverState state = init_state(problem, rng, init);
  const auto& set = problem.oracles();
  const bool constrained = problem.num_constraints() > 0;
  const double theta = problem.tightening();
  const std::int64_t horizon = schedule.horizon;
  const std::int64_t stride = std::max<std::int64_t>(1, opts.trace_stride);

  std::vector<TraceRecord> trace;
  StepSamples samples;
  Vector x_before, coeffs;
  if (!constrained) {
    samples.h_value.resize(0);
    samples.h_jacobian.resize(problem.decision_dim(), 0);
  }

  for (std::int64_t t = 1; t <= horizon; ++t) {
    const bool traced = (t % stride == 0) || t == 1 || t == horizon;
    if (traced && opts.evaluator) x_before = state.x;

    const double alpha = alpha_at(schedule, t);
    const double beta = beta_at(schedule, t);

    sample_objective_inner(set, state.x, rng.xi(), samples.g_value,
                           samples.g_jacobian);
    if (constrained)
      sample_constraint_inner(set, state.x, rng.phi(), samples.h_value,
                              samples.h_jacobian);

    update_trackers(state.y, state.w, beta, samples.g_value, samples.h_value,
                    state.y, state.w);
    check_finite(state.y, "tracker y", t);
    if (constrained) check_finite(state.w, "tracker w", t);

    sample_objective_outer_grad(set, state.y, rng.zeta(), samples.f_grad);

    Vector primal = samples.g_jacobian * samples.f_grad;
    if (penalty && constrained) {
      sample_constraint_outer(set, state.w, rng.psi(), samples.l_values,
                              samples.l_grads);
      coeffs.resize(samples.l_values.size());
      for (Index j = 0; j < coeffs.size(); ++j)
        coeffs[j] = penalty_slope(*penalty, samples.l_values[j] + theta);
      primal.noalias() += samples.h_jacobian * (samples.l_grads * coeffs);
    }
    check_finite(primal, "quasi-gradient", t);

    state.x_sum += state.x;
    state.x = project(problem.feasible_set(), state.x - alpha * primal);
    check_finite(state.x, "primal iterate", t);
    state.t = t + 1;

    if (traced) {
      TraceRecord rec;
      rec.t = t;
      rec.alpha = alpha;
      rec.beta = beta;
      rec.delta = 0.0;
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

}  // namespace

RunResult run_scgd(const ProblemInstance& problem, const Schedule& schedule,
                   OracleRng& rng, const InitOptions& init,
                   const RunOptions& opts) {
  if (problem.num_constraints() != 0)
    throw std::domain_error("scgd requires a problem with J = 0");
  return run_primal_only(problem, schedule, rng, init, opts, nullptr);
}

RunResult run_penalty_cscgd(const ProblemInstance& problem,
                            const PenaltyConfig& penalty,
                            const Schedule& schedule, OracleRng& rng,
                            const InitOptions& init, const RunOptions& opts) {
  if (!(penalty.weight > 0.0))
    throw ConfigError("penalty weight must be > 0");
  return run_primal_only(problem, schedule, rng, init, opts, &penalty);
}

}  // namespace csspa
