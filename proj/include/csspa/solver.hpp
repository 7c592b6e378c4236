#ifndef CSSPA_SOLVER_HPP
#define CSSPA_SOLVER_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "csspa/full_batch.hpp"
#include "csspa/problem.hpp"
#include "csspa/schedule.hpp"

namespace csspa {

struct SolverState {
  std::int64_t t = 1;  // next iteration to execute
  Vector x;            // current iterate, in X
  Vector lambda;       // dual variables, >= 0 componentwise
  Vector y;            // tracker of g-bar(x)
  Vector w;            // tracker of h-bar(x)
  Vector x_sum;        // sum of the iterates consumed by completed steps
};

struct TraceRecord {
  std::int64_t t = 0;
  double alpha = 0.0;
  double beta = 0.0;
  double delta = 0.0;
  std::optional<double> lambda_norm;
  std::optional<double> gap_running;        // F(x-bar_t) - f_star
  std::optional<double> violation_running;  // max_j (L_j(x-bar_t))_+
  std::optional<double> tracker_err_y;      // ||y_{t+1} - g-bar(x_t)||
  std::optional<double> tracker_err_w;
};

bool operator==(const TraceRecord& a, const TraceRecord& b);

// Primal direction grad g * grad f + sum_j lambda_j grad h * grad ell_j and
// the per-constraint dual direction ell_j + theta - alpha * delta * lambda_j.
struct QuasiGradient {
  Vector primal;
  Vector dual;
};

// One iteration's draws. The same xi draw produces g_value and g_jacobian,
// the same phi draw produces h_value and h_jacobian, and the same psi draw
// produces l_values and l_grads.
struct StepSamples {
  Vector g_value;
  Matrix g_jacobian;  // n x m
  Vector f_grad;      // evaluated at the advanced tracker y_{t+1}
  Vector h_value;
  Matrix h_jacobian;  // n x d
  Vector l_values;    // J
  Matrix l_grads;     // d x J, evaluated at w_{t+1}
};

// y_next = (1 - beta) y + beta g_sample, likewise for w; beta must lie in
// (0, 1] so each output component stays between tracker and sample.
void update_trackers(const Vector& y, const Vector& w, double beta_t,
                     const Vector& g_sample, const Vector& h_sample,
                     Vector& y_next, Vector& w_next);

// Requires samples whose outer gradients were taken at the advanced
// trackers.
QuasiGradient assemble_quasi_gradient(const SolverState& state,
                                      const StepSamples& samples, double theta,
                                      double alpha_t, double delta_t);

struct InitOptions {
  std::optional<Vector> x1;       // projected onto X when outside
  std::optional<Vector> y1;       // defaults to a g sample at x_1
  std::optional<Vector> w1;       // defaults to an h sample at x_1
  std::optional<Vector> lambda1;  // defaults to zero; must be >= 0
};

struct RunOptions {
  std::int64_t trace_stride = 100;
  const FullBatchEvaluator* evaluator = nullptr;  // tracker errors, violation
  const ReferenceSolution* reference = nullptr;   // optimality gap
};

struct RunResult {
  Vector x_hat;  // (1/T) sum of x_1..x_T
  SolverState final_state;
  std::vector<TraceRecord> trace;
};

// Default initialization: x_1 = P_X(0), lambda_1 = 0, trackers seeded with
// one inner sample each at x_1 (consuming one xi and one phi draw).
SolverState init_state(const ProblemInstance& problem, OracleRng& rng,
                       const InitOptions& init = {});

// One full iteration: draw, advance trackers, projected primal step
//   x_{t+1} = P_X(x_t - alpha_t * primal),
// augmented dual step
//   lambda_{j,t+1} = [lambda_{j,t} (1 - alpha_t^2 delta_t)
//                     + alpha_t (ell_j(w_{t+1}) + theta)]_+,
// then accumulate x_t into the running sum and advance t. Postconditions
// x_{t+1} in X and lambda_{t+1} >= 0 are asserted; any non-finite quantity
// raises DivergenceError naming it.
TraceRecord step(SolverState& state, const ProblemInstance& problem,
                 const Schedule& schedule, OracleRng& rng);

RunResult run_csspa(const ProblemInstance& problem, const Schedule& schedule,
                    OracleRng& rng, const InitOptions& init = {},
                    const RunOptions& opts = {});

}  // namespace csspa

#endif
