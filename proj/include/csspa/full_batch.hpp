#ifndef CSSPA_FULL_BATCH_HPP
#define CSSPA_FULL_BATCH_HPP

#include <cstdint>
#include <string>

#include "csspa/problem.hpp"

namespace csspa {

// Deterministic expectations of the composed functions: F(x) = f(g-bar(x)),
// L_j(x) = ell_j(h-bar(x)), with the inner expectations exact (analytic or
// averaged over the oracle's frozen table). Equal inputs give equal outputs.
class FullBatchEvaluator {
 public:
  explicit FullBatchEvaluator(const ProblemInstance& problem);

  Index decision_dim() const { return problem_->decision_dim(); }
  Index num_constraints() const { return problem_->num_constraints(); }

  // F(x) and optionally its gradient grad g-bar(x) * grad f(g-bar(x)).
  double objective(const Vector& x, Vector* grad = nullptr) const;

  // values[j] = L_j(x); column j of *jacobian (n x J) is grad L_j(x).
  void constraints(const Vector& x, Vector& values,
                   Matrix* jacobian = nullptr) const;

  // F + sum_j lambda_j (L_j + theta) - (alpha * delta / 2) ||lambda||^2.
  double lagrangian(const Vector& x, const Vector& lambda, double alpha,
                    double delta, double theta) const;

  void inner_objective_mean(const Vector& x, Vector& gbar) const;
  void inner_constraint_mean(const Vector& x, Vector& hbar) const;

 private:
  const ProblemInstance* problem_;
};

struct ReferenceSolution {
  Vector x_star;
  Vector lambda_star;
  double f_star = 0.0;
  double kkt_residual = 0.0;
  double theta = 0.0;
  std::uint64_t seed = 0;  // dataset seed when the instance is synthetic
};

// max of the projected-gradient residual ||x - P_X(x - grad F - sum_j
// lambda_j grad L_j)||, the worst tightened violation max_j (L_j + theta)_+,
// and the complementarity sum_j lambda_j |L_j + theta|.
double kkt_residual(const FullBatchEvaluator& eval, const FeasibleSet& set,
                    const Vector& x, const Vector& lambda, double theta);

struct ReferenceOptions {
  int max_outer = 80;
  int max_inner = 50000;
  double rho0 = 10.0;
  double rho_max = 1e9;
  std::optional<Vector> x0;  // defaults to the projection of the origin
};

// Deterministic full-batch augmented-Lagrangian solve of the tightened
// problem, iterated until the KKT residual is <= tol. Requires the problem
// to be convex; throws DivergenceError with the final residual otherwise.
ReferenceSolution solve_reference(const FullBatchEvaluator& eval,
                                  const FeasibleSet& set, double theta,
                                  double tol,
                                  const ReferenceOptions& opts = {});

std::string reference_to_json(const ReferenceSolution& ref);
ReferenceSolution reference_from_json(const std::string& text);
void save_reference(const std::string& path, const ReferenceSolution& ref);
ReferenceSolution load_reference(const std::string& path);

}  // namespace csspa

#endif
