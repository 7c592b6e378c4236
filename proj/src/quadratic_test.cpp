#include "csspa/quadratic_test.hpp"

namespace csspa {

ProblemInstance make_quadratic_test(const QuadraticTestOptions& opts) {
  StochasticOracleSet set;
  set.objective_inner = std::make_shared<AffineInnerOracle>(
      Matrix::Identity(1, 1), Vector::Zero(1), opts.noise_std);
  set.objective_outer = std::make_shared<QuadraticObjectiveOuter>(
      1, 1.0, opts.outer_noise_std);
  if (opts.with_constraint) {
    set.constraint_inner = std::make_shared<AffineInnerOracle>(
        Matrix::Identity(1, 1), Vector::Zero(1), opts.noise_std);
    set.constraint_outer = std::make_shared<AffineConstraintOuter>(
        -Matrix::Identity(1, 1), Vector::Ones(1));
  }
  auto feasible = FeasibleSet::box(
      Vector::Constant(1, -opts.box_halfwidth),
      Vector::Constant(1, opts.box_halfwidth));
  ProblemInstance problem(std::move(set), std::move(feasible));
  AssumptionConstants c;
  c.C_g = 1.0;
  c.C_h = 1.0;
  c.V_g = opts.noise_std * opts.noise_std;
  c.V_h = opts.noise_std * opts.noise_std;
  c.C_l = 1.0;
  c.L_l = 0.0;
  c.D_x = 2.0 * opts.box_halfwidth;
  c.sigma0 = opts.box_halfwidth - 1.0;  // strictly feasible at the box edge
  problem.constants = c;
  return problem;
}

}  // namespace csspa
