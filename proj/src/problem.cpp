#include "csspa/problem.hpp"

#include <cmath>

namespace csspa {

std::optional<double> objective_sensitivity_bound(const AssumptionConstants& c,
                                                  double theta) {
  if (!c.C_f || !c.C_g || !c.D_x || !c.sigma0) return std::nullopt;
  return theta * 2.0 * std::sqrt(*c.C_f * *c.C_g) * *c.D_x / *c.sigma0;
}

std::optional<double> dual_norm_bound(const AssumptionConstants& c,
                                      Index num_constraints) {
  if (!c.C_f || !c.C_g || !c.D_x || !c.sigma0) return std::nullopt;
  return 2.0 * std::sqrt(double(num_constraints) * *c.C_f * *c.C_g) * *c.D_x /
         *c.sigma0;
}

ProblemInstance::ProblemInstance(StochasticOracleSet oracles,
                                 FeasibleSet feasible_set, double tightening)
    : oracles_(std::move(oracles)),
      feasible_set_(std::move(feasible_set)),
      tightening_(tightening) {
  if (!oracles_.objective_inner || !oracles_.objective_outer)
    throw ConfigError("problem: objective oracles are required");
  if (static_cast<bool>(oracles_.constraint_inner) !=
      static_cast<bool>(oracles_.constraint_outer))
    throw ConfigError(
        "problem: constraint inner/outer oracles must come together");
  if (tightening_ < 0.0) throw ConfigError("problem: tightening must be >= 0");

  n_ = oracles_.objective_inner->input_dim();
  m_ = oracles_.objective_inner->output_dim();
  if (n_ < 1 || m_ < 1)
    throw ConfigError("problem: objective dimensions must be >= 1");
  if (oracles_.objective_outer->input_dim() != m_)
    throw ConfigError("problem: objective outer dimension mismatch");
  if (feasible_set_.dim() != n_)
    throw ConfigError("problem: feasible set dimension mismatch");

  if (oracles_.constraint_inner) {
    d_ = oracles_.constraint_inner->output_dim();
    j_ = oracles_.constraint_outer->num_constraints();
    if (d_ < 1 || j_ < 1)
      throw ConfigError("problem: constraint dimensions must be >= 1");
    if (oracles_.constraint_inner->input_dim() != n_)
      throw ConfigError("problem: constraint inner dimension mismatch");
    if (oracles_.constraint_outer->input_dim() != d_)
      throw ConfigError("problem: constraint outer dimension mismatch");
  } else {
    d_ = 0;
    j_ = 0;
  }
}

ProblemInstance ProblemInstance::with_tightening(double theta) const {
  ProblemInstance p(oracles_, feasible_set_, theta);
  p.constants = constants;
  return p;
}

}  // namespace csspa
