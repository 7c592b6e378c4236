#ifndef CSSPA_PROBLEM_HPP
#define CSSPA_PROBLEM_HPP

#include <optional>

#include "csspa/feasible_set.hpp"
#include "csspa/oracles.hpp"

namespace csspa {

// Regularity constants of the problem; optional diagnostics only, the
// solver never reads them.
struct AssumptionConstants {
  std::optional<double> C_g, C_h, V_g, V_h;
  std::optional<double> C_f, C_l, L_f, L_l, B_l;
  std::optional<double> D_x, sigma0;
};

// theta * 2 * sqrt(C_f C_g) * D_x / sigma0, when the constants are present.
std::optional<double> objective_sensitivity_bound(const AssumptionConstants& c,
                                                  double theta);

// 2 * sqrt(J C_f C_g) * D_x / sigma0.
std::optional<double> dual_norm_bound(const AssumptionConstants& c,
                                      Index num_constraints);

// The composed problem: objective composition (g, f), J >= 0 constraint
// compositions (h, ell_j), the feasible set, and the tightening offset
// theta added to every constraint. Immutable after construction.
class ProblemInstance {
 public:
  ProblemInstance(StochasticOracleSet oracles, FeasibleSet feasible_set,
                  double tightening = 0.0);

  Index decision_dim() const { return n_; }
  Index objective_inner_dim() const { return m_; }
  Index constraint_inner_dim() const { return d_; }
  Index num_constraints() const { return j_; }
  double tightening() const { return tightening_; }

  const StochasticOracleSet& oracles() const { return oracles_; }
  const FeasibleSet& feasible_set() const { return feasible_set_; }

  ProblemInstance with_tightening(double theta) const;

  std::optional<AssumptionConstants> constants;

 private:
  StochasticOracleSet oracles_;
  FeasibleSet feasible_set_;
  double tightening_;
  Index n_, m_, d_, j_;
};

}  // namespace csspa

#endif
