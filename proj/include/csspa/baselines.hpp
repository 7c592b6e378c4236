#ifndef CSSPA_BASELINES_HPP
#define CSSPA_BASELINES_HPP

#include "csspa/solver.hpp"

namespace csspa {

// Plain two-timescale compositional gradient descent; only valid for
// problems without functional constraints. Under a shared seed its iterate
// sequence is bitwise identical to run_csspa with J = 0.
RunResult run_scgd(const ProblemInstance& problem, const Schedule& schedule,
                   OracleRng& rng, const InitOptions& init = {},
                   const RunOptions& opts = {});

enum class PenaltyForm { squared_hinge, hinge };

struct PenaltyConfig {
  double weight = 10.0;  // rho
  PenaltyForm form = PenaltyForm::squared_hinge;
};

// Penalty-reformulation comparator: SCGD on
//   F + sum_j rho * penalty(L_j + theta),
// the constraint composition reusing the w tracker. Never updates dual
// variables, so its trace carries no lambda norm.
RunResult run_penalty_cscgd(const ProblemInstance& problem,
                            const PenaltyConfig& penalty,
                            const Schedule& schedule, OracleRng& rng,
                            const InitOptions& init = {},
                            const RunOptions& opts = {});

}  // namespace csspa

#endif
