#ifndef CSSPA_SCHEDULE_HPP
#define CSSPA_SCHEDULE_HPP

#include <cstdint>

#include "csspa/types.hpp"

namespace csspa {

enum class ScheduleMode { per_iteration, constant_in_t };

// Power-law step sizes alpha_t = alpha0 * t^(-a), beta_t = beta0 * t^(-b)
// (frozen at t = T in constant_in_t mode) plus the dual regularizer delta_t
// tied to them. Values are immutable after construction.
struct Schedule {
  std::int64_t horizon = 0;  // T
  double alpha0 = 1.0;
  double a = 0.75;
  double beta0 = 1.0;
  double b = 0.5;
  ScheduleMode mode = ScheduleMode::per_iteration;
  double delta_scale = 1.0;  // 0 disables dual regularization
};

// Throws ConfigError unless: T >= 1, alpha0 > 0, beta0 > 0, a and b in
// (0, 1), a >= b, beta_t <= 1 and alpha_t <= beta_t for every t <= T.
void validate(const Schedule& s);

// t must lie in [1, horizon]; std::domain_error otherwise.
double alpha_at(const Schedule& s, std::int64_t t);

// Additionally throws ConfigError when the value exceeds 1 (the tracker
// updates need beta_t in (0, 1]).
double beta_at(const Schedule& s, std::int64_t t);

// delta_scale times the lower bound
//   (1/alpha_t) * ( alpha_t/beta_t + alpha_t^2/(alpha_{t+1} beta_{t+1})
//                   + alpha_t^2/(alpha_T beta_{t+1})
//                   + (1/alpha_{t+1} - 1/alpha_t) + alpha_t ),
// with the t+1 terms extended past the horizon by the same power law.
double delta_at(const Schedule& s, std::int64_t t);

// Tightening policy theta = theta0 * T^(-1/4).
double theta_policy(double theta0, std::int64_t horizon);

}  // namespace csspa

#endif
