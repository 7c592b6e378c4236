#include "csspa/schedule.hpp"

#include <cmath>
#include <string>

namespace csspa {

namespace {

void check_t(const Schedule& s, std::int64_t t) {
  if (t < 1 || t > s.horizon) {
    throw std::domain_error("schedule: t = " + std::to_string(t) +
                            " outside [1, " + std::to_string(s.horizon) + "]");
  }
}

// Power-law values without the [1, T] range check; used where the delta
// formula references t+1 at t = T.
double alpha_raw(const Schedule& s, std::int64_t t) {
  const double tt =
      s.mode == ScheduleMode::constant_in_t ? double(s.horizon) : double(t);
  return s.alpha0 * std::pow(tt, -s.a);
}

double beta_raw(const Schedule& s, std::int64_t t) {
  const double tt =
      s.mode == ScheduleMode::constant_in_t ? double(s.horizon) : double(t);
  return s.beta0 * std::pow(tt, -s.b);
}

}  // namespace

void validate(const Schedule& s) {
  if (s.horizon < 1) throw ConfigError("schedule: horizon must be >= 1");
  if (!(s.alpha0 > 0.0)) throw ConfigError("schedule: alpha0 must be > 0");
  if (!(s.beta0 > 0.0)) throw ConfigError("schedule: beta0 must be > 0");
  if (!(s.a > 0.0 && s.a < 1.0))
    throw ConfigError("schedule: a must lie in (0, 1)");
  if (!(s.b > 0.0 && s.b < 1.0))
    throw ConfigError("schedule: b must lie in (0, 1)");
  if (!(s.a >= s.b)) throw ConfigError("schedule: requires a >= b");
  if (s.delta_scale < 0.0)
    throw ConfigError("schedule: delta_scale must be >= 0");
  // With a >= b both beta_t and alpha_t/beta_t peak at t = 1 (or at the
  // frozen t = T), so checking the first point covers the whole horizon.
  const std::int64_t t0 = 1;
  const double b1 = beta_raw(s, t0);
  if (b1 > 1.0)
    throw ConfigError("schedule: beta_t exceeds 1 (beta_1 = " +
                      std::to_string(b1) + ")");
  if (alpha_raw(s, t0) > b1)
    throw ConfigError("schedule: requires alpha_t <= beta_t for all t");
}

double alpha_at(const Schedule& s, std::int64_t t) {
  check_t(s, t);
  return alpha_raw(s, t);
}

double beta_at(const Schedule& s, std::int64_t t) {
  check_t(s, t);
  const double v = beta_raw(s, t);
  if (v > 1.0) {
    throw ConfigError("schedule: beta_" + std::to_string(t) + " = " +
                      std::to_string(v) + " exceeds 1");
  }
  return v;
}

double delta_at(const Schedule& s, std::int64_t t) {
  check_t(s, t);
  if (s.delta_scale == 0.0) return 0.0;
  const double at = alpha_raw(s, t);
  const double bt = beta_raw(s, t);
  const double at1 = alpha_raw(s, t + 1);
  const double bt1 = beta_raw(s, t + 1);
  const double aT = alpha_raw(s, s.horizon);
  const double bound =
      (1.0 / at) * (at / bt + at * at / (at1 * bt1) + at * at / (aT * bt1) +
                    (1.0 / at1 - 1.0 / at) + at);
  return s.delta_scale * bound;
}

double theta_policy(double theta0, std::int64_t horizon) {
  if (theta0 < 0.0) throw ConfigError("theta0 must be >= 0");
  if (horizon < 1) throw ConfigError("theta policy: horizon must be >= 1");
  return theta0 * std::pow(double(horizon), -0.25);
}

}  // namespace csspa
