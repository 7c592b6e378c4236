#include "csspa/feasible_set.hpp"

#include <cmath>

namespace csspa {

FeasibleSet FeasibleSet::box(Vector lower, Vector upper) {
  if (lower.size() != upper.size())
    throw ConfigError("box: lower/upper dimension mismatch");
  if (((upper - lower).array() < 0.0).any())
    throw ConfigError("box: requires lower <= upper componentwise");
  return FeasibleSet(Box{std::move(lower), std::move(upper)});
}

FeasibleSet FeasibleSet::l2_ball(Vector center, double radius) {
  if (!(radius > 0.0)) throw ConfigError("l2_ball: radius must be > 0");
  return FeasibleSet(L2Ball{std::move(center), radius});
}

FeasibleSet FeasibleSet::whole_space(Index dim) {
  if (dim < 1) throw ConfigError("whole_space: dim must be >= 1");
  return FeasibleSet(WholeSpace{dim});
}

Index FeasibleSet::dim() const {
  return visit([](const auto& s) -> Index {
    using T = std::decay_t<decltype(s)>;
    if constexpr (std::is_same_v<T, Box>) return s.lower.size();
    if constexpr (std::is_same_v<T, L2Ball>) return s.center.size();
    if constexpr (std::is_same_v<T, WholeSpace>) return s.dim;
  });
}

bool FeasibleSet::contains(const Vector& p, double tol) const {
  if (p.size() != dim()) return false;
  return visit([&](const auto& s) -> bool {
    using T = std::decay_t<decltype(s)>;
    if constexpr (std::is_same_v<T, Box>) {
      return ((p - s.lower).array() >= -tol).all() &&
             ((s.upper - p).array() >= -tol).all();
    }
    if constexpr (std::is_same_v<T, L2Ball>) {
      return (p - s.center).norm() <= s.radius + tol;
    }
    if constexpr (std::is_same_v<T, WholeSpace>) return true;
  });
}

Vector project(const FeasibleSet& set, const Vector& p) {
  require_dim(p, set.dim(), "project");
  require_finite(p, "project");
  return set.visit([&](const auto& s) -> Vector {
    using T = std::decay_t<decltype(s)>;
    if constexpr (std::is_same_v<T, Box>) {
      return p.cwiseMax(s.lower).cwiseMin(s.upper);
    }
    if constexpr (std::is_same_v<T, L2Ball>) {
      const Vector r = p - s.center;
      const double norm = r.norm();
      if (norm <= s.radius) return p;
      return s.center + r * (s.radius / norm);
    }
    if constexpr (std::is_same_v<T, WholeSpace>) return p;
  });
}

Vector project_nonneg(const Vector& p) {
  require_finite(p, "project_nonneg");
  return p.cwiseMax(0.0);
}

}  // namespace csspa
