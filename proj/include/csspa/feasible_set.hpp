#ifndef CSSPA_FEASIBLE_SET_HPP
#define CSSPA_FEASIBLE_SET_HPP

#include <variant>

#include "csspa/types.hpp"

namespace csspa {

struct Box {
  Vector lower;
  Vector upper;
};

struct L2Ball {
  Vector center;
  double radius = 1.0;
};

struct WholeSpace {
  Index dim = 0;
};

// Closed convex sets with closed-form Euclidean projections.
class FeasibleSet {
 public:
  static FeasibleSet box(Vector lower, Vector upper);
  static FeasibleSet l2_ball(Vector center, double radius);
  static FeasibleSet whole_space(Index dim);

  Index dim() const;
  bool contains(const Vector& p, double tol = 1e-12) const;

  template <typename Visitor>
  decltype(auto) visit(Visitor&& v) const {
    return std::visit(std::forward<Visitor>(v), set_);
  }

 private:
  explicit FeasibleSet(std::variant<Box, L2Ball, WholeSpace> set)
      : set_(std::move(set)) {}
  std::variant<Box, L2Ball, WholeSpace> set_;
};

// Euclidean projection: componentwise clamp for a box, radial scaling for a
// ball (the center maps to itself), identity for the whole space.
Vector project(const FeasibleSet& set, const Vector& p);

// Projection onto the nonnegative orthant, componentwise max(0, .).
Vector project_nonneg(const Vector& p);

}  // namespace csspa

#endif
