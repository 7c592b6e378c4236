#ifndef CSSPA_QUADRATIC_TEST_HPP
#define CSSPA_QUADRATIC_TEST_HPP

#include "csspa/problem.hpp"

namespace csspa {

// min x^2 s.t. 1 - x <= 0 on X = [-halfwidth, halfwidth], posed in
// compositional form: g(x; xi) = x + noise, f(y) = y^2, h(x; phi) = x +
// noise, ell(w) = 1 - w. Optimum x* = 1, lambda* = 2, F* = 1.
struct QuadraticTestOptions {
  double noise_std = 0.1;      // on the inner samples g and h
  bool with_constraint = true; // false gives the unconstrained min of x^2
  double box_halfwidth = 10.0;
  double outer_noise_std = 0.0;
};

ProblemInstance make_quadratic_test(const QuadraticTestOptions& opts = {});

}  // namespace csspa

#endif
