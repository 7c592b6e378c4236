#ifndef CSSPA_ORACLES_HPP
#define CSSPA_ORACLES_HPP

#include <cstddef>
#include <memory>

#include "csspa/rng.hpp"
#include "csspa/types.hpp"

namespace csspa {

// Stochastic inner map (g or h). One draw yields the value and the n x m
// Jacobian at the query point, both produced from the same draw. mean() is
// the exact expectation (analytic, or the average over a frozen table).
class InnerOracle {
 public:
  virtual ~InnerOracle() = default;
  virtual Index input_dim() const = 0;
  virtual Index output_dim() const = 0;
  virtual void sample(const Vector& x, RngStream& rng, Vector& value,
                      Matrix& jacobian) const = 0;
  virtual void mean(const Vector& x, Vector& value, Matrix& jacobian) const = 0;
};

// Outer objective function f. The solver only ever needs its gradient.
class ObjectiveOuterOracle {
 public:
  virtual ~ObjectiveOuterOracle() = default;
  virtual Index input_dim() const = 0;
  virtual void sample_grad(const Vector& y, RngStream& rng,
                           Vector& grad) const = 0;
  virtual double mean_value(const Vector& y) const = 0;
  virtual void mean_grad(const Vector& y, Vector& grad) const = 0;
};

// Outer constraint functions ell_1..ell_J, evaluated together from one
// draw: values has length J, column j of grads (d x J) is grad ell_j.
class ConstraintOuterOracle {
 public:
  virtual ~ConstraintOuterOracle() = default;
  virtual Index input_dim() const = 0;
  virtual Index num_constraints() const = 0;
  virtual void sample(const Vector& w, RngStream& rng, Vector& values,
                      Matrix& grads) const = 0;
  virtual void mean(const Vector& w, Vector& values, Matrix& grads) const = 0;
};

struct ObjectivePieces {
  std::shared_ptr<const InnerOracle> inner;
  std::shared_ptr<const ObjectiveOuterOracle> outer;
};

struct ConstraintPieces {
  std::shared_ptr<const InnerOracle> inner;
  std::shared_ptr<const ConstraintOuterOracle> outer;
};

// The four samplers used by one solver iteration. Constraint members are
// null when the problem has no functional constraints.
struct StochasticOracleSet {
  std::shared_ptr<const InnerOracle> objective_inner;
  std::shared_ptr<const ObjectiveOuterOracle> objective_outer;
  std::shared_ptr<const InnerOracle> constraint_inner;
  std::shared_ptr<const ConstraintOuterOracle> constraint_outer;
};

void sample_objective_inner(const StochasticOracleSet& set, const Vector& x,
                            RngStream& xi, Vector& value, Matrix& jacobian);
void sample_objective_outer_grad(const StochasticOracleSet& set,
                                 const Vector& y, RngStream& zeta,
                                 Vector& grad);
void sample_constraint_inner(const StochasticOracleSet& set, const Vector& x,
                             RngStream& phi, Vector& value, Matrix& jacobian);
void sample_constraint_outer(const StochasticOracleSet& set, const Vector& w,
                             RngStream& psi, Vector& values, Matrix& grads);

// Uniform-with-replacement row sampling over a frozen table; each sample
// call consumes exactly one row draw, mean() averages over every row.
class RowSampledInner : public InnerOracle {
 public:
  void sample(const Vector& x, RngStream& rng, Vector& value,
              Matrix& jacobian) const final;
  void mean(const Vector& x, Vector& value, Matrix& jacobian) const override;

  virtual std::size_t num_rows() const = 0;
  virtual void row_eval(std::size_t row, const Vector& x, Vector& value,
                        Matrix& jacobian) const = 0;
};

// ---- analytic oracles (test problems and synthetic benchmarks) ----

// g(x; xi) = S x + c + noise_std * xi, Jacobian S^T (constant).
class AffineInnerOracle : public InnerOracle {
 public:
  AffineInnerOracle(Matrix s, Vector c, double noise_std);
  Index input_dim() const override { return s_.cols(); }
  Index output_dim() const override { return s_.rows(); }
  void sample(const Vector& x, RngStream& rng, Vector& value,
              Matrix& jacobian) const override;
  void mean(const Vector& x, Vector& value, Matrix& jacobian) const override;

 private:
  Matrix s_;
  Vector c_;
  double noise_std_;
};

// f(y; zeta) = scale * ||y||^2 + noise_std * zeta^T y, so the sampled
// gradient is 2 * scale * y + noise_std * zeta with E[zeta] = 0.
class QuadraticObjectiveOuter : public ObjectiveOuterOracle {
 public:
  QuadraticObjectiveOuter(Index dim, double scale = 1.0,
                          double noise_std = 0.0);
  Index input_dim() const override { return dim_; }
  void sample_grad(const Vector& y, RngStream& rng,
                   Vector& grad) const override;
  double mean_value(const Vector& y) const override;
  void mean_grad(const Vector& y, Vector& grad) const override;

 private:
  Index dim_;
  double scale_;
  double noise_std_;
};

// f(y) = y_1; the trivial composition used when the objective is a plain
// expectation.
class IdentityObjectiveOuter : public ObjectiveOuterOracle {
 public:
  IdentityObjectiveOuter() = default;
  Index input_dim() const override { return 1; }
  void sample_grad(const Vector& y, RngStream& rng,
                   Vector& grad) const override;
  double mean_value(const Vector& y) const override;
  void mean_grad(const Vector& y, Vector& grad) const override;
};

// ell(w; psi) = R w + q + noise_std * psi, gradients R^T (constant).
class AffineConstraintOuter : public ConstraintOuterOracle {
 public:
  AffineConstraintOuter(Matrix r, Vector q, double noise_std = 0.0);
  Index input_dim() const override { return r_.cols(); }
  Index num_constraints() const override { return r_.rows(); }
  void sample(const Vector& w, RngStream& rng, Vector& values,
              Matrix& grads) const override;
  void mean(const Vector& w, Vector& values, Matrix& grads) const override;

 private:
  Matrix r_;
  Vector q_;
  double noise_std_;
};

}  // namespace csspa

#endif
