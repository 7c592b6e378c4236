#include "csspa/oracles.hpp"

namespace csspa {

namespace {

void check_query(const InnerOracle& o, const Vector& x, const char* what) {
  require_dim(x, o.input_dim(), what);
  require_finite(x, what);
}

}  // namespace

void sample_objective_inner(const StochasticOracleSet& set, const Vector& x,
                            RngStream& xi, Vector& value, Matrix& jacobian) {
  if (!set.objective_inner)
    throw std::domain_error("oracle set has no objective inner function");
  check_query(*set.objective_inner, x, "sample_objective_inner");
  set.objective_inner->sample(x, xi, value, jacobian);
}

void sample_objective_outer_grad(const StochasticOracleSet& set,
                                 const Vector& y, RngStream& zeta,
                                 Vector& grad) {
  if (!set.objective_outer)
    throw std::domain_error("oracle set has no objective outer function");
  require_dim(y, set.objective_outer->input_dim(),
              "sample_objective_outer_grad");
  require_finite(y, "sample_objective_outer_grad");
  set.objective_outer->sample_grad(y, zeta, grad);
}

void sample_constraint_inner(const StochasticOracleSet& set, const Vector& x,
                             RngStream& phi, Vector& value, Matrix& jacobian) {
  if (!set.constraint_inner)
    throw std::domain_error("oracle set has no constraint inner function");
  check_query(*set.constraint_inner, x, "sample_constraint_inner");
  set.constraint_inner->sample(x, phi, value, jacobian);
}

void sample_constraint_outer(const StochasticOracleSet& set, const Vector& w,
                             RngStream& psi, Vector& values, Matrix& grads) {
  if (!set.constraint_outer) {
    values.resize(0);
    grads.resize(w.size(), 0);
    return;
  }
  require_dim(w, set.constraint_outer->input_dim(), "sample_constraint_outer");
  require_finite(w, "sample_constraint_outer");
  set.constraint_outer->sample(w, psi, values, grads);
}

void RowSampledInner::sample(const Vector& x, RngStream& rng, Vector& value,
                             Matrix& jacobian) const {
  row_eval(rng.uniform_index(num_rows()), x, value, jacobian);
}

void RowSampledInner::mean(const Vector& x, Vector& value,
                           Matrix& jacobian) const {
  const std::size_t n = num_rows();
  Vector row_value;
  Matrix row_jac;
  value = Vector::Zero(output_dim());
  jacobian = Matrix::Zero(input_dim(), output_dim());
  for (std::size_t i = 0; i < n; ++i) {
    row_eval(i, x, row_value, row_jac);
    value += row_value;
    jacobian += row_jac;
  }
  value /= double(n);
  jacobian /= double(n);
}

AffineInnerOracle::AffineInnerOracle(Matrix s, Vector c, double noise_std)
    : s_(std::move(s)), c_(std::move(c)), noise_std_(noise_std) {
  if (c_.size() != s_.rows())
    throw ConfigError("affine inner: offset dimension mismatch");
}

void AffineInnerOracle::sample(const Vector& x, RngStream& rng, Vector& value,
                               Matrix& jacobian) const {
  value = s_ * x + c_;
  if (noise_std_ != 0.0) {
    for (Index i = 0; i < value.size(); ++i)
      value[i] += noise_std_ * rng.gaussian();
  }
  jacobian = s_.transpose();
}

void AffineInnerOracle::mean(const Vector& x, Vector& value,
                             Matrix& jacobian) const {
  value = s_ * x + c_;
  jacobian = s_.transpose();
}

QuadraticObjectiveOuter::QuadraticObjectiveOuter(Index dim, double scale,
                                                 double noise_std)
    : dim_(dim), scale_(scale), noise_std_(noise_std) {}

void QuadraticObjectiveOuter::sample_grad(const Vector& y, RngStream& rng,
                                          Vector& grad) const {
  grad = 2.0 * scale_ * y;
  if (noise_std_ != 0.0) {
    for (Index i = 0; i < grad.size(); ++i)
      grad[i] += noise_std_ * rng.gaussian();
  }
}

double QuadraticObjectiveOuter::mean_value(const Vector& y) const {
  return scale_ * y.squaredNorm();
}

void QuadraticObjectiveOuter::mean_grad(const Vector& y, Vector& grad) const {
  grad = 2.0 * scale_ * y;
}

void IdentityObjectiveOuter::sample_grad(const Vector& y, RngStream&,
                                         Vector& grad) const {
  grad = Vector::Ones(1);
  (void)y;
}

double IdentityObjectiveOuter::mean_value(const Vector& y) const {
  return y[0];
}

void IdentityObjectiveOuter::mean_grad(const Vector&, Vector& grad) const {
  grad = Vector::Ones(1);
}

AffineConstraintOuter::AffineConstraintOuter(Matrix r, Vector q,
                                             double noise_std)
    : r_(std::move(r)), q_(std::move(q)), noise_std_(noise_std) {
  if (q_.size() != r_.rows())
    throw ConfigError("affine constraint: offset dimension mismatch");
}

void AffineConstraintOuter::sample(const Vector& w, RngStream& rng,
                                   Vector& values, Matrix& grads) const {
  values = r_ * w + q_;
  if (noise_std_ != 0.0) {
    for (Index j = 0; j < values.size(); ++j)
      values[j] += noise_std_ * rng.gaussian();
  }
  grads = r_.transpose();
}

void AffineConstraintOuter::mean(const Vector& w, Vector& values,
                                 Matrix& grads) const {
  values = r_ * w + q_;
  grads = r_.transpose();
}

}  // namespace csspa
