#ifndef CSSPA_FAIR_SPAM_HPP
#define CSSPA_FAIR_SPAM_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "csspa/problem.hpp"

namespace csspa {

// Scalar basis functions zeta_1..zeta_p applied per feature; the default is
// the monomial family u, u^2, ..., u^p. Coefficients are laid out
// feature-major: w[(j * p) + k] multiplies zeta_{k+1}(x_j).
struct SpamBasis {
  int p = 4;
  std::vector<std::function<double(double)>> functions;  // empty = monomials

  static SpamBasis polynomial(int p);
  double eval(int k, double u) const;  // k in [0, p)
};

struct RegressionDataset {
  Matrix features;  // N x d
  Vector targets;   // N
  Vector sensitive; // N

  Index n_points() const { return features.rows(); }
  Index n_features() const { return features.cols(); }
};

struct SpamSyntheticSpec {
  std::size_t n_points = 2000;
  Index d_features = 30;
  double noise_std = 0.31622776601683794;  // sqrt(0.1)
  std::uint64_t seed = 0;
  // r1..r4 and the sensitive map s = a * x_1 + b; drawn uniformly on [0, 1]
  // from the seed when unset.
  std::optional<std::array<double, 4>> coefficients;
  std::optional<double> a, b;
};

// Features uniform on [0, 1]^d; y = r1 x1^4 + r2 x2^3 + r3 x3^2 + r4 x4 +
// gaussian noise, the remaining features irrelevant; s = a x1 + b exactly.
// When realized is non-null it receives the spec with the drawn r, a, b
// filled in.
RegressionDataset generate_spam_synthetic(const SpamSyntheticSpec& spec,
                                          SpamSyntheticSpec* realized = nullptr);

// Inner (m = d + 1): [squared residual, squared per-feature partial fits].
// Outer: f(z) = z1 + mu * sum_j sqrt(z_{j+1} + sqrt_eps).
ObjectivePieces build_spam_objective(
    std::shared_ptr<const RegressionDataset> data, const SpamBasis& basis,
    double mu, double sqrt_eps = 1e-8);

// Inner (3 components): [s * pred, s, pred]. Outer: ell_1 = z1 - z2 z3 -
// tau, ell_2 = -(z1 - z2 z3) - tau, so J = 2.
ConstraintPieces build_spam_constraint(
    std::shared_ptr<const RegressionDataset> data, const SpamBasis& basis,
    double tau);

ProblemInstance make_fair_spam_problem(
    std::shared_ptr<const RegressionDataset> data, const SpamBasis& basis,
    double mu, double tau, double ball_radius, bool with_constraint = true);

// Full prediction sum_j sum_k w_jk zeta_{k+1}(x_j) for one feature row.
double spam_prediction(const SpamBasis& basis, const Vector& w,
                       const Eigen::Ref<const Eigen::RowVectorXd>& x);

// CSV columns x1..xd,y,s. The sidecar metadata file (path + ".meta.json")
// records the generator spec when one is supplied.
void write_spam_csv(const std::string& path, const RegressionDataset& data,
                    const SpamSyntheticSpec* meta = nullptr);
RegressionDataset read_spam_csv(const std::string& path);

}  // namespace csspa

#endif
