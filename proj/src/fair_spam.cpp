#include "csspa/fair_spam.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "csspa/rng.hpp"

namespace csspa {

SpamBasis SpamBasis::polynomial(int p) {
  if (p < 1) throw ConfigError("spam basis: p must be >= 1");
  SpamBasis basis;
  basis.p = p;
  return basis;
}

double SpamBasis::eval(int k, double u) const {
  if (!functions.empty()) return functions.at(std::size_t(k))(u);
  double v = u;
  for (int i = 0; i < k; ++i) v *= u;
  return v;
}

RegressionDataset generate_spam_synthetic(const SpamSyntheticSpec& spec,
                                          SpamSyntheticSpec* realized) {
  if (spec.d_features < 4)
    throw ConfigError("spam synthetic: needs at least 4 features");
  if (spec.n_points < 1) throw ConfigError("spam synthetic: needs points");
  if (spec.noise_std < 0.0)
    throw ConfigError("spam synthetic: noise_std must be >= 0");

  RngStream rng(spec.seed, 201);
  std::array<double, 4> r;
  if (spec.coefficients) {
    r = *spec.coefficients;
  } else {
    for (auto& v : r) v = rng.uniform();
  }
  const double a = spec.a ? *spec.a : rng.uniform();
  const double b = spec.b ? *spec.b : rng.uniform();

  const Index n = Index(spec.n_points);
  const Index d = spec.d_features;
  RegressionDataset data;
  data.features.resize(n, d);
  data.targets.resize(n);
  data.sensitive.resize(n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < d; ++j) data.features(i, j) = rng.uniform();
    const double x1 = data.features(i, 0);
    const double x2 = data.features(i, 1);
    const double x3 = data.features(i, 2);
    const double x4 = data.features(i, 3);
    const double signal = r[0] * x1 * x1 * x1 * x1 + r[1] * x2 * x2 * x2 +
                          r[2] * x3 * x3 + r[3] * x4;
    data.targets[i] = signal + spec.noise_std * rng.gaussian();
    data.sensitive[i] = a * x1 + b;
  }

  if (realized) {
    *realized = spec;
    realized->coefficients = r;
    realized->a = a;
    realized->b = b;
  }
  return data;
}

double spam_prediction(const SpamBasis& basis, const Vector& w,
                       const Eigen::Ref<const Eigen::RowVectorXd>& x) {
  const int p = basis.p;
  require_dim(w, x.size() * p, "spam_prediction");
  double pred = 0.0;
  for (Index j = 0; j < x.size(); ++j)
    for (int k = 0; k < p; ++k) pred += w[j * p + k] * basis.eval(k, x[j]);
  return pred;
}

namespace {

// Rows of the basis design matrix: phi[(j * p) + k] = zeta_{k+1}(x_j).
Matrix make_design(const RegressionDataset& data, const SpamBasis& basis) {
  const Index n_rows = data.n_points();
  const Index d = data.n_features();
  const int p = basis.p;
  Matrix phi(n_rows, d * p);
  for (Index i = 0; i < n_rows; ++i)
    for (Index j = 0; j < d; ++j)
      for (int k = 0; k < p; ++k)
        phi(i, j * p + k) = basis.eval(k, data.features(i, j));
  return phi;
}

class SpamObjectiveInner final : public RowSampledInner {
 public:
  SpamObjectiveInner(std::shared_ptr<const RegressionDataset> data,
                     const SpamBasis& basis)
      : data_(std::move(data)),
        d_(data_->n_features()),
        p_(basis.p),
        phi_(make_design(*data_, basis)) {
    const double n = double(data_->n_points());
    second_moment_ = phi_.transpose() * phi_ / n;
    target_cross_ = phi_.transpose() * data_->targets / n;
    target_square_ = data_->targets.squaredNorm() / n;
  }

  Index input_dim() const override { return d_ * p_; }
  Index output_dim() const override { return d_ + 1; }
  std::size_t num_rows() const override {
    return std::size_t(data_->n_points());
  }

  void row_eval(std::size_t row, const Vector& w, Vector& value,
                Matrix& jacobian) const override {
    const auto phi = phi_.row(Index(row));
    value.resize(d_ + 1);
    jacobian.setZero(input_dim(), d_ + 1);
    double pred = 0.0;
    for (Index j = 0; j < d_; ++j) {
      const double partial = phi.segment(j * p_, p_).dot(w.segment(j * p_, p_));
      value[j + 1] = partial * partial;
      jacobian.col(j + 1).segment(j * p_, p_) =
          2.0 * partial * phi.segment(j * p_, p_).transpose();
      pred += partial;
    }
    const double residual = data_->targets[Index(row)] - pred;
    value[0] = residual * residual;
    jacobian.col(0) = -2.0 * residual * phi.transpose();
  }

  // Exact expectations through the precomputed second moments.
  void mean(const Vector& w, Vector& value, Matrix& jacobian) const override {
    require_dim(w, input_dim(), "spam objective mean");
    value.resize(d_ + 1);
    jacobian.setZero(input_dim(), d_ + 1);
    const Vector aw = second_moment_ * w;
    value[0] = w.dot(aw) - 2.0 * target_cross_.dot(w) + target_square_;
    jacobian.col(0) = 2.0 * (aw - target_cross_);
    for (Index j = 0; j < d_; ++j) {
      const auto block = second_moment_.block(j * p_, j * p_, p_, p_);
      const auto wj = w.segment(j * p_, p_);
      const Vector bw = block * wj;
      value[j + 1] = wj.dot(bw);
      jacobian.col(j + 1).segment(j * p_, p_) = 2.0 * bw;
    }
  }

 private:
  std::shared_ptr<const RegressionDataset> data_;
  Index d_;
  int p_;
  Matrix phi_;
  Matrix second_moment_;  // E[phi phi^T]
  Vector target_cross_;   // E[y phi]
  double target_square_ = 0.0;
};

class SpamConstraintInner final : public RowSampledInner {
 public:
  SpamConstraintInner(std::shared_ptr<const RegressionDataset> data,
                      const SpamBasis& basis)
      : data_(std::move(data)),
        d_(data_->n_features()),
        p_(basis.p),
        phi_(make_design(*data_, basis)) {
    const double n = double(data_->n_points());
    sens_cross_ = phi_.transpose() * data_->sensitive / n;
    sens_mean_ = data_->sensitive.mean();
    phi_mean_ = phi_.colwise().mean();
  }

  Index input_dim() const override { return d_ * p_; }
  Index output_dim() const override { return 3; }
  std::size_t num_rows() const override {
    return std::size_t(data_->n_points());
  }

  void row_eval(std::size_t row, const Vector& w, Vector& value,
                Matrix& jacobian) const override {
    const auto phi = phi_.row(Index(row));
    const double pred = phi.dot(w);
    const double s = data_->sensitive[Index(row)];
    value.resize(3);
    value[0] = s * pred;
    value[1] = s;
    value[2] = pred;
    jacobian.resize(input_dim(), 3);
    jacobian.col(0) = s * phi.transpose();
    jacobian.col(1).setZero();
    jacobian.col(2) = phi.transpose();
  }

  void mean(const Vector& w, Vector& value, Matrix& jacobian) const override {
    require_dim(w, input_dim(), "spam constraint mean");
    value.resize(3);
    value[0] = sens_cross_.dot(w);
    value[1] = sens_mean_;
    value[2] = phi_mean_.dot(w);
    jacobian.resize(input_dim(), 3);
    jacobian.col(0) = sens_cross_;
    jacobian.col(1).setZero();
    jacobian.col(2) = phi_mean_;
  }

 private:
  std::shared_ptr<const RegressionDataset> data_;
  Index d_;
  int p_;
  Matrix phi_;
  Vector sens_cross_;  // E[s phi]
  double sens_mean_ = 0.0;
  Vector phi_mean_;    // E[phi]
};

class SpamObjectiveOuter final : public ObjectiveOuterOracle {
 public:
  SpamObjectiveOuter(Index d, double mu, double sqrt_eps)
      : d_(d), mu_(mu), sqrt_eps_(sqrt_eps) {}

  Index input_dim() const override { return d_ + 1; }

  void sample_grad(const Vector& z, RngStream&, Vector& grad) const override {
    mean_grad(z, grad);
  }

  double mean_value(const Vector& z) const override {
    double v = z[0];
    for (Index j = 1; j <= d_; ++j)
      v += mu_ * std::sqrt(std::max(z[j], 0.0) + sqrt_eps_);
    return v;
  }

  void mean_grad(const Vector& z, Vector& grad) const override {
    grad.resize(d_ + 1);
    grad[0] = 1.0;
    for (Index j = 1; j <= d_; ++j)
      grad[j] = 0.5 * mu_ / std::sqrt(std::max(z[j], 0.0) + sqrt_eps_);
  }

 private:
  Index d_;
  double mu_;
  double sqrt_eps_;
};

// ell_1 = z1 - z2 z3 - tau, ell_2 = -(z1 - z2 z3) - tau; the product z2 z3
// is what makes the covariance a genuine non-linear function of
// expectations.
class SpamConstraintOuter final : public ConstraintOuterOracle {
 public:
  explicit SpamConstraintOuter(double tau) : tau_(tau) {}

  Index input_dim() const override { return 3; }
  Index num_constraints() const override { return 2; }

  void sample(const Vector& z, RngStream&, Vector& values,
              Matrix& grads) const override {
    mean(z, values, grads);
  }

  void mean(const Vector& z, Vector& values, Matrix& grads) const override {
    require_dim(z, 3, "spam constraint outer");
    const double cov = z[0] - z[1] * z[2];
    values.resize(2);
    values[0] = cov - tau_;
    values[1] = -cov - tau_;
    grads.resize(3, 2);
    grads(0, 0) = 1.0;
    grads(1, 0) = -z[2];
    grads(2, 0) = -z[1];
    grads.col(1) = -grads.col(0);
  }

 private:
  double tau_;
};

}  // namespace

ObjectivePieces build_spam_objective(
    std::shared_ptr<const RegressionDataset> data, const SpamBasis& basis,
    double mu, double sqrt_eps) {
  if (mu < 0.0) throw ConfigError("spam objective: mu must be >= 0");
  if (!(sqrt_eps > 0.0))
    throw ConfigError("spam objective: sqrt_eps must be > 0");
  ObjectivePieces pieces;
  pieces.inner = std::make_shared<SpamObjectiveInner>(data, basis);
  pieces.outer = std::make_shared<SpamObjectiveOuter>(data->n_features(), mu,
                                                      sqrt_eps);
  return pieces;
}

ConstraintPieces build_spam_constraint(
    std::shared_ptr<const RegressionDataset> data, const SpamBasis& basis,
    double tau) {
  if (!(tau > 0.0)) throw ConfigError("spam constraint: tau must be > 0");
  ConstraintPieces pieces;
  pieces.inner = std::make_shared<SpamConstraintInner>(data, basis);
  pieces.outer = std::make_shared<SpamConstraintOuter>(tau);
  return pieces;
}

ProblemInstance make_fair_spam_problem(
    std::shared_ptr<const RegressionDataset> data, const SpamBasis& basis,
    double mu, double tau, double ball_radius, bool with_constraint) {
  if (!(ball_radius > 0.0))
    throw ConfigError("spam problem: ball radius must be > 0");
  StochasticOracleSet set;
  auto objective = build_spam_objective(data, basis, mu);
  set.objective_inner = objective.inner;
  set.objective_outer = objective.outer;
  if (with_constraint) {
    auto constraint = build_spam_constraint(data, basis, tau);
    set.constraint_inner = constraint.inner;
    set.constraint_outer = constraint.outer;
  }
  const Index n = data->n_features() * basis.p;
  auto ball = FeasibleSet::l2_ball(Vector::Zero(n), ball_radius);
  return ProblemInstance(std::move(set), std::move(ball));
}

void write_spam_csv(const std::string& path, const RegressionDataset& data,
                    const SpamSyntheticSpec* meta) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write dataset file: " + path);
  for (Index j = 0; j < data.n_features(); ++j) out << "x" << (j + 1) << ",";
  out << "y,s\n";
  char buf[32];
  auto put = [&](double v, char sep) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf << sep;
  };
  for (Index i = 0; i < data.n_points(); ++i) {
    for (Index j = 0; j < data.n_features(); ++j)
      put(data.features(i, j), ',');
    put(data.targets[i], ',');
    put(data.sensitive[i], '\n');
  }
  if (meta) {
    nlohmann::json j;
    j["n_points"] = meta->n_points;
    j["d_features"] = meta->d_features;
    j["noise_std"] = meta->noise_std;
    j["seed"] = meta->seed;
    if (meta->coefficients)
      j["r"] = std::vector<double>(meta->coefficients->begin(),
                                   meta->coefficients->end());
    if (meta->a) j["a"] = *meta->a;
    if (meta->b) j["b"] = *meta->b;
    std::ofstream mout(path + ".meta.json");
    if (!mout) throw IoError("cannot write metadata file: " + path);
    mout << j.dump(2) << "\n";
  }
}

RegressionDataset read_spam_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read dataset file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty dataset file: " + path);

  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  if (header.size() < 3 || header[header.size() - 2] != "y" ||
      header.back() != "s")
    throw IoError("dataset file must end with columns y,s: " + path);
  const Index d = Index(header.size()) - 2;

  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (Index(row.size()) != d + 2)
      throw IoError("malformed dataset row in " + path);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw IoError("dataset file has no rows: " + path);

  RegressionDataset data;
  data.features.resize(Index(rows.size()), d);
  data.targets.resize(Index(rows.size()));
  data.sensitive.resize(Index(rows.size()));
  for (Index i = 0; i < Index(rows.size()); ++i) {
    for (Index j = 0; j < d; ++j) data.features(i, j) = rows[std::size_t(i)][std::size_t(j)];
    data.targets[i] = rows[std::size_t(i)][std::size_t(d)];
    data.sensitive[i] = rows[std::size_t(i)][std::size_t(d) + 1];
  }
  return data;
}

}  // namespace csspa
