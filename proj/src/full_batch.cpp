#include "csspa/full_batch.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace csspa {

FullBatchEvaluator::FullBatchEvaluator(const ProblemInstance& problem)
    : problem_(&problem) {}

double FullBatchEvaluator::objective(const Vector& x, Vector* grad) const {
  const auto& set = problem_->oracles();
  Vector gbar;
  Matrix gjac;
  set.objective_inner->mean(x, gbar, gjac);
  const double value = set.objective_outer->mean_value(gbar);
  if (grad) {
    Vector fgrad;
    set.objective_outer->mean_grad(gbar, fgrad);
    grad->noalias() = gjac * fgrad;
  }
  return value;
}

void FullBatchEvaluator::constraints(const Vector& x, Vector& values,
                                     Matrix* jacobian) const {
  if (problem_->num_constraints() == 0) {
    values.resize(0);
    if (jacobian) jacobian->resize(problem_->decision_dim(), 0);
    return;
  }
  const auto& set = problem_->oracles();
  Vector hbar;
  Matrix hjac;
  set.constraint_inner->mean(x, hbar, hjac);
  Matrix lgrads;
  set.constraint_outer->mean(hbar, values, lgrads);
  if (jacobian) jacobian->noalias() = hjac * lgrads;
}

double FullBatchEvaluator::lagrangian(const Vector& x, const Vector& lambda,
                                      double alpha, double delta,
                                      double theta) const {
  require_dim(lambda, num_constraints(), "lagrangian");
  double value = objective(x);
  Vector lvals;
  constraints(x, lvals);
  for (Index j = 0; j < lvals.size(); ++j)
    value += lambda[j] * (lvals[j] + theta);
  value -= 0.5 * alpha * delta * lambda.squaredNorm();
  return value;
}

void FullBatchEvaluator::inner_objective_mean(const Vector& x,
                                              Vector& gbar) const {
  Matrix scratch;
  problem_->oracles().objective_inner->mean(x, gbar, scratch);
}

void FullBatchEvaluator::inner_constraint_mean(const Vector& x,
                                               Vector& hbar) const {
  if (!problem_->oracles().constraint_inner) {
    hbar.resize(0);
    return;
  }
  Matrix scratch;
  problem_->oracles().constraint_inner->mean(x, hbar, scratch);
}

double kkt_residual(const FullBatchEvaluator& eval, const FeasibleSet& set,
                    const Vector& x, const Vector& lambda, double theta) {
  Vector grad;
  eval.objective(x, &grad);
  Vector lvals;
  Matrix ljac;
  eval.constraints(x, lvals, &ljac);
  if (lvals.size() > 0) grad.noalias() += ljac * lambda;

  const double stationarity = (x - project(set, x - grad)).norm();
  double violation = 0.0;
  double complementarity = 0.0;
  for (Index j = 0; j < lvals.size(); ++j) {
    violation = std::max(violation, std::max(0.0, lvals[j] + theta));
    complementarity += lambda[j] * std::abs(lvals[j] + theta);
  }
  return std::max({stationarity, violation, complementarity});
}

namespace {

// Shifted quadratic penalty of the augmented-Lagrangian method: value and
// d/du of psi_rho(u, lambda).
double alm_penalty(double u, double lambda, double rho, double* du) {
  const double s = lambda + rho * u;
  if (s >= 0.0) {
    if (du) *du = s;
    return lambda * u + 0.5 * rho * u * u;
  }
  if (du) *du = 0.0;
  return -0.5 * lambda * lambda / rho;
}

double alm_value(const FullBatchEvaluator& eval, const Vector& x,
                 const Vector& lambda, double rho, double theta,
                 Vector* grad) {
  double value = eval.objective(x, grad);
  Vector lvals;
  Matrix ljac;
  eval.constraints(x, lvals, grad ? &ljac : nullptr);
  for (Index j = 0; j < lvals.size(); ++j) {
    double du = 0.0;
    value += alm_penalty(lvals[j] + theta, lambda[j], rho, grad ? &du : nullptr);
    if (grad) grad->noalias() += du * ljac.col(j);
  }
  return value;
}

}  // namespace

ReferenceSolution solve_reference(const FullBatchEvaluator& eval,
                                  const FeasibleSet& set, double theta,
                                  double tol, const ReferenceOptions& opts) {
  if (!(tol > 0.0)) throw ConfigError("solve_reference: tol must be > 0");
  const Index n = eval.decision_dim();
  const Index num_con = eval.num_constraints();

  Vector x = project(set, opts.x0 ? *opts.x0 : Vector::Zero(n));
  Vector lambda = Vector::Zero(num_con);
  double rho = opts.rho0;
  double inner_tol = std::max(1e-2, tol);
  double prev_violation = std::numeric_limits<double>::infinity();
  double residual = std::numeric_limits<double>::infinity();
  long budget = opts.max_inner;

  for (int outer = 0; outer < opts.max_outer && budget > 0; ++outer) {
    // Proximal gradient with backtracking on the penalized objective.
    double eta = 1.0;
    Vector grad(n), x_next, dx;
    while (budget-- > 0) {
      const double value = alm_value(eval, x, lambda, rho, theta, &grad);
      if (!std::isfinite(value) || !grad.allFinite())
        throw DivergenceError("solve_reference: non-finite penalized value");
      double next_value = value;
      for (int ls = 0; ls < 60; ++ls) {
        x_next = project(set, x - eta * grad);
        dx = x_next - x;
        next_value = alm_value(eval, x_next, lambda, rho, theta, nullptr);
        const double model = value + grad.dot(dx) +
                             0.5 * dx.squaredNorm() / eta +
                             1e-14 * (std::abs(value) + 1.0);
        if (next_value <= model) break;
        eta *= 0.5;
      }
      const double mapping = dx.norm() / eta;
      x = x_next;
      if (mapping <= inner_tol) break;
      eta = std::min(eta * 1.25, 1e8);
    }

    Vector lvals;
    eval.constraints(x, lvals);
    double violation = 0.0;
    for (Index j = 0; j < num_con; ++j) {
      lambda[j] = std::max(0.0, lambda[j] + rho * (lvals[j] + theta));
      violation = std::max(violation, std::max(0.0, lvals[j] + theta));
    }

    residual = kkt_residual(eval, set, x, lambda, theta);
    if (residual <= tol) {
      ReferenceSolution ref;
      ref.x_star = x;
      ref.lambda_star = lambda;
      ref.f_star = eval.objective(x);
      ref.kkt_residual = residual;
      ref.theta = theta;
      return ref;
    }

    if (num_con > 0 && violation > 0.25 * prev_violation && violation > tol)
      rho = std::min(rho * 4.0, opts.rho_max);
    prev_violation = std::max(violation, 1e-300);
    inner_tol = std::max(inner_tol * 0.2, tol * 0.1);
  }

  std::ostringstream msg;
  msg << "solve_reference: did not reach tol " << tol
      << ", final KKT residual " << residual;
  throw DivergenceError(msg.str());
}

std::string reference_to_json(const ReferenceSolution& ref) {
  nlohmann::json j;
  j["x_star"] = std::vector<double>(ref.x_star.begin(), ref.x_star.end());
  j["lambda_star"] =
      std::vector<double>(ref.lambda_star.begin(), ref.lambda_star.end());
  j["f_star"] = ref.f_star;
  j["kkt_residual"] = ref.kkt_residual;
  j["theta"] = ref.theta;
  j["seed"] = ref.seed;
  return j.dump(2);
}

ReferenceSolution reference_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  ReferenceSolution ref;
  const auto xs = j.at("x_star").get<std::vector<double>>();
  const auto ls = j.at("lambda_star").get<std::vector<double>>();
  ref.x_star = Eigen::Map<const Vector>(xs.data(), Index(xs.size()));
  ref.lambda_star = Eigen::Map<const Vector>(ls.data(), Index(ls.size()));
  ref.f_star = j.at("f_star").get<double>();
  ref.kkt_residual = j.at("kkt_residual").get<double>();
  ref.theta = j.at("theta").get<double>();
  ref.seed = j.at("seed").get<std::uint64_t>();
  return ref;
}

void save_reference(const std::string& path, const ReferenceSolution& ref) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write reference file: " + path);
  out << reference_to_json(ref) << "\n";
}

ReferenceSolution load_reference(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read reference file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return reference_from_json(buf.str());
  } catch (const nlohmann::json::exception& e) {
    throw IoError("malformed reference file " + path + ": " + e.what());
  }
}

}  // namespace csspa
