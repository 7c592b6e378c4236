#ifndef CSSPA_FAIR_CLASSIFICATION_HPP
#define CSSPA_FAIR_CLASSIFICATION_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "csspa/problem.hpp"

namespace csspa {

struct ClassificationRow {
  Vector features;
  int label = 0;       // {0, 1}
  bool s_plus = false; // sensitive group
};

struct ClassificationDataset {
  std::vector<ClassificationRow> rows;
  double feature_norm_bound = 0.0;  // max observed ||x||

  Index feature_dim() const;
  std::size_t count_s_plus() const;
  std::size_t count_s_minus() const;
};

// Rebuilds the row table with a trailing constant-1 feature (the intercept)
// and refreshes the norm bound.
ClassificationDataset with_bias_feature(const ClassificationDataset& data);

enum class Approximation { A1, A2, A3 };

struct FairClfConfig {
  double mu = 1.0;    // ridge weight
  double tau = 0.1;   // fairness budget
  Approximation approximation = Approximation::A1;
  double c = 1.0;     // c1 / c2 / c3 for the chosen approximation
  double huber_eps = 0.05;
  double weight_ball_radius = 10.0;  // D_w
};

// Tuning table for the benchmark runs; tau must be one of
// {0.3, 0.25, 0.2, 0.15, 0.1, 0.05}.
FairClfConfig preset_config(Approximation approximation, double tau);

// Two-branch safeguard for ratios whose denominator is a tracked
// probability: H = z2/z1 for z1 > eps, (z2/eps)(2 - z1/eps) otherwise.
// Continuous (and C^1) across z1 = eps, defined for all z1.
struct HuberRatio {
  double value = 0.0;
  double d1 = 0.0;  // d/dz1
  double d2 = 0.0;  // d/dz2
};
HuberRatio huber_ratio(double z1, double z2, double eps);

// Empirical positive-rate gap between the sensitive groups under the strict
// decision rule w^T x > 0. Throws ConfigError when either group is empty.
double risk_difference(const ClassificationDataset& data, const Vector& w);

// Objective pieces: inner emits the per-row regularized logistic loss
// (m = 1), outer is the identity.
ObjectivePieces logistic_loss_oracle(
    std::shared_ptr<const ClassificationDataset> data, double mu);

// Constraint pieces for the chosen relaxation. A1 yields J = 2 constraints
// over a 6-component inner function, A2 yields J = 1 over 4 components,
// A3 yields J = 1 over 6 components.
ConstraintPieces build_constraint(
    std::shared_ptr<const ClassificationDataset> data,
    const FairClfConfig& config);

ProblemInstance make_fair_clf_problem(
    std::shared_ptr<const ClassificationDataset> data,
    const FairClfConfig& config, bool with_constraint = true);

// ---- CSV ingestion ----

// Column roles: numeric | categorical | sensitive | income.
struct AdultSchema {
  std::map<std::string, std::string> columns;
  std::string sensitive_positive;  // value mapped to s_plus
  std::string income_positive;     // value mapped to label 1
};

AdultSchema load_schema(const std::string& path);

struct IngestReport {
  std::size_t rows_read = 0;
  std::size_t rows_skipped = 0;
  Index feature_dim = 0;
  std::size_t n_s_plus = 0;
  std::size_t n_s_minus = 0;
  std::size_t n_positive_labels = 0;
};

// One-hot encodes categorical columns (levels sorted lexicographically),
// keeps the sensitive attribute out of the feature vector, labels 1 iff the
// income column equals the schema's positive category. Rows with missing or
// unparsable cells are skipped and counted.
ClassificationDataset ingest_adult_csv(const std::string& csv_path,
                                       const AdultSchema& schema,
                                       IngestReport* report = nullptr);

// ---- synthetic benchmark data ----

// Two gaussian groups whose informative feature is shifted by +/- shift, so
// an unconstrained classifier separates mostly along the group attribute.
struct TwoGroupSpec {
  std::size_t n_rows = 400;
  double group_shift = 1.0;
  double noise_feature_weight = 1.0;
  std::uint64_t seed = 0;
};

ClassificationDataset make_two_group_synthetic(const TwoGroupSpec& spec);

}  // namespace csspa

#endif
