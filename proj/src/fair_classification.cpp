#include "csspa/fair_classification.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "csspa/rng.hpp"

namespace csspa {

Index ClassificationDataset::feature_dim() const {
  return rows.empty() ? 0 : rows.front().features.size();
}

std::size_t ClassificationDataset::count_s_plus() const {
  std::size_t n = 0;
  for (const auto& r : rows) n += r.s_plus ? 1 : 0;
  return n;
}

std::size_t ClassificationDataset::count_s_minus() const {
  return rows.size() - count_s_plus();
}

ClassificationDataset with_bias_feature(const ClassificationDataset& data) {
  ClassificationDataset out;
  out.rows.reserve(data.rows.size());
  for (const auto& r : data.rows) {
    ClassificationRow nr;
    nr.features.resize(r.features.size() + 1);
    nr.features.head(r.features.size()) = r.features;
    nr.features[r.features.size()] = 1.0;
    nr.label = r.label;
    nr.s_plus = r.s_plus;
    out.feature_norm_bound =
        std::max(out.feature_norm_bound, nr.features.norm());
    out.rows.push_back(std::move(nr));
  }
  return out;
}

FairClfConfig preset_config(Approximation approximation, double tau) {
  struct PresetRow {
    double tau, c1, c2, c3;
  };
  static const PresetRow table[] = {
      {0.30, 1.6706e-5, 1.3270, 1.3270},
      {0.25, 1.0048e-5, 2.0047, 7.9810},
      {0.20, 0.0016, 0.3972, 6.2946},
      {0.15, 4.2064e-4, 1.6746, 1.6746},
      {0.10, 3.9811e-4, 1.9953, 7.9433},
      {0.05, 0.0032, 0.3991, 3.9905},
  };
  for (const auto& row : table) {
    if (std::abs(row.tau - tau) < 1e-12) {
      FairClfConfig cfg;
      cfg.mu = 1.0;
      cfg.tau = row.tau;
      cfg.approximation = approximation;
      switch (approximation) {
        case Approximation::A1: cfg.c = row.c1; break;
        case Approximation::A2: cfg.c = row.c2; break;
        case Approximation::A3: cfg.c = row.c3; break;
      }
      return cfg;
    }
  }
  throw ConfigError("no tuning preset for tau = " + std::to_string(tau));
}

HuberRatio huber_ratio(double z1, double z2, double eps) {
  if (!(eps > 0.0)) throw ConfigError("huber_ratio: eps must be > 0");
  HuberRatio h;
  if (z1 > eps) {
    h.value = z2 / z1;
    h.d1 = -z2 / (z1 * z1);
    h.d2 = 1.0 / z1;
  } else {
    h.value = (z2 / eps) * (2.0 - z1 / eps);
    h.d1 = -z2 / (eps * eps);
    h.d2 = (2.0 - z1 / eps) / eps;
  }
  return h;
}

double risk_difference(const ClassificationDataset& data, const Vector& w) {
  std::size_t plus_total = 0, minus_total = 0;
  std::size_t plus_pos = 0, minus_pos = 0;
  for (const auto& r : data.rows) {
    require_dim(w, r.features.size(), "risk_difference");
    const bool positive = r.features.dot(w) > 0.0;
    if (r.s_plus) {
      ++plus_total;
      plus_pos += positive ? 1 : 0;
    } else {
      ++minus_total;
      minus_pos += positive ? 1 : 0;
    }
  }
  if (plus_total == 0 || minus_total == 0)
    throw ConfigError("risk_difference: a sensitive group is empty");
  return double(plus_pos) / double(plus_total) -
         double(minus_pos) / double(minus_total);
}

namespace {

double softplus(double z) {
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

class LogisticLossInner final : public RowSampledInner {
 public:
  LogisticLossInner(std::shared_ptr<const ClassificationDataset> data,
                    double mu)
      : data_(std::move(data)), mu_(mu) {
    if (data_->rows.empty()) throw ConfigError("logistic loss: empty dataset");
  }

  Index input_dim() const override { return data_->feature_dim(); }
  Index output_dim() const override { return 1; }
  std::size_t num_rows() const override { return data_->rows.size(); }

  void row_eval(std::size_t row, const Vector& w, Vector& value,
                Matrix& jacobian) const override {
    const auto& r = data_->rows[row];
    const double ty = r.label == 1 ? 1.0 : -1.0;
    const double z = -ty * r.features.dot(w);
    value.resize(1);
    value[0] = softplus(z) + 0.5 * mu_ * w.squaredNorm();
    jacobian.resize(w.size(), 1);
    jacobian.col(0) = -ty * sigmoid(z) * r.features + mu_ * w;
  }

 private:
  std::shared_ptr<const ClassificationDataset> data_;
  double mu_;
};

// Indicator-weighted hinge/min components. A1 and A3 share the 6-component
// layout [1{s+}, 1{s+}max(0,1+m), 1{s+}min(1,m), 1{s-}, 1{s-}max(0,1-m),
// 1{s-}min(1,-m)]; A2 drops the min components.
class FairnessConstraintInner final : public RowSampledInner {
 public:
  FairnessConstraintInner(std::shared_ptr<const ClassificationDataset> data,
                          Approximation approximation)
      : data_(std::move(data)), approximation_(approximation) {
    if (data_->rows.empty())
      throw ConfigError("fairness constraint: empty dataset");
  }

  Index input_dim() const override { return data_->feature_dim(); }
  Index output_dim() const override {
    return approximation_ == Approximation::A2 ? 4 : 6;
  }
  std::size_t num_rows() const override { return data_->rows.size(); }

  void row_eval(std::size_t row, const Vector& w, Vector& value,
                Matrix& jacobian) const override {
    const auto& r = data_->rows[row];
    const double m = r.features.dot(w);
    const double plus = r.s_plus ? 1.0 : 0.0;
    const double minus = 1.0 - plus;
    const Index d = output_dim();
    value.resize(d);
    jacobian = Matrix::Zero(w.size(), d);
    if (approximation_ == Approximation::A2) {
      value[0] = plus;
      value[1] = plus * std::max(0.0, 1.0 + m);
      value[2] = minus;
      value[3] = minus * std::max(0.0, 1.0 - m);
      if (plus != 0.0 && 1.0 + m > 0.0) jacobian.col(1) = r.features;
      if (minus != 0.0 && 1.0 - m > 0.0) jacobian.col(3) = -r.features;
    } else {
      value[0] = plus;
      value[1] = plus * std::max(0.0, 1.0 + m);
      value[2] = plus * std::min(1.0, m);
      value[3] = minus;
      value[4] = minus * std::max(0.0, 1.0 - m);
      value[5] = minus * std::min(1.0, -m);
      if (plus != 0.0) {
        if (1.0 + m > 0.0) jacobian.col(1) = r.features;
        if (m < 1.0) jacobian.col(2) = r.features;
      }
      if (minus != 0.0) {
        if (1.0 - m > 0.0) jacobian.col(4) = -r.features;
        if (-m < 1.0) jacobian.col(5) = -r.features;
      }
    }
  }

 private:
  std::shared_ptr<const ClassificationDataset> data_;
  Approximation approximation_;
};

// The outer relaxations are deterministic functions of the tracked vector;
// a sample draw is the function itself.
class FairnessConstraintOuter final : public ConstraintOuterOracle {
 public:
  FairnessConstraintOuter(Approximation approximation, double budget,
                          double eps)
      : approximation_(approximation), budget_(budget), eps_(eps) {}

  Index input_dim() const override {
    return approximation_ == Approximation::A2 ? 4 : 6;
  }
  Index num_constraints() const override {
    return approximation_ == Approximation::A1 ? 2 : 1;
  }

  void sample(const Vector& z, RngStream&, Vector& values,
              Matrix& grads) const override {
    mean(z, values, grads);
  }

  void mean(const Vector& z, Vector& values, Matrix& grads) const override {
    require_dim(z, input_dim(), "fairness outer");
    switch (approximation_) {
      case Approximation::A1: {
        const HuberRatio r12 = huber_ratio(z[0], z[1], eps_);
        const HuberRatio r45 = huber_ratio(z[3], z[4], eps_);
        const HuberRatio r13 = huber_ratio(z[0], z[2], eps_);
        const HuberRatio r46 = huber_ratio(z[3], z[5], eps_);
        values.resize(2);
        values[0] = r12.value + r45.value - 1.0 - budget_;
        values[1] = 1.0 - r13.value - r46.value - budget_;
        grads = Matrix::Zero(6, 2);
        grads(0, 0) = r12.d1;
        grads(1, 0) = r12.d2;
        grads(3, 0) = r45.d1;
        grads(4, 0) = r45.d2;
        grads(0, 1) = -r13.d1;
        grads(2, 1) = -r13.d2;
        grads(3, 1) = -r46.d1;
        grads(5, 1) = -r46.d2;
        break;
      }
      case Approximation::A2: {
        const HuberRatio u = huber_ratio(z[0], z[1], eps_);
        const HuberRatio v = huber_ratio(z[2], z[3], eps_);
        const double r = u.value + v.value - 1.0;
        values.resize(1);
        values[0] = r * r - budget_ * budget_;
        grads.resize(4, 1);
        grads(0, 0) = 2.0 * r * u.d1;
        grads(1, 0) = 2.0 * r * u.d2;
        grads(2, 0) = 2.0 * r * v.d1;
        grads(3, 0) = 2.0 * r * v.d2;
        break;
      }
      case Approximation::A3: {
        const HuberRatio u = huber_ratio(z[0], z[1], eps_);
        const HuberRatio v = huber_ratio(z[3], z[4], eps_);
        const HuberRatio p = huber_ratio(z[0], z[2], eps_);
        const HuberRatio q = huber_ratio(z[3], z[5], eps_);
        values.resize(1);
        values[0] = u.value * u.value + v.value * v.value + 1.0 -
                    budget_ * budget_ - 2.0 * p.value - 2.0 * q.value +
                    2.0 * u.value * v.value;
        const double s = 2.0 * (u.value + v.value);
        grads.resize(6, 1);
        grads(0, 0) = s * u.d1 - 2.0 * p.d1;
        grads(1, 0) = s * u.d2;
        grads(2, 0) = -2.0 * p.d2;
        grads(3, 0) = s * v.d1 - 2.0 * q.d1;
        grads(4, 0) = s * v.d2;
        grads(5, 0) = -2.0 * q.d2;
        break;
      }
    }
  }

 private:
  Approximation approximation_;
  double budget_;  // c1*tau for A1, c2*tau for A2, c3*tau for A3
  double eps_;
};

}  // namespace

ObjectivePieces logistic_loss_oracle(
    std::shared_ptr<const ClassificationDataset> data, double mu) {
  if (mu < 0.0) throw ConfigError("logistic loss: mu must be >= 0");
  ObjectivePieces pieces;
  pieces.inner = std::make_shared<LogisticLossInner>(std::move(data), mu);
  pieces.outer = std::make_shared<IdentityObjectiveOuter>();
  return pieces;
}

ConstraintPieces build_constraint(
    std::shared_ptr<const ClassificationDataset> data,
    const FairClfConfig& config) {
  if (!(config.tau > 0.0)) throw ConfigError("fairness: tau must be > 0");
  if (!(config.c > 0.0)) throw ConfigError("fairness: c must be > 0");
  if (data->count_s_plus() == 0 || data->count_s_minus() == 0)
    throw ConfigError("fairness: both sensitive groups must be nonempty");
  ConstraintPieces pieces;
  pieces.inner = std::make_shared<FairnessConstraintInner>(
      data, config.approximation);
  pieces.outer = std::make_shared<FairnessConstraintOuter>(
      config.approximation, config.c * config.tau, config.huber_eps);
  return pieces;
}

ProblemInstance make_fair_clf_problem(
    std::shared_ptr<const ClassificationDataset> data,
    const FairClfConfig& config, bool with_constraint) {
  if (!(config.weight_ball_radius > 0.0))
    throw ConfigError("fairness: weight ball radius must be > 0");
  const Index n = data->feature_dim();
  StochasticOracleSet set;
  auto objective = logistic_loss_oracle(data, config.mu);
  set.objective_inner = objective.inner;
  set.objective_outer = objective.outer;
  if (with_constraint) {
    auto constraint = build_constraint(data, config);
    set.constraint_inner = constraint.inner;
    set.constraint_outer = constraint.outer;
  }
  auto ball =
      FeasibleSet::l2_ball(Vector::Zero(n), config.weight_ball_radius);
  ProblemInstance problem(std::move(set), std::move(ball));
  AssumptionConstants c;
  const double grad_bound =
      data->feature_norm_bound + config.mu * config.weight_ball_radius;
  c.C_g = grad_bound * grad_bound;
  c.D_x = 2.0 * config.weight_ball_radius;
  c.C_f = 1.0;
  problem.constants = c;
  return problem;
}

// ---- CSV ingestion ----

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

// The income column sometimes carries a trailing period (">50K.").
std::string normalize_category(std::string s) {
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

}  // namespace

AdultSchema load_schema(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read schema file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed schema file " + path + ": " + e.what());
  }
  AdultSchema schema;
  schema.columns = j.at("columns").get<std::map<std::string, std::string>>();
  schema.sensitive_positive = j.at("sensitive_positive").get<std::string>();
  schema.income_positive = j.at("income_positive").get<std::string>();
  int sensitive = 0, income = 0;
  for (const auto& [name, role] : schema.columns) {
    if (role == "sensitive") ++sensitive;
    else if (role == "income") ++income;
    else if (role != "numeric" && role != "categorical")
      throw ConfigError("schema: unknown role '" + role + "' for column '" +
                        name + "'");
  }
  if (sensitive != 1)
    throw ConfigError("schema: exactly one sensitive column is required");
  if (income != 1)
    throw ConfigError("schema: exactly one income column is required");
  return schema;
}

ClassificationDataset ingest_adult_csv(const std::string& csv_path,
                                       const AdultSchema& schema,
                                       IngestReport* report) {
  std::ifstream in(csv_path);
  if (!in) throw IoError("cannot read csv file: " + csv_path);

  std::string line;
  if (!std::getline(in, line)) throw IoError("empty csv file: " + csv_path);
  const auto header = split_csv_line(line);

  std::map<std::string, std::size_t> column_index;
  for (std::size_t i = 0; i < header.size(); ++i) column_index[header[i]] = i;
  for (const auto& [name, role] : schema.columns) {
    if (!column_index.count(name))
      throw ConfigError("csv is missing declared column '" + name + "'");
  }

  std::vector<std::string> numeric_cols, categorical_cols;
  std::string sensitive_col, income_col;
  for (const auto& name : header) {
    const auto it = schema.columns.find(name);
    if (it == schema.columns.end()) continue;
    if (it->second == "numeric") numeric_cols.push_back(name);
    else if (it->second == "categorical") categorical_cols.push_back(name);
    else if (it->second == "sensitive") sensitive_col = name;
    else income_col = name;
  }

  // First pass: keep parsable rows, collect categorical levels.
  std::vector<std::vector<std::string>> raw;
  std::map<std::string, std::set<std::string>> levels;
  std::size_t skipped = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      ++skipped;
      continue;
    }
    bool ok = true;
    for (const auto& name : numeric_cols) {
      const std::string& cell = cells[column_index[name]];
      char* end = nullptr;
      std::strtod(cell.c_str(), &end);
      if (cell.empty() || end != cell.c_str() + cell.size()) {
        ok = false;
        break;
      }
    }
    if (ok && cells[column_index[sensitive_col]].empty()) ok = false;
    if (ok && cells[column_index[income_col]].empty()) ok = false;
    if (!ok) {
      ++skipped;
      continue;
    }
    for (const auto& name : categorical_cols)
      levels[name].insert(cells[column_index[name]]);
    raw.push_back(std::move(cells));
  }

  Index dim = Index(numeric_cols.size());
  std::map<std::string, std::map<std::string, Index>> level_offsets;
  for (const auto& name : categorical_cols) {
    auto& offsets = level_offsets[name];
    for (const auto& level : levels[name]) offsets[level] = dim++;
  }
  if (dim == 0) throw ConfigError("csv yields no feature columns");

  ClassificationDataset data;
  data.rows.reserve(raw.size());
  std::size_t positives = 0;
  for (const auto& cells : raw) {
    ClassificationRow row;
    row.features = Vector::Zero(dim);
    Index k = 0;
    for (const auto& name : numeric_cols)
      row.features[k++] = std::strtod(cells[column_index[name]].c_str(), nullptr);
    for (const auto& name : categorical_cols)
      row.features[level_offsets[name].at(cells[column_index[name]])] = 1.0;
    row.s_plus = cells[column_index[sensitive_col]] ==
                 schema.sensitive_positive;
    row.label = normalize_category(cells[column_index[income_col]]) ==
                        normalize_category(schema.income_positive)
                    ? 1
                    : 0;
    positives += row.label;
    data.feature_norm_bound =
        std::max(data.feature_norm_bound, row.features.norm());
    data.rows.push_back(std::move(row));
  }

  if (data.rows.empty()) throw ConfigError("csv yields no usable rows");
  if (data.count_s_plus() == 0 || data.count_s_minus() == 0)
    throw ConfigError("csv contains a single sensitive group");

  if (report) {
    report->rows_read = data.rows.size();
    report->rows_skipped = skipped;
    report->feature_dim = dim;
    report->n_s_plus = data.count_s_plus();
    report->n_s_minus = data.count_s_minus();
    report->n_positive_labels = positives;
  }
  return data;
}

ClassificationDataset make_two_group_synthetic(const TwoGroupSpec& spec) {
  if (spec.n_rows < 2) throw ConfigError("two-group synthetic: need >= 2 rows");
  RngStream rng(spec.seed, 101);
  ClassificationDataset data;
  data.rows.reserve(spec.n_rows);
  for (std::size_t i = 0; i < spec.n_rows; ++i) {
    ClassificationRow row;
    // Alternate groups so neither is ever empty.
    row.s_plus = (i % 2 == 0);
    const double shift = row.s_plus ? spec.group_shift : -spec.group_shift;
    Vector x(2);
    x[0] = rng.gaussian() + shift;
    x[1] = spec.noise_feature_weight * rng.gaussian();
    row.features = x;
    row.label = (x[0] + 0.5 * x[1] + 0.5 * rng.gaussian()) > 0.0 ? 1 : 0;
    data.feature_norm_bound =
        std::max(data.feature_norm_bound, row.features.norm());
    data.rows.push_back(std::move(row));
  }
  return data;
}

}  // namespace csspa
