#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace probtr {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Sample set too ill-conditioned (or rank deficient) to determine a model.
class PoisednessError : public Error {
 public:
  using Error::Error;
};

// An iterative solver ran out of iterations.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration value or malformed configuration text.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A certified property (decrease bound, runtime monitor) was violated. Always
// an implementation bug; runs abort on it.
class AssertionFailure : public Error {
 public:
  using Error::Error;
};

/// Black-box objective with evaluation accounting.
///
/// Optimization drivers only ever call operator(). The analytic gradient and
/// Hessian, when supplied, exist for model-quality diagnostics.
class Objective {
 public:
  using Function = std::function<double(const Vector&)>;
  using Gradient = std::function<Vector(const Vector&)>;
  using Hessian = std::function<Matrix(const Vector&)>;

  Objective(int dimension, Function f);

  Objective& with_gradient(Gradient gradient);
  Objective& with_hessian(Hessian hessian);
  Objective& with_lower_bound(double f_star);

  int dimension() const { return dimension_; }

  // Counted evaluation.
  double operator()(const Vector& x);
  std::int64_t eval_count() const { return eval_count_; }

  // Uncounted evaluation for diagnostics that must not perturb the budget.
  double diagnostic_value(const Vector& x) const;

  bool has_gradient() const { return static_cast<bool>(gradient_); }
  bool has_hessian() const { return static_cast<bool>(hessian_); }
  Vector gradient(const Vector& x) const;
  Matrix hessian(const Vector& x) const;
  std::optional<double> lower_bound() const { return lower_bound_; }

 private:
  void check_dimension(const Vector& x) const;

  int dimension_;
  Function f_;
  Gradient gradient_;
  Hessian hessian_;
  std::optional<double> lower_bound_;
  std::int64_t eval_count_ = 0;
};

/// m(center + s) = c + g's + s'Hs/2, with H stored symmetric.
struct QuadraticModel {
  Vector center;
  double c = 0.0;
  Vector g;
  Matrix H;

  QuadraticModel() = default;
  QuadraticModel(Vector center, double c, Vector g, Matrix H);

  int dimension() const { return static_cast<int>(g.size()); }
  double value_at_step(const Vector& s) const;
  double value(const Vector& x) const { return value_at_step(x - center); }
  Vector gradient_at_step(const Vector& s) const { return g + H * s; }
  Vector gradient(const Vector& x) const { return gradient_at_step(x - center); }
};

struct TrustRegionConfig {
  double eta1 = 0.1;
  double eta2 = 1.0;
  double eta3 = 0.5;  // three-threshold driver only
  double gamma = 2.0;
  double delta_max = 10.0;
  double delta0 = 1.0;
  double kappa_bhm = 1e6;  // first-order drivers only
  std::int64_t budget = 100000;
  std::uint64_t seed = 0;
  double delta_min = 1e-12;
  double f_target = -std::numeric_limits<double>::infinity();
  // Also consider the exact model minimizer in the ball when choosing steps.
  bool model_minimizer_step = true;

  // Throws ConfigError naming the first violated range.
  void validate() const;
};

struct IterationRecord {
  std::int64_t iter = 0;
  bool success = false;
  double f = 0.0;
  double delta = 0.0;
  std::optional<double> rho;  // nullopt: model decrease too small to define
};

struct ArchivedPoint {
  Vector x;
  double f;
};

struct PathPoint {
  std::int64_t k;
  Vector x;
  double f;
};

struct TrustRegionState {
  Vector x;
  double f = std::numeric_limits<double>::quiet_NaN();
  double delta = 1.0;
  std::int64_t k = 0;
  std::vector<IterationRecord> history;
  std::vector<ArchivedPoint> archive;
  std::vector<PathPoint> path;

  // Archives (x, f) and returns f.
  double record_evaluation(const Vector& point, double value);
};

// Model decreases at or below this are treated as zero.
inline constexpr double kRhoDenominatorEpsilon = 1e-30;

/// Ratio of actual to predicted decrease. nullopt when the predicted decrease
/// is not positive beyond kRhoDenominatorEpsilon; drivers treat that as an
/// unsuccessful iteration.
std::optional<double> compute_rho(double f_old, double f_new, double m_old, double m_new);

}  // namespace probtr
