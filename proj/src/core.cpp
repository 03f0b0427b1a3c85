#include "probtr/core.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace probtr {

Objective::Objective(int dimension, Function f) : dimension_(dimension), f_(std::move(f)) {
  if (dimension_ <= 0) throw std::invalid_argument("Objective: dimension must be positive");
  if (!f_) throw std::invalid_argument("Objective: empty function");
}

Objective& Objective::with_gradient(Gradient gradient) {
  gradient_ = std::move(gradient);
  return *this;
}

Objective& Objective::with_hessian(Hessian hessian) {
  hessian_ = std::move(hessian);
  return *this;
}

Objective& Objective::with_lower_bound(double f_star) {
  lower_bound_ = f_star;
  return *this;
}

void Objective::check_dimension(const Vector& x) const {
  if (x.size() != dimension_) {
    throw std::invalid_argument("Objective: point has dimension " + std::to_string(x.size()) +
                                ", expected " + std::to_string(dimension_));
  }
}

double Objective::operator()(const Vector& x) {
  check_dimension(x);
  ++eval_count_;
  return f_(x);
}

double Objective::diagnostic_value(const Vector& x) const {
  check_dimension(x);
  return f_(x);
}

Vector Objective::gradient(const Vector& x) const {
  if (!gradient_) throw Error("Objective: no analytic gradient available");
  check_dimension(x);
  return gradient_(x);
}

Matrix Objective::hessian(const Vector& x) const {
  if (!hessian_) throw Error("Objective: no analytic Hessian available");
  check_dimension(x);
  return hessian_(x);
}

QuadraticModel::QuadraticModel(Vector center_, double c_, Vector g_, Matrix H_)
    : center(std::move(center_)), c(c_), g(std::move(g_)), H(std::move(H_)) {
  if (center.size() != g.size() || H.rows() != g.size() || H.cols() != g.size()) {
    throw std::invalid_argument("QuadraticModel: inconsistent dimensions");
  }
  H = 0.5 * (H + H.transpose()).eval();
}

double QuadraticModel::value_at_step(const Vector& s) const {
  return c + g.dot(s) + 0.5 * s.dot(H * s);
}

void TrustRegionConfig::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError("invalid trust-region config: " + what); };
  if (!(eta1 > 0.0 && eta1 < 1.0)) fail("eta1 must lie in (0, 1)");
  if (!(eta2 > 0.0)) fail("eta2 must be positive");
  if (!(eta3 > 0.0 && eta3 <= eta2)) fail("eta3 must lie in (0, eta2]");
  if (!(gamma > 1.0)) fail("gamma must exceed 1");
  if (!(delta_max > 0.0)) fail("delta_max must be positive");
  if (!(delta0 > 0.0 && delta0 <= delta_max)) fail("delta0 must lie in (0, delta_max]");
  if (!(kappa_bhm > 0.0)) fail("kappa_bhm must be positive");
  if (budget < 0) fail("budget must be non-negative");
  if (!(delta_min >= 0.0)) fail("delta_min must be non-negative");
}

double TrustRegionState::record_evaluation(const Vector& point, double value) {
  archive.push_back({point, value});
  return value;
}

std::optional<double> compute_rho(double f_old, double f_new, double m_old, double m_new) {
  const double predicted = m_old - m_new;
  if (!(predicted > kRhoDenominatorEpsilon)) return std::nullopt;
  return (f_old - f_new) / predicted;
}

}  // namespace probtr
