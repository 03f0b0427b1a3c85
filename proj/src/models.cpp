#include "probtr/models.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "probtr/l1solver.hpp"
#include "probtr/subproblem.hpp"

namespace probtr {

MonomialBasis::MonomialBasis(int dimension, int degree) : n_(dimension), degree_(degree) {
  if (n_ < 1) throw std::invalid_argument("MonomialBasis: dimension must be positive");
  if (degree_ != 1 && degree_ != 2) throw std::invalid_argument("MonomialBasis: degree must be 1 or 2");
  if (degree_ == 2) {
    for (int i = 0; i < n_; ++i) {
      for (int j = i; j < n_; ++j) pairs_.emplace_back(i, j);
    }
  }
}

int MonomialBasis::size_for(int dimension, int degree) {
  return degree == 1 ? dimension + 1 : (dimension + 1) * (dimension + 2) / 2;
}

int MonomialBasis::size() const { return size_for(n_, degree_); }

Vector MonomialBasis::evaluate(const Vector& x) const {
  if (x.size() != n_) throw std::invalid_argument("MonomialBasis: point has wrong dimension");
  Vector phi(size());
  phi(0) = 1.0;
  phi.segment(1, n_) = x;
  for (std::size_t k = 0; k < pairs_.size(); ++k) {
    const auto [i, j] = pairs_[k];
    phi(linear_size() + static_cast<Eigen::Index>(k)) = (i == j) ? 0.5 * x(i) * x(i) : x(i) * x(j);
  }
  return phi;
}

void QualityConstants::validate() const {
  if (!(kappa_ef > 0.0 && kappa_eg > 0.0 && kappa_eh > 0.0)) {
    throw std::invalid_argument("QualityConstants: constants must be positive");
  }
}

Matrix interpolation_matrix(const MonomialBasis& basis, const SampleSet& Y, bool scaled) {
  if (Y.dimension() != basis.dimension()) {
    throw std::invalid_argument("interpolation_matrix: sample set and basis dimensions differ");
  }
  Matrix M(Y.size(), basis.size());
  for (int i = 0; i < Y.size(); ++i) {
    const Vector& y = Y.points[static_cast<std::size_t>(i)];
    if (y.size() != basis.dimension()) {
      throw std::invalid_argument("interpolation_matrix: point has wrong dimension");
    }
    M.row(i) = basis.evaluate(scaled ? Y.scaled(i) : y).transpose();
  }
  return M;
}

double condition_number(const Matrix& M) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (M.size() == 0 || !M.allFinite()) return inf;
  const Eigen::JacobiSVD<Matrix> svd(M);
  const Vector& sigma = svd.singularValues();
  const double smax = sigma(0);
  const double smin = sigma(sigma.size() - 1);
  const double floor = std::numeric_limits<double>::epsilon() *
                       static_cast<double>(std::max(M.rows(), M.cols())) * smax;
  if (smax == 0.0 || smin <= floor) return inf;
  return smax / smin;
}

double poisedness_condition(const SampleSet& Y, const MonomialBasis& basis) {
  if (Y.size() < 2) return std::numeric_limits<double>::infinity();
  return condition_number(interpolation_matrix(basis, Y, true));
}

QuadraticModel model_from_coefficients(const MonomialBasis& basis, const Vector& alpha,
                                       const Vector& center, double radius) {
  if (alpha.size() != basis.size()) throw std::invalid_argument("model_from_coefficients: bad size");
  const int n = basis.dimension();
  Vector g = alpha.segment(1, n) / radius;
  Matrix H = Matrix::Zero(n, n);
  const double r2 = radius * radius;
  for (int k = 0; k < basis.quadratic_size(); ++k) {
    const auto [i, j] = basis.quadratic_pair(k);
    const double h = alpha(basis.linear_size() + k) / r2;
    H(i, j) = h;
    H(j, i) = h;
  }
  return QuadraticModel(center, alpha(0), std::move(g), std::move(H));
}

namespace {

struct ScaledSystem {
  Matrix M;
  double condition;
};

ScaledSystem prepare(const SampleSet& Y, const Vector& fvals, const MonomialBasis& basis,
                     const char* who) {
  if (fvals.size() != Y.size()) {
    throw std::invalid_argument(std::string(who) + ": value count differs from point count");
  }
  if (!(Y.radius > 0.0)) throw std::invalid_argument(std::string(who) + ": radius must be positive");
  ScaledSystem sys{interpolation_matrix(basis, Y, true), 0.0};
  sys.condition = Y.size() < 2 ? std::numeric_limits<double>::infinity() : condition_number(sys.M);
  if (!(sys.condition <= kPoisednessLimit)) {
    throw PoisednessError(std::string(who) + ": sample set is not poised (condition " +
                          std::to_string(sys.condition) + ")");
  }
  return sys;
}

ModelFit finish(const SampleSet& Y, const Vector& fvals, const MonomialBasis& basis, Vector alpha,
                double condition) {
  ModelFit fit{model_from_coefficients(basis, alpha, Y.center, Y.radius), std::move(alpha), condition};
  for (int i = 0; i < Y.size(); ++i) {
    if (Y.points[static_cast<std::size_t>(i)] == Y.center) {
      fit.model.c = fvals(i);
      break;
    }
  }
  return fit;
}

void check_residual(const Matrix& M, const Vector& alpha, const Vector& f, double tolerance,
                    const char* who) {
  const double scale = std::max(1.0, f.cwiseAbs().maxCoeff());
  const double residual = (M * alpha - f).cwiseAbs().maxCoeff();
  if (!(residual <= tolerance * scale)) {
    throw PoisednessError(std::string(who) + ": interpolation residual " + std::to_string(residual) +
                          " above tolerance");
  }
}

void require_linear_block_rank(const Matrix& M, int linear_size, const char* who) {
  Eigen::ColPivHouseholderQR<Matrix> qr(M.leftCols(linear_size));
  if (qr.rank() < linear_size) {
    throw PoisednessError(std::string(who) + ": linear block is rank deficient");
  }
}

}  // namespace

ModelFit interpolate(const SampleSet& Y, const Vector& fvals, const MonomialBasis& basis) {
  if (Y.size() != basis.size()) {
    throw std::invalid_argument("interpolate: needs exactly " + std::to_string(basis.size()) + " points");
  }
  ScaledSystem sys = prepare(Y, fvals, basis, "interpolate");
  Vector alpha = sys.M.fullPivLu().solve(fvals);
  check_residual(sys.M, alpha, fvals, 1e-8, "interpolate");
  return finish(Y, fvals, basis, std::move(alpha), sys.condition);
}

ModelFit regress(const SampleSet& Y, const Vector& fvals, const MonomialBasis& basis) {
  if (Y.size() <= basis.size()) {
    throw std::invalid_argument("regress: needs more than " + std::to_string(basis.size()) + " points");
  }
  ScaledSystem sys = prepare(Y, fvals, basis, "regress");
  Eigen::ColPivHouseholderQR<Matrix> qr(sys.M);
  if (qr.rank() < sys.M.cols()) throw PoisednessError("regress: rank-deficient system");
  Vector alpha = qr.solve(fvals);
  return finish(Y, fvals, basis, std::move(alpha), sys.condition);
}

ModelFit mfn_model(const SampleSet& Y, const Vector& fvals) {
  const MonomialBasis basis(Y.dimension(), 2);
  const int nl = basis.linear_size();
  if (Y.size() < nl || Y.size() > basis.size()) {
    throw std::invalid_argument("mfn_model: needs between " + std::to_string(nl) + " and " +
                                std::to_string(basis.size()) + " points");
  }
  ScaledSystem sys = prepare(Y, fvals, basis, "mfn_model");
  require_linear_block_rank(sys.M, nl, "mfn_model");

  const Matrix ML = sys.M.leftCols(nl);
  const Matrix MQ = sys.M.rightCols(basis.quadratic_size());
  const Eigen::Index rows = sys.M.rows();
  Matrix K = Matrix::Zero(rows + nl, rows + nl);
  K.topLeftCorner(rows, rows) = MQ * MQ.transpose();
  K.topRightCorner(rows, nl) = ML;
  K.bottomLeftCorner(nl, rows) = ML.transpose();
  Vector rhs = Vector::Zero(rows + nl);
  rhs.head(rows) = fvals;
  const Vector sol = K.fullPivLu().solve(rhs);

  Vector alpha(basis.size());
  alpha.head(nl) = sol.tail(nl);
  alpha.tail(basis.quadratic_size()) = MQ.transpose() * sol.head(rows);
  check_residual(sys.M, alpha, fvals, 1e-8, "mfn_model");
  return finish(Y, fvals, basis, std::move(alpha), sys.condition);
}

ModelFit sparse_l1_model(const SampleSet& Y, const Vector& fvals) {
  const MonomialBasis basis(Y.dimension(), 2);
  const int nl = basis.linear_size();
  if (Y.size() < nl || Y.size() > basis.size()) {
    throw std::invalid_argument("sparse_l1_model: needs between " + std::to_string(nl) + " and " +
                                std::to_string(basis.size()) + " points");
  }
  ScaledSystem sys = prepare(Y, fvals, basis, "sparse_l1_model");
  require_linear_block_rank(sys.M, nl, "sparse_l1_model");

  BasisPursuitProblem problem{sys.M, fvals, std::vector<bool>(static_cast<std::size_t>(basis.size()), true)};
  for (int i = 0; i < nl; ++i) problem.penalized[static_cast<std::size_t>(i)] = false;
  BasisPursuitResult solved = basis_pursuit(problem);

  const double scale = std::max(1.0, fvals.cwiseAbs().maxCoeff());
  const double residual = (sys.M * solved.x - fvals).cwiseAbs().maxCoeff();
  if (!(residual <= 1e-6 * scale)) {
    throw ConvergenceError("sparse_l1_model: interpolation residual " + std::to_string(residual) +
                           " above tolerance");
  }
  return finish(Y, fvals, basis, std::move(solved.x), sys.condition);
}

QuadraticModel cap_hessian(const QuadraticModel& model, double kappa_bhm) {
  if (!(kappa_bhm > 0.0)) throw std::invalid_argument("cap_hessian: kappa_bhm must be positive");
  if (spectral_norm(model.H) <= kappa_bhm) return model;
  QuadraticModel capped = model;
  capped.H.setZero();
  return capped;
}

namespace {

std::vector<int> first_primes(int count) {
  std::vector<int> primes;
  for (int candidate = 2; static_cast<int>(primes.size()) < count; ++candidate) {
    bool prime = true;
    for (int p : primes) {
      if (p * p > candidate) break;
      if (candidate % p == 0) {
        prime = false;
        break;
      }
    }
    if (prime) primes.push_back(candidate);
  }
  return primes;
}

double radical_inverse(int index, int base) {
  double result = 0.0;
  double fraction = 1.0 / base;
  while (index > 0) {
    result += fraction * (index % base);
    index /= base;
    fraction /= base;
  }
  return result;
}

}  // namespace

std::vector<Vector> quality_probes(int n, double delta, int interior_probes) {
  std::vector<Vector> probes;
  probes.push_back(Vector::Zero(n));
  for (int i = 0; i < n; ++i) {
    Vector e = Vector::Zero(n);
    e(i) = delta;
    probes.push_back(e);
    probes.push_back(-e);
  }
  const std::vector<int> primes = first_primes(n);
  for (int k = 1; k <= interior_probes; ++k) {
    Vector v(n);
    for (int i = 0; i < n; ++i) v(i) = 2.0 * radical_inverse(k, primes[static_cast<std::size_t>(i)]) - 1.0;
    const double l2 = v.norm();
    // Radial map from the cube onto the ball: keeps direction, radius = ||v||_inf.
    probes.push_back(l2 > 0.0 ? Vector(delta * v * (v.cwiseAbs().maxCoeff() / l2)) : Vector(v));
  }
  return probes;
}

QualityReport fully_linear_report(const QuadraticModel& model, const Objective& objective,
                                  const Vector& x, double delta, const QualityConstants& kappa,
                                  int interior_probes) {
  if (!objective.has_gradient()) throw Error("check_fully_linear: objective has no analytic gradient");
  QualityReport report;
  for (const Vector& s : quality_probes(static_cast<int>(x.size()), delta, interior_probes)) {
    const Vector y = x + s;
    report.max_value_error =
        std::max(report.max_value_error, std::abs(objective.diagnostic_value(y) - model.value(y)));
    report.max_gradient_error =
        std::max(report.max_gradient_error, (objective.gradient(y) - model.gradient(y)).norm());
  }
  report.ok = report.max_gradient_error <= kappa.kappa_eg * delta &&
              report.max_value_error <= kappa.kappa_ef * delta * delta;
  return report;
}

bool check_fully_linear(const QuadraticModel& model, const Objective& objective, const Vector& x,
                        double delta, const QualityConstants& kappa, int interior_probes) {
  return fully_linear_report(model, objective, x, delta, kappa, interior_probes).ok;
}

QualityReport fully_quadratic_report(const QuadraticModel& model, const Objective& objective,
                                     const Vector& x, double delta, const QualityConstants& kappa,
                                     int interior_probes) {
  if (!objective.has_gradient() || !objective.has_hessian()) {
    throw Error("check_fully_quadratic: objective lacks analytic derivatives");
  }
  QualityReport report;
  for (const Vector& s : quality_probes(static_cast<int>(x.size()), delta, interior_probes)) {
    const Vector y = x + s;
    report.max_value_error =
        std::max(report.max_value_error, std::abs(objective.diagnostic_value(y) - model.value(y)));
    report.max_gradient_error =
        std::max(report.max_gradient_error, (objective.gradient(y) - model.gradient(y)).norm());
    report.max_hessian_error =
        std::max(report.max_hessian_error, spectral_norm(objective.hessian(y) - model.H));
  }
  report.ok = report.max_hessian_error <= kappa.kappa_eh * delta &&
              report.max_gradient_error <= kappa.kappa_eg * delta * delta &&
              report.max_value_error <= kappa.kappa_ef * delta * delta * delta;
  return report;
}

bool check_fully_quadratic(const QuadraticModel& model, const Objective& objective,
                           const Vector& x, double delta, const QualityConstants& kappa,
                           int interior_probes) {
  return fully_quadratic_report(model, objective, x, delta, kappa, interior_probes).ok;
}

}  // namespace probtr
