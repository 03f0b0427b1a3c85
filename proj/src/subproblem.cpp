#include "probtr/subproblem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace probtr {
namespace {

Eigen::SelfAdjointEigenSolver<Matrix> decompose(const Matrix& H) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(H);
  if (solver.info() != Eigen::Success) {
    throw ConvergenceError("symmetric eigensolver did not converge");
  }
  return solver;
}

StepResult make_step(const QuadraticModel& model, Vector s, StepKind kind) {
  StepResult out;
  out.predicted_decrease = -(model.g.dot(s) + 0.5 * s.dot(model.H * s));
  out.s = std::move(s);
  out.kind = kind;
  return out;
}

StepResult zero_step(const QuadraticModel& model) {
  return {Vector::Zero(model.dimension()), 0.0, StepKind::zero};
}

// Keeps `best` unless `candidate` is better by more than rounding noise.
void keep_better(StepResult& best, StepResult candidate) {
  const double margin = 1e-12 * std::max(std::abs(best.predicted_decrease), 1e-300);
  if (candidate.predicted_decrease > best.predicted_decrease + margin) best = std::move(candidate);
}

void clip_to_ball(Vector& s, double delta) {
  const double norm = s.norm();
  if (norm > delta) s *= delta / norm;
}

}  // namespace

const char* to_string(StepKind kind) {
  switch (kind) {
    case StepKind::zero: return "zero";
    case StepKind::cauchy: return "cauchy";
    case StepKind::eigen: return "eigen";
    case StepKind::minimizer: return "minimizer";
  }
  return "?";
}

double spectral_norm(const Matrix& H) {
  if (H.size() == 0) return 0.0;
  const auto solver = decompose(H);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

Eigenpair smallest_eigenpair(const Matrix& H) {
  if (H.rows() != H.cols() || H.rows() == 0) {
    throw std::invalid_argument("smallest_eigenpair: expected a non-empty square matrix");
  }
  const auto solver = decompose(H);
  Eigenpair pair{solver.eigenvalues()(0), solver.eigenvectors().col(0).normalized()};
  const double scale = std::max(1.0, solver.eigenvalues().cwiseAbs().maxCoeff());
  if ((H * pair.vector - pair.value * pair.vector).norm() > 1e-10 * scale) {
    throw ConvergenceError("smallest_eigenpair: eigen-residual above tolerance");
  }
  return pair;
}

StepResult cauchy_step(const QuadraticModel& model, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("cauchy_step: delta must be positive");
  const double gnorm = model.g.norm();
  if (gnorm == 0.0) return zero_step(model);
  const Vector direction = -model.g / gnorm;
  const double curvature = direction.dot(model.H * direction);
  double t = delta;
  if (curvature > 0.0) t = std::min(gnorm / curvature, delta);
  return make_step(model, t * direction, StepKind::cauchy);
}

StepResult eigenstep(const QuadraticModel& model, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("eigenstep: delta must be positive");
  const Eigenpair pair = smallest_eigenpair(model.H);
  if (pair.value >= 0.0) return zero_step(model);
  Vector s = delta * pair.vector;
  if (model.g.dot(s) > 0.0) s = -s;
  return make_step(model, std::move(s), StepKind::eigen);
}

StepResult model_minimizer_step(const QuadraticModel& model, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("model_minimizer_step: delta must be positive");
  const int n = model.dimension();
  const auto solver = decompose(model.H);
  const Vector& lambda = solver.eigenvalues();
  const Matrix& V = solver.eigenvectors();
  const Vector a = V.transpose() * model.g;
  const double gnorm = model.g.norm();
  const double lambda_min = lambda(0);
  const double scale = std::max(lambda.cwiseAbs().maxCoeff(), 1e-300);

  if (gnorm == 0.0 && lambda_min >= 0.0) return zero_step(model);

  auto step_for = [&](double mu, bool skip_bottom) {
    Vector w(n);
    for (int i = 0; i < n; ++i) {
      const double denom = lambda(i) + mu;
      const bool bottom = lambda(i) - lambda_min <= 1e-12 * scale;
      w(i) = ((skip_bottom && bottom) || a(i) == 0.0) ? 0.0 : -a(i) / denom;
    }
    return w;
  };

  // Interior Newton step.
  if (lambda_min > 0.0) {
    Vector w = step_for(0.0, false);
    if (w.norm() <= delta) return make_step(model, V * w, StepKind::minimizer);
  }

  const double mu_low = std::max(0.0, -lambda_min);

  // Hard case: g has (numerically) no component along the bottom eigenspace
  // and the shifted step cannot reach the boundary.
  double bottom_weight = 0.0;
  for (int i = 0; i < n; ++i) {
    if (lambda(i) - lambda_min <= 1e-12 * scale) bottom_weight += a(i) * a(i);
  }
  if (lambda_min <= 0.0 && std::sqrt(bottom_weight) <= 1e-14 * std::max(gnorm, 1e-300)) {
    Vector w = step_for(mu_low, true);
    const double wnorm = w.norm();
    if (wnorm <= delta) {
      const double tau = std::sqrt(std::max(delta * delta - wnorm * wnorm, 0.0));
      w(0) += tau;
      Vector s = V * w;
      clip_to_ball(s, delta);
      StepResult plus = make_step(model, s, StepKind::minimizer);
      w(0) -= 2.0 * tau;
      s = V * w;
      clip_to_ball(s, delta);
      StepResult minus = make_step(model, s, StepKind::minimizer);
      return plus.predicted_decrease >= minus.predicted_decrease ? plus : minus;
    }
  }

  // Boundary solution: find mu > mu_low with ||s(mu)|| = delta. phi(mu) =
  // 1/||s(mu)|| - 1/delta is increasing and close to linear; safeguarded Newton.
  double lo = mu_low;
  double hi = mu_low + gnorm / delta + 1e-300;
  double mu = hi;
  for (int iter = 0; iter < 200; ++iter) {
    Vector w = step_for(mu, false);
    const double wnorm = w.norm();
    const double phi = 1.0 / wnorm - 1.0 / delta;
    if (std::abs(wnorm - delta) <= 1e-14 * delta) break;
    if (phi < 0.0) lo = std::max(lo, mu); else hi = std::min(hi, mu);
    // d||w||/dmu = -sum a_i^2/(lambda_i+mu)^3 / ||w||
    double dw = 0.0;
    for (int i = 0; i < n; ++i) {
      const double denom = lambda(i) + mu;
      dw -= a(i) * a(i) / (denom * denom * denom);
    }
    dw /= wnorm;
    const double dphi = -dw / (wnorm * wnorm);
    double next = (dphi > 0.0) ? mu - phi / dphi : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (hi - lo <= 1e-16 * std::max(1.0, hi)) break;
    mu = next;
  }
  Vector s = V * step_for(mu, false);
  clip_to_ball(s, delta);
  return make_step(model, std::move(s), StepKind::minimizer);
}

double cauchy_decrease_bound(const Vector& g, const Matrix& H, double delta) {
  const double gnorm = g.norm();
  const double hnorm = spectral_norm(H);
  const double reach = hnorm > 0.0 ? std::min(gnorm / hnorm, delta) : delta;
  return 0.5 * gnorm * reach;
}

double optimal_decrease_bound(const Vector& g, const Matrix& H, double delta) {
  const double curvature = std::max(-smallest_eigenpair(H).value, 0.0);
  return std::max(cauchy_decrease_bound(g, H, delta), 0.5 * curvature * delta * delta);
}

bool satisfies_bound(double decrease, double bound) {
  return decrease >= bound - kDecreaseBoundSlack * std::abs(bound);
}

StepResult solve_first_order(const QuadraticModel& model, double delta,
                             const SubproblemOptions& options) {
  StepResult best = cauchy_step(model, delta);
  if (options.model_minimizer) keep_better(best, model_minimizer_step(model, delta));
  const double bound = cauchy_decrease_bound(model.g, model.H, delta);
  if (!satisfies_bound(best.predicted_decrease, bound) || best.s.norm() > delta * (1.0 + 1e-12)) {
    throw AssertionFailure("fraction of Cauchy decrease violated: decrease " +
                           std::to_string(best.predicted_decrease) + " < bound " +
                           std::to_string(bound));
  }
  return best;
}

StepResult solve_second_order(const QuadraticModel& model, double delta,
                              const SubproblemOptions& options) {
  StepResult best = cauchy_step(model, delta);
  keep_better(best, eigenstep(model, delta));
  if (options.model_minimizer) keep_better(best, model_minimizer_step(model, delta));
  const double bound = optimal_decrease_bound(model.g, model.H, delta);
  if (!satisfies_bound(best.predicted_decrease, bound) || best.s.norm() > delta * (1.0 + 1e-12)) {
    throw AssertionFailure("fraction of optimal decrease violated: decrease " +
                           std::to_string(best.predicted_decrease) + " < bound " +
                           std::to_string(bound));
  }
  return best;
}

}  // namespace probtr
