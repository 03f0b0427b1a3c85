#pragma once

#include "probtr/core.hpp"

namespace probtr {

enum class StepKind { zero, cauchy, eigen, minimizer };

const char* to_string(StepKind kind);

struct StepResult {
  Vector s;
  double predicted_decrease = 0.0;  // m(center) - m(center + s)
  StepKind kind = StepKind::zero;
};

struct Eigenpair {
  double value;
  Vector vector;  // unit norm
};

// Spectral norm of a symmetric matrix.
double spectral_norm(const Matrix& H);

// Throws ConvergenceError if the symmetric eigen-iteration fails.
Eigenpair smallest_eigenpair(const Matrix& H);

/// Exact minimizer of the model along -g within the ball of radius delta.
StepResult cauchy_step(const QuadraticModel& model, double delta);

/// Boundary step along the eigenvector of the most negative Hessian
/// eigenvalue, oriented so that g's <= 0. Zero step if H has no negative
/// curvature.
StepResult eigenstep(const QuadraticModel& model, double delta);

/// Global minimizer of the model in the ball, computed from the full
/// eigendecomposition of H (secular equation on the Lagrange multiplier,
/// with the hard case handled explicitly). Dimensions here are small, so the
/// dense decomposition is cheap.
StepResult model_minimizer_step(const QuadraticModel& model, double delta);

// Right-hand side of the fraction-of-Cauchy-decrease inequality with
// kappa_fcd = 1: ||g|| min(||g||/||H||, delta) / 2, where ||H|| = 0 selects delta.
double cauchy_decrease_bound(const Vector& g, const Matrix& H, double delta);

// Right-hand side of the fraction-of-optimal-decrease inequality with
// kappa_fod = 1: max(cauchy bound, max(-lambda_min, 0) delta^2 / 2).
double optimal_decrease_bound(const Vector& g, const Matrix& H, double delta);

struct SubproblemOptions {
  bool model_minimizer = true;
};

/// Best of the Cauchy step and (optionally) the model minimizer. Throws
/// AssertionFailure if the fraction-of-Cauchy-decrease bound fails.
StepResult solve_first_order(const QuadraticModel& model, double delta,
                             const SubproblemOptions& options = {});

/// Best of the Cauchy step, the eigenstep and (optionally) the model minimizer.
/// Ties keep the earlier candidate in that order. Throws AssertionFailure if
/// the fraction-of-optimal-decrease bound fails.
StepResult solve_second_order(const QuadraticModel& model, double delta,
                              const SubproblemOptions& options = {});

// Relative slack used by the decrease-bound assertions.
inline constexpr double kDecreaseBoundSlack = 1e-10;

bool satisfies_bound(double decrease, double bound);

}  // namespace probtr
