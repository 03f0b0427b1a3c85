#pragma once

#include <vector>

#include "probtr/core.hpp"

namespace probtr {

/// minimize sum_{i penalized} |x_i|  subject to  A x = b.
struct BasisPursuitProblem {
  Matrix A;
  Vector b;
  std::vector<bool> penalized;  // per column of A

  // Throws std::invalid_argument on shape errors, m > N or an empty mask.
  void validate() const;
};

/// sign(v_i) max(|v_i| - t, 0) on penalized entries; others pass through.
Vector soft_threshold(const Vector& v, double t, const std::vector<bool>& penalized);

struct BasisPursuitOptions {
  double rho = 1.0;  // initial value when adaptive
  // Residual balancing: double rho when the primal residual dominates the
  // dual one by 10x, halve it in the opposite case (checked every 10
  // iterations). The merit below is only monotone with a fixed rho.
  bool adaptive_rho = true;
  double tol = 1e-8;
  int max_iter = 50000;
  // Attempt support identification plus an exact dual certificate every
  // polish_every iterations (0 disables).
  int polish_every = 25;
  bool record_merit = false;
};

struct BasisPursuitResult {
  Vector x;
  int iterations = 0;
  double residual = 0.0;     // ||A x - b||_2
  double objective = 0.0;    // l1 norm over penalized entries
  bool certified = false;    // optimality proven by an exact dual certificate
  // Douglas-Rachford fixed-point residual per iteration; non-increasing when
  // rho is fixed.
  std::vector<double> merit;
};

class BasisPursuitError : public ConvergenceError {
 public:
  BasisPursuitError(const std::string& what, double primal, double dual)
      : ConvergenceError(what), primal_residual(primal), dual_residual(dual) {}
  double primal_residual;
  double dual_residual;
};

/// ADMM on the split x = z: x-update projects onto {A x = b} with a
/// factorization computed once, z-update soft-thresholds the penalized block.
/// The right-hand side is first reduced by the least-squares fit of the
/// unpenalized columns and normalized, which leaves the minimizer unchanged up
/// to the inverse map. Throws PoisednessError if A lacks full row rank and
/// BasisPursuitError after max_iter iterations without convergence.
BasisPursuitResult basis_pursuit(const BasisPursuitProblem& problem,
                                 const BasisPursuitOptions& options = {});

}  // namespace probtr
