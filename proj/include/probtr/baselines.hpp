#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "probtr/core.hpp"
#include "probtr/sampling.hpp"

namespace probtr {

struct DirectSearchState {
  Vector x;
  double f = 0.0;
  double step = 1.0;
  std::int64_t k = 0;
  std::vector<ArchivedPoint> archive;
  std::vector<PathPoint> path;
};

struct DirectSearchConfig {
  double step0 = 1.0;
  double step_max = 10.0;  // defaults to delta_max of the trust-region config
  double c_rs = 1.0;       // random search step scale
  std::int64_t budget = 100000;
  std::uint64_t seed = 0;
  double f_target = -std::numeric_limits<double>::infinity();
  double step_min = 1e-12;

  void validate() const;
};

/// n x n orthogonal matrix whose first column is a normalized Gaussian draw,
/// completed by the Householder reflection that maps e_1 onto it.
Matrix random_orthogonal(int n, Rng& rng);

// Opportunistic poll along the columns of [D -D] in the order
// +d_1, -d_1, +d_2, -d_2, ...: the first point with f < f(x) is taken and the
// step doubles (capped at step_max); a full failed poll halves the step.
// Returns true on success.
bool poll_step(DirectSearchState& state, Objective& objective, const Matrix& D, double step_max);

// Compass search: D = I.
bool cs_step(DirectSearchState& state, Objective& objective, double step_max);

// Direct search with a fresh random orthogonal basis each iteration.
bool dsr_step(DirectSearchState& state, Objective& objective, Rng& rng, double step_max);

// Random search: candidate x + (c_rs / k) z with z standard normal, accepted on
// strict decrease. k >= 1.
bool rs_step(DirectSearchState& state, Objective& objective, Rng& rng, std::int64_t k, double c_rs);

enum class DirectSearchMethod { cs, dsr, rs };

const char* to_string(DirectSearchMethod method);

struct DirectSearchResult {
  DirectSearchState state;
  std::vector<IterationRecord> trace;  // delta column holds the step size; rho is undefined
  std::int64_t evaluations = 0;
  bool reached_target = false;
};

/// Runs until the budget is spent, f <= f_target or (CS/DSR) step < step_min.
DirectSearchResult run_direct_search(DirectSearchMethod method, Objective& objective,
                                     const Vector& x0, const DirectSearchConfig& config);

}  // namespace probtr
