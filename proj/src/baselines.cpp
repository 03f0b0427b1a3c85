#include "probtr/baselines.hpp"

#include <algorithm>
#include <cmath>

namespace probtr {

void DirectSearchConfig::validate() const {
  if (!(step0 > 0.0)) throw ConfigError("step0 must be positive");
  if (!(step_max >= step0)) throw ConfigError("step_max must be at least step0");
  if (!(c_rs > 0.0)) throw ConfigError("c_rs must be positive");
  if (budget < 0) throw ConfigError("budget must be non-negative");
  if (!(step_min > 0.0)) throw ConfigError("step_min must be positive");
}

Matrix random_orthogonal(int n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("random_orthogonal: n < 1");
  Vector q = rng.normal_vector(n);
  while (q.norm() == 0.0) q = rng.normal_vector(n);
  q.normalize();
  // H = I - 2 v v'/(v'v) with v = e1 - q maps e1 to q.
  Vector v = -q;
  v(0) += 1.0;
  Matrix Q = Matrix::Identity(n, n);
  const double vv = v.squaredNorm();
  if (vv > 0.0) Q -= (2.0 / vv) * v * v.transpose();
  return Q;
}

bool poll_step(DirectSearchState& state, Objective& objective, const Matrix& D, double step_max) {
  ++state.k;
  for (Eigen::Index j = 0; j < D.cols(); ++j) {
    for (const double sign : {1.0, -1.0}) {
      const Vector y = state.x + sign * state.step * D.col(j);
      const double fy = objective(y);
      state.archive.push_back(ArchivedPoint{y, fy});
      if (fy < state.f) {
        state.x = y;
        state.f = fy;
        state.step = std::min(2.0 * state.step, step_max);
        state.path.push_back(PathPoint{state.k, state.x, state.f});
        return true;
      }
    }
  }
  state.step /= 2.0;
  state.path.push_back(PathPoint{state.k, state.x, state.f});
  return false;
}

bool cs_step(DirectSearchState& state, Objective& objective, double step_max) {
  const auto n = state.x.size();
  return poll_step(state, objective, Matrix::Identity(n, n), step_max);
}

bool dsr_step(DirectSearchState& state, Objective& objective, Rng& rng, double step_max) {
  const Matrix Q = random_orthogonal(static_cast<int>(state.x.size()), rng);
  return poll_step(state, objective, Q, step_max);
}

bool rs_step(DirectSearchState& state, Objective& objective, Rng& rng, std::int64_t k, double c_rs) {
  if (k < 1) throw std::invalid_argument("rs_step: k < 1");
  ++state.k;
  const Vector y = state.x + (c_rs / static_cast<double>(k)) * rng.normal_vector(static_cast<int>(state.x.size()));
  const double fy = objective(y);
  state.archive.push_back(ArchivedPoint{y, fy});
  const bool success = fy < state.f;
  if (success) {
    state.x = y;
    state.f = fy;
  }
  state.path.push_back(PathPoint{state.k, state.x, state.f});
  return success;
}

const char* to_string(DirectSearchMethod method) {
  switch (method) {
    case DirectSearchMethod::cs: return "cs";
    case DirectSearchMethod::dsr: return "dsr";
    case DirectSearchMethod::rs: return "rs";
  }
  return "?";
}

DirectSearchResult run_direct_search(DirectSearchMethod method, Objective& objective,
                                     const Vector& x0, const DirectSearchConfig& config) {
  config.validate();
  DirectSearchResult result;
  DirectSearchState& state = result.state;
  state.x = x0;
  state.step = config.step0;
  const std::int64_t start = objective.eval_count();
  auto spent = [&] { return objective.eval_count() - start; };
  if (config.budget == 0) return result;

  state.f = objective(x0);
  state.archive.push_back(ArchivedPoint{x0, state.f});
  state.path.push_back(PathPoint{0, state.x, state.f});
  Rng rng(config.seed);

  while (state.f > config.f_target && spent() < config.budget) {
    if (method != DirectSearchMethod::rs && state.step < config.step_min) break;
    bool success = false;
    switch (method) {
      case DirectSearchMethod::cs: success = cs_step(state, objective, config.step_max); break;
      case DirectSearchMethod::dsr: success = dsr_step(state, objective, rng, config.step_max); break;
      case DirectSearchMethod::rs: success = rs_step(state, objective, rng, state.k + 1, config.c_rs); break;
    }
    IterationRecord record;
    record.iter = state.k;
    record.success = success;
    record.f = state.f;
    record.delta = method == DirectSearchMethod::rs ? config.c_rs / static_cast<double>(state.k) : state.step;
    result.trace.push_back(record);
  }
  result.evaluations = spent();
  result.reached_target = state.f <= config.f_target;
  return result;
}

}  // namespace probtr
