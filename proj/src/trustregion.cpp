#include "probtr/trustregion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include <fmt/core.h>

namespace probtr {

ModelBuilder::ModelBuilder(std::string name, Function build)
    : name_(std::move(name)), build_(std::move(build)) {
  if (!build_) throw std::invalid_argument("ModelBuilder: empty build function");
}

QuadraticModel ModelBuilder::operator()(TrustRegionState& state, Objective& objective,
                                        Rng& rng) const {
  QuadraticModel model = build_(state, objective, rng);
  if (model.dimension() != objective.dimension() || model.center.size() != state.x.size()) {
    throw Error(fmt::format("builder {}: model has wrong dimension", name_));
  }
  if (model.center != state.x) throw Error(fmt::format("builder {}: model not centered at x_k", name_));
  model.c = state.f;
  return model;
}

void evaluate_set(SampleSet& Y, TrustRegionState& state, Objective& objective) {
  Y.values.assign(Y.points.size(), 0.0);
  for (std::size_t i = 0; i < Y.points.size(); ++i) {
    if (Y.points[i] == state.x) {
      Y.values[i] = state.f;
      continue;
    }
    const std::size_t a = state.archive.size();
    const std::size_t stop = a > kArchiveLookback ? a - kArchiveLookback : 0;
    bool found = false;
    for (std::size_t j = a; j-- > stop;) {
      if (state.archive[j].x == Y.points[i]) {
        Y.values[i] = state.archive[j].f;
        found = true;
        break;
      }
    }
    if (!found) Y.values[i] = state.record_evaluation(Y.points[i], objective(Y.points[i]));
  }
}

namespace {

// Random sets are redrawn (before any evaluation) until the scaled matrix is
// usable. Draws are cheap; the bound only guards against an rng pathology.
constexpr int kMaxRedraws = 100;

template <typename Draw>
SampleSet draw_poised(Draw draw, const MonomialBasis& basis) {
  for (int attempt = 0; attempt < kMaxRedraws; ++attempt) {
    SampleSet Y = draw();
    const double cond = poisedness_condition(Y, basis);
    if (cond <= kPoisednessLimit) {
      Y.condition = cond;
      return Y;
    }
  }
  throw PoisednessError("no poised random sample set after repeated draws");
}

// For an underdetermined quadratic fit only the linear block has to be
// well-determined.
SampleSet draw_ball(const TrustRegionState& state, int count, Rng& rng) {
  const int n = static_cast<int>(state.x.size());
  const MonomialBasis linear(n, 1);
  return draw_poised([&] { return ball_uniform_set(state.x, state.delta, count, rng); }, linear);
}

void top_up(SampleSet& Y, int cap, TrustRegionState& state, Objective& objective, Rng& rng) {
  const int n = Y.dimension();
  const MonomialBasis linear(n, 1);
  auto poised = [&] {
    return Y.size() >= n + 1 && poisedness_condition(Y, linear) <= kGreedyLinearConditionLimit;
  };
  const int max_new = 10 * (n + 1);
  for (int added = 0; !poised(); ++added) {
    if (added == max_new) throw PoisednessError("greedy set: linear block stays ill-poised");
    if (Y.size() >= cap) {
      // Points are sorted by distance; drop the farthest reused point.
      Y.points.pop_back();
      Y.values.pop_back();
    }
    Vector y = state.x + state.delta * std::pow(rng.uniform(), 1.0 / n) * rng.unit_vector(n);
    Y.values.push_back(state.record_evaluation(y, objective(y)));
    Y.points.push_back(std::move(y));
  }
}

using Fit = ModelFit (*)(const SampleSet&, const Vector&);

ModelBuilder greedy_builder(std::string name, int cap, Fit fit) {
  const int n_min = 2;
  if (cap < n_min) throw std::invalid_argument("greedy builder: cap too small");
  return ModelBuilder(std::move(name), [cap, fit](TrustRegionState& state, Objective& objective,
                                                  Rng& rng) {
    SampleSet Y = greedy_reuse(state.archive, state.x, state.delta, cap);
    // Reused points may sit at up to twice the radius. Model quality is
    // judged on the ball of radius delta, but the scaling only has to keep
    // the scaled points O(1).
    Y.radius = state.delta;
    top_up(Y, std::max(cap, Y.dimension() + 1), state, objective, rng);
    try {
      return fit(Y, Y.values_vector()).model;
    } catch (const PoisednessError&) {
      // The full matrix can still be rank deficient (e.g. points on a line
      // in the quadratic block). Fall back on a fresh linear-poised set.
      SampleSet fresh = draw_ball(state, Y.dimension() + 1, rng);
      evaluate_set(fresh, state, objective);
      return fit(fresh, fresh.values_vector()).model;
    }
  });
}

}  // namespace

ModelBuilder coordinate_quadratic_builder(double max_sample_radius) {
  if (!(max_sample_radius > 0.0)) throw std::invalid_argument("coordinate_quadratic_builder: radius <= 0");
  return ModelBuilder("trq", [max_sample_radius](TrustRegionState& state, Objective& objective, Rng&) {
    SampleSet Y = quadratic_coordinate_set(state.x, std::min(state.delta, max_sample_radius));
    evaluate_set(Y, state, objective);
    const MonomialBasis basis(Y.dimension(), 2);
    return interpolate(Y, Y.values_vector(), basis).model;
  });
}

ModelBuilder coordinate_mfn_builder() {
  return ModelBuilder("mfn-coordinate", [](TrustRegionState& state, Objective& objective, Rng&) {
    SampleSet Y = coordinate_set(state.x, state.delta);
    evaluate_set(Y, state, objective);
    return mfn_model(Y, Y.values_vector()).model;
  });
}

ModelBuilder random_ball_mfn_builder(int count) {
  if (count < 1) throw std::invalid_argument("random_ball_mfn_builder: count < 1");
  return ModelBuilder("mfn-random", [count](TrustRegionState& state, Objective& objective, Rng& rng) {
    SampleSet Y = draw_ball(state, count, rng);
    evaluate_set(Y, state, objective);
    return mfn_model(Y, Y.values_vector()).model;
  });
}

ModelBuilder random_ball_l1_builder(int count) {
  if (count < 1) throw std::invalid_argument("random_ball_l1_builder: count < 1");
  return ModelBuilder("rstr", [count](TrustRegionState& state, Objective& objective, Rng& rng) {
    SampleSet Y = draw_ball(state, count, rng);
    evaluate_set(Y, state, objective);
    return sparse_l1_model(Y, Y.values_vector()).model;
  });
}

ModelBuilder greedy_mfn_builder(int cap) { return greedy_builder("mfn-greedy", cap, &mfn_model); }

ModelBuilder greedy_l1_builder(int cap) { return greedy_builder("gstr", cap, &sparse_l1_model); }

ModelBuilder determined_interpolation_builder(int degree, SetGenerator generator) {
  return ModelBuilder(
      fmt::format("interp{}-{}", degree, generator == SetGenerator::gaussian ? "gaussian" : "ball"),
      [degree, generator](TrustRegionState& state, Objective& objective, Rng& rng) {
        const int n = static_cast<int>(state.x.size());
        const MonomialBasis basis(n, degree);
        const int count = basis.size() - 1;
        SampleSet Y = draw_poised(
            [&] {
              return generator == SetGenerator::gaussian
                         ? gaussian_set(state.x, state.delta, count, rng)
                         : ball_uniform_set(state.x, state.delta, count, rng);
            },
            basis);
        evaluate_set(Y, state, objective);
        return interpolate(Y, Y.values_vector(), basis).model;
      });
}

double tau(const Vector& g, const Matrix& H) {
  if (H.rows() != g.size() || H.cols() != g.size()) throw std::invalid_argument("tau: shape mismatch");
  const double gnorm = g.norm();
  const double hnorm = spectral_norm(H);
  const double first = hnorm > 0.0 ? std::min(gnorm, gnorm / hnorm) : gnorm;
  const double curvature = g.size() == 0 ? 0.0 : -smallest_eigenpair(H).value;
  return std::max(first, curvature);
}

const char* to_string(Driver driver) {
  switch (driver) {
    case Driver::first_order: return "first";
    case Driver::three_threshold: return "three";
    case Driver::second_order: return "second";
  }
  return "?";
}

const char* to_string(Termination termination) {
  switch (termination) {
    case Termination::budget: return "budget";
    case Termination::delta_min: return "delta_min";
    case Termination::target: return "target";
  }
  return "?";
}

namespace {

IterationRecord step(Driver driver, TrustRegionState& state, const ModelBuilder& builder,
                     Objective& objective, const TrustRegionConfig& config, Rng& rng,
                     StepTrace* trace) {
  QuadraticModel model = builder(state, objective, rng);
  if (driver != Driver::second_order) model = cap_hessian(model, config.kappa_bhm);

  const SubproblemOptions sub{config.model_minimizer_step};
  const StepResult s = driver == Driver::second_order ? solve_second_order(model, state.delta, sub)
                                                      : solve_first_order(model, state.delta, sub);
  const double measure = driver == Driver::second_order ? tau(model.g, model.H) : model.g.norm();

  // A zero step would only re-evaluate f(x_k); its ratio is undefined anyway.
  double f_trial = state.f;
  if (s.kind != StepKind::zero) {
    const Vector trial = state.x + s.s;
    f_trial = state.record_evaluation(trial, objective(trial));
  }
  const std::optional<double> rho =
      compute_rho(state.f, f_trial, model.c, model.c - s.predicted_decrease);
  const bool ratio_ok = rho.has_value() && std::isfinite(*rho) && *rho >= config.eta1;

  const double delta = state.delta;
  const double grown = std::min(config.gamma * delta, config.delta_max);
  const double shrunk = delta / config.gamma;
  bool moved = false;
  double next_delta = shrunk;
  if (driver == Driver::three_threshold) {
    if (ratio_ok) {
      moved = true;
      if (measure >= config.eta2 * delta) {
        next_delta = grown;
      } else if (measure >= config.eta3 * delta) {
        next_delta = delta;
      }
    }
  } else if (ratio_ok && measure >= config.eta2 * delta) {
    moved = true;
    next_delta = grown;
  }

  if (moved) {
    if (!(f_trial < state.f)) throw AssertionFailure("accepted step without strict decrease");
    state.x = state.x + s.s;
    state.f = f_trial;
  }
  state.delta = next_delta;
  ++state.k;

  IterationRecord record;
  record.iter = state.k;
  record.success = moved;
  record.f = state.f;
  record.delta = state.delta;
  record.rho = rho;
  state.history.push_back(record);
  state.path.push_back(PathPoint{state.k, state.x, state.f});
  if (trace != nullptr) *trace = StepTrace{std::move(model), s, measure};
  return record;
}

}  // namespace

IterationRecord step_first_order(TrustRegionState& state, const ModelBuilder& builder,
                                 Objective& objective, const TrustRegionConfig& config, Rng& rng,
                                 StepTrace* trace) {
  return step(Driver::first_order, state, builder, objective, config, rng, trace);
}

IterationRecord step_three_threshold(TrustRegionState& state, const ModelBuilder& builder,
                                     Objective& objective, const TrustRegionConfig& config, Rng& rng,
                                     StepTrace* trace) {
  if (config.eta3 > config.eta2) throw ConfigError("three-threshold driver needs eta3 <= eta2");
  return step(Driver::three_threshold, state, builder, objective, config, rng, trace);
}

IterationRecord step_second_order(TrustRegionState& state, const ModelBuilder& builder,
                                  Objective& objective, const TrustRegionConfig& config, Rng& rng,
                                  StepTrace* trace) {
  return step(Driver::second_order, state, builder, objective, config, rng, trace);
}

RunResult run(Driver driver, const ModelBuilder& builder, Objective& objective, const Vector& x0,
              const TrustRegionConfig& config, const RunOptions& options) {
  config.validate();
  if (x0.size() != objective.dimension()) throw std::invalid_argument("run: x0 has wrong dimension");
  if (options.monitor) {
    options.monitor->kappa.validate();
    if (!objective.has_gradient()) throw Error("run: quality monitor needs an analytic gradient");
  }

  RunResult result;
  TrustRegionState& state = result.state;
  state.x = x0;
  state.delta = config.delta0;
  const std::int64_t start_evals = objective.eval_count();
  auto spent = [&] { return objective.eval_count() - start_evals; };

  if (config.budget == 0) {
    result.termination = Termination::budget;
    return result;
  }
  state.f = state.record_evaluation(x0, objective(x0));
  state.path.push_back(PathPoint{0, state.x, state.f});

  Rng rng(config.seed);
  double window_min = state.delta;
  std::int64_t last_decrease = 0;
  std::int64_t warned_at = -1;

  while (true) {
    if (state.f <= config.f_target) {
      result.termination = Termination::target;
      break;
    }
    if (spent() >= config.budget) {
      result.termination = Termination::budget;
      break;
    }
    if (state.delta < config.delta_min) {
      result.termination = Termination::delta_min;
      break;
    }

    const double delta = state.delta;
    StepTrace trace;
    const IterationRecord record = step(driver, state, builder, objective, config, rng, &trace);

    if (options.monitor) {
      const QualityMonitor& mon = *options.monitor;
      MonitorStats& stats = result.monitor;
      ++stats.checks;
      const Vector x_k = trace.model.center;
      if (check_fully_linear(trace.model, objective, x_k, delta, mon.kappa, mon.interior_probes)) {
        ++stats.fully_linear;
        const double g = trace.model.g.norm();
        const double threshold = std::min(
            g / config.kappa_bhm, mon.kappa_fcd * (1.0 - config.eta1) * g / (4.0 * mon.kappa.kappa_ef));
        if (g > 0.0 && delta <= threshold) {
          ++stats.eligible;
          if (!(record.rho && *record.rho >= config.eta1)) ++stats.violations;
        }
      }
    }

    if (state.delta < window_min) {
      window_min = state.delta;
      last_decrease = state.k;
    }
    const std::int64_t stalled = state.k - last_decrease;
    if (stalled >= options.radius_stall_limit) {
      throw AssertionFailure(fmt::format("trust-region radius has not reached a new minimum in {} iterations",
                                         stalled));
    }
    if (stalled >= options.radius_window && stalled / options.radius_window != warned_at) {
      warned_at = stalled / options.radius_window;
      ++result.radius_warnings;
      fmt::print(stderr, "warning: radius minimum {:.3e} unchanged for {} iterations\n", window_min,
                 stalled);
    }
  }
  result.evaluations = spent();
  return result;
}

}  // namespace probtr
