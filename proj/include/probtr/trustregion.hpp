#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "probtr/core.hpp"
#include "probtr/models.hpp"
#include "probtr/sampling.hpp"
#include "probtr/subproblem.hpp"

namespace probtr {

/// Strategy producing the model m_k around state.x within radius state.delta.
///
/// Builders evaluate f only through the Objective handle, archive every point
/// they evaluate in the state (in sample order), and return a model centered at
/// state.x with m(x_k) = f(x_k).
class ModelBuilder {
 public:
  using Function = std::function<QuadraticModel(TrustRegionState&, Objective&, Rng&)>;

  ModelBuilder(std::string name, Function build);

  QuadraticModel operator()(TrustRegionState& state, Objective& objective, Rng& rng) const;
  const std::string& name() const { return name_; }

 private:
  std::string name_;
  Function build_;
};

// Fills Y.values. The center reuses state.f, a point equal to one of the last
// kArchiveLookback archived points reuses its value, and every other point
// costs one evaluation and is archived.
void evaluate_set(SampleSet& Y, TrustRegionState& state, Objective& objective);

inline constexpr std::size_t kArchiveLookback = 64;

// Deterministic (n+1)(n+2)/2-point coordinate set with radius
// min(delta, max_sample_radius), quadratic interpolation (TRQ). Capping the
// sample radius keeps the model close to the Taylor model on large regions;
// once delta drops below the cap the set scales with delta as usual.
ModelBuilder coordinate_quadratic_builder(
    double max_sample_radius = std::numeric_limits<double>::infinity());
// Deterministic 2n+1-point coordinate set, MFN model.
ModelBuilder coordinate_mfn_builder();
// center + `count` uniform points in the ball, MFN model.
ModelBuilder random_ball_mfn_builder(int count);
// center + `count` uniform points in the ball, l1 model (RSTR).
ModelBuilder random_ball_l1_builder(int count);
// Greedy reuse of archived points (up to `cap`), MFN model.
ModelBuilder greedy_mfn_builder(int cap);
// Greedy reuse of archived points (up to `cap`), l1 model (GSTR).
ModelBuilder greedy_l1_builder(int cap);

enum class SetGenerator { gaussian, ball };

// Square interpolation of the given degree on center + (q1 - 1) random points.
ModelBuilder determined_interpolation_builder(int degree, SetGenerator generator);

// Linear block condition above which greedy sets are topped up with fresh points.
inline constexpr double kGreedyLinearConditionLimit = 1e4;

/// Second-order stationarity measure
///   max{ min[||g||, ||g||/||H||], -lambda_min(H) },  with ||H|| = 0 => ||g||.
double tau(const Vector& g, const Matrix& H);

enum class Driver { first_order, three_threshold, second_order };
enum class Termination { budget, delta_min, target };

const char* to_string(Driver driver);
const char* to_string(Termination termination);

/// Runtime monitor for the "fully linear and small radius implies success"
/// property. The constants are supplied by the caller; the analytic gradient of
/// the objective is used and evaluations are uncounted.
struct QualityMonitor {
  QualityConstants kappa;
  int interior_probes = kDefaultInteriorProbes;
  double kappa_fcd = 1.0;
};

struct MonitorStats {
  std::int64_t checks = 0;
  std::int64_t fully_linear = 0;
  std::int64_t eligible = 0;    // fully linear and radius under the threshold
  std::int64_t violations = 0;  // eligible but rho < eta1
};

/// Extra per-step information for callers that need more than the record.
struct StepTrace {
  QuadraticModel model;
  StepResult step;
  double measure = 0.0;  // ||g|| or tau^m, whichever the driver tests
};

// One iteration of each driver. Updates the state, appends to its history and
// path, and returns the new record.
IterationRecord step_first_order(TrustRegionState& state, const ModelBuilder& builder,
                                 Objective& objective, const TrustRegionConfig& config, Rng& rng,
                                 StepTrace* trace = nullptr);
IterationRecord step_three_threshold(TrustRegionState& state, const ModelBuilder& builder,
                                     Objective& objective, const TrustRegionConfig& config, Rng& rng,
                                     StepTrace* trace = nullptr);
IterationRecord step_second_order(TrustRegionState& state, const ModelBuilder& builder,
                                  Objective& objective, const TrustRegionConfig& config, Rng& rng,
                                  StepTrace* trace = nullptr);

struct RunOptions {
  std::optional<QualityMonitor> monitor;
  std::int64_t radius_window = 10000;        // soft check period for delta_k -> 0
  std::int64_t radius_stall_limit = 100000;  // hard failure
};

struct RunResult {
  TrustRegionState state;
  Termination termination = Termination::budget;
  std::int64_t evaluations = 0;
  MonitorStats monitor;
  std::int64_t radius_warnings = 0;

  const std::vector<IterationRecord>& trace() const { return state.history; }
};

/// Iterates until the budget is spent, delta < delta_min, or f <= f_target.
/// Deterministic given config.seed.
RunResult run(Driver driver, const ModelBuilder& builder, Objective& objective, const Vector& x0,
              const TrustRegionConfig& config, const RunOptions& options = {});

}  // namespace probtr
