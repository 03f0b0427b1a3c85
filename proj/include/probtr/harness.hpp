#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "probtr/baselines.hpp"
#include "probtr/core.hpp"
#include "probtr/models.hpp"
#include "probtr/sampling.hpp"
#include "probtr/trustregion.hpp"

namespace probtr {

// 2-D Rosenbrock a (x2 - x1^2)^2 + (1 - x1)^2 with analytic derivatives.
Objective rosenbrock(double a = 100.0);
// The same function of (x1, x2) in R^n; the other coordinates do not matter.
Objective embedded_rosenbrock(int n, double a);
Objective sphere(int n);

// Standard start: (-1.2, 1, 0, ..., 0) for the Rosenbrock variants, ones for the sphere.
Vector default_start(const std::string& function, int n);
// "rosenbrock" (a = 100), "rosenbrock10" (a = 10, n = 2), "sparse10" (a = 10, n = 10), "sphere".
Objective make_function(const std::string& name, int n);

/// Trust-region builders by name: trq, mfn-coordinate, mfn-random, rstr,
/// gstr, mfn-greedy, interp1-gaussian, interp1-ball, interp2-gaussian,
/// interp2-ball. `points` is the random sample count (mfn-random, rstr) or the
/// greedy cap (gstr, mfn-greedy); 0 selects the default.
inline constexpr double kDefaultTrqSampleRadius = 1e-3;
ModelBuilder make_builder(const std::string& name, int points = 0,
                          double trq_sample_radius = kDefaultTrqSampleRadius);

bool is_direct_search(const std::string& method);
bool is_trust_region(const std::string& method);

struct ExperimentConfig {
  std::string experiment = "rosenbrock2d";
  std::vector<std::string> methods;
  std::vector<std::uint64_t> seeds{0};
  std::string output_dir;
  Driver driver = Driver::first_order;
  TrustRegionConfig trust_region;
  double c_rs = 1.0;
  double trq_sample_radius = kDefaultTrqSampleRadius;
  int sample_points = 0;  // random builders; 0 = experiment default
  int greedy_cap = 31;
  int trials = 10000;     // diagnostics
  // Runtime quality monitor for trust-region runs; set programmatically only.
  std::optional<QualityMonitor> monitor;

  // Throws ConfigError.
  void validate() const;
};

/// Flat `key = value` grammar. One assignment per line, `#` starts a comment,
/// values are numbers, bare or double-quoted strings, booleans, or
/// bracketed comma-separated lists. Unknown keys and repeated keys are errors.
/// Keys: experiment, methods, seeds, output_dir, driver, c_rs, trq_sample_radius, sample_points,
/// greedy_cap, trials, and every TrustRegionConfig field (eta1, eta2, eta3,
/// gamma, delta_max, delta0, kappa_bhm, budget, seed, delta_min, f_target,
/// model_minimizer_step). Experiment defaults apply to keys not given.
ExperimentConfig parse_config(const std::string& text);

// Defaults for keys absent from the text, per experiment.
void apply_experiment_defaults(ExperimentConfig& config, const std::vector<std::string>& given);

// Header line then `iter\tsuccess\tf\tdelta\trho` per record.
inline constexpr const char* kTraceHeader = "iter\tsuccess\tf\tdelta\trho";
std::string format_trace_line(const IterationRecord& record);
void emit_trace(const std::vector<IterationRecord>& trace, std::ostream& sink);
std::vector<IterationRecord> parse_trace(std::istream& source);

// `k x1 ... xn f`, tab separated, with a header.
void emit_path(const std::vector<PathPoint>& path, std::ostream& sink);

struct MethodRun {
  std::string method;
  std::uint64_t seed = 0;
  std::int64_t iterations = 0;
  std::int64_t evaluations = 0;
  double final_f = 0.0;
  std::string termination;
  bool reached_target = false;
  MonitorStats monitor;  // zero unless the config enables the monitor
  std::vector<IterationRecord> trace;
  std::vector<PathPoint> path;
};

struct MethodSummary {
  double median_iterations = 0.0;
  double median_evaluations = 0.0;
  double median_final_f = 0.0;
  // Runs that missed the target count as +inf.
  double median_evaluations_to_target = 0.0;
};

struct Report {
  std::string experiment;
  std::vector<MethodRun> runs;                   // ordered by (method, seed)
  std::map<std::string, MethodSummary> summary;  // per method
  std::vector<std::pair<std::string, std::string>> extra;  // diagnostics key/values
};

double median(std::vector<double> values);
MethodSummary summarize(const std::vector<MethodRun>& runs);

// Iterations and final f recomputed from a trace; f0 is used for an empty one.
std::int64_t trace_iterations(const std::vector<IterationRecord>& trace);
double trace_final_f(const std::vector<IterationRecord>& trace, double f0);

void write_report(const Report& report, std::ostream& sink);

MethodRun run_method(const std::string& method, const ExperimentConfig& config, std::uint64_t seed,
                     Objective& objective, const Vector& x0);

/// Runs every (method, seed) pair of the experiment. When output_dir is set,
/// writes <method>_seed<seed>.trace, <method>_seed<seed>.path and report.txt.
Report run_experiment(const ExperimentConfig& config);

struct RateEstimate {
  double rate = 0.0;
  double stderr_ = 0.0;
  std::int64_t trials = 0;
};

enum class QualityKind { fully_linear, fully_quadratic };

/// Builds `trials` independent models at fixed (x, delta) and reports the
/// fraction that pass the fully linear (or quadratic) check, with its
/// binomial standard error. Requires trials >= 100 and analytic derivatives.
RateEstimate estimate_model_quality_rate(const ModelBuilder& builder, Objective& objective,
                                         const Vector& x, double delta,
                                         const QualityConstants& kappa, int trials, Rng& rng,
                                         QualityKind kind = QualityKind::fully_linear);

struct TailEntry {
  double lambda = 0.0;
  double estimate = 0.0;
  double stderr_ = 0.0;
  double bound = 0.0;  // 6.5 n / (sqrt(2 pi) lambda)
  bool exceeds = false;
};

// Which matrix the tail is measured on: the full linear interpolation matrix
// M(Phi, Y) for Y = {0, y_1..y_p}, or its p x n Gaussian block.
enum class TailMatrix { interpolation, gaussian_block };

inline constexpr double kTailConstant = 6.5;

/// Monte-Carlo estimate of P(cond > lambda) for Gaussian sample sets with p
/// random points in R^n. Requires trials >= 1000.
std::vector<TailEntry> condition_number_tail(int n, int p, const std::vector<double>& lambdas,
                                             int trials, Rng& rng,
                                             TailMatrix matrix = TailMatrix::interpolation);

}  // namespace probtr
