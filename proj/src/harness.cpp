#include "probtr/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include <fmt/core.h>
#include <fmt/ostream.h>

namespace probtr {

Objective rosenbrock(double a) { return embedded_rosenbrock(2, a); }

Objective embedded_rosenbrock(int n, double a) {
  if (n < 2) throw std::invalid_argument("embedded_rosenbrock: n < 2");
  Objective f(n, [a](const Vector& x) {
    const double r = x(1) - x(0) * x(0);
    return a * r * r + (1.0 - x(0)) * (1.0 - x(0));
  });
  f.with_gradient([a, n](const Vector& x) {
     Vector g = Vector::Zero(n);
     const double r = x(1) - x(0) * x(0);
     g(0) = -4.0 * a * x(0) * r - 2.0 * (1.0 - x(0));
     g(1) = 2.0 * a * r;
     return g;
   })
      .with_hessian([a, n](const Vector& x) {
        Matrix H = Matrix::Zero(n, n);
        H(0, 0) = 12.0 * a * x(0) * x(0) - 4.0 * a * x(1) + 2.0;
        H(0, 1) = H(1, 0) = -4.0 * a * x(0);
        H(1, 1) = 2.0 * a;
        return H;
      })
      .with_lower_bound(0.0);
  return f;
}

Objective sphere(int n) {
  Objective f(n, [](const Vector& x) { return x.squaredNorm(); });
  f.with_gradient([](const Vector& x) -> Vector { return 2.0 * x; })
      .with_hessian([n](const Vector&) -> Matrix { return 2.0 * Matrix::Identity(n, n); })
      .with_lower_bound(0.0);
  return f;
}

Vector default_start(const std::string& function, int n) {
  if (function == "sphere") return Vector::Ones(n);
  Vector x = Vector::Zero(n);
  x(0) = -1.2;
  x(1) = 1.0;
  return x;
}

Objective make_function(const std::string& name, int n) {
  if (name == "rosenbrock") return embedded_rosenbrock(n, 100.0);
  if (name == "rosenbrock10") return embedded_rosenbrock(n, 10.0);
  if (name == "sparse10") return embedded_rosenbrock(10, 10.0);
  if (name == "sphere") return sphere(n);
  throw ConfigError("unknown function: " + name);
}

namespace {

const std::vector<std::string> kTrustRegionMethods{
    "trq",          "mfn-coordinate",   "mfn-random",     "rstr",         "gstr",
    "mfn-greedy",   "interp1-gaussian", "interp1-ball",   "interp2-gaussian", "interp2-ball"};
const std::vector<std::string> kDirectSearchMethods{"cs", "dsr", "rs"};
const std::vector<std::string> kExperiments{"rosenbrock2d", "mfn-vs-random", "sparse10d", "diagnostics"};

bool contains(const std::vector<std::string>& list, const std::string& item) {
  return std::find(list.begin(), list.end(), item) != list.end();
}

constexpr int kDefaultRandomPoints = 26;
constexpr int kDefaultGreedyCap = 31;

}  // namespace

bool is_direct_search(const std::string& method) { return contains(kDirectSearchMethods, method); }
bool is_trust_region(const std::string& method) { return contains(kTrustRegionMethods, method); }

ModelBuilder make_builder(const std::string& name, int points, double trq_sample_radius) {
  if (name == "trq") return coordinate_quadratic_builder(trq_sample_radius);
  if (name == "mfn-coordinate") return coordinate_mfn_builder();
  if (name == "mfn-random") return random_ball_mfn_builder(points > 0 ? points : kDefaultRandomPoints);
  if (name == "rstr") return random_ball_l1_builder(points > 0 ? points : kDefaultRandomPoints);
  if (name == "gstr") return greedy_l1_builder(points > 0 ? points : kDefaultGreedyCap);
  if (name == "mfn-greedy") return greedy_mfn_builder(points > 0 ? points : kDefaultGreedyCap);
  if (name == "interp1-gaussian") return determined_interpolation_builder(1, SetGenerator::gaussian);
  if (name == "interp1-ball") return determined_interpolation_builder(1, SetGenerator::ball);
  if (name == "interp2-gaussian") return determined_interpolation_builder(2, SetGenerator::gaussian);
  if (name == "interp2-ball") return determined_interpolation_builder(2, SetGenerator::ball);
  throw ConfigError("unknown builder: " + name);
}

void ExperimentConfig::validate() const {
  if (!contains(kExperiments, experiment)) throw ConfigError("unknown experiment: " + experiment);
  if (seeds.empty()) throw ConfigError("seeds: at least one seed is required");
  if (experiment != "diagnostics" && methods.empty()) throw ConfigError("methods: empty list");
  for (const std::string& m : methods) {
    if (!is_direct_search(m) && !is_trust_region(m)) throw ConfigError("unknown method: " + m);
  }
  trust_region.validate();
  if (!(c_rs > 0.0)) throw ConfigError("c_rs must be positive");
  if (!(trq_sample_radius > 0.0)) throw ConfigError("trq_sample_radius must be positive");
  if (sample_points < 0) throw ConfigError("sample_points must be non-negative");
  if (greedy_cap < 2) throw ConfigError("greedy_cap must be at least 2");
  if (trials < 1000) throw ConfigError("trials must be at least 1000");
}

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

struct LineError {
  int line;
  [[noreturn]] void fail(const std::string& message) const {
    throw ConfigError(fmt::format("line {}: {}", line, message));
  }
};

double parse_double(const std::string& text, const LineError& where) {
  std::string t = trim(text);
  if (t == "inf" || t == "+inf") return std::numeric_limits<double>::infinity();
  if (t == "-inf") return -std::numeric_limits<double>::infinity();
  if (!t.empty() && t[0] == '+') t.erase(0, 1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) where.fail("not a number: " + text);
  return value;
}

std::int64_t parse_int(const std::string& text, const LineError& where) {
  const std::string t = trim(text);
  std::int64_t value = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    // Allow integral values written as 1e5.
    const double d = parse_double(t, where);
    if (d != std::floor(d) || std::abs(d) > 9e15) where.fail("not an integer: " + text);
    return static_cast<std::int64_t>(d);
  }
  return value;
}

std::string parse_string(const std::string& text, const LineError& where) {
  const std::string t = trim(text);
  if (t.size() >= 2 && t.front() == '"' && t.back() == '"') return t.substr(1, t.size() - 2);
  if (t.empty() || t.find_first_of("\"[],") != std::string::npos) where.fail("bad string: " + text);
  return t;
}

bool parse_bool(const std::string& text, const LineError& where) {
  const std::string t = trim(text);
  if (t == "true" || t == "1") return true;
  if (t == "false" || t == "0") return false;
  where.fail("not a boolean: " + text);
}

std::vector<std::string> parse_list(const std::string& text, const LineError& where) {
  const std::string t = trim(text);
  if (t.size() < 2 || t.front() != '[' || t.back() != ']') where.fail("expected a [..] list: " + text);
  std::vector<std::string> items;
  const std::string body = trim(t.substr(1, t.size() - 2));
  if (body.empty()) return items;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (trim(item).empty()) where.fail("empty list element");
    items.push_back(trim(item));
  }
  if (body.back() == ',') where.fail("trailing comma in list");
  return items;
}

// Strips a comment that is not inside a quoted string.
std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

Driver parse_driver(const std::string& name, const LineError& where) {
  if (name == "first") return Driver::first_order;
  if (name == "three") return Driver::three_threshold;
  if (name == "second") return Driver::second_order;
  where.fail("unknown driver: " + name);
}

std::vector<std::uint64_t> default_seeds() {
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t s = 1; s <= 11; ++s) seeds.push_back(s);
  return seeds;
}

}  // namespace

void apply_experiment_defaults(ExperimentConfig& config, const std::vector<std::string>& given) {
  auto absent = [&](const char* key) { return !contains(given, key); };
  TrustRegionConfig& tr = config.trust_region;
  if (absent("seeds")) config.seeds = default_seeds();
  if (config.experiment == "rosenbrock2d") {
    if (absent("methods")) config.methods = {"cs", "dsr", "rs", "trq"};
    if (absent("f_target")) tr.f_target = 1e-6;
    if (absent("budget")) tr.budget = 20000;
    if (absent("c_rs")) config.c_rs = 5.0;
  } else if (config.experiment == "mfn-vs-random") {
    if (absent("methods")) config.methods = {"mfn-coordinate", "mfn-random"};
    if (absent("f_target")) tr.f_target = 1e-4;
    if (absent("budget")) tr.budget = 20000;
    if (absent("sample_points")) config.sample_points = 4;
  } else if (config.experiment == "sparse10d") {
    if (absent("methods")) config.methods = {"rstr", "gstr", "mfn-greedy"};
    if (absent("f_target")) tr.f_target = 1e-10;
    if (absent("budget")) tr.budget = 3000;
    if (absent("eta2")) tr.eta2 = 0.1;
    if (absent("eta3")) tr.eta3 = 0.05;
    if (absent("sample_points")) config.sample_points = kDefaultRandomPoints;
  }
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig config;
  TrustRegionConfig& tr = config.trust_region;
  std::vector<std::string> given;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const LineError where{line_no};
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) where.fail("expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) where.fail("missing key");
    if (value.empty()) where.fail("missing value for " + key);
    if (contains(given, key)) where.fail("repeated key: " + key);
    given.push_back(key);

    if (key == "experiment") {
      config.experiment = parse_string(value, where);
      if (!contains(kExperiments, config.experiment)) where.fail("unknown experiment: " + config.experiment);
    } else if (key == "methods") {
      config.methods.clear();
      for (const std::string& item : parse_list(value, where)) {
        const std::string m = parse_string(item, where);
        if (!is_direct_search(m) && !is_trust_region(m)) where.fail("unknown method: " + m);
        config.methods.push_back(m);
      }
    } else if (key == "seeds") {
      config.seeds.clear();
      for (const std::string& item : parse_list(value, where)) {
        const std::int64_t s = parse_int(item, where);
        if (s < 0) where.fail("seeds must be non-negative");
        config.seeds.push_back(static_cast<std::uint64_t>(s));
      }
      if (config.seeds.empty()) where.fail("seeds: at least one seed is required");
    } else if (key == "output_dir") {
      config.output_dir = parse_string(value, where);
    } else if (key == "driver") {
      config.driver = parse_driver(parse_string(value, where), where);
    } else if (key == "c_rs") {
      config.c_rs = parse_double(value, where);
    } else if (key == "trq_sample_radius") {
      config.trq_sample_radius = parse_double(value, where);
    } else if (key == "sample_points") {
      config.sample_points = static_cast<int>(parse_int(value, where));
    } else if (key == "greedy_cap") {
      config.greedy_cap = static_cast<int>(parse_int(value, where));
    } else if (key == "trials") {
      config.trials = static_cast<int>(parse_int(value, where));
    } else if (key == "eta1") {
      tr.eta1 = parse_double(value, where);
    } else if (key == "eta2") {
      tr.eta2 = parse_double(value, where);
    } else if (key == "eta3") {
      tr.eta3 = parse_double(value, where);
    } else if (key == "gamma") {
      tr.gamma = parse_double(value, where);
    } else if (key == "delta_max") {
      tr.delta_max = parse_double(value, where);
    } else if (key == "delta0") {
      tr.delta0 = parse_double(value, where);
    } else if (key == "kappa_bhm") {
      tr.kappa_bhm = parse_double(value, where);
    } else if (key == "budget") {
      tr.budget = parse_int(value, where);
    } else if (key == "seed") {
      const std::int64_t s = parse_int(value, where);
      if (s < 0) where.fail("seed must be non-negative");
      tr.seed = static_cast<std::uint64_t>(s);
    } else if (key == "delta_min") {
      tr.delta_min = parse_double(value, where);
    } else if (key == "f_target") {
      tr.f_target = parse_double(value, where);
    } else if (key == "model_minimizer_step") {
      tr.model_minimizer_step = parse_bool(value, where);
    } else {
      where.fail("unknown key: " + key);
    }
  }
  apply_experiment_defaults(config, given);
  config.validate();
  return config;
}

std::string format_trace_line(const IterationRecord& record) {
  std::string rho = "nan";
  if (record.rho && !std::isnan(*record.rho)) rho = fmt::format("{:+.2e}", *record.rho);
  return fmt::format("{}\t{}\t{:+.8e}\t{:+.2e}\t{}", record.iter, record.success ? 1 : 0, record.f,
                     record.delta, rho);
}

void emit_trace(const std::vector<IterationRecord>& trace, std::ostream& sink) {
  sink << kTraceHeader << '\n';
  for (const IterationRecord& record : trace) sink << format_trace_line(record) << '\n';
  if (!sink) throw Error("trace sink write failure");
}

std::vector<IterationRecord> parse_trace(std::istream& source) {
  std::string line;
  if (!std::getline(source, line) || line != kTraceHeader) throw Error("trace: missing header");
  std::vector<IterationRecord> trace;
  int line_no = 1;
  while (std::getline(source, line)) {
    ++line_no;
    if (line.empty()) continue;
    const LineError where{line_no};
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, '\t')) fields.push_back(field);
    if (fields.size() != 5) throw Error(fmt::format("trace line {}: expected 5 fields", line_no));
    try {
      IterationRecord record;
      record.iter = parse_int(fields[0], where);
      record.success = parse_int(fields[1], where) != 0;
      record.f = parse_double(fields[2], where);
      record.delta = parse_double(fields[3], where);
      if (fields[4] != "nan") record.rho = parse_double(fields[4], where);
      trace.push_back(record);
    } catch (const ConfigError& e) {
      throw Error(std::string("trace: ") + e.what());
    }
  }
  return trace;
}

void emit_path(const std::vector<PathPoint>& path, std::ostream& sink) {
  const Eigen::Index n = path.empty() ? 0 : path.front().x.size();
  sink << 'k';
  for (Eigen::Index i = 0; i < n; ++i) sink << "\tx" << (i + 1);
  sink << "\tf\n";
  for (const PathPoint& p : path) {
    sink << p.k;
    for (Eigen::Index i = 0; i < p.x.size(); ++i) sink << fmt::format("\t{:+.16e}", p.x(i));
    sink << fmt::format("\t{:+.16e}\n", p.f);
  }
  if (!sink) throw Error("path sink write failure");
}

double median(std::vector<double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  if (values.size() % 2 == 1) return values[mid];
  return 0.5 * (values[mid - 1] + values[mid]);
}

MethodSummary summarize(const std::vector<MethodRun>& runs) {
  std::vector<double> its, evals, fs, to_target;
  for (const MethodRun& r : runs) {
    its.push_back(static_cast<double>(r.iterations));
    evals.push_back(static_cast<double>(r.evaluations));
    fs.push_back(r.final_f);
    to_target.push_back(r.reached_target ? static_cast<double>(r.evaluations)
                                         : std::numeric_limits<double>::infinity());
  }
  return MethodSummary{median(its), median(evals), median(fs), median(to_target)};
}

std::int64_t trace_iterations(const std::vector<IterationRecord>& trace) {
  return static_cast<std::int64_t>(trace.size());
}

double trace_final_f(const std::vector<IterationRecord>& trace, double f0) {
  return trace.empty() ? f0 : trace.back().f;
}

void write_report(const Report& report, std::ostream& sink) {
  sink << "experiment: " << report.experiment << "\n\n";
  if (!report.runs.empty()) {
    sink << fmt::format("{:<18}{:>8}{:>12}{:>14}{:>18}  {}\n", "method", "seed", "iterations",
                        "evaluations", "final f", "termination");
    for (const MethodRun& r : report.runs) {
      sink << fmt::format("{:<18}{:>8}{:>12}{:>14}{:>18.8e}  {}\n", r.method, r.seed, r.iterations,
                          r.evaluations, r.final_f, r.termination);
    }
    sink << "\nmedians\n";
    sink << fmt::format("{:<18}{:>12}{:>14}{:>18}{:>18}\n", "method", "iterations", "evaluations",
                        "final f", "evals to target");
    for (const auto& [method, s] : report.summary) {
      sink << fmt::format("{:<18}{:>12.1f}{:>14.1f}{:>18.8e}{:>18.1f}\n", method, s.median_iterations,
                          s.median_evaluations, s.median_final_f, s.median_evaluations_to_target);
    }
  }
  sink << "\n[values]\n";
  sink << "experiment = " << report.experiment << '\n';
  for (const MethodRun& r : report.runs) {
    const std::string prefix = fmt::format("run.{}.{}", r.method, r.seed);
    sink << fmt::format("{}.iterations = {}\n", prefix, r.iterations);
    sink << fmt::format("{}.evaluations = {}\n", prefix, r.evaluations);
    sink << fmt::format("{}.final_f = {:+.8e}\n", prefix, r.final_f);
    sink << fmt::format("{}.termination = {}\n", prefix, r.termination);
  }
  for (const auto& [method, s] : report.summary) {
    sink << fmt::format("median.{}.iterations = {}\n", method, s.median_iterations);
    sink << fmt::format("median.{}.evaluations = {}\n", method, s.median_evaluations);
    sink << fmt::format("median.{}.final_f = {:+.8e}\n", method, s.median_final_f);
    sink << fmt::format("median.{}.evaluations_to_target = {}\n", method, s.median_evaluations_to_target);
  }
  for (const auto& [key, value] : report.extra) sink << key << " = " << value << '\n';
  if (!sink) throw Error("report sink write failure");
}

MethodRun run_method(const std::string& method, const ExperimentConfig& config, std::uint64_t seed,
                     Objective& objective, const Vector& x0) {
  MethodRun out;
  out.method = method;
  out.seed = seed;
  const TrustRegionConfig& tr = config.trust_region;
  try {
    if (is_direct_search(method)) {
      DirectSearchConfig ds;
      ds.step0 = tr.delta0;
      ds.step_max = tr.delta_max;
      ds.c_rs = config.c_rs;
      ds.budget = tr.budget;
      ds.seed = seed;
      ds.f_target = tr.f_target;
      ds.step_min = tr.delta_min;
      const DirectSearchMethod m = method == "cs"    ? DirectSearchMethod::cs
                                   : method == "dsr" ? DirectSearchMethod::dsr
                                                     : DirectSearchMethod::rs;
      DirectSearchResult r = run_direct_search(m, objective, x0, ds);
      out.evaluations = r.evaluations;
      out.reached_target = r.reached_target;
      out.termination = r.reached_target ? "target" : (r.evaluations >= tr.budget ? "budget" : "step_min");
      out.trace = std::move(r.trace);
      out.path = std::move(r.state.path);
    } else {
      const int points = (method == "gstr" || method == "mfn-greedy") ? config.greedy_cap : config.sample_points;
      const ModelBuilder builder = make_builder(method, points, config.trq_sample_radius);
      TrustRegionConfig run_config = tr;
      run_config.seed = seed;
      RunOptions options;
      options.monitor = config.monitor;
      RunResult r = run(config.driver, builder, objective, x0, run_config, options);
      out.monitor = r.monitor;
      out.evaluations = r.evaluations;
      out.reached_target = r.termination == Termination::target;
      out.termination = to_string(r.termination);
      out.trace = std::move(r.state.history);
      out.path = std::move(r.state.path);
    }
  } catch (const Error& e) {
    throw Error(fmt::format("method {} seed {}: {}", method, seed, e.what()));
  }
  out.iterations = trace_iterations(out.trace);
  out.final_f = trace_final_f(out.trace, out.path.empty() ? std::numeric_limits<double>::quiet_NaN()
                                                          : out.path.front().f);
  return out;
}

namespace {

std::string experiment_function(const std::string& experiment) {
  if (experiment == "rosenbrock2d") return "rosenbrock";
  if (experiment == "mfn-vs-random") return "rosenbrock10";
  return "sparse10";
}

int experiment_dimension(const std::string& experiment) { return experiment == "sparse10d" ? 10 : 2; }

void run_diagnostics(const ExperimentConfig& config, Report& report) {
  const std::uint64_t seed = config.seeds.front();
  for (const int n : {2, 5, 10}) {
    Rng rng(seed);
    const auto table = condition_number_tail(n, n, {50.0, 100.0, 500.0}, config.trials, rng);
    for (const TailEntry& e : table) {
      const std::string prefix = fmt::format("cond_tail.n{}.lambda{}", n, e.lambda);
      report.extra.emplace_back(prefix + ".estimate", fmt::format("{:.6e}", e.estimate));
      report.extra.emplace_back(prefix + ".stderr", fmt::format("{:.6e}", e.stderr_));
      report.extra.emplace_back(prefix + ".bound", fmt::format("{:.6e}", e.bound));
      report.extra.emplace_back(prefix + ".exceeds", e.exceeds ? "true" : "false");
    }
  }
  for (const int n : {2, 5}) {
    Objective f = embedded_rosenbrock(n, 10.0);
    Rng rng(seed);
    const Vector x = default_start("rosenbrock10", n);
    // Generous constants relative to the local curvature.
    const double k = 10.0 * spectral_norm(f.hessian(x));
    const QualityConstants kappa{k, k, k};
    const RateEstimate rate = estimate_model_quality_rate(make_builder("interp1-gaussian"), f, x, 1e-2,
                                                          kappa, config.trials, rng);
    const std::string prefix = fmt::format("model_rate.interp1-gaussian.n{}", n);
    report.extra.emplace_back(prefix + ".rate", fmt::format("{:.6f}", rate.rate));
    report.extra.emplace_back(prefix + ".stderr", fmt::format("{:.6f}", rate.stderr_));
  }
}

}  // namespace

Report run_experiment(const ExperimentConfig& config) {
  config.validate();
  Report report;
  report.experiment = config.experiment;
  if (config.experiment == "diagnostics") {
    run_diagnostics(config, report);
  } else {
    const std::string function = experiment_function(config.experiment);
    const int n = experiment_dimension(config.experiment);
    const Vector x0 = default_start(function, n);
    for (const std::string& method : config.methods) {
      std::vector<MethodRun> runs;
      for (const std::uint64_t seed : config.seeds) {
        Objective objective = make_function(function, n);
        runs.push_back(run_method(method, config, seed, objective, x0));
      }
      report.summary[method] = summarize(runs);
      for (MethodRun& r : runs) report.runs.push_back(std::move(r));
    }
  }

  if (!config.output_dir.empty()) {
    namespace fs = std::filesystem;
    const fs::path dir(config.output_dir);
    fs::create_directories(dir);
    auto open = [](const fs::path& p) {
      std::ofstream out(p, std::ios::binary);
      if (!out) throw Error("cannot open " + p.string());
      return out;
    };
    for (const MethodRun& r : report.runs) {
      const std::string stem = fmt::format("{}_seed{}", r.method, r.seed);
      std::ofstream trace = open(dir / (stem + ".trace"));
      emit_trace(r.trace, trace);
      std::ofstream path = open(dir / (stem + ".path"));
      emit_path(r.path, path);
    }
    std::ofstream out = open(dir / "report.txt");
    write_report(report, out);
  }
  return report;
}

RateEstimate estimate_model_quality_rate(const ModelBuilder& builder, Objective& objective,
                                         const Vector& x, double delta,
                                         const QualityConstants& kappa, int trials, Rng& rng,
                                         QualityKind kind) {
  if (trials < 100) throw std::invalid_argument("estimate_model_quality_rate: trials < 100");
  if (!objective.has_gradient() || (kind == QualityKind::fully_quadratic && !objective.has_hessian())) {
    throw Error("estimate_model_quality_rate: objective lacks analytic derivatives");
  }
  TrustRegionState base;
  base.x = x;
  base.delta = delta;
  base.f = base.record_evaluation(x, objective(x));
  std::int64_t passed = 0;
  for (int t = 0; t < trials; ++t) {
    TrustRegionState state = base;
    const QuadraticModel model = builder(state, objective, rng);
    const bool ok = kind == QualityKind::fully_linear
                        ? check_fully_linear(model, objective, x, delta, kappa)
                        : check_fully_quadratic(model, objective, x, delta, kappa);
    if (ok) ++passed;
  }
  RateEstimate estimate;
  estimate.trials = trials;
  estimate.rate = static_cast<double>(passed) / trials;
  estimate.stderr_ = std::sqrt(estimate.rate * (1.0 - estimate.rate) / trials);
  return estimate;
}

std::vector<TailEntry> condition_number_tail(int n, int p, const std::vector<double>& lambdas,
                                             int trials, Rng& rng, TailMatrix matrix) {
  if (trials < 1000) throw std::invalid_argument("condition_number_tail: trials < 1000");
  if (n < 1 || p < 1) throw std::invalid_argument("condition_number_tail: n, p >= 1");
  std::vector<std::int64_t> exceed(lambdas.size(), 0);
  for (int t = 0; t < trials; ++t) {
    Matrix G(p, n);
    for (int i = 0; i < p; ++i) G.row(i) = rng.normal_vector(n).transpose();
    double cond = 0.0;
    if (matrix == TailMatrix::gaussian_block) {
      cond = condition_number(G);
    } else {
      Matrix M = Matrix::Zero(p + 1, n + 1);
      M.col(0).setOnes();
      M.bottomRightCorner(p, n) = G;
      cond = condition_number(M);
    }
    for (std::size_t j = 0; j < lambdas.size(); ++j) {
      if (cond > lambdas[j]) ++exceed[j];
    }
  }
  std::vector<TailEntry> table;
  for (std::size_t j = 0; j < lambdas.size(); ++j) {
    TailEntry e;
    e.lambda = lambdas[j];
    e.estimate = static_cast<double>(exceed[j]) / trials;
    e.stderr_ = std::sqrt(e.estimate * (1.0 - e.estimate) / trials);
    e.bound = kTailConstant * n / (std::sqrt(2.0 * M_PI) * e.lambda);
    e.exceeds = e.estimate > e.bound + 3.0 * e.stderr_;
    table.push_back(e);
  }
  return table;
}

}  // namespace probtr
