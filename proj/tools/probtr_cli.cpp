#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "probtr/harness.hpp"

namespace {

using namespace probtr;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cmd_run(const std::string& config_path, const std::string& out_dir,
            const std::optional<std::uint64_t>& seed) {
  ExperimentConfig config = parse_config(read_file(config_path));
  if (!out_dir.empty()) config.output_dir = out_dir;
  if (seed) config.seeds = {*seed};
  const Report report = run_experiment(config);
  write_report(report, std::cout);
  return 0;
}

int cmd_cond_tail(int n, int p, const std::vector<double>& lambdas, int trials, std::uint64_t seed,
                  bool block) {
  Rng rng(seed);
  const auto table = condition_number_tail(n, p, lambdas, trials, rng,
                                           block ? TailMatrix::gaussian_block : TailMatrix::interpolation);
  fmt::print("{:>10}{:>14}{:>14}{:>14}  {}\n", "lambda", "estimate", "stderr", "bound", "flag");
  bool any = false;
  for (const TailEntry& e : table) {
    fmt::print("{:>10g}{:>14.6e}{:>14.6e}{:>14.6e}  {}\n", e.lambda, e.estimate, e.stderr_, e.bound,
               e.exceeds ? "EXCEEDS" : "ok");
    any = any || e.exceeds;
  }
  return any ? 2 : 0;
}

int cmd_model_rate(const std::string& builder_name, const std::string& function, int n, double delta,
                   int trials, std::uint64_t seed, double kappa_ef, double kappa_eg, double kappa_eh,
                   bool quadratic) {
  Objective f = make_function(function, n);
  const int dim = f.dimension();
  const ModelBuilder builder = make_builder(builder_name);
  Rng rng(seed);
  const RateEstimate r = estimate_model_quality_rate(
      builder, f, default_start(function, dim), delta, QualityConstants{kappa_ef, kappa_eg, kappa_eh},
      trials, rng, quadratic ? QualityKind::fully_quadratic : QualityKind::fully_linear);
  fmt::print("builder = {}\nfunction = {}\nn = {}\ndelta = {:g}\ntrials = {}\nrate = {:.6f}\nstderr = {:.6f}\n",
             builder_name, function, dim, delta, r.trials, r.rate, r.stderr_);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trust-region methods with random models"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string out_dir;
  std::optional<std::uint64_t> seed;
  app.add_option("--out", out_dir, "Output directory for traces, paths and the report");
  app.add_option("--seed", seed, "Override the seed list with a single seed");

  auto* run = app.add_subcommand("run", "Run an experiment configuration");
  std::string config_path;
  run->add_option("config", config_path, "Configuration file")->required()->check(CLI::ExistingFile);

  auto* diagnose = app.add_subcommand("diagnose", "Monte-Carlo diagnostics");
  diagnose->require_subcommand(1);

  auto* tail = diagnose->add_subcommand("cond-tail", "Tail of the Gaussian interpolation condition number");
  int n = 2;
  int p = 2;
  std::vector<double> lambdas{50.0, 100.0, 500.0};
  int trials = 100000;
  bool block = false;
  tail->add_option("--n", n, "Dimension")->check(CLI::PositiveNumber);
  tail->add_option("--p", p, "Random points")->check(CLI::PositiveNumber);
  tail->add_option("--lambda", lambdas, "Thresholds")->expected(1, -1);
  tail->add_option("--trials", trials, "Trials (>= 1000)");
  tail->add_flag("--gaussian-block", block, "Measure the p x n Gaussian block only");

  auto* rate = diagnose->add_subcommand("model-rate", "Empirical fully linear / quadratic rate");
  std::string builder = "interp1-gaussian";
  std::string function = "rosenbrock10";
  int rate_n = 2;
  double delta = 1e-2;
  int rate_trials = 10000;
  double kappa_ef = 100.0;
  double kappa_eg = 100.0;
  double kappa_eh = 100.0;
  bool quadratic = false;
  rate->add_option("--builder", builder, "Builder name");
  rate->add_option("--function", function, "rosenbrock, rosenbrock10, sparse10 or sphere");
  rate->add_option("--n", rate_n, "Dimension")->check(CLI::Range(2, 1000));
  rate->add_option("--delta", delta, "Radius")->check(CLI::PositiveNumber);
  rate->add_option("--trials", rate_trials, "Trials (>= 100)");
  rate->add_option("--kappa-ef", kappa_ef, "Value error constant");
  rate->add_option("--kappa-eg", kappa_eg, "Gradient error constant");
  rate->add_option("--kappa-eh", kappa_eh, "Hessian error constant");
  rate->add_flag("--quadratic", quadratic, "Check full quadraticity instead");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path, out_dir, seed);
    const std::uint64_t s = seed.value_or(0);
    if (tail->parsed()) return cmd_cond_tail(n, p, lambdas, trials, s, block);
    if (rate->parsed()) {
      return cmd_model_rate(builder, function, rate_n, delta, rate_trials, s, kappa_ef, kappa_eg,
                            kappa_eh, quadratic);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
