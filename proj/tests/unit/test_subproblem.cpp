#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "probtr/sampling.hpp"
#include "probtr/subproblem.hpp"

namespace probtr {
namespace {

QuadraticModel model(const Vector& g, const Matrix& H) {
  return QuadraticModel(Vector::Zero(g.size()), 0.0, g, H);
}

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

Matrix diag(std::initializer_list<double> v) { return vec(v).asDiagonal(); }

// Independent oracle: dense scan of m(-t g/|g|) over t in [0, delta].
double scan_cauchy_decrease(const Vector& g, const Matrix& H, double delta, double step) {
  const Vector d = -g / g.norm();
  double best = 0.0;
  for (double t = 0.0; t <= delta + 1e-15; t += step) {
    const double m = t * g.dot(d) + 0.5 * t * t * d.dot(H * d);
    best = std::min(best, m);
  }
  return -best;
}

TEST(CauchyStep, LinearModelGoesToBoundary) {
  const StepResult r = cauchy_step(model(vec({1, 0}), Matrix::Zero(2, 2)), 1.0);
  EXPECT_EQ(r.kind, StepKind::cauchy);
  EXPECT_TRUE(r.s.isApprox(vec({-1, 0})));
  EXPECT_DOUBLE_EQ(r.predicted_decrease, 1.0);
}

TEST(CauchyStep, InteriorMinimizerMatchesScan) {
  const Vector g = vec({1, 0});
  const Matrix H = Matrix::Identity(2, 2);
  const StepResult r = cauchy_step(model(g, H), 2.0);
  EXPECT_NEAR((r.s - vec({-1, 0})).norm(), 0.0, 1e-12);
  EXPECT_NEAR(r.predicted_decrease, 0.5, 1e-12);
  EXPECT_NEAR(r.predicted_decrease, scan_cauchy_decrease(g, H, 2.0, 1e-6), 1e-9);
}

TEST(CauchyStep, ZeroGradient) {
  const StepResult r = cauchy_step(model(vec({0, 0}), diag({1, -3})), 1.0);
  EXPECT_EQ(r.kind, StepKind::zero);
  EXPECT_EQ(r.s, Vector::Zero(2));
  EXPECT_EQ(r.predicted_decrease, 0.0);
}

TEST(CauchyStep, NegativeCurvatureAlongGradientHitsBoundary) {
  const Vector g = vec({0.3, -0.4});
  const Matrix H = diag({-1, -2});
  const StepResult r = cauchy_step(model(g, H), 0.7);
  EXPECT_NEAR(r.s.norm(), 0.7, 1e-14);
  EXPECT_NEAR(r.predicted_decrease, scan_cauchy_decrease(g, H, 0.7, 1e-6), 1e-9);
}

TEST(SmallestEigenpair, Examples) {
  Eigenpair e = smallest_eigenpair(diag({1, -2}));
  EXPECT_DOUBLE_EQ(e.value, -2.0);
  EXPECT_NEAR(std::abs(e.vector(1)), 1.0, 1e-14);

  e = smallest_eigenpair(Matrix::Identity(3, 3));
  EXPECT_DOUBLE_EQ(e.value, 1.0);
  EXPECT_NEAR(e.vector.norm(), 1.0, 1e-14);

  // Hessian of x y^2 at (-1, 0): [[0, 2y], [2y, 2x]].
  Matrix H(2, 2);
  H << 0.0, 0.0, 0.0, -2.0;
  e = smallest_eigenpair(H);
  EXPECT_DOUBLE_EQ(e.value, -2.0);
  EXPECT_NEAR(std::abs(e.vector(1)), 1.0, 1e-14);
}

TEST(SmallestEigenpair, ResidualOnRandomMatrices) {
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 10;
    Matrix A(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) A(i, j) = rng.normal();
    const Matrix H = A + A.transpose();
    const Eigenpair e = smallest_eigenpair(H);
    EXPECT_NEAR(e.vector.norm(), 1.0, 1e-12);
    EXPECT_LE((H * e.vector - e.value * e.vector).norm(), 1e-10 * std::max(1.0, spectral_norm(H)));
    // Rayleigh quotients never go below the minimum eigenvalue.
    for (int k = 0; k < 5; ++k) {
      const Vector v = rng.unit_vector(n);
      EXPECT_GE(v.dot(H * v), e.value - 1e-10 * std::max(1.0, spectral_norm(H)));
    }
  }
}

TEST(Eigenstep, ZeroGradientIndefinite) {
  const StepResult r = eigenstep(model(vec({0, 0}), diag({1, -2})), 1.0);
  EXPECT_EQ(r.kind, StepKind::eigen);
  EXPECT_NEAR(std::abs(r.s(1)), 1.0, 1e-14);
  EXPECT_NEAR(r.predicted_decrease, 1.0, 1e-14);

  // Oracle: scan the unit circle at 1e-4 radian resolution.
  double best = 0.0;
  for (double a = 0.0; a < 2.0 * std::numbers::pi; a += 1e-4) {
    const double c = std::cos(a), s = std::sin(a);
    best = std::min(best, 0.5 * (c * c - 2.0 * s * s));
  }
  EXPECT_NEAR(r.predicted_decrease, -best, 1e-7);
}

TEST(Eigenstep, NoNegativeCurvature) {
  const StepResult r = eigenstep(model(vec({1, 1}), Matrix::Identity(2, 2)), 1.0);
  EXPECT_EQ(r.kind, StepKind::zero);
  EXPECT_EQ(r.predicted_decrease, 0.0);
}

TEST(Eigenstep, SignFollowsGradient) {
  const StepResult r = eigenstep(model(vec({0, 1}), diag({0, -1})), 2.0);
  EXPECT_TRUE(r.s.isApprox(vec({0, -2})));
  // m(0, -2) = -2 - 2 = -4
  EXPECT_NEAR(r.predicted_decrease, 4.0, 1e-14);
}

TEST(SolveFirstOrder, DelegatesToCauchy) {
  StepResult r = solve_first_order(model(vec({1, 0}), Matrix::Zero(2, 2)), 1.0, {false});
  EXPECT_EQ(r.kind, StepKind::cauchy);
  EXPECT_DOUBLE_EQ(r.predicted_decrease, 1.0);
  r = solve_first_order(model(vec({1, 0}), Matrix::Identity(2, 2)), 2.0, {false});
  EXPECT_NEAR(r.predicted_decrease, 0.5, 1e-14);
  r = solve_first_order(model(vec({0, 0}), Matrix::Identity(2, 2)), 1.0, {false});
  EXPECT_EQ(r.kind, StepKind::zero);
}

TEST(SolveSecondOrder, Examples) {
  StepResult r = solve_second_order(model(vec({1, 0}), Matrix::Zero(2, 2)), 1.0, {false});
  EXPECT_EQ(r.kind, StepKind::cauchy);
  EXPECT_DOUBLE_EQ(r.predicted_decrease, 1.0);

  r = solve_second_order(model(vec({0, 0}), diag({1, -2})), 1.0, {false});
  EXPECT_EQ(r.kind, StepKind::eigen);
  EXPECT_NEAR(r.predicted_decrease, 1.0, 1e-14);

  r = solve_second_order(model(vec({0, 0}), diag({1, 2})), 1.0, {false});
  EXPECT_EQ(r.kind, StepKind::zero);
  EXPECT_EQ(r.predicted_decrease, 0.0);
}

TEST(ModelMinimizer, BeatsOrMatchesCauchyAndHandlesHardCase) {
  // Hard case: g orthogonal to the most negative eigenvector.
  const QuadraticModel m = model(vec({1, 0}), diag({1, -1}));
  const StepResult r = model_minimizer_step(m, 2.0);
  EXPECT_NEAR(r.s.norm(), 2.0, 1e-10);
  EXPECT_GE(r.predicted_decrease, cauchy_step(m, 2.0).predicted_decrease);
  EXPECT_GE(r.predicted_decrease, eigenstep(m, 2.0).predicted_decrease);
  EXPECT_NEAR(r.predicted_decrease, -m.value_at_step(r.s), 1e-12);
  // Oracle: scan the disc boundary; with an indefinite H the minimizer lies there.
  double best = 0.0;
  for (double a = 0.0; a < 2.0 * std::numbers::pi; a += 1e-5) {
    const Vector s = 2.0 * vec({std::cos(a), std::sin(a)});
    best = std::min(best, m.value_at_step(s));
  }
  EXPECT_NEAR(r.predicted_decrease, -best, 1e-6);
}

TEST(Subproblem, FuzzedDecreaseBounds) {
  Rng rng(20240601);
  for (int trial = 0; trial < 3000; ++trial) {
    const int n = 1 + trial % 10;
    Vector g = rng.normal_vector(n) * std::pow(10.0, 4.0 * rng.uniform() - 2.0);
    if (trial % 17 == 0) g.setZero();
    Matrix A(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) A(i, j) = rng.normal();
    Matrix H = (A + A.transpose()) * std::pow(10.0, 4.0 * rng.uniform() - 2.0);
    if (trial % 13 == 0) H.setZero();
    const double delta = std::pow(10.0, 4.0 * rng.uniform() - 2.0);
    const QuadraticModel m = model(g, H);
    for (const bool minimizer : {false, true}) {
      const StepResult first = solve_first_order(m, delta, {minimizer});
      const StepResult second = solve_second_order(m, delta, {minimizer});
      for (const StepResult* r : {&first, &second}) {
        EXPECT_LE(r->s.norm(), delta * (1.0 + 1e-12));
        EXPECT_GE(r->predicted_decrease, 0.0);
        EXPECT_NEAR(r->predicted_decrease, -m.value_at_step(r->s),
                    1e-10 * std::max(1.0, r->predicted_decrease));
      }
      EXPECT_TRUE(satisfies_bound(first.predicted_decrease, cauchy_decrease_bound(g, H, delta)));
      EXPECT_TRUE(satisfies_bound(second.predicted_decrease, optimal_decrease_bound(g, H, delta)));
    }
  }
}

TEST(Eigenstep, ExactDecreaseAtZeroGradient) {
  Rng rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 1 + trial % 8;
    Matrix A(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) A(i, j) = rng.normal();
    const Matrix H = A + A.transpose();
    const double lmin = smallest_eigenpair(H).value;
    if (lmin >= 0.0) continue;
    const double delta = 0.1 + rng.uniform();
    const StepResult r = eigenstep(model(Vector::Zero(n), H), delta);
    EXPECT_NEAR(r.predicted_decrease, 0.5 * -lmin * delta * delta, 1e-10 * std::max(1.0, -lmin));
  }
}

TEST(DecreaseBounds, ZeroHessianSelectsRadius) {
  EXPECT_DOUBLE_EQ(cauchy_decrease_bound(vec({3, 4}), Matrix::Zero(2, 2), 0.5), 0.5 * 5.0 * 0.5);
  EXPECT_DOUBLE_EQ(cauchy_decrease_bound(vec({3, 4}), 10.0 * Matrix::Identity(2, 2), 1.0),
                   0.5 * 5.0 * 0.5);
  EXPECT_DOUBLE_EQ(optimal_decrease_bound(vec({0, 0}), diag({1, -4}), 1.0), 2.0);
}

}  // namespace
}  // namespace probtr
