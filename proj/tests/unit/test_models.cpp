#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "probtr/models.hpp"
#include "probtr/subproblem.hpp"

namespace probtr {
namespace {

SampleSet make_set(const Vector& center, double radius, const std::vector<Vector>& points) {
  SampleSet s;
  s.center = center;
  s.radius = radius;
  s.points = points;
  return s;
}

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

SampleSet simplex2() { return make_set(vec({0, 0}), 1.0, {vec({0, 0}), vec({1, 0}), vec({0, 1})}); }

Vector values(const SampleSet& Y, const std::function<double(const Vector&)>& f) {
  Vector v(Y.size());
  for (int i = 0; i < Y.size(); ++i) v(i) = f(Y.points[static_cast<std::size_t>(i)]);
  return v;
}

// Random set of q1 points around `center` whose scaled matrix has cond <= limit.
SampleSet poised_set(const MonomialBasis& basis, const Vector& center, double radius, int count,
                     double limit, Rng& rng) {
  while (true) {
    SampleSet Y = ball_uniform_set(center, radius, count - 1, rng);
    if (poisedness_condition(Y, basis) <= limit) return Y;
  }
}

Objective power_objective(int power) {
  return Objective(1, [power](const Vector& x) { return std::pow(x(0), power); })
      .with_gradient([power](const Vector& x) -> Vector {
        return Vector::Constant(1, power * std::pow(x(0), power - 1));
      })
      .with_hessian([power](const Vector& x) -> Matrix {
        return Matrix::Constant(1, 1, power * (power - 1) * std::pow(x(0), power - 2));
      });
}

TEST(MonomialBasis, SizesAndOrder) {
  EXPECT_EQ(MonomialBasis(3, 1).size(), 4);
  EXPECT_EQ(MonomialBasis(3, 2).size(), 10);
  EXPECT_EQ(MonomialBasis::size_for(10, 2), 66);
  const MonomialBasis b(2, 2);
  EXPECT_EQ(b.quadratic_pair(0), std::make_pair(0, 0));
  EXPECT_EQ(b.quadratic_pair(1), std::make_pair(0, 1));
  EXPECT_EQ(b.quadratic_pair(2), std::make_pair(1, 1));
  const Vector phi = b.evaluate(vec({2, 3}));
  EXPECT_EQ(phi, vec({1, 2, 3, 2, 6, 4.5}));
  EXPECT_THROW(MonomialBasis(2, 3), std::invalid_argument);
}

TEST(InterpolationMatrix, Examples) {
  Matrix expected(3, 3);
  expected << 1, 0, 0, 1, 1, 0, 1, 0, 1;
  EXPECT_EQ(interpolation_matrix(MonomialBasis(2, 1), simplex2(), false), expected);

  const SampleSet line = make_set(vec({0}), 1.0, {vec({0}), vec({1}), vec({2})});
  Matrix quad(3, 3);
  quad << 1, 0, 0, 1, 1, 0.5, 1, 2, 2;
  EXPECT_EQ(interpolation_matrix(MonomialBasis(1, 2), line, false), quad);

  const SampleSet wide = make_set(vec({0, 0}), 2.0, {vec({0, 0}), vec({2, 0}), vec({0, 2})});
  EXPECT_EQ(interpolation_matrix(MonomialBasis(2, 1), wide, true), expected);

  EXPECT_THROW(interpolation_matrix(MonomialBasis(3, 1), wide, true), std::invalid_argument);
}

TEST(Poisedness, SimplexMatchesEigenOracle) {
  Matrix M(3, 3);
  M << 1, 0, 0, 1, 1, 0, 1, 0, 1;
  const Eigen::SelfAdjointEigenSolver<Matrix> es(M.transpose() * M);
  const double oracle = std::sqrt(es.eigenvalues().maxCoeff() / es.eigenvalues().minCoeff());
  EXPECT_NEAR(poisedness_condition(simplex2(), MonomialBasis(2, 1)), oracle, 1e-12 * oracle);
}

TEST(Poisedness, DegenerateSetsAreInfinite) {
  const SampleSet dup = make_set(vec({0, 0}), 1.0, {vec({0, 0}), vec({1, 0}), vec({1, 0})});
  EXPECT_TRUE(std::isinf(poisedness_condition(dup, MonomialBasis(2, 1))));
  const SampleSet one = make_set(vec({0}), 1.0, {vec({0})});
  EXPECT_TRUE(std::isinf(poisedness_condition(one, MonomialBasis(1, 1))));
}

TEST(Poisedness, InvariantUnderTranslationAndScaling) {
  Rng rng(4);
  const MonomialBasis basis(3, 2);
  for (int trial = 0; trial < 20; ++trial) {
    const SampleSet Y = ball_uniform_set(Vector::Zero(3), 1.0, basis.size() - 1, rng);
    const double base = poisedness_condition(Y, basis);
    const Vector shift = rng.normal_vector(3) * 10.0;
    const double lambda = 0.01 + 5.0 * rng.uniform();
    SampleSet moved = Y;
    moved.center = Y.center + shift;
    moved.radius = lambda * Y.radius;
    for (std::size_t i = 0; i < Y.points.size(); ++i) moved.points[i] = shift + lambda * (Y.points[i] - Y.center);
    EXPECT_NEAR(poisedness_condition(moved, basis), base, 1e-7 * base);
  }
}

TEST(Interpolate, LinearOnSimplex) {
  const SampleSet Y = simplex2();
  const ModelFit fit = interpolate(Y, values(Y, [](const Vector& x) { return x(0) + 2 * x(1) + 3; }),
                                   MonomialBasis(2, 1));
  EXPECT_TRUE(fit.alpha.isApprox(vec({3, 1, 2}), 1e-14));
  EXPECT_TRUE(fit.model.g.isApprox(vec({1, 2}), 1e-14));
  EXPECT_DOUBLE_EQ(fit.model.c, 3.0);
  EXPECT_EQ(fit.model.H, Matrix::Zero(2, 2));
}

TEST(Interpolate, ReproducesQuadraticsOnRandomPoisedSets) {
  Rng rng(8);
  for (int n = 1; n <= 4; ++n) {
    const MonomialBasis basis(n, 2);
    for (int trial = 0; trial < 25; ++trial) {
      const Vector center = rng.normal_vector(n);
      const double radius = 0.1 + rng.uniform();
      const SampleSet Y = poised_set(basis, center, radius, basis.size(), 1e6, rng);
      const Vector g = rng.normal_vector(n);
      Matrix A(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) A(i, j) = rng.normal();
      const Matrix H = A + A.transpose();
      const double c = rng.normal();
      auto f = [&](const Vector& x) {
        const Vector s = x - center;
        return c + g.dot(s) + 0.5 * s.dot(H * s);
      };
      const ModelFit fit = interpolate(Y, values(Y, f), basis);
      EXPECT_NEAR(fit.model.c, c, 1e-8 * std::max(1.0, std::abs(c)));
      EXPECT_LE((fit.model.g - g).norm(), 1e-7 * std::max(1.0, g.norm()));
      EXPECT_LE((fit.model.H - H).norm(), 1e-6 * std::max(1.0, H.norm()));
    }
  }
}

TEST(Interpolate, DuplicatePointsFail) {
  const SampleSet Y = make_set(vec({0, 0}), 1.0, {vec({0, 0}), vec({1, 0}), vec({1, 0})});
  EXPECT_THROW(interpolate(Y, vec({0, 1, 1}), MonomialBasis(2, 1)), PoisednessError);
}

TEST(Regress, RecoversLinearFunctionExactly) {
  Rng rng(12);
  const SampleSet Y = ball_uniform_set(Vector::Zero(3), 1.0, 9, rng);
  const ModelFit fit = regress(Y, values(Y, [](const Vector& x) { return 1.0 - x(0) + 4.0 * x(2); }),
                               MonomialBasis(3, 1));
  EXPECT_TRUE(fit.model.g.isApprox(vec({-1, 0, 4}), 1e-12));
  EXPECT_NEAR(fit.alpha(0), 1.0, 1e-12);
}

TEST(Regress, LineThroughParabolaSamples) {
  // Closed-form simple regression of y = x^2 on x = 0..3: slope 15/5, intercept 3.5 - 3 * 1.5.
  const SampleSet Y = make_set(vec({0}), 1.0, {vec({0}), vec({1}), vec({2}), vec({3})});
  const ModelFit fit = regress(Y, vec({0, 1, 4, 9}), MonomialBasis(1, 1));
  EXPECT_NEAR(fit.alpha(0), -1.0, 1e-12);
  EXPECT_NEAR(fit.alpha(1), 3.0, 1e-12);
  // The center is a sample point, so its value pins the constant.
  EXPECT_EQ(fit.model.c, 0.0);
}

TEST(Regress, RepeatedRowsActAsWeights) {
  const SampleSet Y = make_set(vec({0}), 1.0, {vec({0}), vec({1}), vec({1}), vec({2}), vec({3})});
  const Vector f = vec({0, 1, 1, 4, 9});
  const ModelFit fit = regress(Y, f, MonomialBasis(1, 1));
  // Oracle: weighted normal equations on the deduplicated data.
  Matrix X(4, 2);
  X << 1, 0, 1, 1, 1, 2, 1, 3;
  const Vector w = vec({1, 2, 1, 1});
  const Vector y = vec({0, 1, 4, 9});
  const Vector beta = (X.transpose() * w.asDiagonal() * X).ldlt().solve(X.transpose() * w.asDiagonal() * y);
  EXPECT_TRUE(fit.alpha.isApprox(beta, 1e-12));
}

TEST(MfnModel, TwoPointsInOneDimension) {
  const SampleSet Y = make_set(vec({0}), 1.0, {vec({0}), vec({1})});
  const ModelFit fit = mfn_model(Y, vec({0, 1}));
  EXPECT_NEAR((fit.alpha - vec({0, 1, 0})).norm(), 0.0, 1e-14);
}

TEST(MfnModel, DeterminedCaseEqualsInterpolant) {
  Rng rng(21);
  const MonomialBasis basis(2, 2);
  const SampleSet Y = poised_set(basis, Vector::Zero(2), 1.0, 6, 1e4, rng);
  const Vector f = values(Y, [](const Vector& x) { return std::exp(x(0)) * std::cos(x(1)); });
  EXPECT_TRUE(mfn_model(Y, f).alpha.isApprox(interpolate(Y, f, basis).alpha, 1e-9));
}

TEST(MfnModel, LinearFunctionsHaveZeroQuadraticBlock) {
  Rng rng(22);
  for (int n = 2; n <= 5; ++n) {
    const SampleSet Y = ball_uniform_set(Vector::Zero(n), 1.0, n + 2, rng);
    const Vector g = rng.normal_vector(n);
    const ModelFit fit = mfn_model(Y, values(Y, [&](const Vector& x) { return 2.0 + g.dot(x); }));
    EXPECT_LT(fit.alpha.tail(MonomialBasis(n, 2).quadratic_size()).norm(), 1e-10);
    EXPECT_TRUE(fit.model.g.isApprox(g, 1e-10));
  }
}

TEST(MfnModel, MatchesNullSpaceOracle) {
  Rng rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + trial % 3;
    const MonomialBasis basis(n, 2);
    const int count = n + 1 + trial % (basis.quadratic_size() - 1);
    const SampleSet Y = ball_uniform_set(Vector::Zero(n), 1.0, count - 1, rng);
    const Vector f = rng.normal_vector(count);
    const ModelFit fit = mfn_model(Y, f);
    const Matrix M = interpolation_matrix(basis, Y, true);
    const Vector oracle = oracle::min_block_norm_solution(M, f, basis.quadratic_size());
    const double q = fit.alpha.tail(basis.quadratic_size()).norm();
    EXPECT_NEAR(q, oracle.tail(basis.quadratic_size()).norm(), 1e-4 * std::max(1.0, q));
    // No feasible perturbation does better.
    const Matrix N = oracle::null_space(M);
    for (int k = 0; k < 20; ++k) {
      const Vector other = fit.alpha + N * rng.normal_vector(static_cast<int>(N.cols()));
      EXPECT_GE(other.tail(basis.quadratic_size()).norm(), q - 1e-10);
    }
  }
}

TEST(MfnModel, RankDeficientLinearBlockFails) {
  // Collinear points in R^2 cannot determine the gradient.
  const SampleSet Y = make_set(vec({0, 0}), 1.0, {vec({0, 0}), vec({1, 0}), vec({-1, 0}), vec({0.5, 0})});
  EXPECT_THROW(mfn_model(Y, vec({0, 1, 1, 0.25})), PoisednessError);
}

TEST(SparseL1Model, RecoversSingleSquaredTerm) {
  Rng rng(31);
  const double delta = 0.5;
  const SampleSet Y = ball_uniform_set(Vector::Zero(2), delta, 4, rng);
  const Vector f = values(Y, [](const Vector& x) { return x(0) * x(0); });
  const ModelFit fit = sparse_l1_model(Y, f);
  EXPECT_NEAR(fit.model.H(0, 0), 2.0, 1e-6);
  EXPECT_NEAR(fit.model.H(0, 1), 0.0, 1e-6);
  EXPECT_NEAR(fit.model.H(1, 1), 0.0, 1e-6);

  const MonomialBasis basis(2, 2);
  std::vector<bool> mask(6, true);
  for (int i = 0; i < 3; ++i) mask[static_cast<std::size_t>(i)] = false;
  const double best = oracle::l1_minimum(interpolation_matrix(basis, Y, true), f, mask);
  EXPECT_NEAR(fit.alpha.tail(3).lpNorm<1>(), best, 1e-4);
}

TEST(SparseL1Model, LinearFunctionGivesZeroHessian) {
  Rng rng(32);
  const SampleSet Y = ball_uniform_set(Vector::Zero(3), 1.0, 6, rng);
  const ModelFit fit = sparse_l1_model(Y, values(Y, [](const Vector& x) { return x.sum(); }));
  EXPECT_LT(fit.model.H.cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_TRUE(fit.model.g.isApprox(Vector::Ones(3), 1e-6));
}

TEST(SparseL1Model, DeterminedCaseEqualsInterpolant) {
  Rng rng(33);
  const MonomialBasis basis(2, 2);
  const SampleSet Y = poised_set(basis, Vector::Zero(2), 1.0, 6, 1e4, rng);
  const Vector f = values(Y, [](const Vector& x) { return std::sin(x(0)) + x(1) * x(1); });
  EXPECT_LT((sparse_l1_model(Y, f).alpha - interpolate(Y, f, basis).alpha).norm(), 1e-6);
}

TEST(SparseL1Model, NeverWorseThanMfnAndMatchesOracle) {
  Rng rng(34);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + trial % 2;
    const MonomialBasis basis(n, 2);
    const int count = n + 2 + trial % 2;
    const SampleSet Y = ball_uniform_set(Vector::Zero(n), 1.0, count - 1, rng);
    const Vector f = rng.normal_vector(count);
    const double l1 = sparse_l1_model(Y, f).alpha.tail(basis.quadratic_size()).lpNorm<1>();
    EXPECT_LE(l1, mfn_model(Y, f).alpha.tail(basis.quadratic_size()).lpNorm<1>() + 1e-8);
    std::vector<bool> mask(static_cast<std::size_t>(basis.size()), true);
    for (int i = 0; i < basis.linear_size(); ++i) mask[static_cast<std::size_t>(i)] = false;
    EXPECT_NEAR(l1, oracle::l1_minimum(interpolation_matrix(basis, Y, true), f, mask),
                1e-4 * std::max(1.0, l1));
  }
}

TEST(CapHessian, Examples) {
  const QuadraticModel m(Vector::Zero(1), 1.0, Vector::Ones(1), Matrix::Constant(1, 1, 2.0));
  EXPECT_EQ(cap_hessian(m, 10.0).H, m.H);
  EXPECT_EQ(cap_hessian(m, 2.0).H, m.H);
  const QuadraticModel big(Vector::Zero(1), 1.0, Vector::Ones(1), Matrix::Constant(1, 1, 1e7));
  const QuadraticModel capped = cap_hessian(big, 1e6);
  EXPECT_EQ(capped.H, Matrix::Zero(1, 1));
  EXPECT_EQ(capped.g, big.g);
  EXPECT_EQ(capped.c, big.c);
}

TEST(FullyLinear, TaylorModelOfQuadraticPasses) {
  const Objective f = power_objective(2);
  const Vector x = Vector::Constant(1, 0.3);
  const QuadraticModel m(x, 0.09, Vector::Constant(1, 0.6), Matrix::Constant(1, 1, 2.0));
  EXPECT_TRUE(check_fully_linear(m, f, x, 0.5, {1e-12, 1e-12, 1e-12}));
  EXPECT_TRUE(check_fully_quadratic(m, f, x, 0.5, {1e-12, 1e-12, 1e-12}));
}

TEST(FullyLinear, ConstantOffsetFails) {
  const Objective f = power_objective(2);
  const Vector x = Vector::Zero(1);
  const double delta = 0.1;
  const QualityConstants k{1.0, 1.0, 1.0};
  const QuadraticModel m(x, 2.0 * k.kappa_ef * delta * delta, Vector::Zero(1), Matrix::Constant(1, 1, 2.0));
  EXPECT_FALSE(check_fully_linear(m, f, x, delta, k));
}

TEST(FullyLinear, LinearInterpolantOfSquare) {
  // Interpolant of x^2 on {0, d} is d x: gradient error |2s - d| peaks at 3d
  // and value error |s^2 - d s| peaks at 2d^2, both at s = -d.
  const Objective f = power_objective(2);
  for (const double d : {1.0, 0.1, 0.01}) {
    const SampleSet Y = make_set(vec({0}), d, {vec({0}), vec({d})});
    const ModelFit fit = interpolate(Y, vec({0, d * d}), MonomialBasis(1, 1));
    const QualityReport r = fully_linear_report(fit.model, f, Y.center, d, {2.0, 3.0, 1.0});
    EXPECT_NEAR(r.max_gradient_error, 3.0 * d, 1e-12);
    EXPECT_NEAR(r.max_value_error, 2.0 * d * d, 1e-12);
    EXPECT_TRUE(check_fully_linear(fit.model, f, Y.center, d, {2.0 + 1e-9, 3.0 + 1e-9, 1.0}));
    EXPECT_FALSE(check_fully_linear(fit.model, f, Y.center, d, {2.0 + 1e-9, 2.9, 1.0}));
  }
}

TEST(FullyQuadratic, PerturbedHessianFails) {
  const Objective f = power_objective(2);
  const Vector x = Vector::Zero(1);
  const double delta = 0.1;
  const QualityConstants k{1.0, 1.0, 1.0};
  const QuadraticModel m(x, 0.0, Vector::Zero(1), Matrix::Constant(1, 1, 2.0 + 2.0 * k.kappa_eh * delta));
  EXPECT_FALSE(check_fully_quadratic(m, f, x, delta, k));
}

TEST(FullyQuadratic, CubicErrorsScaleWithRadius) {
  // Quadratic interpolant of x^3 on {-d, 0, d} is d^2 x. Hessian error 6|s|
  // peaks at 6d, gradient error |3s^2 - d^2| at 2d^2, value error
  // |s^3 - d^2 s| at 2 d^3 / (3 sqrt 3).
  const Objective f = power_objective(3);
  for (const double d : {1.0, 0.5, 0.25}) {
    const SampleSet Y = make_set(vec({0}), d, {vec({0}), vec({d}), vec({-d})});
    const ModelFit fit = interpolate(Y, vec({0, d * d * d, -d * d * d}), MonomialBasis(1, 2));
    const QualityReport r = fully_quadratic_report(fit.model, f, Y.center, d, {1.0, 2.0, 6.0});
    EXPECT_NEAR(r.max_hessian_error / d, 6.0, 1e-10);
    EXPECT_NEAR(r.max_gradient_error / (d * d), 2.0, 1e-10);
    EXPECT_LE(r.max_value_error / (d * d * d), 2.0 / (3.0 * std::sqrt(3.0)) + 1e-12);
    EXPECT_GT(r.max_value_error / (d * d * d), 0.3);
    EXPECT_TRUE(r.ok);
  }
}

TEST(FullyLinear, NeedsAnalyticGradient) {
  const Objective f(1, [](const Vector& x) { return x(0); });
  const QuadraticModel m(Vector::Zero(1), 0.0, Vector::Ones(1), Matrix::Zero(1, 1));
  EXPECT_THROW(check_fully_linear(m, f, Vector::Zero(1), 1.0, {}), Error);
}

TEST(FullyLinear, ValueErrorShrinksQuadraticallyWithRadius) {
  // f with a Lipschitz Hessian; linear interpolation on fresh well-poised sets.
  const Objective f =
      Objective(2, [](const Vector& x) { return std::sin(x(0)) + x(0) * x(1) + std::cos(x(1)); })
          .with_gradient([](const Vector& x) -> Vector {
            return vec({std::cos(x(0)) + x(1), x(0) - std::sin(x(1))});
          });
  const MonomialBasis basis(2, 1);
  const Vector x = vec({0.3, -0.2});
  Rng rng(41);
  auto median_error = [&](double delta) {
    std::vector<double> errors;
    for (int t = 0; t < 201; ++t) {
      const SampleSet Y = poised_set(basis, x, delta, 3, 10.0, rng);
      const ModelFit fit = interpolate(Y, values(Y, [&](const Vector& y) { return f.diagnostic_value(y); }), basis);
      errors.push_back(fully_linear_report(fit.model, f, x, delta, {1, 1, 1}).max_value_error);
    }
    std::nth_element(errors.begin(), errors.begin() + 100, errors.end());
    return errors[100];
  };
  for (const double delta : {0.1, 0.05}) {
    const double ratio = median_error(delta) / median_error(delta / 2.0);
    EXPECT_GE(ratio, 4.0 * 0.5);
    EXPECT_LE(ratio, 4.0 * 1.5);
  }
}

TEST(QualityProbes, LayoutAndSupport) {
  const auto probes = quality_probes(3, 0.5, 64);
  ASSERT_EQ(probes.size(), 1u + 6u + 64u);
  EXPECT_EQ(probes[0], Vector::Zero(3));
  for (const Vector& s : probes) EXPECT_LE(s.norm(), 0.5 * (1.0 + 1e-12));
  EXPECT_NEAR(probes[1].norm(), 0.5, 1e-15);
}

}  // namespace
}  // namespace probtr
