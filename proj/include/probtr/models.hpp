#pragma once

#include <utility>
#include <vector>

#include "probtr/core.hpp"
#include "probtr/sampling.hpp"

namespace probtr {

/// Natural monomial basis of degree 1 or 2 in R^n.
///
/// Element order: 1, x_1, ..., x_n, then for degree 2 the quadratic block in
/// lexicographic pair order (i <= j): x_1^2/2, x_1 x_2, ..., x_1 x_n,
/// x_2^2/2, ..., x_n^2/2. Squared terms carry the 1/2 so that a coefficient
/// vector maps straight onto Hessian entries.
class MonomialBasis {
 public:
  MonomialBasis(int dimension, int degree);

  int dimension() const { return n_; }
  int degree() const { return degree_; }
  int size() const;                             // q1
  int linear_size() const { return n_ + 1; }
  int quadratic_size() const { return size() - linear_size(); }

  Vector evaluate(const Vector& x) const;

  // (i, j) with i <= j for quadratic element k (0-based within the block).
  std::pair<int, int> quadratic_pair(int k) const { return pairs_.at(static_cast<std::size_t>(k)); }

  static int size_for(int dimension, int degree);

 private:
  int n_;
  int degree_;
  std::vector<std::pair<int, int>> pairs_;
};

/// (kappa_ef, kappa_eg, kappa_eh): bounds on value, gradient and Hessian error.
struct QualityConstants {
  double kappa_ef = 1.0;
  double kappa_eg = 1.0;
  double kappa_eh = 1.0;  // fully quadratic only

  void validate() const;
};

// Condition numbers above this make a set unusable for model building.
inline constexpr double kPoisednessLimit = 1e12;

/// Rows phi(y_i) (or phi((y_i - center)/radius) when scaled), columns in
/// basis order.
Matrix interpolation_matrix(const MonomialBasis& basis, const SampleSet& Y, bool scaled);

/// sigma_max / sigma_min of a matrix over its min(rows, cols) singular values;
/// +inf when the smallest is zero to working precision or entries are not finite.
double condition_number(const Matrix& M);

/// Condition number of the scaled interpolation matrix M(Phi, Y-hat).
double poisedness_condition(const SampleSet& Y, const MonomialBasis& basis);

struct ModelFit {
  QuadraticModel model;
  Vector alpha;      // coefficients in the basis over scaled points
  double condition;  // of the scaled interpolation matrix
};

/// Converts coefficients over scaled points (y - center)/radius into a model
/// about `center`.
QuadraticModel model_from_coefficients(const MonomialBasis& basis, const Vector& alpha,
                                       const Vector& center, double radius);

// All fits work on the scaled matrix M(Phi, Y-hat) and return a model about
// Y.center. If the center belongs to Y its function value becomes the model
// constant. PoisednessError when the scaled matrix condition exceeds
// kPoisednessLimit or the system is rank deficient.

// Square system (p = q).
ModelFit interpolate(const SampleSet& Y, const Vector& fvals, const MonomialBasis& basis);

// Overdetermined least squares (p > q).
ModelFit regress(const SampleSet& Y, const Vector& fvals, const MonomialBasis& basis);

/// Underdetermined quadratic model minimizing ||alpha_Q||_2 subject to
/// interpolation, via the KKT system
///   [ M_Q M_Q'  M_L ] [ lambda  ]   [ f ]
///   [ M_L'      0   ] [ alpha_L ] = [ 0 ],   alpha_Q = M_Q' lambda.
ModelFit mfn_model(const SampleSet& Y, const Vector& fvals);

/// Underdetermined quadratic model minimizing ||alpha_Q||_1 subject to
/// interpolation, with the constant and linear block unpenalized.
ModelFit sparse_l1_model(const SampleSet& Y, const Vector& fvals);

/// Replaces H by zero when its spectral norm exceeds kappa_bhm.
QuadraticModel cap_hessian(const QuadraticModel& model, double kappa_bhm);

struct QualityReport {
  bool ok = false;
  double max_value_error = 0.0;
  double max_gradient_error = 0.0;
  double max_hessian_error = 0.0;
};

// Probe offsets used by the quality checks: 0, +-delta e_i, then
// `interior_probes` deterministic low-discrepancy (Halton) points in B(0, delta).
std::vector<Vector> quality_probes(int n, double delta, int interior_probes);

inline constexpr int kDefaultInteriorProbes = 64;

/// Checks the fully linear inequalities at every probe point:
///   ||grad f(x+s) - grad m(x+s)|| <= kappa_eg delta,
///   |f(x+s) - m(x+s)| <= kappa_ef delta^2.
/// Needs an analytic gradient; evaluations are uncounted.
QualityReport fully_linear_report(const QuadraticModel& model, const Objective& objective,
                                  const Vector& x, double delta, const QualityConstants& kappa,
                                  int interior_probes = kDefaultInteriorProbes);
bool check_fully_linear(const QuadraticModel& model, const Objective& objective, const Vector& x,
                        double delta, const QualityConstants& kappa,
                        int interior_probes = kDefaultInteriorProbes);

/// Fully quadratic analogue: Hessian error <= kappa_eh delta, gradient error
/// <= kappa_eg delta^2, value error <= kappa_ef delta^3.
QualityReport fully_quadratic_report(const QuadraticModel& model, const Objective& objective,
                                     const Vector& x, double delta, const QualityConstants& kappa,
                                     int interior_probes = kDefaultInteriorProbes);
bool check_fully_quadratic(const QuadraticModel& model, const Objective& objective,
                           const Vector& x, double delta, const QualityConstants& kappa,
                           int interior_probes = kDefaultInteriorProbes);

}  // namespace probtr
