#include "probtr/l1solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

namespace probtr {

void BasisPursuitProblem::validate() const {
  if (b.size() != A.rows()) throw std::invalid_argument("basis pursuit: b has wrong length");
  if (static_cast<Eigen::Index>(penalized.size()) != A.cols()) {
    throw std::invalid_argument("basis pursuit: mask has wrong length");
  }
  if (A.rows() > A.cols()) throw std::invalid_argument("basis pursuit: more rows than columns");
  if (std::none_of(penalized.begin(), penalized.end(), [](bool p) { return p; })) {
    throw std::invalid_argument("basis pursuit: no penalized column");
  }
}

Vector soft_threshold(const Vector& v, double t, const std::vector<bool>& penalized) {
  if (t < 0.0) throw std::invalid_argument("soft_threshold: negative threshold");
  Vector out = v;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!penalized[static_cast<std::size_t>(i)]) continue;
    const double magnitude = std::max(std::abs(v(i)) - t, 0.0);
    out(i) = v(i) > 0.0 ? magnitude : (v(i) < 0.0 ? -magnitude : 0.0);
  }
  return out;
}

namespace {

constexpr int kRhoUpdateEvery = 10;
constexpr double kRhoBalance = 10.0;

double penalized_l1(const Vector& x, const std::vector<bool>& penalized) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (penalized[static_cast<std::size_t>(i)]) sum += std::abs(x(i));
  }
  return sum;
}

std::vector<int> select(const std::vector<bool>& mask, bool value) {
  std::vector<int> out;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i] == value) out.push_back(static_cast<int>(i));
  }
  return out;
}

Matrix columns(const Matrix& A, const std::vector<int>& idx) {
  Matrix out(A.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = A.col(idx[k]);
  return out;
}

// Basis pursuit with the unpenalized block eliminated:
//   minimize ||x_P||_1  s.t.  W'A_P x_P = W'b,  W an orthonormal basis of
// range(A_U)^perp. With x_P = x+ - x-, x+- >= 0 this is a standard-form LP
// whose bases are sets of r distinct columns with a sign each.
struct ReducedProblem {
  Matrix At;  // r x p
  Vector bt;
};

// Phase-2 simplex from a basis filled greedily in `order` (local column
// indices). Any nonsingular choice of columns is primal feasible once each
// column takes the sign of its coefficient. Optimality is dual feasibility
// |At_i' y| <= 1, i.e. an exact certificate. nullopt if no nonsingular
// basis is found or the pivot limit is hit.
std::optional<Vector> simplex(const ReducedProblem& red, const std::vector<int>& order) {
  const Eigen::Index r = red.At.rows();
  const Eigen::Index p = red.At.cols();

  std::vector<int> basis;
  Matrix B(r, 0);
  for (int i : order) {
    if (static_cast<Eigen::Index>(basis.size()) == r) break;
    Matrix trial(r, B.cols() + 1);
    trial << B, red.At.col(i);
    Eigen::ColPivHouseholderQR<Matrix> qr(trial);
    qr.setThreshold(1e-10);
    if (qr.rank() == trial.cols()) {
      basis.push_back(i);
      B = std::move(trial);
    }
  }
  if (static_cast<Eigen::Index>(basis.size()) < r) return std::nullopt;

  std::vector<double> sign(basis.size(), 1.0);
  {
    const Vector x0 = B.partialPivLu().solve(red.bt);
    for (std::size_t k = 0; k < basis.size(); ++k) sign[k] = x0(static_cast<Eigen::Index>(k)) < 0.0 ? -1.0 : 1.0;
  }

  const int max_pivots = 20 * static_cast<int>(p + r);
  const int dantzig_pivots = 2 * static_cast<int>(p);
  for (int pivot = 0; pivot <= max_pivots; ++pivot) {
    Matrix Bs(r, r);
    for (Eigen::Index k = 0; k < r; ++k) Bs.col(k) = sign[static_cast<std::size_t>(k)] * red.At.col(basis[static_cast<std::size_t>(k)]);
    const Eigen::PartialPivLU<Matrix> lu(Bs);
    const Vector xB = lu.solve(red.bt);
    const Vector y = lu.transpose().solve(Vector::Ones(r));
    const Vector corr = red.At.transpose() * y;

    std::vector<bool> in_basis(static_cast<std::size_t>(p), false);
    for (int i : basis) in_basis[static_cast<std::size_t>(i)] = true;
    int entering = -1;
    double best = 1.0 + 1e-10;
    for (Eigen::Index i = 0; i < p; ++i) {
      if (in_basis[static_cast<std::size_t>(i)]) continue;
      if (std::abs(corr(i)) > best) {
        entering = static_cast<int>(i);
        if (pivot >= dantzig_pivots) break;  // Bland: first improving index
        best = std::abs(corr(i));
      }
    }
    if (entering < 0) {
      Vector x = Vector::Zero(p);
      for (std::size_t k = 0; k < basis.size(); ++k) {
        x(basis[k]) = sign[k] * std::max(xB(static_cast<Eigen::Index>(k)), 0.0);
      }
      return x;
    }

    const double s = corr(entering) > 0.0 ? 1.0 : -1.0;
    const Vector d = lu.solve(s * red.At.col(entering));
    int leaving = -1;
    double ratio = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < r; ++k) {
      if (d(k) <= 1e-12) continue;
      const double t = std::max(xB(k), 0.0) / d(k);
      if (t < ratio || (t == ratio && basis[static_cast<std::size_t>(k)] < basis[static_cast<std::size_t>(leaving)])) {
        ratio = t;
        leaving = static_cast<int>(k);
      }
    }
    if (leaving < 0) return std::nullopt;  // unbounded is impossible for a norm objective
    basis[static_cast<std::size_t>(leaving)] = entering;
    sign[static_cast<std::size_t>(leaving)] = s;
  }
  return std::nullopt;
}

// Column order for the starting basis: nonzero entries of z by magnitude,
// then by |u|, the scaled dual, which is +-1 on the optimal support.
std::vector<int> basis_order(const Vector& z, const Vector& u, const std::vector<int>& pen) {
  std::vector<int> order(pen.size());
  for (std::size_t k = 0; k < pen.size(); ++k) order[k] = static_cast<int>(k);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const double za = std::abs(z(pen[static_cast<std::size_t>(a)]));
    const double zb = std::abs(z(pen[static_cast<std::size_t>(b)]));
    if (za != zb) return za > zb;
    return std::abs(u(pen[static_cast<std::size_t>(a)])) > std::abs(u(pen[static_cast<std::size_t>(b)]));
  });
  return order;
}

}  // namespace

BasisPursuitResult basis_pursuit(const BasisPursuitProblem& problem,
                                 const BasisPursuitOptions& options) {
  problem.validate();
  const Matrix& A = problem.A;
  const std::vector<bool>& mask = problem.penalized;
  const Eigen::Index m = A.rows();
  const Eigen::Index N = A.cols();

  const Eigen::CompleteOrthogonalDecomposition<Matrix> cod(A);
  if (cod.rank() < m) throw PoisednessError("basis pursuit: A is rank deficient");

  auto finish = [&](Vector x, int iterations, bool certified, std::vector<double> merit) {
    BasisPursuitResult result;
    result.residual = (A * x - problem.b).norm();
    result.objective = penalized_l1(x, mask);
    result.x = std::move(x);
    result.iterations = iterations;
    result.certified = certified;
    result.merit = std::move(merit);
    return result;
  };

  if (m == N) return finish(cod.solve(problem.b), 0, true, {});

  // Reduce b by the unpenalized least-squares fit and normalize.
  const std::vector<int> free_cols = select(mask, false);
  const std::vector<int> pen_cols = select(mask, true);
  const Matrix AU = columns(A, free_cols);
  const Matrix AP = columns(A, pen_cols);
  Eigen::ColPivHouseholderQR<Matrix> qr_u;
  Matrix W = Matrix::Identity(m, m);
  Vector shift = Vector::Zero(N);
  Vector r = problem.b;
  if (!free_cols.empty()) {
    qr_u.compute(AU);
    const Vector xu = qr_u.solve(problem.b);
    for (std::size_t k = 0; k < free_cols.size(); ++k) shift(free_cols[k]) = xu(static_cast<Eigen::Index>(k));
    r = problem.b - AU * xu;
    // The free block may be wide or rank deficient; W spans range(AU)^perp.
    const Matrix Qu = qr_u.householderQ() * Matrix::Identity(m, m);
    W = Qu.rightCols(m - qr_u.rank());
  }
  const double scale = r.norm();
  // Free columns alone interpolate b: zero penalized block is optimal.
  if (scale == 0.0 || W.cols() == 0) return finish(shift, 0, true, {});
  const Vector bhat = r / scale;
  auto unscale = [&](const Vector& xhat) -> Vector { return shift + scale * xhat; };
  const ReducedProblem reduced{W.transpose() * AP, W.transpose() * bhat};

  // Completes a penalized solution with the least-squares free block.
  auto assemble = [&](const Vector& xp) -> std::optional<Vector> {
    Vector x = Vector::Zero(N);
    for (std::size_t k = 0; k < pen_cols.size(); ++k) x(pen_cols[k]) = xp(static_cast<Eigen::Index>(k));
    if (!free_cols.empty()) {
      const Vector xu = qr_u.solve(Vector(bhat - AP * xp));
      for (std::size_t k = 0; k < free_cols.size(); ++k) x(free_cols[k]) = xu(static_cast<Eigen::Index>(k));
    }
    if ((A * x - bhat).norm() > 1e-10) return std::nullopt;
    return x;
  };

  // Projection onto {A x = bhat}: v - Q Q'v + x_ln, Q spanning range(A').
  const Matrix At = A.transpose();
  const Eigen::HouseholderQR<Matrix> qr(At);
  const Matrix Q = qr.householderQ() * Matrix::Identity(N, m);
  const Vector x_ln = cod.solve(bhat);
  auto project = [&](const Vector& v) -> Vector { return v - Q * (Q.transpose() * v) + x_ln; };

  double rho = options.rho;
  Vector z = Vector::Zero(N);
  Vector u = Vector::Zero(N);
  Vector x = x_ln;
  Vector s_prev;
  std::vector<double> merit;
  double primal = 0.0;
  double dual = 0.0;

  for (int iter = 1; iter <= options.max_iter; ++iter) {
    x = project(z - u);
    const Vector s = x + u;
    const Vector z_old = z;
    z = soft_threshold(s, 1.0 / rho, mask);
    u = s - z;
    if (options.record_merit && s_prev.size() == N) merit.push_back((s - s_prev).norm());
    s_prev = s;

    primal = (x - z).norm();
    dual = rho * (z - z_old).norm();
    const double eps = options.tol * std::max(1.0, x.norm());
    const bool converged = primal <= eps && dual <= eps;

    const bool try_polish =
        converged || (options.polish_every > 0 && iter % options.polish_every == 0);
    if (try_polish) {
      if (auto xp = simplex(reduced, basis_order(z, u, pen_cols))) {
        if (auto polished = assemble(*xp)) {
          return finish(unscale(*polished), iter, true, std::move(merit));
        }
      }
    }
    if (converged) return finish(unscale(x), iter, false, std::move(merit));

    // Residual balancing; the scaled dual u = y/rho is rescaled with rho.
    if (options.adaptive_rho && iter % kRhoUpdateEvery == 0) {
      if (primal > kRhoBalance * dual) {
        rho *= 2.0;
        u /= 2.0;
      } else if (dual > kRhoBalance * primal) {
        rho /= 2.0;
        u *= 2.0;
      }
    }
  }
  throw BasisPursuitError("basis pursuit: no convergence after " + std::to_string(options.max_iter) +
                              " iterations (primal " + std::to_string(primal) + ", dual " +
                              std::to_string(dual) + ")",
                          primal, dual);
}

}  // namespace probtr
