#include "layoutcut/ncut.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "layoutcut/error.hpp"
#include "lanczos.hpp"

namespace layoutcut {

namespace {

constexpr double kMinEigengap = 1e-12;

int node_to_patch(std::span<const int> active, Eigen::Index node) {
  return active.empty() ? static_cast<int>(node) : active[static_cast<std::size_t>(node)];
}

// Solves (T - shift I) z = rhs for symmetric tridiagonal T using LU with
// partial pivoting (the LAPACK gttrf/gttrs scheme). Exact zero pivots are
// nudged so that shifts at an eigenvalue still give a usable direction.
Eigen::VectorXd shifted_tridiagonal_solve(const Eigen::VectorXd& diag, const Eigen::VectorXd& sub,
                                          double shift, Eigen::VectorXd rhs) {
  const Eigen::Index n = diag.size();
  Eigen::VectorXd d = diag.array() - shift;
  Eigen::VectorXd dl = sub;
  Eigen::VectorXd du = sub;
  Eigen::VectorXd du2 = Eigen::VectorXd::Zero(std::max<Eigen::Index>(n - 2, 0));
  std::vector<bool> swapped(static_cast<std::size_t>(std::max<Eigen::Index>(n - 1, 0)), false);
  const double tiny = std::numeric_limits<double>::epsilon() *
                      std::max(1.0, diag.cwiseAbs().maxCoeff() + 2.0 * sub.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    if (std::abs(d(i)) >= std::abs(dl(i))) {
      if (d(i) == 0.0) d(i) = tiny;
      const double fact = dl(i) / d(i);
      dl(i) = fact;
      d(i + 1) -= fact * du(i);
    } else {
      const double fact = d(i) / dl(i);
      d(i) = dl(i);
      dl(i) = fact;
      const double temp = du(i);
      du(i) = d(i + 1);
      d(i + 1) = temp - fact * d(i + 1);
      if (i + 2 < n) {
        du2(i) = du(i + 1);
        du(i + 1) = -fact * du(i + 1);
      }
      swapped[static_cast<std::size_t>(i)] = true;
    }
  }
  if (n > 0 && d(n - 1) == 0.0) d(n - 1) = tiny;
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    if (!swapped[static_cast<std::size_t>(i)]) {
      rhs(i + 1) -= dl(i) * rhs(i);
    } else {
      const double temp = rhs(i);
      rhs(i) = rhs(i + 1);
      rhs(i + 1) = temp - dl(i) * rhs(i);
    }
  }
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    double v = rhs(i);
    if (i + 1 < n) v -= du(i) * rhs(i + 1);
    if (i + 2 < n) v -= du2(i) * rhs(i + 2);
    rhs(i) = v / d(i);
  }
  return rhs;
}

// Smallest eigenpair of L_sym on the complement of the null vector `u0`.
// Dense Householder tridiagonalization, eigenvalues by implicit QR, then
// inverse iteration on the tridiagonal form for the one vector needed.
std::pair<double, Eigen::VectorXd> dense_second(const Eigen::MatrixXd& normalized_w,
                                                const Eigen::VectorXd& u0) {
  const Eigen::Index n = normalized_w.rows();
  // L_sym eigenvalues lie in [0, 2]; shifting u0 to 3 leaves lambda_2 lowest.
  Eigen::MatrixXd l = Eigen::MatrixXd::Identity(n, n) - normalized_w;
  l.noalias() += 3.0 * u0 * u0.transpose();
  Eigen::Tridiagonalization<Eigen::MatrixXd> tri(l);
  const Eigen::VectorXd diag = tri.diagonal();
  const Eigen::VectorXd sub = tri.subDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> values;
  values.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (values.info() != Eigen::Success) {
    throw Error(ErrorCode::kNotConverged, "tridiagonal QR failed");
  }
  const double lambda = values.eigenvalues()(0);
  Eigen::VectorXd z = Eigen::VectorXd::Ones(n);
  for (Eigen::Index i = 0; i < n; i += 2) z(i) = 0.5;
  for (int it = 0; it < 3; ++it) {
    z = shifted_tridiagonal_solve(diag, sub, lambda, z);
    z.normalize();
  }
  Eigen::VectorXd y = tri.matrixQ() * z;
  return {lambda, y};
}

}  // namespace

double generalized_residual(const AffinityMatrix& affinity, const Eigen::VectorXd& x,
                            double lambda) {
  const Eigen::VectorXd dx = affinity.degrees().cwiseProduct(x);
  Eigen::VectorXd r = dx - affinity.values() * x;
  r.noalias() -= lambda * dx;
  return r.norm();
}

SpectralSolution solve_second_eigenvector(const AffinityMatrix& affinity,
                                          const SolverOptions& options) {
  const int n = affinity.size();
  if (n < 2) {
    throw Error(ErrorCode::kDimMismatch, "need at least two graph nodes, got " + std::to_string(n));
  }
  const Eigen::VectorXd& d = affinity.degrees();
  for (int i = 0; i < n; ++i) {
    if (!(d(i) > 0.0)) {
      throw Error(ErrorCode::kSingularDegree, "degree of node " + std::to_string(i) + " is " +
                                                  std::to_string(d(i)));
    }
  }
  const Eigen::VectorXd d_sqrt = d.cwiseSqrt();
  const Eigen::VectorXd d_inv_sqrt = d_sqrt.cwiseInverse();
  // D^{1/2} 1 spans the null space of L_sym = D^{-1/2} (D - W) D^{-1/2}.
  const Eigen::VectorXd u0 = d_sqrt.normalized();

  const bool dense = options.method == EigenMethod::kDense ||
                     (options.method == EigenMethod::kAuto && n <= options.dense_limit);
  double lambda = 0.0;
  Eigen::VectorXd y;
  if (dense) {
    const Eigen::MatrixXd normalized =
        d_inv_sqrt.asDiagonal() * affinity.values() * d_inv_sqrt.asDiagonal();
    std::tie(lambda, y) = dense_second(normalized, u0);
  } else {
    const auto w = affinity.values();
    Eigen::VectorXd scratch(n);
    detail::LinearOperator apply = [&](const Eigen::VectorXd& in, Eigen::VectorXd& out) {
      scratch = d_inv_sqrt.cwiseProduct(in);
      out.noalias() = w * scratch;
      out.array() *= d_inv_sqrt.array();
    };
    detail::LanczosOptions lanczos;
    lanczos.max_basis = options.max_basis;
    lanczos.max_restarts = options.max_restarts;
    // ||r_x|| / ||x|| <= d_max * ||r_y||, so aim an order of magnitude below.
    lanczos.tolerance = std::max(0.1 * options.residual_bound / d.maxCoeff(), 1e-15);
    const detail::LanczosResult top = detail::lanczos_largest(apply, u0, lanczos);
    if (!top.converged) {
      throw Error(ErrorCode::kNotConverged,
                  "Lanczos residual estimate " + std::to_string(top.residual_estimate));
    }
    lambda = 1.0 - top.value;
    y = top.vector;
  }

  y.noalias() -= u0.dot(y) * u0;
  Eigen::VectorXd x = d_inv_sqrt.cwiseProduct(y);
  x.normalize();
  Eigen::Index arg = 0;
  x.cwiseAbs().maxCoeff(&arg);
  if (x(arg) < 0) x = -x;
  // Rayleigh quotient of the final vector is the most accurate eigenvalue.
  const Eigen::VectorXd dx = d.cwiseProduct(x);
  const double rq = (dx.dot(x) - x.dot(affinity.values() * x)) / dx.dot(x);
  lambda = rq;

  if (lambda < kMinEigengap) {
    throw Error(ErrorCode::kNoEigengap,
                "lambda_2 - lambda_1 = " + std::to_string(lambda) + " below 1e-12");
  }

  SpectralSolution sol;
  sol.eigenvector = std::move(x);
  sol.eigenvalue = lambda;
  sol.residual = generalized_residual(affinity, sol.eigenvector, lambda);
  sol.degrees = d;
  if (!(sol.residual <= options.residual_bound * sol.eigenvector.norm())) {
    throw Error(ErrorCode::kNotConverged,
                "generalized residual " + std::to_string(sol.residual) + " above bound");
  }
  return sol;
}

BinaryMask bipartition(const SpectralSolution& solution, GridShape shape,
                       std::span<const int> active) {
  const Eigen::VectorXd& x = solution.eigenvector;
  if (!active.empty() && static_cast<Eigen::Index>(active.size()) != x.size()) {
    throw Error(ErrorCode::kDimMismatch, "active set does not match eigenvector length");
  }
  if (active.empty() && x.size() != shape.size()) {
    throw Error(ErrorCode::kDimMismatch, "eigenvector length does not match grid");
  }
  const double mean = x.mean();
  BinaryMask mask(shape.height, shape.width);
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x(i) >= mean) mask.set_flat(node_to_patch(active, i));
  }
  return mask;
}

int seed_patch(const SpectralSolution& solution, std::span<const int> active) {
  Eigen::Index arg = 0;
  solution.eigenvector.cwiseAbs().maxCoeff(&arg);
  return node_to_patch(active, arg);
}

int corners_in_mask(const BinaryMask& mask, std::span<const int> active) {
  const int h = mask.height();
  const int w = mask.width();
  if (h == 0 || w == 0) return 0;
  const std::set<int> corners = {0, w - 1, (h - 1) * w, (h - 1) * w + w - 1};
  int count = 0;
  for (int c : corners) {
    const bool is_active = active.empty() || std::binary_search(active.begin(), active.end(), c);
    if (is_active && mask[static_cast<std::size_t>(c)]) ++count;
  }
  return count;
}

BinaryMask select_foreground(const BinaryMask& mask, const SpectralSolution& solution,
                             std::span<const int> active) {
  // Flips only touch graph nodes; removed patches stay unset.
  auto flip = [&](const BinaryMask& m) {
    if (active.empty()) return m.inverted();
    BinaryMask out = m;
    for (int p : active) out.set_flat(p, !m[p]);
    return out;
  };
  BinaryMask fg = mask;
  if (!fg[seed_patch(solution, active)]) fg = flip(fg);
  if (corners_in_mask(fg, active) >= 2) fg = flip(fg);
  return fg;
}

}  // namespace layoutcut
