#include "lanczos.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Eigenvalues>

namespace layoutcut::detail {

namespace {

void project_out(const Eigen::VectorXd& unit, Eigen::VectorXd& v) {
  v.noalias() -= unit.dot(v) * unit;
}

Eigen::VectorXd start_vector(const Eigen::VectorXd& deflate) {
  std::mt19937_64 rng(0x5eed);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  Eigen::VectorXd v(deflate.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = uniform(rng);
  return v;
}

}  // namespace

LanczosResult lanczos_largest(const LinearOperator& apply, const Eigen::VectorXd& deflate,
                              const LanczosOptions& options) {
  const Eigen::Index n = deflate.size();
  LanczosResult result;
  if (n < 2) return result;

  // The complement of `deflate` has dimension n - 1.
  const int basis_cap = static_cast<int>(std::min<Eigen::Index>(options.max_basis, n - 1));
  Eigen::VectorXd start = start_vector(deflate);

  for (int restart = 0; restart <= options.max_restarts; ++restart) {
    project_out(deflate, start);
    project_out(deflate, start);
    double start_norm = start.norm();
    if (start_norm < 1e-300) {
      start = start_vector(deflate);
      project_out(deflate, start);
      start_norm = start.norm();
    }

    Eigen::MatrixXd basis(n, basis_cap);
    basis.col(0) = start / start_norm;
    std::vector<double> alpha;
    std::vector<double> beta;
    Eigen::VectorXd w(n);

    for (int j = 0; j < basis_cap; ++j) {
      apply(basis.col(j), w);
      ++result.matvecs;
      const double a = basis.col(j).dot(w);
      alpha.push_back(a);
      w.noalias() -= a * basis.col(j);
      if (j > 0) w.noalias() -= beta[j - 1] * basis.col(j - 1);
      // Two passes of classical Gram-Schmidt keep the basis orthogonal to
      // working precision.
      for (int pass = 0; pass < 2; ++pass) {
        const auto v = basis.leftCols(j + 1);
        w.noalias() -= v * (v.transpose() * w);
        project_out(deflate, w);
      }
      const double b = w.norm();
      beta.push_back(b);

      const int m = j + 1;
      Eigen::VectorXd diag = Eigen::Map<Eigen::VectorXd>(alpha.data(), m);
      Eigen::VectorXd sub(std::max(m - 1, 0));
      for (int k = 0; k + 1 < m; ++k) sub(k) = beta[k];
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
      tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
      const double theta = tri.eigenvalues()(m - 1);
      const Eigen::VectorXd s = tri.eigenvectors().col(m - 1);
      const double estimate = std::abs(b * s(m - 1));

      const bool breakdown = b < 1e-14;
      const bool done = estimate <= options.tolerance || breakdown || m == basis_cap;
      if (done) {
        Eigen::VectorXd ritz = basis.leftCols(m) * s;
        project_out(deflate, ritz);
        ritz.normalize();
        result.value = theta;
        result.vector = ritz;
        result.residual_estimate = breakdown ? 0.0 : estimate;
        result.converged = estimate <= options.tolerance || breakdown;
        if (result.converged || m == n - 1) {
          result.converged = true;
          return result;
        }
        start = ritz;
        break;
      }
      basis.col(j + 1) = w / b;
    }
  }
  return result;
}

}  // namespace layoutcut::detail
