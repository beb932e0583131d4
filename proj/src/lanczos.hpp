#ifndef LAYOUTCUT_SRC_LANCZOS_HPP_
#define LAYOUTCUT_SRC_LANCZOS_HPP_

#include <functional>

#include <Eigen/Dense>

namespace layoutcut::detail {

using LinearOperator = std::function<void(const Eigen::VectorXd& in, Eigen::VectorXd& out)>;

struct LanczosOptions {
  int max_basis = 160;
  int max_restarts = 20;
  double tolerance = 1e-12;  // on ||A y - theta y||
};

struct LanczosResult {
  double value = 0.0;
  Eigen::VectorXd vector;
  double residual_estimate = 0.0;
  int matvecs = 0;
  bool converged = false;
};

// Largest eigenpair of the symmetric operator `apply` restricted to the
// orthogonal complement of the unit vector `deflate`. Full
// reorthogonalization, explicit restarts from the current Ritz vector, and a
// fixed start vector so results are reproducible.
LanczosResult lanczos_largest(const LinearOperator& apply, const Eigen::VectorXd& deflate,
                              const LanczosOptions& options);

}  // namespace layoutcut::detail

#endif  // LAYOUTCUT_SRC_LANCZOS_HPP_
