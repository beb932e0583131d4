#ifndef LAYOUTCUT_NCUT_HPP_
#define LAYOUTCUT_NCUT_HPP_

#include <span>

#include <Eigen/Dense>

#include "layoutcut/affinity.hpp"
#include "layoutcut/binary_mask.hpp"
#include "layoutcut/features.hpp"

namespace layoutcut {

// Second-smallest generalized eigenpair of (D - W) x = lambda D x.
// x has unit Euclidean norm and its largest-magnitude entry is positive.
struct SpectralSolution {
  Eigen::VectorXd eigenvector;
  double eigenvalue = 0.0;
  double residual = 0.0;  // ||(D - W) x - lambda D x||_2
  Eigen::VectorXd degrees;
};

enum class EigenMethod { kAuto, kDense, kLanczos };

struct SolverOptions {
  EigenMethod method = EigenMethod::kAuto;
  int dense_limit = 512;       // kAuto uses the dense solver up to this size
  int max_basis = 160;         // Lanczos vectors kept before a restart
  int max_restarts = 20;
  double residual_bound = 1e-8;  // relative to ||x||
};

// Throws SingularDegree, NoEigengap, NotConverged, DimMismatch (n < 2).
SpectralSolution solve_second_eigenvector(const AffinityMatrix& affinity,
                                          const SolverOptions& options = {});

// ||(D - W) x - lambda D x||_2 evaluated directly against W.
double generalized_residual(const AffinityMatrix& affinity, const Eigen::VectorXd& x,
                            double lambda);

// Graph nodes map to grid cells through `active` (row-major patch indices);
// an empty span means node i is patch i.

// Bit p is set iff x_p >= mean(x), the mean taken over the graph nodes.
BinaryMask bipartition(const SpectralSolution& solution, GridShape shape,
                       std::span<const int> active = {});

// Index (into the grid) of the node with the largest |x|; first on ties.
int seed_patch(const SpectralSolution& solution, std::span<const int> active = {});

// Number of distinct active grid-corner patches set in `mask`.
int corners_in_mask(const BinaryMask& mask, std::span<const int> active = {});

// Flips the mask if it misses the seed patch, then flips it if it holds two or
// more active corners. The corner prior is applied last and wins conflicts.
BinaryMask select_foreground(const BinaryMask& mask, const SpectralSolution& solution,
                             std::span<const int> active = {});

}  // namespace layoutcut

#endif  // LAYOUTCUT_NCUT_HPP_
