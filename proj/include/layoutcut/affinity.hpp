#ifndef LAYOUTCUT_AFFINITY_HPP_
#define LAYOUTCUT_AFFINITY_HPP_

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "layoutcut/binary_mask.hpp"
#include "layoutcut/features.hpp"

namespace layoutcut {

// Value assigned to sub-threshold affinities.
inline constexpr double kWeakAffinity = 1e-5;

// Dense symmetric patch affinity W with its degree vector d(i) = sum_j W_ij.
// Column-major storage; the buffer is reused when the matrix is thresholded
// or restricted through the rvalue overloads below.
class AffinityMatrix {
 public:
  using ConstView = Eigen::Map<const Eigen::MatrixXd>;

  AffinityMatrix() = default;
  // Symmetrizes from the lower triangle and computes degrees.
  AffinityMatrix(const Eigen::MatrixXd& values, bool thresholded);

  int size() const { return n_; }
  ConstView values() const { return ConstView(storage_.data(), n_, n_); }
  const Eigen::VectorXd& degrees() const { return degrees_; }
  bool thresholded() const { return thresholded_; }

 private:
  Eigen::Map<Eigen::MatrixXd> mutable_values() {
    return Eigen::Map<Eigen::MatrixXd>(storage_.data(), n_, n_);
  }
  void update_degrees();

  friend AffinityMatrix gram_affinity(const Eigen::MatrixXd& features);
  friend AffinityMatrix threshold_affinity(AffinityMatrix&&, double);
  friend AffinityMatrix restrict_affinity(AffinityMatrix&&, std::span<const int>);

  int n_ = 0;
  std::vector<double> storage_;
  Eigen::VectorXd degrees_;
  bool thresholded_ = false;
};

// Gram matrix of the feature rows, W = F F^T.
AffinityMatrix gram_affinity(const Eigen::MatrixXd& features);

// W_ij = <F_i, F_j> over row-major patch indices. Throws NotNormalized.
AffinityMatrix build_affinity(const FeatureGrid& grid);

// Entries < tau_t become 1e-5, the rest 1. Throws AlreadyThresholded.
AffinityMatrix threshold_affinity(const AffinityMatrix& affinity, double tau_t);
AffinityMatrix threshold_affinity(AffinityMatrix&& affinity, double tau_t);

// Sub-matrix over the listed node indices. The rvalue overload compacts in
// place and needs strictly increasing indices.
AffinityMatrix restrict_affinity(const AffinityMatrix& affinity, std::span<const int> indices);
AffinityMatrix restrict_affinity(AffinityMatrix&& affinity, std::span<const int> indices);

struct PooledAffinity {
  AffinityMatrix affinity;
  std::vector<int> active;  // row-major patch index of each graph node
};

// Drops every patch covered by a prior mask from the graph and builds the
// affinity over the survivors. Throws EmptyActiveSet, DimMismatch.
PooledAffinity pool_affinity(const FeatureGrid& grid, std::span<const BinaryMask> prior_masks);

// Patches not covered by any of the masks, in row-major order.
std::vector<int> active_patches(GridShape shape, std::span<const BinaryMask> prior_masks);

}  // namespace layoutcut

#endif  // LAYOUTCUT_AFFINITY_HPP_
