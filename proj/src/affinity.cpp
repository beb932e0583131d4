#include "layoutcut/affinity.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "layoutcut/error.hpp"

namespace layoutcut {

namespace {

Eigen::MatrixXd feature_rows(const FeatureGrid& grid, std::span<const int> indices) {
  Eigen::MatrixXd f(static_cast<Eigen::Index>(indices.size()), grid.dim());
  for (std::size_t r = 0; r < indices.size(); ++r) {
    const auto v = grid.patch(indices[r]);
    for (int k = 0; k < grid.dim(); ++k) f(static_cast<Eigen::Index>(r), k) = v[k];
  }
  return f;
}

void require_normalized(const FeatureGrid& grid) {
  for (int p = 0; p < grid.num_patches(); ++p) {
    double s = 0.0;
    for (double x : grid.patch(p)) s += x * x;
    if (std::abs(std::sqrt(s) - 1.0) > 1e-6) {
      throw Error(ErrorCode::kNotNormalized, "patch " + std::to_string(p) + " is not unit norm");
    }
  }
}

}  // namespace

AffinityMatrix::AffinityMatrix(const Eigen::MatrixXd& values, bool thresholded)
    : n_(static_cast<int>(values.rows())), thresholded_(thresholded) {
  if (values.rows() != values.cols()) {
    throw Error(ErrorCode::kDimMismatch, "affinity must be square");
  }
  storage_.assign(values.data(), values.data() + values.size());
  // Exact symmetry: the upper triangle is a copy of the lower one.
  auto w = mutable_values();
  w.triangularView<Eigen::StrictlyUpper>() = w.transpose();
  update_degrees();
}

void AffinityMatrix::update_degrees() {
  // Column sums equal row sums for a symmetric matrix and are contiguous.
  degrees_ = values().colwise().sum().transpose();
}

AffinityMatrix gram_affinity(const Eigen::MatrixXd& features) {
  AffinityMatrix a;
  a.n_ = static_cast<int>(features.rows());
  a.storage_.assign(static_cast<std::size_t>(a.n_) * a.n_, 0.0);
  auto w = a.mutable_values();
  w.selfadjointView<Eigen::Lower>().rankUpdate(features);
  w.triangularView<Eigen::StrictlyUpper>() = w.transpose();
  a.update_degrees();
  return a;
}

AffinityMatrix build_affinity(const FeatureGrid& grid) {
  require_normalized(grid);
  std::vector<int> all(grid.num_patches());
  for (int i = 0; i < grid.num_patches(); ++i) all[i] = i;
  return gram_affinity(feature_rows(grid, all));
}

AffinityMatrix threshold_affinity(AffinityMatrix&& affinity, double tau_t) {
  if (affinity.thresholded()) {
    throw Error(ErrorCode::kAlreadyThresholded, "affinity already binarized");
  }
  AffinityMatrix out = std::move(affinity);
  for (double& v : out.storage_) v = v >= tau_t ? 1.0 : kWeakAffinity;
  out.thresholded_ = true;
  out.update_degrees();
  return out;
}

AffinityMatrix threshold_affinity(const AffinityMatrix& affinity, double tau_t) {
  return threshold_affinity(AffinityMatrix(affinity), tau_t);
}

AffinityMatrix restrict_affinity(AffinityMatrix&& affinity, std::span<const int> indices) {
  const auto n = static_cast<std::size_t>(affinity.size());
  const auto m = indices.size();
  for (std::size_t i = 0; i < m; ++i) {
    if (indices[i] < 0 || static_cast<std::size_t>(indices[i]) >= n ||
        (i > 0 && indices[i] <= indices[i - 1])) {
      throw Error(ErrorCode::kDimMismatch, "restrict indices must be increasing and in range");
    }
  }
  // Kept indices usually form long consecutive runs (removed patches are
  // blobs), so rows are moved run by run.
  struct Run {
    std::size_t src;
    std::size_t dst;
    std::size_t len;
  };
  std::vector<Run> runs;
  for (std::size_t i = 0; i < m; ++i) {
    const auto idx = static_cast<std::size_t>(indices[i]);
    if (!runs.empty() && runs.back().src + runs.back().len == idx) {
      ++runs.back().len;
    } else {
      runs.push_back({idx, i, 1});
    }
  }
  AffinityMatrix out = std::move(affinity);
  // Destinations never pass their sources (indices[c] >= c, m <= n), so an
  // ascending forward copy compacts in place.
  double* data = out.storage_.data();
  for (std::size_t c = 0; c < m; ++c) {
    const double* src_col = data + static_cast<std::size_t>(indices[c]) * n;
    double* dst_col = data + c * m;
    for (const Run& run : runs) std::copy(src_col + run.src, src_col + run.src + run.len, dst_col + run.dst);
  }
  out.storage_.resize(m * m);
  out.n_ = static_cast<int>(m);
  out.update_degrees();
  return out;
}

AffinityMatrix restrict_affinity(const AffinityMatrix& affinity, std::span<const int> indices) {
  const auto m = static_cast<Eigen::Index>(indices.size());
  Eigen::MatrixXd w(m, m);
  const auto src = affinity.values();
  for (Eigen::Index c = 0; c < m; ++c) {
    for (Eigen::Index r = 0; r < m; ++r) {
      if (indices[r] < 0 || indices[r] >= affinity.size()) {
        throw Error(ErrorCode::kDimMismatch, "restrict index out of range");
      }
      w(r, c) = src(indices[r], indices[c]);
    }
  }
  return AffinityMatrix(w, affinity.thresholded());
}

std::vector<int> active_patches(GridShape shape, std::span<const BinaryMask> prior_masks) {
  for (const auto& m : prior_masks) {
    if (m.height() != shape.height || m.width() != shape.width) {
      throw Error(ErrorCode::kDimMismatch, "prior mask does not match the feature grid");
    }
  }
  std::vector<int> active;
  active.reserve(shape.size());
  for (int i = 0; i < shape.size(); ++i) {
    bool keep = true;
    for (const auto& m : prior_masks) keep = keep && !m[i];
    if (keep) active.push_back(i);
  }
  return active;
}

PooledAffinity pool_affinity(const FeatureGrid& grid, std::span<const BinaryMask> prior_masks) {
  require_normalized(grid);
  std::vector<int> active = active_patches(grid.shape(), prior_masks);
  if (active.empty()) {
    throw Error(ErrorCode::kEmptyActiveSet, "every patch is covered by a prior mask");
  }
  AffinityMatrix w = gram_affinity(feature_rows(grid, active));
  return {std::move(w), std::move(active)};
}

}  // namespace layoutcut
