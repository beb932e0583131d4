#ifndef LAYOUTCUT_MASKCUT_HPP_
#define LAYOUTCUT_MASKCUT_HPP_

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "layoutcut/binary_mask.hpp"
#include "layoutcut/features.hpp"
#include "layoutcut/ncut.hpp"
#include "layoutcut/rle.hpp"

namespace layoutcut {

// One discovered object. `patch_mask` is only populated for instances produced
// by extract_masks; instances read back from mask files carry pixels only.
struct InstanceMask {
  int stage = 0;
  BinaryMask patch_mask;
  Rle pixel_mask;
  Box bbox;
  double score = 1.0;
};

using RefineFn = std::function<BinaryMask(const BinaryMask&)>;

struct MaskCutConfig {
  int n_masks = 10;
  double tau_t = 0.15;
  int image_size = 480;
  int min_patch_area = 1;
  // Stop once lambda_2 exceeds this: no cut of the remaining graph is
  // meaningfully cheaper than cutting a uniform graph (lambda_2 ~ 1).
  double max_cut_eigenvalue = 0.8;
  SolverOptions solver;
  // Applied to each stage's foreground before pooling. Defaults to
  // refine_mask; the same connectivity holds at patch and pixel resolution.
  RefineFn refine;
};

void validate(const MaskCutConfig& config);

enum class StopReason {
  kMaxMasks,
  kActiveSetExhausted,
  kNoEigengap,
  kNoMeaningfulCut,
  kNotConverged,
  kEmptyForeground,
  kBelowMinArea,
};

std::string_view stop_reason_name(StopReason reason);

// Per-stage diagnostics, including the foreground before refinement.
struct StageTrace {
  int stage = 0;
  int active_patches = 0;
  double eigenvalue = 0.0;
  double residual = 0.0;
  int seed = -1;
  BinaryMask foreground;
  int foreground_corners = 0;
  std::size_t kept_patches = 0;
};

struct MaskCutResult {
  std::vector<InstanceMask> instances;
  std::vector<StageTrace> stages;
  StopReason stop = StopReason::kMaxMasks;
  std::string stop_detail;
};

// Full iterative pipeline with diagnostics. Input grid must be normalized.
MaskCutResult run_maskcut(const FeatureGrid& grid, const MaskCutConfig& config);

std::vector<InstanceMask> extract_masks(const FeatureGrid& grid, const MaskCutConfig& config);

// Nearest-neighbour patch -> pixel upsampling. Throws DimMismatch.
BinaryMask upsample_mask(const BinaryMask& patch_mask, int image_size, int patch_size);

// Largest 4-connected component; ties go to the component whose first pixel
// comes first in row-major order. Throws EmptyMask.
BinaryMask refine_mask(const BinaryMask& mask);

// Tight (x, y, w, h) of the set pixels. Throws EmptyMask.
Box mask_to_bbox(const BinaryMask& mask);

}  // namespace layoutcut

#endif  // LAYOUTCUT_MASKCUT_HPP_
