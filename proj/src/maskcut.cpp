#include "layoutcut/maskcut.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "layoutcut/affinity.hpp"
#include "layoutcut/error.hpp"

namespace layoutcut {

void validate(const MaskCutConfig& config) {
  if (config.n_masks < 1) throw Error(ErrorCode::kInvalidConfig, "n_masks must be >= 1");
  if (!(config.tau_t >= 0.0 && config.tau_t <= 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "tau_t must lie in [0, 1]");
  }
  if (config.image_size <= 0) throw Error(ErrorCode::kInvalidConfig, "image_size must be > 0");
  if (config.min_patch_area < 1) {
    throw Error(ErrorCode::kInvalidConfig, "min_patch_area must be >= 1");
  }
  if (!(config.max_cut_eigenvalue > 0.0 && config.max_cut_eigenvalue <= 2.0)) {
    throw Error(ErrorCode::kInvalidConfig, "max_cut_eigenvalue must lie in (0, 2]");
  }
}

std::string_view stop_reason_name(StopReason reason) {
  switch (reason) {
    case StopReason::kMaxMasks: return "max_masks";
    case StopReason::kActiveSetExhausted: return "active_set_exhausted";
    case StopReason::kNoEigengap: return "no_eigengap";
    case StopReason::kNoMeaningfulCut: return "no_meaningful_cut";
    case StopReason::kNotConverged: return "not_converged";
    case StopReason::kEmptyForeground: return "empty_foreground";
    case StopReason::kBelowMinArea: return "below_min_area";
  }
  return "unknown";
}

BinaryMask upsample_mask(const BinaryMask& patch_mask, int image_size, int patch_size) {
  if (patch_size <= 0 || patch_mask.height() * patch_size != image_size ||
      patch_mask.width() * patch_size != image_size) {
    throw Error(ErrorCode::kDimMismatch, "patch grid does not tile the image");
  }
  BinaryMask pixels(image_size, image_size);
  for (int r = 0; r < patch_mask.height(); ++r) {
    for (int c = 0; c < patch_mask.width(); ++c) {
      if (!patch_mask.at(r, c)) continue;
      for (int y = r * patch_size; y < (r + 1) * patch_size; ++y) {
        for (int x = c * patch_size; x < (c + 1) * patch_size; ++x) pixels.set(y, x);
      }
    }
  }
  return pixels;
}

BinaryMask refine_mask(const BinaryMask& mask) {
  const int h = mask.height();
  const int w = mask.width();
  std::vector<int> label(mask.size(), -1);
  std::vector<int> stack;
  std::vector<int> best_pixels;
  std::vector<int> pixels;
  for (int start = 0; start < static_cast<int>(mask.size()); ++start) {
    if (!mask[start] || label[start] >= 0) continue;
    pixels.clear();
    stack.assign(1, start);
    label[start] = start;
    while (!stack.empty()) {
      const int p = stack.back();
      stack.pop_back();
      pixels.push_back(p);
      const int r = p / w;
      const int c = p % w;
      const int neighbours[4][2] = {{r - 1, c}, {r + 1, c}, {r, c - 1}, {r, c + 1}};
      for (const auto& nb : neighbours) {
        if (nb[0] < 0 || nb[0] >= h || nb[1] < 0 || nb[1] >= w) continue;
        const int q = nb[0] * w + nb[1];
        if (mask[q] && label[q] < 0) {
          label[q] = start;
          stack.push_back(q);
        }
      }
    }
    // Strictly larger wins, so the earliest component keeps ties.
    if (pixels.size() > best_pixels.size()) best_pixels.swap(pixels);
  }
  if (best_pixels.empty()) throw Error(ErrorCode::kEmptyMask, "refine_mask on empty mask");
  BinaryMask out(h, w);
  for (int p : best_pixels) out.set_flat(p);
  return out;
}

Box mask_to_bbox(const BinaryMask& mask) {
  int x0 = std::numeric_limits<int>::max(), y0 = x0, x1 = -1, y1 = -1;
  for (int r = 0; r < mask.height(); ++r) {
    for (int c = 0; c < mask.width(); ++c) {
      if (!mask.at(r, c)) continue;
      x0 = std::min(x0, c);
      x1 = std::max(x1, c);
      y0 = std::min(y0, r);
      y1 = std::max(y1, r);
    }
  }
  if (x1 < 0) throw Error(ErrorCode::kEmptyMask, "mask_to_bbox on empty mask");
  return Box{static_cast<double>(x0), static_cast<double>(y0), static_cast<double>(x1 - x0 + 1),
             static_cast<double>(y1 - y0 + 1)};
}

MaskCutResult run_maskcut(const FeatureGrid& grid, const MaskCutConfig& config) {
  validate(config);
  if (grid.source_image_size() != config.image_size) {
    throw Error(ErrorCode::kDimMismatch,
                "grid was extracted at " + std::to_string(grid.source_image_size()) +
                    " px, config expects " + std::to_string(config.image_size));
  }
  const RefineFn refine = config.refine ? config.refine : RefineFn(refine_mask);
  const GridShape shape = grid.shape();

  // Thresholding is elementwise, so restricting the thresholded matrix equals
  // thresholding each stage's pooled matrix.
  AffinityMatrix current = threshold_affinity(build_affinity(grid), config.tau_t);

  MaskCutResult result;
  std::vector<int> active(shape.size());
  for (int i = 0; i < shape.size(); ++i) active[i] = i;

  auto stop = [&result](StopReason reason, std::string detail) {
    result.stop = reason;
    result.stop_detail = std::move(detail);
  };

  for (int stage = 1; stage <= config.n_masks; ++stage) {
    if (active.size() < 2) {
      stop(StopReason::kActiveSetExhausted, std::to_string(active.size()) + " active patches");
      return result;
    }
    const AffinityMatrix& w = current;

    SpectralSolution sol;
    try {
      sol = solve_second_eigenvector(w, config.solver);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kNoEigengap) {
        stop(StopReason::kNoEigengap, e.what());
        return result;
      }
      if (e.code() == ErrorCode::kNotConverged) {
        stop(StopReason::kNotConverged, e.what());
        return result;
      }
      throw;
    }

    StageTrace trace;
    trace.stage = stage;
    trace.active_patches = static_cast<int>(active.size());
    trace.eigenvalue = sol.eigenvalue;
    trace.residual = sol.residual;
    trace.seed = seed_patch(sol, active);

    if (sol.eigenvalue > config.max_cut_eigenvalue) {
      result.stages.push_back(std::move(trace));
      stop(StopReason::kNoMeaningfulCut, "lambda_2 = " + std::to_string(sol.eigenvalue));
      return result;
    }

    const BinaryMask fg = select_foreground(bipartition(sol, shape, active), sol, active);
    trace.foreground = fg;
    trace.foreground_corners = corners_in_mask(fg, active);
    if (fg.none()) {
      result.stages.push_back(std::move(trace));
      stop(StopReason::kEmptyForeground, "stage " + std::to_string(stage));
      return result;
    }
    BinaryMask kept = refine(fg);
    for (std::size_t p = 0; p < kept.size(); ++p) {
      if (kept[p] && !fg[p]) kept.set_flat(p, false);
    }
    trace.kept_patches = kept.count();
    result.stages.push_back(std::move(trace));
    if (kept.none() || static_cast<int>(kept.count()) < config.min_patch_area) {
      stop(StopReason::kBelowMinArea, std::to_string(kept.count()) + " patches kept");
      return result;
    }

    InstanceMask inst;
    inst.stage = stage;
    const BinaryMask pixels = upsample_mask(kept, config.image_size, grid.patch_size());
    inst.bbox = mask_to_bbox(pixels);
    inst.pixel_mask = rle_encode(pixels);
    inst.score = 1.0;
    inst.patch_mask = std::move(kept);

    std::vector<int> survivors;  // node positions within the current graph
    std::vector<int> next_active;
    for (std::size_t i = 0; i < active.size(); ++i) {
      if (!inst.patch_mask[active[i]]) {
        survivors.push_back(static_cast<int>(i));
        next_active.push_back(active[i]);
      }
    }
    current = restrict_affinity(std::move(current), survivors);
    active = std::move(next_active);
    result.instances.push_back(std::move(inst));
  }
  stop(StopReason::kMaxMasks, std::to_string(config.n_masks) + " stages run");
  return result;
}

std::vector<InstanceMask> extract_masks(const FeatureGrid& grid, const MaskCutConfig& config) {
  return run_maskcut(grid, config).instances;
}

}  // namespace layoutcut
