#ifndef LAYOUTCUT_AUGMENT_HPP_
#define LAYOUTCUT_AUGMENT_HPP_

#include <cstdint>
#include <random>

#include "layoutcut/binary_mask.hpp"
#include "layoutcut/mask_io.hpp"

namespace layoutcut {

struct AugmentConfig {
  double scale_min = 0.3;
  double scale_max = 1.0;
  std::uint64_t seed = 0;
  int pastes_per_image = 1;
  // Copy instances from the record itself instead of from other records.
  bool same_image = false;
};

void validate(const AugmentConfig& config);

// u ~ Uniform[scale_min, scale_max] from the top 53 bits of one draw, so the
// sequence is identical across standard libraries.
double draw_scale(std::mt19937_64& rng, const AugmentConfig& config);

// Crops the instance to its tight box and resamples it by u with
// nearest-neighbour lookup to round(w*u) x round(h*u). Throws DegenerateScale
// when nothing survives, EmptyMask when the source is empty.
BinaryMask scale_instance(const BinaryMask& pixel_mask, double u);

// Pastes `patch` with its top-left at (x, y). Existing instances lose every
// pixel under the pasted mask and are dropped once empty; the pasted instance
// is appended last. Throws SizeMismatch if the patch does not fit.
TrainingRecord paste_instance(const TrainingRecord& target, const BinaryMask& patch, int x, int y,
                              int stage, double score);

struct CopyPasteResult {
  TrainingRecord record;
  bool degenerate = false;  // source vanished at the drawn scale; record unchanged
  double scale = 0.0;
  int x = 0;
  int y = 0;
};

// Draws u, scales the source instance and pastes it at a uniformly random
// in-bounds position. A target without instances takes the source's size.
CopyPasteResult copy_paste(const TrainingRecord& target, const InstanceMask& source,
                           const AugmentConfig& config, std::mt19937_64& rng);

struct AugmentReport {
  MaskDataset dataset;
  int pastes = 0;
  int degenerate = 0;
};

// Applies pastes_per_image copy-pastes to every record. Each record draws
// from its own generator seeded from (seed, record index), and sources are
// taken from the unaugmented input, so records are independent.
AugmentReport augment_dataset(const MaskDataset& dataset, const AugmentConfig& config);

}  // namespace layoutcut

#endif  // LAYOUTCUT_AUGMENT_HPP_
