#include "layoutcut/augment.hpp"

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "layoutcut/error.hpp"
#include "layoutcut/maskcut.hpp"
#include "layoutcut/random.hpp"
#include "layoutcut/rle.hpp"

namespace layoutcut {

namespace {

int draw_index(std::mt19937_64& rng, int count) {
  return static_cast<int>(rng() % static_cast<std::uint64_t>(count));
}

}  // namespace

void validate(const AugmentConfig& config) {
  if (!(config.scale_min > 0.0 && config.scale_min <= config.scale_max &&
        config.scale_max <= 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "scale range must satisfy 0 < min <= max <= 1");
  }
  if (config.pastes_per_image < 0) {
    throw Error(ErrorCode::kInvalidConfig, "pastes_per_image must be non-negative");
  }
}

double draw_scale(std::mt19937_64& rng, const AugmentConfig& config) {
  return config.scale_min + (config.scale_max - config.scale_min) * uniform01(rng);
}

BinaryMask scale_instance(const BinaryMask& pixel_mask, double u) {
  const Box box = mask_to_bbox(pixel_mask);
  const int x0 = static_cast<int>(box.x);
  const int y0 = static_cast<int>(box.y);
  const int w = static_cast<int>(box.w);
  const int h = static_cast<int>(box.h);
  const int nw = static_cast<int>(std::lround(w * u));
  const int nh = static_cast<int>(std::lround(h * u));
  if (nw < 1 || nh < 1) {
    throw Error(ErrorCode::kDegenerateScale, std::to_string(w) + "x" + std::to_string(h) +
                                                 " instance vanishes at scale " +
                                                 std::to_string(u));
  }
  BinaryMask out(nh, nw);
  for (int r = 0; r < nh; ++r) {
    const int sr = std::min(h - 1, static_cast<int>((2LL * r + 1) * h / (2LL * nh)));
    for (int c = 0; c < nw; ++c) {
      const int sc = std::min(w - 1, static_cast<int>((2LL * c + 1) * w / (2LL * nw)));
      if (pixel_mask.at(y0 + sr, x0 + sc)) out.set(r, c);
    }
  }
  if (out.none()) {
    throw Error(ErrorCode::kDegenerateScale, "no pixel survives resampling");
  }
  return out;
}

TrainingRecord paste_instance(const TrainingRecord& target, const BinaryMask& patch, int x, int y,
                              int stage, double score) {
  const int height = target.image_height;
  const int width = target.image_width;
  if (x < 0 || y < 0 || x + patch.width() > width || y + patch.height() > height) {
    throw Error(ErrorCode::kSizeMismatch, "pasted mask does not fit inside the target image");
  }
  BinaryMask pasted(height, width);
  for (int r = 0; r < patch.height(); ++r) {
    for (int c = 0; c < patch.width(); ++c) {
      if (patch.at(r, c)) pasted.set(y + r, x + c);
    }
  }
  TrainingRecord out;
  out.image_id = target.image_id;
  out.image_height = height;
  out.image_width = width;
  for (const auto& inst : target.instances) {
    BinaryMask bits = rle_decode(inst.pixel_mask);
    if (bits.height() != height || bits.width() != width) {
      throw Error(ErrorCode::kSizeMismatch, "instance size differs from the record");
    }
    bool touched = false;
    for (std::size_t i = 0; i < bits.size(); ++i) {
      if (pasted[i] && bits[i]) {
        bits.set_flat(i, false);
        touched = true;
      }
    }
    if (!touched) {
      out.instances.push_back(inst);
      continue;
    }
    if (bits.none()) continue;
    InstanceMask kept = inst;
    kept.patch_mask = BinaryMask();
    kept.pixel_mask = rle_encode(bits);
    kept.bbox = mask_to_bbox(bits);
    out.instances.push_back(std::move(kept));
  }
  InstanceMask added;
  added.stage = stage;
  added.pixel_mask = rle_encode(pasted);
  added.bbox = mask_to_bbox(pasted);
  added.score = score;
  out.instances.push_back(std::move(added));
  return out;
}

CopyPasteResult copy_paste(const TrainingRecord& target, const InstanceMask& source,
                           const AugmentConfig& config, std::mt19937_64& rng) {
  CopyPasteResult result;
  result.record = target;
  if (result.record.image_height == 0 && result.record.image_width == 0) {
    result.record.image_height = source.pixel_mask.height;
    result.record.image_width = source.pixel_mask.width;
  }
  result.scale = draw_scale(rng, config);
  BinaryMask patch;
  try {
    patch = scale_instance(rle_decode(source.pixel_mask), result.scale);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kDegenerateScale) throw;
    result.record = target;
    result.degenerate = true;
    return result;
  }
  const int room_x = result.record.image_width - patch.width();
  const int room_y = result.record.image_height - patch.height();
  if (room_x < 0 || room_y < 0) {
    throw Error(ErrorCode::kSizeMismatch, "scaled source is larger than the target image");
  }
  result.x = draw_index(rng, room_x + 1);
  result.y = draw_index(rng, room_y + 1);
  result.record =
      paste_instance(result.record, patch, result.x, result.y, source.stage, source.score);
  return result;
}

AugmentReport augment_dataset(const MaskDataset& dataset, const AugmentConfig& config) {
  validate(config);
  AugmentReport report;
  report.dataset.reserve(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    std::mt19937_64 rng(derive_seed(config.seed, i));
    std::vector<std::pair<std::size_t, std::size_t>> pool;
    for (std::size_t j = 0; j < dataset.size(); ++j) {
      if ((j == i) != config.same_image) continue;
      for (std::size_t k = 0; k < dataset[j].instances.size(); ++k) pool.emplace_back(j, k);
    }
    if (pool.empty() && !config.same_image) {
      for (std::size_t k = 0; k < dataset[i].instances.size(); ++k) pool.emplace_back(i, k);
    }
    TrainingRecord record = dataset[i];
    for (int p = 0; p < config.pastes_per_image && !pool.empty(); ++p) {
      const auto [j, k] = pool[static_cast<std::size_t>(draw_index(rng, static_cast<int>(pool.size())))];
      CopyPasteResult r = copy_paste(record, dataset[j].instances[k], config, rng);
      if (r.degenerate) {
        ++report.degenerate;
      } else {
        ++report.pastes;
      }
      record = std::move(r.record);
    }
    report.dataset.push_back(std::move(record));
  }
  return report;
}

}  // namespace layoutcut
