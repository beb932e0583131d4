#ifndef LAYOUTCUT_EVAL_HPP_
#define LAYOUTCUT_EVAL_HPP_

#include <array>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "layoutcut/binary_mask.hpp"
#include "layoutcut/mask_io.hpp"
#include "layoutcut/rle.hpp"

namespace layoutcut {

enum class IouKind { kBox, kMask };

inline constexpr int kNumIouThresholds = 10;

// 0.50, 0.55, ..., 0.95.
double iou_threshold(int index);

double iou_box(const Box& a, const Box& b);
// Computed on the runs directly. Throws SizeMismatch.
double iou_mask(const Rle& a, const Rle& b);

double detection_iou(const Detection& det, const InstanceMask& gt, IouKind kind);

// `dets` must already be in descending score order. Each detection takes the
// unmatched ground truth with the highest IoU >= threshold, earliest index on
// ties. Returns one true-positive flag per detection.
std::vector<bool> match_detections(std::span<const Detection> dets,
                                   std::span<const InstanceMask> gts, double threshold,
                                   IouKind kind);

// 101-point interpolated AP over the score-ordered flags. Zero when n_gt == 0.
double average_precision(const std::vector<bool>& flags, int n_gt);

using GroundTruthByImage = std::map<std::string, std::vector<InstanceMask>>;

GroundTruthByImage ground_truth_from(const MaskDataset& dataset);

struct EvalOptions {
  int max_detections = 0;  // per image; 0 keeps all
};

struct EvalResult {
  double map_box = 0.0;
  double ap50_box = 0.0;
  double ap75_box = 0.0;
  double map_mask = 0.0;
  double ap50_mask = 0.0;
  double ap75_mask = 0.0;
  std::array<double, kNumIouThresholds> ap_box{};
  std::array<double, kNumIouThresholds> ap_mask{};
  int num_images = 0;
  int num_detections = 0;
  int num_ground_truth = 0;
};

// AP for one IoU threshold, pooling all images into a single category.
double pooled_average_precision(const DetectionsByImage& dets, const GroundTruthByImage& gts,
                                double threshold, IouKind kind, const EvalOptions& options = {});

EvalResult evaluate(const DetectionsByImage& dets, const GroundTruthByImage& gts,
                    const EvalOptions& options = {});

std::string eval_result_json(const EvalResult& result);

}  // namespace layoutcut

#endif  // LAYOUTCUT_EVAL_HPP_
