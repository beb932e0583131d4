#include "layoutcut/eval.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include <json.hpp>

#include "layoutcut/error.hpp"

namespace layoutcut {

namespace {

// Detections of one image in descending score order, ties in input order,
// truncated to the per-image cap.
std::vector<Detection> ranked(const std::vector<Detection>& dets, const EvalOptions& options) {
  std::vector<Detection> out = dets;
  std::stable_sort(out.begin(), out.end(),
                   [](const Detection& a, const Detection& b) { return a.score > b.score; });
  if (options.max_detections > 0 && out.size() > static_cast<std::size_t>(options.max_detections)) {
    out.resize(static_cast<std::size_t>(options.max_detections));
  }
  return out;
}

}  // namespace

double iou_threshold(int index) { return (50.0 + 5.0 * index) / 100.0; }

double iou_box(const Box& a, const Box& b) {
  const double iw = std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x);
  const double ih = std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y);
  const double inter = (iw > 0.0 && ih > 0.0) ? iw * ih : 0.0;
  const double uni = a.area() + b.area() - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

double iou_mask(const Rle& a, const Rle& b) {
  const std::uint64_t inter = rle_intersection_area(a, b);
  const std::uint64_t uni = rle_area(a) + rle_area(b) - inter;
  return uni > 0 ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

double detection_iou(const Detection& det, const InstanceMask& gt, IouKind kind) {
  return kind == IouKind::kBox ? iou_box(det.bbox, gt.bbox)
                               : iou_mask(det.segmentation, gt.pixel_mask);
}

std::vector<bool> match_detections(std::span<const Detection> dets,
                                   std::span<const InstanceMask> gts, double threshold,
                                   IouKind kind) {
  std::vector<bool> taken(gts.size(), false);
  std::vector<bool> flags(dets.size(), false);
  for (std::size_t d = 0; d < dets.size(); ++d) {
    int best = -1;
    double best_iou = threshold;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (taken[g]) continue;
      const double iou = detection_iou(dets[d], gts[g], kind);
      if (iou >= best_iou && (best < 0 || iou > best_iou)) {
        best = static_cast<int>(g);
        best_iou = iou;
      }
    }
    if (best >= 0) {
      taken[static_cast<std::size_t>(best)] = true;
      flags[d] = true;
    }
  }
  return flags;
}

double average_precision(const std::vector<bool>& flags, int n_gt) {
  if (n_gt <= 0 || flags.empty()) return 0.0;
  const std::size_t n = flags.size();
  std::vector<double> recall(n);
  std::vector<double> precision(n);
  double tp = 0.0;
  double fp = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    (flags[i] ? tp : fp) += 1.0;
    recall[i] = tp / n_gt;
    precision[i] = tp / (tp + fp);
  }
  for (std::size_t i = n - 1; i > 0; --i) precision[i - 1] = std::max(precision[i - 1], precision[i]);
  double sum = 0.0;
  for (int k = 0; k <= 100; ++k) {
    const double r = k / 100.0;
    const auto it = std::lower_bound(recall.begin(), recall.end(), r);
    if (it != recall.end()) sum += precision[static_cast<std::size_t>(it - recall.begin())];
  }
  return sum / 101.0;
}

GroundTruthByImage ground_truth_from(const MaskDataset& dataset) {
  GroundTruthByImage out;
  for (const auto& record : dataset) out[record.image_id] = record.instances;
  return out;
}

double pooled_average_precision(const DetectionsByImage& dets, const GroundTruthByImage& gts,
                                double threshold, IouKind kind, const EvalOptions& options) {
  struct Scored {
    double score;
    bool tp;
  };
  std::set<std::string> images;
  for (const auto& [id, unused] : dets) images.insert(id);
  for (const auto& [id, unused] : gts) images.insert(id);
  std::vector<Scored> pooled;
  int n_gt = 0;
  static const std::vector<InstanceMask> kNoGt;
  static const std::vector<Detection> kNoDets;
  for (const auto& id : images) {
    const auto g = gts.find(id);
    const auto& gt = g == gts.end() ? kNoGt : g->second;
    const auto d = dets.find(id);
    const std::vector<Detection> order = ranked(d == dets.end() ? kNoDets : d->second, options);
    n_gt += static_cast<int>(gt.size());
    const std::vector<bool> flags = match_detections(order, gt, threshold, kind);
    for (std::size_t i = 0; i < order.size(); ++i) pooled.push_back({order[i].score, flags[i]});
  }
  std::stable_sort(pooled.begin(), pooled.end(),
                   [](const Scored& a, const Scored& b) { return a.score > b.score; });
  std::vector<bool> flags(pooled.size());
  for (std::size_t i = 0; i < pooled.size(); ++i) flags[i] = pooled[i].tp;
  return average_precision(flags, n_gt);
}

EvalResult evaluate(const DetectionsByImage& dets, const GroundTruthByImage& gts,
                    const EvalOptions& options) {
  EvalResult result;
  for (int t = 0; t < kNumIouThresholds; ++t) {
    result.ap_box[t] = pooled_average_precision(dets, gts, iou_threshold(t), IouKind::kBox, options);
    result.ap_mask[t] =
        pooled_average_precision(dets, gts, iou_threshold(t), IouKind::kMask, options);
  }
  const auto mean = [](const std::array<double, kNumIouThresholds>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / kNumIouThresholds;
  };
  result.map_box = mean(result.ap_box);
  result.ap50_box = result.ap_box[0];
  result.ap75_box = result.ap_box[5];
  result.map_mask = mean(result.ap_mask);
  result.ap50_mask = result.ap_mask[0];
  result.ap75_mask = result.ap_mask[5];
  std::set<std::string> images;
  for (const auto& [id, d] : dets) {
    images.insert(id);
    result.num_detections += static_cast<int>(d.size());
  }
  for (const auto& [id, g] : gts) {
    images.insert(id);
    result.num_ground_truth += static_cast<int>(g.size());
  }
  result.num_images = static_cast<int>(images.size());
  return result;
}

std::string eval_result_json(const EvalResult& result) {
  nlohmann::ordered_json j;
  j["map_box"] = result.map_box;
  j["ap50_box"] = result.ap50_box;
  j["ap75_box"] = result.ap75_box;
  j["map_mask"] = result.map_mask;
  j["ap50_mask"] = result.ap50_mask;
  j["ap75_mask"] = result.ap75_mask;
  nlohmann::ordered_json per;
  std::vector<double> thresholds;
  for (int t = 0; t < kNumIouThresholds; ++t) thresholds.push_back(iou_threshold(t));
  per["iou"] = thresholds;
  per["box"] = result.ap_box;
  per["mask"] = result.ap_mask;
  j["per_threshold"] = std::move(per);
  j["num_images"] = result.num_images;
  j["num_detections"] = result.num_detections;
  j["num_ground_truth"] = result.num_ground_truth;
  return j.dump(2) + "\n";
}

}  // namespace layoutcut
