#include <algorithm>
#include <random>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

#include "layoutcut/eval.hpp"
#include "layoutcut/mask_io.hpp"
#include "layoutcut/rle.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace layoutcut;

namespace {

Detection rect_det(int height, int width, int x, int y, int w, int h, double score) {
  return to_detection("img", testutil::rect_instance(height, width, x, y, w, h, score));
}

}  // namespace

TEST(Iou, BoxExamples) {
  const Box a{0, 0, 4, 4};
  const Box b{2, 2, 4, 4};
  EXPECT_DOUBLE_EQ(iou_box(a, b), 4.0 / 28.0);
  EXPECT_DOUBLE_EQ(iou_box(a, b), oracle::pixel_box_iou(a, b));
  EXPECT_EQ(iou_box(a, Box{4, 0, 2, 2}), 0.0);
  EXPECT_EQ(iou_box(a, a), 1.0);
  EXPECT_EQ(iou_box(Box{}, Box{}), 0.0);
}

TEST(Iou, BoxMatchesPixelOracle) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 500; ++trial) {
    auto draw = [&] {
      return Box{double(rng() % 12), double(rng() % 12), double(1 + rng() % 8), double(1 + rng() % 8)};
    };
    const Box a = draw();
    const Box b = draw();
    EXPECT_NEAR(iou_box(a, b), oracle::pixel_box_iou(a, b), 1e-15);
    EXPECT_EQ(iou_box(a, b), iou_box(b, a));
  }
}

TEST(Iou, MaskMatchesBitmapOracle) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 1000; ++trial) {
    const Rle a = rle_encode(oracle::random_blob_mask(rng, 16, 16));
    const Rle b = rle_encode(oracle::random_blob_mask(rng, 16, 16));
    const double iou = iou_mask(a, b);
    EXPECT_EQ(iou, oracle::bitmap_iou(a, b));
    EXPECT_EQ(iou, iou_mask(b, a));
    EXPECT_GE(iou, 0.0);
    EXPECT_LE(iou, 1.0);
    EXPECT_EQ(iou_mask(a, a), 1.0);
  }
  EXPECT_LAYOUTCUT_ERROR(iou_mask(rle_encode(BinaryMask(2, 2)), rle_encode(BinaryMask(2, 3))),
                         ErrorCode::kSizeMismatch);
}

TEST(Iou, Thresholds) {
  EXPECT_EQ(iou_threshold(0), 0.5);
  EXPECT_EQ(iou_threshold(5), 0.75);
  EXPECT_EQ(iou_threshold(9), 0.95);
}

TEST(Match, GreedyByScoreOrder) {
  const std::vector<InstanceMask> gts = {testutil::rect_instance(20, 20, 0, 0, 10, 10),
                                         testutil::rect_instance(20, 20, 10, 10, 10, 10)};
  // Exact hit, then a duplicate of the same gt, then a 0.49 IoU near-miss.
  const std::vector<Detection> dets = {rect_det(20, 20, 0, 0, 10, 10, 0.9),
                                       rect_det(20, 20, 0, 0, 10, 10, 0.8),
                                       rect_det(20, 20, 10, 10, 7, 7, 0.7)};
  EXPECT_NEAR(iou_box(dets[2].bbox, gts[1].bbox), 0.49, 1e-12);
  EXPECT_EQ(match_detections(dets, gts, 0.5, IouKind::kBox), (std::vector<bool>{true, false, false}));
  EXPECT_EQ(match_detections(dets, gts, 0.45, IouKind::kMask), (std::vector<bool>{true, false, true}));
}

TEST(Match, PrefersHighestIouThenEarliestGt) {
  const std::vector<InstanceMask> gts = {testutil::rect_instance(20, 20, 0, 0, 8, 8),
                                         testutil::rect_instance(20, 20, 0, 0, 10, 10),
                                         testutil::rect_instance(20, 20, 0, 0, 10, 10)};
  const std::vector<Detection> dets = {rect_det(20, 20, 0, 0, 10, 10, 0.9)};
  const std::vector<Detection> twice = {dets[0], dets[0], dets[0]};
  EXPECT_EQ(match_detections(twice, gts, 0.5, IouKind::kBox), (std::vector<bool>{true, true, true}));
  // With one detection, gt 1 (exact, earliest) is taken; gt 2 stays free.
  const std::vector<InstanceMask> rest = {gts[0], gts[2]};
  EXPECT_EQ(match_detections(dets, rest, 0.99, IouKind::kBox), (std::vector<bool>{true}));
}

TEST(Ap, Examples) {
  EXPECT_DOUBLE_EQ(average_precision({true, true}, 2), 1.0);
  EXPECT_EQ(average_precision({}, 3), 0.0);
  EXPECT_EQ(average_precision({true}, 0), 0.0);
  EXPECT_EQ(average_precision({false, false}, 2), 0.0);
  // Precision 1 up to recall 0.5 (51 points), then 2/3 up to recall 1 (50 points).
  EXPECT_NEAR(average_precision({true, false, true}, 2), (51.0 + 50.0 * 2.0 / 3.0) / 101.0, 1e-15);
  EXPECT_NEAR(average_precision({true, false, true}, 2), oracle::brute_force_ap({true, false, true}, 2),
              1e-15);
  // One of two found: recall 0.5 reached with precision 1.
  EXPECT_NEAR(average_precision({true}, 2), 51.0 / 101.0, 1e-15);
}

TEST(Ap, MatchesBruteForceAndIsMonotone) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 30);
    std::vector<bool> flags(n);
    int tp = 0;
    for (int i = 0; i < n; ++i) {
      flags[i] = rng() % 2 == 0;
      tp += flags[i];
    }
    const int n_gt = std::max(tp, 1) + static_cast<int>(rng() % 4);
    const double ap = average_precision(flags, n_gt);
    EXPECT_NEAR(ap, oracle::brute_force_ap(flags, n_gt), 1e-12);
    std::vector<bool> more = flags;
    more.push_back(false);
    EXPECT_LE(average_precision(more, n_gt), ap + 1e-15);
  }
}

TEST(Evaluate, PerfectAndEmpty) {
  const GroundTruthByImage gts = {{"a", {testutil::rect_instance(8, 8, 0, 0, 4, 4)}},
                                  {"b", {testutil::rect_instance(8, 8, 2, 2, 5, 5)}}};
  DetectionsByImage perfect;
  for (const auto& [id, list] : gts) {
    for (const auto& g : list) perfect[id].push_back(to_detection(id, g));
  }
  const EvalResult r = evaluate(perfect, gts);
  EXPECT_EQ(r.map_box, 1.0);
  EXPECT_EQ(r.map_mask, 1.0);
  EXPECT_EQ(r.num_images, 2);
  EXPECT_EQ(r.num_ground_truth, 2);
  EXPECT_EQ(r.num_detections, 2);
  const EvalResult none = evaluate({}, gts);
  EXPECT_EQ(none.map_box, 0.0);
  EXPECT_EQ(none.ap50_mask, 0.0);
}

TEST(Evaluate, PermutationInvariant) {
  std::mt19937_64 rng(6);
  GroundTruthByImage gts;
  DetectionsByImage dets;
  for (int im = 0; im < 4; ++im) {
    const std::string id = "im" + std::to_string(im);
    for (int k = 0; k < 3; ++k) {
      InstanceMask g;
      g.pixel_mask = rle_encode(oracle::random_blob_mask(rng, 24, 24));
      g.bbox = rle_bbox(g.pixel_mask);
      gts[id].push_back(g);
      InstanceMask d;
      d.pixel_mask = rle_encode(oracle::random_blob_mask(rng, 24, 24));
      d.bbox = rle_bbox(d.pixel_mask);
      d.score = (1 + rng() % 1000) / 1000.0;
      dets[id].push_back(to_detection(id, d));
    }
  }
  const EvalResult base = evaluate(dets, gts);
  for (auto& [id, list] : dets) std::reverse(list.begin(), list.end());
  const EvalResult shuffled = evaluate(dets, gts);
  EXPECT_EQ(base.ap_box, shuffled.ap_box);
  EXPECT_EQ(base.ap_mask, shuffled.ap_mask);
  for (int t = 0; t < kNumIouThresholds; ++t) {
    EXPECT_NEAR(base.ap_mask[t], oracle::reference_ap(dets, gts, iou_threshold(t), true), 1e-12);
  }
}

TEST(Evaluate, MaxDetectionsCap) {
  const GroundTruthByImage gts = {{"a", {testutil::rect_instance(8, 8, 0, 0, 4, 4)}}};
  DetectionsByImage dets;
  dets["a"].push_back(rect_det(8, 8, 4, 4, 4, 4, 0.9));
  dets["a"].push_back(rect_det(8, 8, 0, 0, 4, 4, 0.5));
  EvalOptions capped;
  capped.max_detections = 1;
  EXPECT_EQ(evaluate(dets, gts, capped).ap50_box, 0.0);
  EXPECT_GT(evaluate(dets, gts).ap50_box, 0.0);
}

TEST(Evaluate, ToySetMatchesPycocotools) {
  const std::string dir = LAYOUTCUT_TEST_DATA;
  const DetectionsByImage dets = to_detections(read_mask_file(dir + "/toy_dets.json"));
  const GroundTruthByImage gts = ground_truth_from(read_mask_file(dir + "/toy_gt.json"));
  const EvalResult r = evaluate(dets, gts);
  // Reference values printed by tests/data/coco_reference.py.
  EXPECT_NEAR(r.map_box, 0.44752475247524753, 1e-12);
  EXPECT_NEAR(r.ap50_box, 0.7227722772277227, 1e-12);
  EXPECT_NEAR(r.ap75_box, 0.28712871287128705, 1e-12);
  EXPECT_NEAR(r.map_mask, 0.4198019801980198, 1e-12);
  EXPECT_NEAR(r.ap50_mask, 0.7227722772277227, 1e-12);
  EXPECT_NEAR(r.ap75_mask, 0.28712871287128705, 1e-12);
}

TEST(Evaluate, JsonReport) {
  EvalResult r;
  r.map_box = 0.5;
  r.ap_box[0] = 0.75;
  r.num_images = 3;
  const auto j = nlohmann::json::parse(eval_result_json(r));
  EXPECT_EQ(j.at("map_box").get<double>(), 0.5);
  const auto& per = j.at("per_threshold");
  ASSERT_EQ(per.at("iou").size(), 10u);
  EXPECT_EQ(per.at("iou")[0].get<double>(), 0.5);
  EXPECT_EQ(per.at("iou")[9].get<double>(), 0.95);
  EXPECT_EQ(per.at("box")[0].get<double>(), 0.75);
  EXPECT_EQ(per.at("mask").size(), 10u);
}
