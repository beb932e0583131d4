#include <filesystem>
#include <string>

#include <gtest/gtest.h>

#include "layoutcut/file_util.hpp"
#include "layoutcut/mask_io.hpp"
#include "test_util.hpp"

using namespace layoutcut;

namespace {

MaskDataset sample_dataset() {
  TrainingRecord b{"b", 0, 0, {testutil::rect_instance(6, 5, 1, 2, 3, 2, 0.25)}};
  b.instances[0].stage = 2;
  TrainingRecord a{"a", 0, 0,
                   {testutil::rect_instance(4, 4, 0, 0, 2, 2), testutil::rect_instance(4, 4, 3, 3, 1, 1, 0.5)}};
  TrainingRecord empty{"c", 0, 0, {}};
  MaskDataset d = {b, a, empty};
  for (auto& r : d) update_image_size(r);
  return d;
}

}  // namespace

TEST(MaskIo, RoundTripSortsById) {
  const MaskDataset d = sample_dataset();
  const std::string text = serialize_masks(d);
  const MaskDataset back = parse_masks(text);
  ASSERT_EQ(back.size(), 3u);
  EXPECT_EQ(back[0].image_id, "a");
  EXPECT_EQ(back[1].image_id, "b");
  EXPECT_EQ(back[2].image_id, "c");
  EXPECT_EQ(back[1].image_height, 6);
  EXPECT_EQ(back[1].image_width, 5);
  EXPECT_EQ(back[2].image_height, 0);
  EXPECT_EQ(back[1].instances[0].pixel_mask, d[0].instances[0].pixel_mask);
  EXPECT_EQ(back[1].instances[0].bbox, d[0].instances[0].bbox);
  EXPECT_EQ(back[1].instances[0].score, 0.25);
  EXPECT_EQ(back[1].instances[0].stage, 2);
  EXPECT_EQ(serialize_masks(back), text);
}

TEST(MaskIo, IntegralValuesPrintAsIntegers) {
  const std::string text = serialize_masks(sample_dataset());
  EXPECT_NE(text.find("\"score\": 1,"), std::string::npos) << text;
  EXPECT_NE(text.find("\"score\": 0.25"), std::string::npos);
  EXPECT_EQ(text.find("1.0"), std::string::npos);
  EXPECT_EQ(text.back(), '\n');
}

TEST(MaskIo, DefaultsForOptionalFields) {
  const MaskDataset d = parse_masks(
      R"([{"image_id": "x", "instances": [{"bbox": [0, 0, 1, 1],
          "segmentation": {"size": [2, 2], "counts": [0, 1, 3]}}]}])");
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].instances[0].score, 1.0);
  EXPECT_EQ(d[0].instances[0].stage, 0);
}

TEST(MaskIo, ParseErrors) {
  EXPECT_LAYOUTCUT_ERROR(parse_masks("not json"), ErrorCode::kParse);
  EXPECT_LAYOUTCUT_ERROR(parse_masks("{}"), ErrorCode::kParse);
  EXPECT_LAYOUTCUT_ERROR(parse_masks(R"([{"instances": []}])"), ErrorCode::kParse);
  EXPECT_LAYOUTCUT_ERROR(parse_masks(R"([{"image_id": "a", "instances": []},
                                         {"image_id": "a", "instances": []}])"),
                         ErrorCode::kParse);
  EXPECT_LAYOUTCUT_ERROR(
      parse_masks(R"([{"image_id": "a", "instances": [{"bbox": [0, 0, 1],
          "segmentation": {"size": [2, 2], "counts": [4]}}]}])"),
      ErrorCode::kParse);
  EXPECT_LAYOUTCUT_ERROR(
      parse_masks(R"([{"image_id": "a", "instances": [{"bbox": [0, 0, 1, 1], "score": 1.5,
          "segmentation": {"size": [2, 2], "counts": [0, 1, 3]}}]}])"),
      ErrorCode::kParse);
  EXPECT_LAYOUTCUT_ERROR(
      parse_masks(R"([{"image_id": "a", "instances": [{"bbox": [0, 0, 1, 1],
          "segmentation": {"size": [2, 2], "counts": [0, 1, 2]}}]}])"),
      ErrorCode::kDimMismatch);
  EXPECT_LAYOUTCUT_ERROR(
      parse_masks(R"([{"image_id": "a", "instances": [
          {"bbox": [0, 0, 1, 1], "segmentation": {"size": [2, 2], "counts": [0, 1, 3]}},
          {"bbox": [0, 0, 1, 1], "segmentation": {"size": [1, 4], "counts": [0, 1, 3]}}]}])"),
      ErrorCode::kSizeMismatch);
}

TEST(MaskIo, FileRoundTripAndAtomicWrite) {
  testutil::TempDir dir;
  const auto path = dir.path() / "masks.json";
  write_mask_file(path, sample_dataset());
  EXPECT_EQ(read_mask_file(path).size(), 3u);
  write_mask_file(path, {});
  EXPECT_TRUE(read_mask_file(path).empty());
  // Only the final file remains; no temp siblings.
  int entries = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir.path())) {
    (void)e;
    ++entries;
  }
  EXPECT_EQ(entries, 1);
  EXPECT_LAYOUTCUT_ERROR(read_mask_file(dir.path() / "missing.json"), ErrorCode::kIo);
}

TEST(MaskIo, DetectionConversions) {
  const MaskDataset d = parse_masks(serialize_masks(sample_dataset()));
  const DetectionsByImage dets = to_detections(d);
  ASSERT_EQ(dets.size(), 3u);
  EXPECT_EQ(dets.at("a").size(), 2u);
  EXPECT_EQ(dets.at("a")[1].score, 0.5);
  EXPECT_TRUE(dets.at("c").empty());
  EXPECT_EQ(serialize_masks(from_detections(dets)),
            serialize_masks([&] {
              MaskDataset copy = d;
              for (auto& r : copy) {
                for (auto& i : r.instances) i.stage = 0;
              }
              return copy;
            }()));
  const InstanceMask inst = to_instance(dets.at("b")[0], 4);
  EXPECT_EQ(inst.stage, 4);
  EXPECT_EQ(inst.bbox, (Box{1, 2, 3, 2}));
}
