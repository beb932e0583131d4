#include <random>

#include <gtest/gtest.h>

#include "layoutcut/augment.hpp"
#include "layoutcut/mask_io.hpp"
#include "layoutcut/rle.hpp"
#include "test_util.hpp"

using namespace layoutcut;

namespace {

AugmentConfig fixed_scale(double u) {
  AugmentConfig c;
  c.scale_min = u;
  c.scale_max = u;
  return c;
}

TrainingRecord record(std::string id, std::vector<InstanceMask> instances) {
  TrainingRecord r{std::move(id), 0, 0, std::move(instances)};
  update_image_size(r);
  return r;
}

// Every pixel is owned by at most one instance.
bool disjoint(const TrainingRecord& r) {
  std::vector<int> owners(static_cast<std::size_t>(r.image_height) * r.image_width, 0);
  for (const auto& inst : r.instances) {
    const BinaryMask bits = rle_decode(inst.pixel_mask);
    for (std::size_t i = 0; i < bits.size(); ++i) {
      if (bits[i] && owners[i]++ > 0) return false;
    }
  }
  return true;
}

}  // namespace

TEST(Scale, Examples) {
  const BinaryMask square = testutil::rect_mask(20, 20, 4, 6, 8, 8);
  EXPECT_EQ(scale_instance(square, 1.0), testutil::rect_mask(8, 8, 0, 0, 8, 8));
  const BinaryMask half = scale_instance(square, 0.5);
  EXPECT_EQ(half.height(), 4);
  EXPECT_EQ(half.width(), 4);
  EXPECT_EQ(half.count(), 16u);
  // A 1x1 instance rounds to zero below u = 0.5.
  const BinaryMask dot = testutil::rect_mask(5, 5, 2, 2, 1, 1);
  EXPECT_LAYOUTCUT_ERROR(scale_instance(dot, 0.4), ErrorCode::kDegenerateScale);
  EXPECT_LAYOUTCUT_ERROR(scale_instance(BinaryMask(3, 3), 1.0), ErrorCode::kEmptyMask);
}

TEST(Scale, NearestNeighbourPicksCentres) {
  // Halving a 4-wide box samples source columns 1 and 3.
  BinaryMask m(1, 4);
  m.set(0, 1);
  m.set(0, 3);
  m.set(0, 0);
  const BinaryMask s = scale_instance(m, 0.5);
  ASSERT_EQ(s.width(), 2);
  EXPECT_TRUE(s.at(0, 0));  // source column 1
  EXPECT_TRUE(s.at(0, 1));  // source column 3
}

TEST(Paste, UnitScaleAtOrigin) {
  const TrainingRecord target = record("t", {testutil::rect_instance(10, 10, 6, 6, 2, 2)});
  const TrainingRecord out =
      paste_instance(target, testutil::rect_mask(3, 3, 0, 0, 3, 3), 0, 0, 1, 0.7);
  ASSERT_EQ(out.instances.size(), 2u);
  EXPECT_EQ(out.instances[0].bbox, (Box{6, 6, 2, 2}));
  EXPECT_EQ(out.instances[1].bbox, (Box{0, 0, 3, 3}));
  EXPECT_EQ(out.instances[1].score, 0.7);
  EXPECT_EQ(out.instances[1].stage, 1);
  EXPECT_EQ(rle_area(out.instances[1].pixel_mask), 9u);
}

TEST(Paste, OcclusionTrimsAndDrops) {
  const TrainingRecord target = record("t", {testutil::rect_instance(10, 10, 0, 0, 2, 2),
                                             testutil::rect_instance(10, 10, 4, 4, 4, 2)});
  const TrainingRecord out =
      paste_instance(target, testutil::rect_mask(6, 6, 0, 0, 6, 6), 0, 0, 0, 1.0);
  // The 2x2 instance is fully covered; the second loses its left two columns.
  ASSERT_EQ(out.instances.size(), 2u);
  EXPECT_EQ(out.instances[0].bbox, (Box{6, 4, 2, 2}));
  EXPECT_EQ(rle_area(out.instances[0].pixel_mask), 4u);
  EXPECT_TRUE(disjoint(out));
  EXPECT_LAYOUTCUT_ERROR(paste_instance(target, testutil::rect_mask(3, 3, 0, 0, 3, 3), 8, 0, 0, 1),
                         ErrorCode::kSizeMismatch);
}

TEST(CopyPaste, DegenerateDrawLeavesRecordUnchanged) {
  const TrainingRecord target = record("t", {testutil::rect_instance(10, 10, 0, 0, 4, 4)});
  const InstanceMask source = testutil::rect_instance(10, 10, 5, 5, 1, 1);
  std::mt19937_64 rng(1);
  const CopyPasteResult r = copy_paste(target, source, fixed_scale(0.3), rng);
  EXPECT_TRUE(r.degenerate);
  EXPECT_EQ(serialize_masks({r.record}), serialize_masks({target}));
}

TEST(CopyPaste, EmptyTargetTakesSourceSize) {
  const TrainingRecord target = record("t", {});
  const InstanceMask source = testutil::rect_instance(12, 9, 1, 1, 3, 3);
  std::mt19937_64 rng(2);
  const CopyPasteResult r = copy_paste(target, source, fixed_scale(1.0), rng);
  EXPECT_FALSE(r.degenerate);
  EXPECT_EQ(r.record.image_height, 12);
  EXPECT_EQ(r.record.image_width, 9);
  ASSERT_EQ(r.record.instances.size(), 1u);
  EXPECT_EQ(r.record.instances[0].bbox, (Box{double(r.x), double(r.y), 3, 3}));
}

TEST(CopyPaste, DeterministicAndInBounds) {
  const TrainingRecord target = record("t", {testutil::rect_instance(40, 30, 2, 2, 10, 10)});
  const InstanceMask source = testutil::rect_instance(40, 30, 5, 20, 20, 12);
  AugmentConfig cfg;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    std::mt19937_64 a(seed);
    std::mt19937_64 b(seed);
    const CopyPasteResult ra = copy_paste(target, source, cfg, a);
    const CopyPasteResult rb = copy_paste(target, source, cfg, b);
    EXPECT_EQ(ra.scale, rb.scale);
    EXPECT_EQ(serialize_masks({ra.record}), serialize_masks({rb.record}));
    EXPECT_GE(ra.scale, cfg.scale_min);
    EXPECT_LE(ra.scale, cfg.scale_max);
    EXPECT_TRUE(disjoint(ra.record));
    const Box& pasted = ra.record.instances.back().bbox;
    EXPECT_LE(pasted.x + pasted.w, 30);
    EXPECT_LE(pasted.y + pasted.h, 40);
  }
}

TEST(Augment, ConfigValidation) {
  AugmentConfig c;
  EXPECT_NO_THROW(validate(c));
  c.scale_min = 0.0;
  EXPECT_LAYOUTCUT_ERROR(validate(c), ErrorCode::kInvalidConfig);
  c = AugmentConfig{};
  c.scale_min = 0.9;
  c.scale_max = 0.8;
  EXPECT_LAYOUTCUT_ERROR(validate(c), ErrorCode::kInvalidConfig);
  c = AugmentConfig{};
  c.scale_max = 1.2;
  EXPECT_LAYOUTCUT_ERROR(validate(c), ErrorCode::kInvalidConfig);
  c = AugmentConfig{};
  c.pastes_per_image = -1;
  EXPECT_LAYOUTCUT_ERROR(validate(c), ErrorCode::kInvalidConfig);
}

TEST(Augment, DatasetCountsAndDeterminism) {
  const MaskDataset d = {record("a", {testutil::rect_instance(32, 32, 0, 0, 8, 8)}),
                         record("b", {testutil::rect_instance(32, 32, 10, 10, 6, 4)}),
                         record("c", {})};
  AugmentConfig cfg;
  cfg.seed = 9;
  cfg.pastes_per_image = 3;
  const AugmentReport r1 = augment_dataset(d, cfg);
  const AugmentReport r2 = augment_dataset(d, cfg);
  EXPECT_EQ(serialize_masks(r1.dataset), serialize_masks(r2.dataset));
  EXPECT_EQ(r1.pastes + r1.degenerate, 9);
  for (const auto& rec : r1.dataset) EXPECT_TRUE(disjoint(rec));
  cfg.seed = 10;
  EXPECT_NE(serialize_masks(augment_dataset(d, cfg).dataset), serialize_masks(r1.dataset));
}

TEST(Augment, SameImageModeUsesOwnInstances) {
  const MaskDataset d = {record("a", {testutil::rect_instance(16, 16, 0, 0, 4, 4)}),
                         record("b", {})};
  AugmentConfig cfg = fixed_scale(1.0);
  cfg.same_image = true;
  const AugmentReport r = augment_dataset(d, cfg);
  EXPECT_EQ(r.pastes, 1);
  EXPECT_TRUE(r.dataset[1].instances.empty());
  cfg.pastes_per_image = 0;
  EXPECT_EQ(serialize_masks(augment_dataset(d, cfg).dataset), serialize_masks(d));
}
