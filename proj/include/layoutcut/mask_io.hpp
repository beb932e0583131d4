#ifndef LAYOUTCUT_MASK_IO_HPP_
#define LAYOUTCUT_MASK_IO_HPP_

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "layoutcut/maskcut.hpp"
#include "layoutcut/rle.hpp"

namespace layoutcut {

// One image's instances. Image size comes from the instances' RLE size and is
// zero for an image without instances.
struct TrainingRecord {
  std::string image_id;
  int image_height = 0;
  int image_width = 0;
  std::vector<InstanceMask> instances;
};

// Records sorted by image id.
using MaskDataset = std::vector<TrainingRecord>;

// A scored region for one image, as produced by a detector.
struct Detection {
  std::string image_id;
  Box bbox;
  Rle segmentation;
  double score = 0.0;
};

using DetectionsByImage = std::map<std::string, std::vector<Detection>>;

// Mask file: [{"image_id": ..., "instances": [{"bbox": [x, y, w, h],
// "segmentation": {"size": [H, W], "counts": [...]}, "score": s,
// "stage": m}]}]. Serialization sorts records by image id so identical
// datasets produce identical bytes.
std::string serialize_masks(MaskDataset dataset);
MaskDataset parse_masks(std::string_view text);

MaskDataset read_mask_file(const std::filesystem::path& path);
void write_mask_file(const std::filesystem::path& path, const MaskDataset& dataset);

DetectionsByImage to_detections(const MaskDataset& dataset);
MaskDataset from_detections(const DetectionsByImage& detections);

Detection to_detection(const std::string& image_id, const InstanceMask& instance);
InstanceMask to_instance(const Detection& detection, int stage = 0);

// Fills image_height/width from the instances and checks they agree.
void update_image_size(TrainingRecord& record);

}  // namespace layoutcut

#endif  // LAYOUTCUT_MASK_IO_HPP_
