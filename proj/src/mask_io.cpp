#include "layoutcut/mask_io.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "layoutcut/error.hpp"
#include "layoutcut/file_util.hpp"

namespace layoutcut {

namespace {

using nlohmann::json;

json number(double v) {
  if (std::isfinite(v) && v == std::floor(v) && std::abs(v) < 9.0e15) {
    return static_cast<std::int64_t>(v);
  }
  return v;
}

json instance_to_json(const InstanceMask& inst) {
  json seg;
  seg["size"] = {inst.pixel_mask.height, inst.pixel_mask.width};
  seg["counts"] = inst.pixel_mask.counts;
  return json{{"bbox", {number(inst.bbox.x), number(inst.bbox.y), number(inst.bbox.w),
                        number(inst.bbox.h)}},
              {"segmentation", std::move(seg)},
              {"score", number(inst.score)},
              {"stage", inst.stage}};
}

InstanceMask instance_from_json(const json& j) {
  InstanceMask inst;
  const auto& bbox = j.at("bbox");
  if (!bbox.is_array() || bbox.size() != 4) {
    throw Error(ErrorCode::kParse, "bbox must have four numbers");
  }
  inst.bbox = Box{bbox[0].get<double>(), bbox[1].get<double>(), bbox[2].get<double>(),
                  bbox[3].get<double>()};
  const auto& seg = j.at("segmentation");
  const auto& size = seg.at("size");
  if (!size.is_array() || size.size() != 2) {
    throw Error(ErrorCode::kParse, "segmentation size must be [H, W]");
  }
  inst.pixel_mask.height = size[0].get<int>();
  inst.pixel_mask.width = size[1].get<int>();
  inst.pixel_mask.counts = seg.at("counts").get<std::vector<std::uint32_t>>();
  rle_validate(inst.pixel_mask);
  inst.score = j.value("score", 1.0);
  inst.stage = j.value("stage", 0);
  if (!(inst.score >= 0.0 && inst.score <= 1.0)) {
    throw Error(ErrorCode::kParse, "score must lie in [0, 1]");
  }
  return inst;
}

}  // namespace

void update_image_size(TrainingRecord& record) {
  record.image_height = 0;
  record.image_width = 0;
  for (const auto& inst : record.instances) {
    if (record.image_height == 0 && record.image_width == 0) {
      record.image_height = inst.pixel_mask.height;
      record.image_width = inst.pixel_mask.width;
    } else if (inst.pixel_mask.height != record.image_height ||
               inst.pixel_mask.width != record.image_width) {
      throw Error(ErrorCode::kSizeMismatch, "instances of " + record.image_id +
                                                " disagree on image size");
    }
  }
}

std::string serialize_masks(MaskDataset dataset) {
  std::stable_sort(dataset.begin(), dataset.end(),
                   [](const TrainingRecord& a, const TrainingRecord& b) {
                     return a.image_id < b.image_id;
                   });
  json out = json::array();
  for (const auto& record : dataset) {
    json instances = json::array();
    for (const auto& inst : record.instances) instances.push_back(instance_to_json(inst));
    out.push_back(json{{"image_id", record.image_id}, {"instances", std::move(instances)}});
  }
  return out.dump(1) + "\n";
}

MaskDataset parse_masks(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, e.what());
  }
  if (!doc.is_array()) throw Error(ErrorCode::kParse, "mask file must be a JSON array");
  MaskDataset dataset;
  try {
    for (const auto& rec : doc) {
      TrainingRecord record;
      record.image_id = rec.at("image_id").get<std::string>();
      for (const auto& inst : rec.at("instances")) {
        record.instances.push_back(instance_from_json(inst));
      }
      update_image_size(record);
      dataset.push_back(std::move(record));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, e.what());
  }
  std::stable_sort(dataset.begin(), dataset.end(),
                   [](const TrainingRecord& a, const TrainingRecord& b) {
                     return a.image_id < b.image_id;
                   });
  for (std::size_t i = 1; i < dataset.size(); ++i) {
    if (dataset[i].image_id == dataset[i - 1].image_id) {
      throw Error(ErrorCode::kParse, "duplicate image id " + dataset[i].image_id);
    }
  }
  return dataset;
}

MaskDataset read_mask_file(const std::filesystem::path& path) {
  return parse_masks(read_file(path));
}

void write_mask_file(const std::filesystem::path& path, const MaskDataset& dataset) {
  write_file_atomic(path, serialize_masks(dataset));
}

Detection to_detection(const std::string& image_id, const InstanceMask& instance) {
  return Detection{image_id, instance.bbox, instance.pixel_mask, instance.score};
}

InstanceMask to_instance(const Detection& detection, int stage) {
  InstanceMask inst;
  inst.stage = stage;
  inst.pixel_mask = detection.segmentation;
  inst.bbox = detection.bbox;
  inst.score = detection.score;
  return inst;
}

DetectionsByImage to_detections(const MaskDataset& dataset) {
  DetectionsByImage out;
  for (const auto& record : dataset) {
    auto& dets = out[record.image_id];
    for (const auto& inst : record.instances) dets.push_back(to_detection(record.image_id, inst));
  }
  return out;
}

MaskDataset from_detections(const DetectionsByImage& detections) {
  MaskDataset dataset;
  for (const auto& [image_id, dets] : detections) {
    TrainingRecord record;
    record.image_id = image_id;
    for (const auto& det : dets) record.instances.push_back(to_instance(det));
    update_image_size(record);
    dataset.push_back(std::move(record));
  }
  return dataset;
}

}  // namespace layoutcut
