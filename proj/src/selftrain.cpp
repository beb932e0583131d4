#include "layoutcut/selftrain.hpp"

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <string>

#include "layoutcut/error.hpp"
#include "layoutcut/log.hpp"
#include "layoutcut/maskcut.hpp"
#include "layoutcut/rle.hpp"

namespace layoutcut {

namespace {

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  return out + "'";
}

}  // namespace

void validate(const RoundConfig& config) {
  const auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (config.total_rounds < 1) {
    throw Error(ErrorCode::kInvalidConfig, "total_rounds must be at least 1");
  }
  if (!unit(config.conf_start) || !unit(config.conf_end) || !unit(config.dedup_iou) ||
      !unit(config.tau_i)) {
    throw Error(ErrorCode::kInvalidConfig, "round thresholds must lie in [0, 1]");
  }
  if (config.conf_end > config.conf_start) {
    throw Error(ErrorCode::kInvalidConfig, "conf_end must not exceed conf_start");
  }
}

std::vector<int> loss_keep_weights(std::span<const Detection> predictions,
                                   std::span<const InstanceMask> gt, double tau_i) {
  std::vector<int> weights;
  weights.reserve(predictions.size());
  for (const auto& p : predictions) {
    double best = 0.0;
    for (const auto& g : gt) best = std::max(best, iou_box(p.bbox, g.bbox));
    weights.push_back(best > tau_i ? 1 : 0);
  }
  return weights;
}

double confidence_threshold(int round, const RoundConfig& config) {
  if (round < 1 || round > config.total_rounds) {
    throw Error(ErrorCode::kRoundOutOfRange, "round " + std::to_string(round) + " outside 1.." +
                                                 std::to_string(config.total_rounds));
  }
  if (config.total_rounds == 1) return config.conf_start;
  const double t = static_cast<double>(round - 1) / (config.total_rounds - 1);
  return config.conf_start + (config.conf_end - config.conf_start) * t;
}

PseudoLabelSet to_label_set(const MaskDataset& dataset, int round) {
  PseudoLabelSet set;
  set.round = round;
  for (const auto& record : dataset) set.labels[record.image_id] = record.instances;
  return set;
}

MaskDataset to_dataset(const PseudoLabelSet& labels) {
  MaskDataset dataset;
  for (const auto& [id, instances] : labels.labels) {
    TrainingRecord record;
    record.image_id = id;
    record.instances = instances;
    update_image_size(record);
    dataset.push_back(std::move(record));
  }
  return dataset;
}

PseudoLabelSet merge_round_labels(const PseudoLabelSet& prev, const DetectionsByImage& predictions,
                                  const RoundConfig& config) {
  PseudoLabelSet next;
  next.round = prev.round + 1;
  const double threshold = confidence_threshold(next.round, config);
  next.labels = prev.labels;
  for (const auto& [id, dets] : predictions) {
    std::vector<Detection> kept;
    for (const auto& d : dets) {
      if (d.score >= threshold) kept.push_back(d);
    }
    std::vector<InstanceMask> merged;
    for (const auto& d : kept) merged.push_back(to_instance(d));
    const auto it = prev.labels.find(id);
    if (it != prev.labels.end()) {
      for (const auto& label : it->second) {
        double best = 0.0;
        for (const auto& d : kept) best = std::max(best, detection_iou(d, label, config.dedup_kind));
        if (best <= config.dedup_iou) merged.push_back(label);
      }
    }
    next.labels[id] = std::move(merged);
  }
  return next;
}

DetectionsByImage SubprocessAdapter::train_and_predict(int round,
                                                       const std::filesystem::path& labels,
                                                       const std::filesystem::path& out) {
  std::error_code ec;
  std::filesystem::remove(out, ec);
  const std::string cmd = command_ + " --labels " + shell_quote(labels.string()) + " --out " +
                          shell_quote(out.string());
  const int status = std::system(cmd.c_str());
  if (status == -1 || !WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    throw Error(ErrorCode::kAdapterFailure,
                "round " + std::to_string(round) + ": detector command exited with status " +
                    std::to_string(WIFEXITED(status) ? WEXITSTATUS(status) : status));
  }
  try {
    return to_detections(read_mask_file(out));
  } catch (const Error& e) {
    throw Error(ErrorCode::kAdapterFailure,
                "round " + std::to_string(round) + ": bad predictions: " + e.what());
  }
}

DetectionsByImage mock_predict(const MaskDataset& labels, MockMode mode) {
  DetectionsByImage out;
  for (const auto& record : labels) {
    auto& dets = out[record.image_id];
    for (const auto& inst : record.instances) {
      Detection d = to_detection(record.image_id, inst);
      d.score = kMockEchoScore;
      dets.push_back(std::move(d));
    }
    if (mode != MockMode::kGrow || record.image_height == 0) continue;
    BinaryMask used(record.image_height, record.image_width);
    for (const auto& inst : record.instances) {
      const BinaryMask bits = rle_decode(inst.pixel_mask);
      for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i]) used.set_flat(i);
      }
    }
    bool placed = false;
    for (int y = 0; y + kMockBoxSide <= record.image_height && !placed; y += kMockBoxSide) {
      for (int x = 0; x + kMockBoxSide <= record.image_width && !placed; x += kMockBoxSide) {
        bool free = true;
        for (int r = y; r < y + kMockBoxSide && free; ++r) {
          for (int c = x; c < x + kMockBoxSide && free; ++c) free = !used.at(r, c);
        }
        if (!free) continue;
        BinaryMask box(record.image_height, record.image_width);
        for (int r = y; r < y + kMockBoxSide; ++r) {
          for (int c = x; c < x + kMockBoxSide; ++c) box.set(r, c);
        }
        dets.push_back(Detection{record.image_id, mask_to_bbox(box), rle_encode(box),
                                 kMockExtraScore});
        placed = true;
      }
    }
  }
  return out;
}

DetectionsByImage MockDetector::train_and_predict(int, const std::filesystem::path& labels,
                                                  const std::filesystem::path& out) {
  DetectionsByImage dets = mock_predict(read_mask_file(labels), mode_);
  write_mask_file(out, from_detections(dets));
  return dets;
}

std::filesystem::path round_labels_path(const std::filesystem::path& dir, int round) {
  return dir / ("round_" + std::to_string(round) + "_labels.json");
}

std::filesystem::path round_predictions_path(const std::filesystem::path& dir, int round) {
  return dir / ("round_" + std::to_string(round) + "_predictions.json");
}

std::filesystem::path rounds_directory(const std::filesystem::path& fallback) {
  const char* env = std::getenv("UNSUPDLA_ROUNDS_DIR");
  if (env != nullptr && *env != '\0') return std::filesystem::path(env);
  return fallback;
}

std::vector<PseudoLabelSet> run_rounds(const PseudoLabelSet& initial, DetectorAdapter& detector,
                                       const RoundConfig& config,
                                       const std::filesystem::path& directory) {
  validate(config);
  std::error_code ec;
  std::filesystem::create_directories(directory, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + directory.string() + ": " + ec.message());
  write_mask_file(round_labels_path(directory, initial.round), to_dataset(initial));
  std::vector<PseudoLabelSet> rounds;
  rounds.reserve(static_cast<std::size_t>(config.total_rounds));
  const PseudoLabelSet* prev = &initial;
  for (int r = initial.round + 1; r <= config.total_rounds; ++r) {
    const DetectionsByImage preds = detector.train_and_predict(
        r, round_labels_path(directory, r - 1), round_predictions_path(directory, r));
    rounds.push_back(merge_round_labels(*prev, preds, config));
    prev = &rounds.back();
    write_mask_file(round_labels_path(directory, r), to_dataset(*prev));
    std::size_t count = 0;
    for (const auto& [id, labels] : prev->labels) count += labels.size();
    log_event("round", {{"round", r},
                        {"threshold", confidence_threshold(r, config)},
                        {"images", prev->labels.size()},
                        {"labels", count}});
  }
  return rounds;
}

}  // namespace layoutcut
