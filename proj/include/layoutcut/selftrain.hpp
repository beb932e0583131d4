#ifndef LAYOUTCUT_SELFTRAIN_HPP_
#define LAYOUTCUT_SELFTRAIN_HPP_

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "layoutcut/eval.hpp"
#include "layoutcut/mask_io.hpp"

namespace layoutcut {

struct RoundConfig {
  int total_rounds = 3;
  double conf_start = 0.75;
  double conf_end = 0.5;
  double dedup_iou = 0.5;
  double tau_i = 0.01;
  IouKind dedup_kind = IouKind::kMask;
};

void validate(const RoundConfig& config);

// weight_j = 1 iff max_g IoU(box_j, box_g) > tau_i. No ground truth gives 0.
std::vector<int> loss_keep_weights(std::span<const Detection> predictions,
                                   std::span<const InstanceMask> gt, double tau_i);

// Linear schedule from conf_start (round 1) to conf_end (last round).
// Throws RoundOutOfRange.
double confidence_threshold(int round, const RoundConfig& config);

struct PseudoLabelSet {
  int round = 0;
  std::map<std::string, std::vector<InstanceMask>> labels;
};

PseudoLabelSet to_label_set(const MaskDataset& dataset, int round);
MaskDataset to_dataset(const PseudoLabelSet& labels);

// Next round's labels per image: predictions scoring at least the round's
// threshold (in input order), then every previous label whose IoU with all
// kept predictions is at most dedup_iou.
PseudoLabelSet merge_round_labels(const PseudoLabelSet& prev, const DetectionsByImage& predictions,
                                  const RoundConfig& config);

class DetectorAdapter {
 public:
  virtual ~DetectorAdapter() = default;
  // Trains on the label file and writes predictions to `out`.
  virtual DetectionsByImage train_and_predict(int round, const std::filesystem::path& labels,
                                              const std::filesystem::path& out) = 0;
};

// Runs `<command> --labels <path> --out <path>` through the shell. A nonzero
// exit status or unreadable output throws AdapterFailure.
class SubprocessAdapter : public DetectorAdapter {
 public:
  explicit SubprocessAdapter(std::string command) : command_(std::move(command)) {}
  DetectionsByImage train_and_predict(int round, const std::filesystem::path& labels,
                                      const std::filesystem::path& out) override;

 private:
  std::string command_;
};

enum class MockMode { kEcho, kGrow };

// Echo returns every label with score 0.9. Grow also adds one box per image
// at score 0.8, placed on the first free cell of a grid of
// kMockBoxSide-pixel squares that no label touches.
inline constexpr int kMockBoxSide = 16;
inline constexpr double kMockEchoScore = 0.9;
inline constexpr double kMockExtraScore = 0.8;

DetectionsByImage mock_predict(const MaskDataset& labels, MockMode mode);

class MockDetector : public DetectorAdapter {
 public:
  explicit MockDetector(MockMode mode) : mode_(mode) {}
  DetectionsByImage train_and_predict(int round, const std::filesystem::path& labels,
                                      const std::filesystem::path& out) override;

 private:
  MockMode mode_;
};

std::filesystem::path round_labels_path(const std::filesystem::path& dir, int round);
std::filesystem::path round_predictions_path(const std::filesystem::path& dir, int round);

// UNSUPDLA_ROUNDS_DIR when set, otherwise `fallback`.
std::filesystem::path rounds_directory(const std::filesystem::path& fallback);

// Writes round_0_labels.json, then for each round r hands round_{r-1}'s
// labels to the detector, merges its predictions and writes
// round_{r}_labels.json. Returns rounds 1..R. On AdapterFailure every
// finished round is already on disk.
std::vector<PseudoLabelSet> run_rounds(const PseudoLabelSet& initial, DetectorAdapter& detector,
                                       const RoundConfig& config,
                                       const std::filesystem::path& directory);

}  // namespace layoutcut

#endif  // LAYOUTCUT_SELFTRAIN_HPP_
