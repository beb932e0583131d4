#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "layoutcut/augment.hpp"
#include "layoutcut/error.hpp"
#include "layoutcut/eval.hpp"
#include "layoutcut/file_util.hpp"
#include "layoutcut/log.hpp"
#include "layoutcut/mask_io.hpp"
#include "layoutcut/pipeline.hpp"
#include "layoutcut/rle.hpp"
#include "layoutcut/run_config.hpp"
#include "layoutcut/selftrain.hpp"

namespace fs = std::filesystem;
using namespace layoutcut;

namespace {

struct Overrides {
  std::optional<std::string> config;
  std::optional<std::string> input;
  std::optional<std::string> output;
  std::optional<std::string> gt;
  std::optional<std::string> overlay_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<double> tau_t;
  std::optional<int> n_masks;
  std::optional<int> image_size;
  std::optional<double> max_cut;
  std::optional<int> min_patch_area;
  std::optional<double> tau_i;
  std::optional<int> rounds;
  std::optional<double> conf_start;
  std::optional<double> conf_end;
  std::optional<double> dedup_iou;
  std::optional<std::string> dedup;
  std::optional<std::string> adapter_cmd;
  std::optional<std::string> mock;
  std::optional<double> scale_min;
  std::optional<double> scale_max;
  std::optional<int> pastes;
  bool same_image = false;
  std::optional<int> count;
  std::optional<double> noise;
  std::optional<int> max_detections;
  bool quiet = false;
};

template <typename T, typename U>
void apply(const std::optional<T>& v, U& out) {
  if (v) out = *v;
}

RunConfig resolve(const Overrides& o) {
  RunConfig c;
  if (o.config) c = load_run_config(*o.config);
  apply(o.input, c.input);
  apply(o.output, c.output);
  apply(o.gt, c.gt);
  apply(o.overlay_dir, c.overlay_dir);
  apply(o.seed, c.seed);
  apply(o.workers, c.workers);
  apply(o.tau_t, c.maskcut.tau_t);
  apply(o.n_masks, c.maskcut.n_masks);
  apply(o.image_size, c.maskcut.image_size);
  apply(o.max_cut, c.maskcut.max_cut_eigenvalue);
  apply(o.min_patch_area, c.maskcut.min_patch_area);
  apply(o.tau_i, c.rounds.tau_i);
  apply(o.rounds, c.rounds.total_rounds);
  apply(o.conf_start, c.rounds.conf_start);
  apply(o.conf_end, c.rounds.conf_end);
  apply(o.dedup_iou, c.rounds.dedup_iou);
  if (o.dedup) c.rounds.dedup_kind = *o.dedup == "box" ? IouKind::kBox : IouKind::kMask;
  apply(o.adapter_cmd, c.adapter_cmd);
  apply(o.mock, c.mock_mode);
  apply(o.scale_min, c.augment.scale_min);
  apply(o.scale_max, c.augment.scale_max);
  apply(o.pastes, c.augment.pastes_per_image);
  if (o.same_image) c.augment.same_image = true;
  apply(o.count, c.synth.count);
  apply(o.noise, c.synth.noise_max);
  apply(o.max_detections, c.max_detections);
  c.augment.seed = c.seed;
  if (c.synth.layout.patch_size > 0) {
    c.synth.layout.height = c.maskcut.image_size / c.synth.layout.patch_size;
    c.synth.layout.width = c.synth.layout.height;
  }
  validate(c);
  return c;
}

void require(const fs::path& p, const char* flag) {
  if (p.empty()) throw Error(ErrorCode::kInvalidConfig, std::string(flag) + " is required");
}

int cmd_synth(const RunConfig& c) {
  require(c.output, "--output");
  if (c.maskcut.image_size % c.synth.layout.patch_size != 0) {
    throw Error(ErrorCode::kInvalidConfig, "image size must be a multiple of the patch size");
  }
  write_synth_dataset(c.synth, c.seed, c.output);
  return 0;
}

int cmd_maskcut(const RunConfig& c) {
  require(c.input, "--input");
  require(c.output, "--output");
  const auto files = list_feature_files(c.input);
  write_mask_file(c.output, maskcut_files(files, c.maskcut, c.workers));
  return 0;
}

int cmd_augment(const RunConfig& c) {
  require(c.input, "--input");
  require(c.output, "--output");
  const AugmentReport report = augment_dataset(read_mask_file(c.input), c.augment);
  write_mask_file(c.output, report.dataset);
  log_event("augment", {{"pastes", report.pastes}, {"degenerate", report.degenerate}});
  return 0;
}

int cmd_rounds(const RunConfig& c) {
  require(c.input, "--input");
  const fs::path dir = rounds_directory(c.output);
  require(dir, "--output or UNSUPDLA_ROUNDS_DIR");
  const PseudoLabelSet initial = to_label_set(read_mask_file(c.input), 0);
  if (c.adapter_cmd.empty()) {
    MockDetector mock(c.mock_mode == "grow" ? MockMode::kGrow : MockMode::kEcho);
    run_rounds(initial, mock, c.rounds, dir);
  } else {
    SubprocessAdapter adapter(c.adapter_cmd);
    run_rounds(initial, adapter, c.rounds, dir);
  }
  return 0;
}

std::string overlay_pgm(const BinaryMask& gt, const BinaryMask& det) {
  std::string out = "P5\n" + std::to_string(gt.width()) + " " + std::to_string(gt.height()) +
                    "\n255\n";
  out.reserve(out.size() + gt.size());
  for (std::size_t i = 0; i < gt.size(); ++i) {
    out.push_back(static_cast<char>((gt[i] ? 85 : 0) + (det[i] ? 170 : 0)));
  }
  return out;
}

void write_overlays(const fs::path& dir, const DetectionsByImage& dets,
                    const GroundTruthByImage& gts) {
  fs::create_directories(dir);
  std::map<std::string, std::pair<BinaryMask, BinaryMask>> images;
  auto paint = [&](const std::string& id, const Rle& rle, bool is_gt) {
    const BinaryMask bits = rle_decode(rle);
    auto& [g, d] = images[id];
    if (g.size() == 0) {
      g = BinaryMask(bits.height(), bits.width());
      d = BinaryMask(bits.height(), bits.width());
    }
    if (bits.height() != g.height() || bits.width() != g.width()) {
      throw Error(ErrorCode::kSizeMismatch, "mask sizes differ within image " + id);
    }
    BinaryMask& target = is_gt ? g : d;
    for (std::size_t i = 0; i < bits.size(); ++i) {
      if (bits[i]) target.set_flat(i);
    }
  };
  for (const auto& [id, list] : gts) {
    for (const auto& inst : list) paint(id, inst.pixel_mask, true);
  }
  for (const auto& [id, list] : dets) {
    for (const auto& det : list) paint(id, det.segmentation, false);
  }
  for (const auto& [id, pair] : images) {
    write_file_atomic(dir / (id + ".pgm"), overlay_pgm(pair.first, pair.second));
  }
}

int cmd_eval(const RunConfig& c) {
  require(c.input, "--input");
  require(c.gt, "--gt");
  require(c.output, "--output");
  const DetectionsByImage dets = to_detections(read_mask_file(c.input));
  const GroundTruthByImage gts = ground_truth_from(read_mask_file(c.gt));
  EvalOptions options;
  options.max_detections = c.max_detections;
  const EvalResult result = evaluate(dets, gts, options);
  write_file_atomic(c.output, eval_result_json(result));
  if (!c.overlay_dir.empty()) write_overlays(c.overlay_dir, dets, gts);
  log_event("eval", {{"map_box", result.map_box},
                     {"ap50_box", result.ap50_box},
                     {"map_mask", result.map_mask},
                     {"ap50_mask", result.ap50_mask}});
  return 0;
}

void add_common(CLI::App* app, Overrides& o) {
  app->add_option("--config", o.config, "TOML run configuration");
  app->add_option("--input", o.input, "input file or directory");
  app->add_option("--output", o.output, "output file or directory");
  app->add_option("--seed", o.seed, "random seed");
  app->add_option("--workers", o.workers, "worker threads");
  app->add_flag("--quiet", o.quiet, "suppress the JSON event log");
}

void add_maskcut_flags(CLI::App* app, Overrides& o) {
  app->add_option("--tau-t", o.tau_t, "affinity threshold (0.15)");
  app->add_option("--n-masks", o.n_masks, "maximum masks per image (10)");
  app->add_option("--image-size", o.image_size, "square image side in pixels (480)");
  app->add_option("--max-cut-eigenvalue", o.max_cut, "stop when lambda_2 exceeds this (0.8)");
  app->add_option("--min-patch-area", o.min_patch_area, "smallest kept mask in patches (1)");
}

void add_round_flags(CLI::App* app, Overrides& o) {
  app->add_option("--tau-i", o.tau_i, "loss-drop IoU threshold (0.01)");
  app->add_option("--rounds", o.rounds, "self-training rounds (3)");
  app->add_option("--conf-start", o.conf_start, "round-1 confidence threshold (0.75)");
  app->add_option("--conf-end", o.conf_end, "last-round confidence threshold (0.5)");
  app->add_option("--dedup-iou", o.dedup_iou, "drop old labels overlapping above this (0.5)");
  app->add_option("--dedup", o.dedup, "IoU used for dedup")->check(CLI::IsMember({"mask", "box"}));
  app->add_option("--adapter-cmd", o.adapter_cmd, "detector command; default built-in mock");
  app->add_option("--mock", o.mock, "built-in mock mode")->check(CLI::IsMember({"echo", "grow"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unsupervised layout mask discovery"};
  app.require_subcommand(1);
  Overrides o;

  auto* synth = app.add_subcommand("synth", "write planted feature grids and ground truth");
  add_common(synth, o);
  synth->add_option("--count", o.count, "number of images");
  synth->add_option("--noise", o.noise, "maximum feature noise sigma");
  synth->add_option("--image-size", o.image_size, "square image side in pixels (480)");

  auto* maskcut = app.add_subcommand("maskcut", "feature files to instance masks");
  add_common(maskcut, o);
  add_maskcut_flags(maskcut, o);

  auto* augment = app.add_subcommand("augment", "scaled copy-paste over mask records");
  add_common(augment, o);
  augment->add_option("--scale-min", o.scale_min, "smallest paste scale (0.3)");
  augment->add_option("--scale-max", o.scale_max, "largest paste scale (1.0)");
  augment->add_option("--pastes", o.pastes, "pastes per image (1)");
  augment->add_flag("--same-image", o.same_image, "copy from the same image");

  auto* rounds = app.add_subcommand("rounds", "pseudo-label self-training rounds");
  add_common(rounds, o);
  add_round_flags(rounds, o);

  auto* eval = app.add_subcommand("eval", "COCO-style AP of detections against ground truth");
  add_common(eval, o);
  eval->add_option("--gt", o.gt, "ground-truth mask file");
  eval->add_option("--overlay-dir", o.overlay_dir, "write PGM overlays here");
  eval->add_option("--max-detections", o.max_detections, "per-image detection cap (0 = none)");

  CLI11_PARSE(app, argc, argv);
  try {
    set_log_enabled(!o.quiet);
    const RunConfig c = resolve(o);
    if (synth->parsed()) return cmd_synth(c);
    if (maskcut->parsed()) return cmd_maskcut(c);
    if (augment->parsed()) return cmd_augment(c);
    if (rounds->parsed()) return cmd_rounds(c);
    if (eval->parsed()) return cmd_eval(c);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: Internal: " << e.what() << "\n";
    return 3;
  }
  return 1;
}
