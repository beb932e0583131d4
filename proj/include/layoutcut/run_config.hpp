#ifndef LAYOUTCUT_RUN_CONFIG_HPP_
#define LAYOUTCUT_RUN_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "layoutcut/augment.hpp"
#include "layoutcut/maskcut.hpp"
#include "layoutcut/selftrain.hpp"

namespace layoutcut {

struct SynthConfig {
  int count = 20;
  double noise_max = 0.1;
  int zero_noise_every = 5;  // every k-th image is noise-free; 0 disables
  LayoutSampling layout;
};

struct RunConfig {
  std::filesystem::path input;
  std::filesystem::path output;
  std::filesystem::path gt;
  std::filesystem::path overlay_dir;
  std::uint64_t seed = 0;
  int workers = 1;
  int max_detections = 0;
  std::string adapter_cmd;  // empty selects the built-in mock detector
  std::string mock_mode = "echo";
  MaskCutConfig maskcut;
  RoundConfig rounds;
  AugmentConfig augment;
  SynthConfig synth;
};

// TOML layout (every key optional):
//   input, output, gt, overlay_dir, seed, workers, max_detections, adapter_cmd
//   [maskcut] n_masks, tau_t, image_size, min_patch_area, max_cut_eigenvalue
//   [rounds]  total_rounds, conf_start, conf_end, dedup_iou, tau_i, dedup ("mask"|"box"), mock
//   [augment] scale_min, scale_max, pastes_per_image, same_image
//   [synth]   count, noise_max, zero_noise_every, min_objects, max_objects, dim
// Throws ParseError on syntax or type errors and unknown keys.
RunConfig parse_run_config(std::string_view toml_text, RunConfig base = {});
RunConfig load_run_config(const std::filesystem::path& path, RunConfig base = {});

// Component invariants plus: workers >= 1, input and output paths differ.
void validate(const RunConfig& config);

}  // namespace layoutcut

#endif  // LAYOUTCUT_RUN_CONFIG_HPP_
