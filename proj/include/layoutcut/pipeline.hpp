#ifndef LAYOUTCUT_PIPELINE_HPP_
#define LAYOUTCUT_PIPELINE_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "layoutcut/features.hpp"
#include "layoutcut/mask_io.hpp"
#include "layoutcut/maskcut.hpp"
#include "layoutcut/run_config.hpp"

namespace layoutcut {

// Image id used for synthesized sample `index`, e.g. "synth_0007".
std::string synth_image_id(int index);

// Noise level of sample `index`: zero for every zero_noise_every-th sample,
// otherwise uniform in [0, noise_max].
double synth_noise(const SynthConfig& config, std::uint64_t seed, int index);

PlantedLayout synth_layout(const SynthConfig& config, std::uint64_t seed, int index);

// Planted patch masks as pixel-level ground-truth instances, stage = object order.
TrainingRecord planted_record(const std::string& image_id, const PlantedSample& sample);

// Writes <dir>/<id>.lff per sample and <dir>/gt.json; returns the ground truth.
MaskDataset write_synth_dataset(const SynthConfig& config, std::uint64_t seed,
                                const std::filesystem::path& dir);

// `input` may be one .lff file or a directory of them (sorted by name).
std::vector<std::filesystem::path> list_feature_files(const std::filesystem::path& input);

// Loads, normalizes and segments every file, image id = file stem. Logs one
// event per stage and per image.
MaskDataset maskcut_files(const std::vector<std::filesystem::path>& files,
                          const MaskCutConfig& config, int workers);

}  // namespace layoutcut

#endif  // LAYOUTCUT_PIPELINE_HPP_
