#include "layoutcut/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <random>
#include <set>

#include "layoutcut/error.hpp"
#include "layoutcut/log.hpp"
#include "layoutcut/parallel.hpp"
#include "layoutcut/random.hpp"
#include "layoutcut/rle.hpp"

namespace layoutcut {

std::string synth_image_id(int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "synth_%04d", index);
  return buf;
}

double synth_noise(const SynthConfig& config, std::uint64_t seed, int index) {
  if (config.zero_noise_every > 0 && index % config.zero_noise_every == 0) return 0.0;
  std::mt19937_64 rng(derive_seed(seed, 2 * static_cast<std::uint64_t>(index) + 1));
  return config.noise_max * uniform01(rng);
}

PlantedLayout synth_layout(const SynthConfig& config, std::uint64_t seed, int index) {
  LayoutSampling sampling = config.layout;
  sampling.noise_sigma = synth_noise(config, seed, index);
  return sample_planted_layout(sampling, derive_seed(seed, 2 * static_cast<std::uint64_t>(index)));
}

TrainingRecord planted_record(const std::string& image_id, const PlantedSample& sample) {
  TrainingRecord record;
  record.image_id = image_id;
  const int image_size = sample.grid.source_image_size();
  for (std::size_t k = 0; k < sample.masks.size(); ++k) {
    const BinaryMask pixels = upsample_mask(sample.masks[k], image_size, sample.grid.patch_size());
    InstanceMask inst;
    inst.stage = static_cast<int>(k) + 1;
    inst.patch_mask = sample.masks[k];
    inst.pixel_mask = rle_encode(pixels);
    inst.bbox = mask_to_bbox(pixels);
    record.instances.push_back(std::move(inst));
  }
  record.image_height = image_size;
  record.image_width = image_size;
  return record;
}

MaskDataset write_synth_dataset(const SynthConfig& config, std::uint64_t seed,
                                const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + dir.string() + ": " + ec.message());
  MaskDataset gt;
  for (int i = 0; i < config.count; ++i) {
    const PlantedLayout layout = synth_layout(config, seed, i);
    const PlantedSample sample = synth_block_features(layout);
    const std::string id = synth_image_id(i);
    write_feature_grid(dir / (id + ".lff"), sample.grid);
    gt.push_back(planted_record(id, sample));
    log_event("synth", {{"image_id", id},
                        {"objects", layout.objects.size()},
                        {"noise_sigma", layout.noise_sigma}});
  }
  write_mask_file(dir / "gt.json", gt);
  return gt;
}

std::vector<std::filesystem::path> list_feature_files(const std::filesystem::path& input) {
  std::error_code ec;
  if (std::filesystem::is_regular_file(input, ec)) return {input};
  if (!std::filesystem::is_directory(input, ec)) {
    throw Error(ErrorCode::kIo, "no such input: " + input.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(input)) {
    if (entry.is_regular_file() && entry.path().extension() == ".lff") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

MaskDataset maskcut_files(const std::vector<std::filesystem::path>& files,
                          const MaskCutConfig& config, int workers) {
  validate(config);
  std::set<std::string> ids;
  for (const auto& f : files) {
    if (!ids.insert(f.stem().string()).second) {
      throw Error(ErrorCode::kInvalidConfig, "duplicate image id " + f.stem().string());
    }
  }
  return parallel_map<TrainingRecord>(files.size(), workers, [&](std::size_t i) {
    const std::string id = files[i].stem().string();
    const FeatureGrid grid = normalize(load_feature_grid(files[i]));
    const MaskCutResult result = run_maskcut(grid, config);
    for (const auto& st : result.stages) {
      log_event("stage", {{"image_id", id},
                          {"stage", st.stage},
                          {"active", st.active_patches},
                          {"eigenvalue", st.eigenvalue},
                          {"residual", st.residual},
                          {"seed", st.seed},
                          {"kept", st.kept_patches}});
    }
    log_event("image", {{"image_id", id},
                        {"instances", result.instances.size()},
                        {"stop", std::string(stop_reason_name(result.stop))},
                        {"detail", result.stop_detail}});
    TrainingRecord record;
    record.image_id = id;
    record.instances = result.instances;
    record.image_height = config.image_size;
    record.image_width = config.image_size;
    return record;
  });
}

}  // namespace layoutcut
