#ifndef LAYOUTCUT_FEATURES_HPP_
#define LAYOUTCUT_FEATURES_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "layoutcut/binary_mask.hpp"

namespace layoutcut {

struct GridShape {
  int height = 0;
  int width = 0;

  int size() const { return height * width; }
  friend bool operator==(const GridShape&, const GridShape&) = default;
};

// H x W grid of C-dimensional patch features, row-major (row, col, channel).
// Immutable once constructed; the constructor enforces the square-image
// geometry and finiteness.
class FeatureGrid {
 public:
  FeatureGrid(int height, int width, int dim, int source_image_size,
              int patch_size, std::vector<double> data);

  int height() const { return height_; }
  int width() const { return width_; }
  int dim() const { return dim_; }
  int source_image_size() const { return source_image_size_; }
  int patch_size() const { return patch_size_; }
  GridShape shape() const { return {height_, width_}; }
  int num_patches() const { return height_ * width_; }

  std::span<const double> patch(int index) const {
    return {data_.data() + static_cast<std::size_t>(index) * dim_,
            static_cast<std::size_t>(dim_)};
  }
  const std::vector<double>& data() const { return data_; }

 private:
  int height_;
  int width_;
  int dim_;
  int source_image_size_;
  int patch_size_;
  std::vector<double> data_;
};

// LFF1 layout: magic, u32 H, W, C, source_image_size, patch_size (LE), then
// H*W*C float32 LE values.
std::string encode_lff(const FeatureGrid& grid);
FeatureGrid decode_lff(std::string_view bytes);

FeatureGrid load_feature_grid(const std::filesystem::path& path);
void write_feature_grid(const std::filesystem::path& path, const FeatureGrid& grid);

// Rescales every patch vector to unit Euclidean norm. Throws ZeroVector.
FeatureGrid normalize(const FeatureGrid& grid);

// True when every patch norm is within `tolerance` of 1.
bool is_normalized(const FeatureGrid& grid, double tolerance = 1e-6);

// Rectangle in patch coordinates.
struct PatchRect {
  int row = 0;
  int col = 0;
  int height = 0;
  int width = 0;

  bool contains(int r, int c) const {
    return r >= row && r < row + height && c >= col && c < col + width;
  }
};

struct PlantedObject {
  PatchRect rect;
  int cluster = 0;
};

struct PlantedLayout {
  int height = 0;
  int width = 0;
  int dim = 64;
  int patch_size = 8;
  std::vector<PlantedObject> objects;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
};

// Throws InvalidLayout for out-of-bounds or overlapping rectangles.
void validate_layout(const PlantedLayout& layout);

struct PlantedSample {
  FeatureGrid grid;
  std::vector<BinaryMask> masks;  // one per planted object, patch resolution
};

// Objects sharing a cluster id share one random direction; the background
// gets its own. Directions are mutually orthogonal when dim allows it.
PlantedSample synth_block_features(const PlantedLayout& layout);

struct LayoutSampling {
  int height = 60;
  int width = 60;
  int dim = 64;
  int patch_size = 8;
  int min_objects = 1;
  int max_objects = 6;
  int min_side = 4;
  int max_side = 18;
  int margin = 1;  // patches kept free along the border
  int gap = 1;     // patches kept free between objects
  double noise_sigma = 0.0;
};

// Random document-like layout: disjoint, non-touching rectangles inside the
// margin, one cluster per object. Pure function of (options, seed).
PlantedLayout sample_planted_layout(const LayoutSampling& options, std::uint64_t seed);

}  // namespace layoutcut

#endif  // LAYOUTCUT_FEATURES_HPP_
