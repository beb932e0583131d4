#include "layoutcut/features.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <map>
#include <random>

#include "layoutcut/error.hpp"
#include "layoutcut/file_util.hpp"

namespace layoutcut {

namespace {

constexpr char kMagic[4] = {'L', 'F', 'F', '1'};
constexpr std::size_t kHeaderBytes = 4 + 5 * 4;
constexpr double kMinNorm = 1e-12;

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint32_t get_u32(std::string_view bytes, std::size_t offset) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[offset + i])) << (8 * i);
  }
  return v;
}

double norm_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

FeatureGrid::FeatureGrid(int height, int width, int dim, int source_image_size,
                         int patch_size, std::vector<double> data)
    : height_(height),
      width_(width),
      dim_(dim),
      source_image_size_(source_image_size),
      patch_size_(patch_size),
      data_(std::move(data)) {
  if (height <= 0 || width <= 0 || dim <= 0 || patch_size <= 0) {
    throw Error(ErrorCode::kDimMismatch, "feature grid dimensions must be positive");
  }
  if (height * patch_size != source_image_size || width * patch_size != source_image_size) {
    throw Error(ErrorCode::kDimMismatch,
                "grid " + std::to_string(height) + "x" + std::to_string(width) +
                    " with patch " + std::to_string(patch_size) +
                    " does not tile a square image of side " +
                    std::to_string(source_image_size));
  }
  if (data_.size() != static_cast<std::size_t>(height) * width * dim) {
    throw Error(ErrorCode::kDimMismatch, "feature payload has " +
                                             std::to_string(data_.size()) + " values");
  }
  for (std::size_t i = 0; i < data_.size(); ++i) {
    if (!std::isfinite(data_[i])) {
      throw Error(ErrorCode::kNonFinite, "non-finite feature value at offset " + std::to_string(i));
    }
  }
}

std::string encode_lff(const FeatureGrid& grid) {
  std::string out;
  out.reserve(kHeaderBytes + grid.data().size() * 4);
  out.append(kMagic, 4);
  put_u32(out, static_cast<std::uint32_t>(grid.height()));
  put_u32(out, static_cast<std::uint32_t>(grid.width()));
  put_u32(out, static_cast<std::uint32_t>(grid.dim()));
  put_u32(out, static_cast<std::uint32_t>(grid.source_image_size()));
  put_u32(out, static_cast<std::uint32_t>(grid.patch_size()));
  for (double v : grid.data()) {
    put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  }
  return out;
}

FeatureGrid decode_lff(std::string_view bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw Error(ErrorCode::kBadMagic, "missing LFF1 magic");
  }
  if (bytes.size() < kHeaderBytes) {
    throw Error(ErrorCode::kDimMismatch, "truncated LFF header");
  }
  const std::uint32_t h = get_u32(bytes, 4);
  const std::uint32_t w = get_u32(bytes, 8);
  const std::uint32_t c = get_u32(bytes, 12);
  const std::uint32_t image_size = get_u32(bytes, 16);
  const std::uint32_t patch = get_u32(bytes, 20);
  const std::uint64_t count = static_cast<std::uint64_t>(h) * w * c;
  if (bytes.size() - kHeaderBytes != count * 4) {
    throw Error(ErrorCode::kDimMismatch,
                "payload is " + std::to_string(bytes.size() - kHeaderBytes) +
                    " bytes, header implies " + std::to_string(count * 4));
  }
  std::vector<double> data(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    const float f = std::bit_cast<float>(get_u32(bytes, kHeaderBytes + 4 * i));
    if (!std::isfinite(f)) {
      throw Error(ErrorCode::kNonFinite, "non-finite value at index " + std::to_string(i));
    }
    data[i] = f;
  }
  return FeatureGrid(static_cast<int>(h), static_cast<int>(w), static_cast<int>(c),
                     static_cast<int>(image_size), static_cast<int>(patch), std::move(data));
}

FeatureGrid load_feature_grid(const std::filesystem::path& path) {
  return decode_lff(read_file(path));
}

void write_feature_grid(const std::filesystem::path& path, const FeatureGrid& grid) {
  write_file_atomic(path, encode_lff(grid));
}

FeatureGrid normalize(const FeatureGrid& grid) {
  std::vector<double> data = grid.data();
  const auto dim = static_cast<std::size_t>(grid.dim());
  for (int p = 0; p < grid.num_patches(); ++p) {
    const double n = norm_of(grid.patch(p));
    if (n < kMinNorm) {
      throw Error(ErrorCode::kZeroVector, "patch " + std::to_string(p) + " has zero norm");
    }
    for (std::size_t k = 0; k < dim; ++k) data[p * dim + k] /= n;
  }
  return FeatureGrid(grid.height(), grid.width(), grid.dim(), grid.source_image_size(),
                     grid.patch_size(), std::move(data));
}

bool is_normalized(const FeatureGrid& grid, double tolerance) {
  for (int p = 0; p < grid.num_patches(); ++p) {
    if (std::abs(norm_of(grid.patch(p)) - 1.0) > tolerance) return false;
  }
  return true;
}

void validate_layout(const PlantedLayout& layout) {
  if (layout.height <= 0 || layout.width <= 0 || layout.dim <= 0 || layout.patch_size <= 0) {
    throw Error(ErrorCode::kInvalidLayout, "layout dimensions must be positive");
  }
  if (layout.height != layout.width) {
    throw Error(ErrorCode::kInvalidLayout, "only square grids are supported");
  }
  if (!(layout.noise_sigma >= 0.0) || !std::isfinite(layout.noise_sigma)) {
    throw Error(ErrorCode::kInvalidLayout, "noise sigma must be finite and >= 0");
  }
  for (std::size_t i = 0; i < layout.objects.size(); ++i) {
    const PatchRect& r = layout.objects[i].rect;
    if (r.height <= 0 || r.width <= 0 || r.row < 0 || r.col < 0 ||
        r.row + r.height > layout.height || r.col + r.width > layout.width) {
      throw Error(ErrorCode::kInvalidLayout, "object " + std::to_string(i) + " out of bounds");
    }
    for (std::size_t j = 0; j < i; ++j) {
      const PatchRect& o = layout.objects[j].rect;
      const bool disjoint = r.row + r.height <= o.row || o.row + o.height <= r.row ||
                            r.col + r.width <= o.col || o.col + o.width <= r.col;
      if (!disjoint) {
        throw Error(ErrorCode::kInvalidLayout,
                    "objects " + std::to_string(j) + " and " + std::to_string(i) + " overlap");
      }
    }
  }
}

PlantedSample synth_block_features(const PlantedLayout& layout) {
  validate_layout(layout);
  std::mt19937_64 rng(layout.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  // Direction 0 is the background; clusters get directions in order of first
  // appearance.
  std::map<int, int> cluster_slot;
  for (const auto& obj : layout.objects) {
    cluster_slot.emplace(obj.cluster, 0);
  }
  int next = 1;
  for (const auto& obj : layout.objects) {
    auto& slot = cluster_slot[obj.cluster];
    if (slot == 0) slot = next++;
  }
  const int num_dirs = next;
  const auto dim = static_cast<std::size_t>(layout.dim);

  std::vector<std::vector<double>> dirs(num_dirs, std::vector<double>(dim));
  for (int d = 0; d < num_dirs; ++d) {
    auto& v = dirs[d];
    for (auto& x : v) x = gauss(rng);
    // Gram-Schmidt against earlier directions while the dimension allows.
    if (static_cast<std::size_t>(d) < dim) {
      for (int e = 0; e < d; ++e) {
        double dot = 0.0;
        for (std::size_t k = 0; k < dim; ++k) dot += v[k] * dirs[e][k];
        for (std::size_t k = 0; k < dim; ++k) v[k] -= dot * dirs[e][k];
      }
    }
    const double n = norm_of(v);
    for (auto& x : v) x /= n;
  }

  const int n_patches = layout.height * layout.width;
  std::vector<int> owner(n_patches, -1);
  std::vector<BinaryMask> masks;
  masks.reserve(layout.objects.size());
  for (std::size_t i = 0; i < layout.objects.size(); ++i) {
    const PatchRect& r = layout.objects[i].rect;
    BinaryMask m(layout.height, layout.width);
    for (int row = r.row; row < r.row + r.height; ++row) {
      for (int col = r.col; col < r.col + r.width; ++col) {
        m.set(row, col);
        owner[row * layout.width + col] = static_cast<int>(i);
      }
    }
    masks.push_back(std::move(m));
  }

  std::vector<double> data(static_cast<std::size_t>(n_patches) * dim);
  for (int p = 0; p < n_patches; ++p) {
    const int slot = owner[p] < 0 ? 0 : cluster_slot[layout.objects[owner[p]].cluster];
    double* out = data.data() + static_cast<std::size_t>(p) * dim;
    for (std::size_t k = 0; k < dim; ++k) out[k] = dirs[slot][k];
    if (layout.noise_sigma > 0.0) {
      for (std::size_t k = 0; k < dim; ++k) out[k] += layout.noise_sigma * gauss(rng);
    }
    const double n = norm_of({out, dim});
    for (std::size_t k = 0; k < dim; ++k) out[k] /= n;
  }

  return PlantedSample{
      FeatureGrid(layout.height, layout.width, layout.dim, layout.height * layout.patch_size,
                  layout.patch_size, std::move(data)),
      std::move(masks)};
}

PlantedLayout sample_planted_layout(const LayoutSampling& options, std::uint64_t seed) {
  if (options.min_objects < 0 || options.max_objects < options.min_objects ||
      options.min_side <= 0 || options.max_side < options.min_side) {
    throw Error(ErrorCode::kInvalidLayout, "bad layout sampling options");
  }
  std::mt19937_64 rng(seed);
  auto uniform_int = [&rng](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };

  PlantedLayout layout;
  layout.height = options.height;
  layout.width = options.width;
  layout.dim = options.dim;
  layout.patch_size = options.patch_size;
  layout.noise_sigma = options.noise_sigma;
  layout.seed = rng();

  const int target = uniform_int(options.min_objects, options.max_objects);
  const int inner_h = options.height - 2 * options.margin;
  const int inner_w = options.width - 2 * options.margin;
  int attempts = 0;
  while (static_cast<int>(layout.objects.size()) < target && attempts < 10000) {
    ++attempts;
    const int h = uniform_int(options.min_side, std::min(options.max_side, inner_h));
    const int w = uniform_int(options.min_side, std::min(options.max_side, inner_w));
    if (h > inner_h || w > inner_w) break;
    PatchRect r{options.margin + uniform_int(0, inner_h - h),
                options.margin + uniform_int(0, inner_w - w), h, w};
    bool clear = true;
    for (const auto& obj : layout.objects) {
      const PatchRect& o = obj.rect;
      const int g = options.gap;
      const bool apart = r.row + r.height + g <= o.row || o.row + o.height + g <= r.row ||
                         r.col + r.width + g <= o.col || o.col + o.width + g <= r.col;
      if (!apart) {
        clear = false;
        break;
      }
    }
    if (clear) {
      layout.objects.push_back({r, static_cast<int>(layout.objects.size()) + 1});
    }
  }
  validate_layout(layout);
  return layout;
}

}  // namespace layoutcut
