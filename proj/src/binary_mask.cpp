#include "layoutcut/binary_mask.hpp"

#include <algorithm>

#include "layoutcut/error.hpp"

namespace layoutcut {

BinaryMask::BinaryMask(int height, int width)
    : height_(height), width_(width) {
  if (height < 0 || width < 0) {
    throw Error(ErrorCode::kDimMismatch, "negative mask dimensions");
  }
  bits_.assign(static_cast<std::size_t>(height) * width, 0);
}

std::size_t BinaryMask::count() const {
  return static_cast<std::size_t>(
      std::count_if(bits_.begin(), bits_.end(), [](std::uint8_t b) { return b != 0; }));
}

BinaryMask BinaryMask::inverted() const {
  BinaryMask out = *this;
  for (auto& b : out.bits_) b = b ? 0 : 1;
  return out;
}

double bitmap_iou(const BinaryMask& a, const BinaryMask& b) {
  if (a.height() != b.height() || a.width() != b.width()) {
    throw Error(ErrorCode::kSizeMismatch, "bitmap_iou on masks of different size");
  }
  std::size_t inter = 0;
  std::size_t uni = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    inter += (a[i] && b[i]) ? 1 : 0;
    uni += (a[i] || b[i]) ? 1 : 0;
  }
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace layoutcut
