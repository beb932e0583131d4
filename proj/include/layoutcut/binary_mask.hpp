#ifndef LAYOUTCUT_BINARY_MASK_HPP_
#define LAYOUTCUT_BINARY_MASK_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace layoutcut {

// Axis-aligned box in pixels: top-left corner plus extent.
struct Box {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  double area() const { return w * h; }
  friend bool operator==(const Box&, const Box&) = default;
};

// Row-major binary image. Used both for patch-grid masks and pixel masks.
class BinaryMask {
 public:
  BinaryMask() = default;
  BinaryMask(int height, int width);

  int height() const { return height_; }
  int width() const { return width_; }
  std::size_t size() const { return bits_.size(); }

  bool at(int row, int col) const {
    return bits_[static_cast<std::size_t>(row) * width_ + col] != 0;
  }
  void set(int row, int col, bool value = true) {
    bits_[static_cast<std::size_t>(row) * width_ + col] = value ? 1 : 0;
  }
  // Flat row-major access.
  bool operator[](std::size_t index) const { return bits_[index] != 0; }
  void set_flat(std::size_t index, bool value = true) {
    bits_[index] = value ? 1 : 0;
  }

  std::span<const std::uint8_t> bits() const { return bits_; }

  std::size_t count() const;
  bool none() const { return count() == 0; }

  // M <- 1 - M over every cell.
  BinaryMask inverted() const;

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<std::uint8_t> bits_;
};

// Pixel-set intersection over union; 0 when both are empty.
double bitmap_iou(const BinaryMask& a, const BinaryMask& b);

}  // namespace layoutcut

#endif  // LAYOUTCUT_BINARY_MASK_HPP_
