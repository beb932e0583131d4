#ifndef LAYOUTCUT_RLE_HPP_
#define LAYOUTCUT_RLE_HPP_

#include <cstdint>
#include <vector>

#include "layoutcut/binary_mask.hpp"

namespace layoutcut {

// COCO-style uncompressed run-length encoding. Runs are taken in column-major
// order and alternate zeros/ones, starting with a (possibly empty) zero run.
struct Rle {
  int height = 0;
  int width = 0;
  std::vector<std::uint32_t> counts;

  friend bool operator==(const Rle&, const Rle&) = default;
};

Rle rle_encode(const BinaryMask& mask);
BinaryMask rle_decode(const Rle& rle);

// Throws DimMismatch when the runs do not sum to height * width.
void rle_validate(const Rle& rle);

std::uint64_t rle_area(const Rle& rle);

// |a ∩ b| computed by merging the two run lists. Throws SizeMismatch.
std::uint64_t rle_intersection_area(const Rle& a, const Rle& b);

// Tight bounding box of the set pixels; zero box when empty.
Box rle_bbox(const Rle& rle);

}  // namespace layoutcut

#endif  // LAYOUTCUT_RLE_HPP_
