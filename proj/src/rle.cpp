#include "layoutcut/rle.hpp"

#include <algorithm>
#include <numeric>

#include "layoutcut/error.hpp"

namespace layoutcut {

Rle rle_encode(const BinaryMask& mask) {
  Rle rle;
  rle.height = mask.height();
  rle.width = mask.width();
  bool current = false;
  std::uint32_t run = 0;
  for (int x = 0; x < mask.width(); ++x) {
    for (int y = 0; y < mask.height(); ++y) {
      const bool v = mask.at(y, x);
      if (v != current) {
        rle.counts.push_back(run);
        run = 0;
        current = v;
      }
      ++run;
    }
  }
  rle.counts.push_back(run);
  return rle;
}

void rle_validate(const Rle& rle) {
  if (rle.height < 0 || rle.width < 0) {
    throw Error(ErrorCode::kDimMismatch, "negative RLE size");
  }
  const std::uint64_t total =
      std::accumulate(rle.counts.begin(), rle.counts.end(), std::uint64_t{0});
  if (total != static_cast<std::uint64_t>(rle.height) * rle.width) {
    throw Error(ErrorCode::kDimMismatch, "RLE runs sum to " + std::to_string(total) +
                                             ", expected " +
                                             std::to_string(rle.height * rle.width));
  }
}

BinaryMask rle_decode(const Rle& rle) {
  rle_validate(rle);
  BinaryMask mask(rle.height, rle.width);
  std::uint64_t pos = 0;
  bool value = false;
  for (std::uint32_t run : rle.counts) {
    if (value) {
      for (std::uint64_t p = pos; p < pos + run; ++p) {
        const int x = static_cast<int>(p / rle.height);
        const int y = static_cast<int>(p % rle.height);
        mask.set(y, x);
      }
    }
    pos += run;
    value = !value;
  }
  return mask;
}

std::uint64_t rle_area(const Rle& rle) {
  std::uint64_t area = 0;
  for (std::size_t i = 1; i < rle.counts.size(); i += 2) area += rle.counts[i];
  return area;
}

std::uint64_t rle_intersection_area(const Rle& a, const Rle& b) {
  if (a.height != b.height || a.width != b.width) {
    throw Error(ErrorCode::kSizeMismatch, "RLE sizes differ");
  }
  const std::size_t na = a.counts.size();
  const std::size_t nb = b.counts.size();
  if (na == 0 || nb == 0) return 0;
  std::size_t ia = 0;
  std::size_t ib = 0;
  std::uint64_t ca = a.counts[0];
  std::uint64_t cb = b.counts[0];
  bool va = false;
  bool vb = false;
  std::uint64_t inter = 0;
  while (ia < na && ib < nb) {
    const std::uint64_t step = std::min(ca, cb);
    if (va && vb) inter += step;
    ca -= step;
    cb -= step;
    if (ca == 0) {
      ++ia;
      va = !va;
      if (ia < na) ca = a.counts[ia];
    }
    if (cb == 0) {
      ++ib;
      vb = !vb;
      if (ib < nb) cb = b.counts[ib];
    }
  }
  return inter;
}

Box rle_bbox(const Rle& rle) {
  if (rle.height == 0) return {};
  const std::uint64_t h = static_cast<std::uint64_t>(rle.height);
  std::uint64_t pos = 0;
  std::uint64_t x0 = UINT64_MAX, x1 = 0, y0 = UINT64_MAX, y1 = 0;
  bool any = false;
  for (std::size_t i = 0; i < rle.counts.size(); ++i) {
    const std::uint64_t run = rle.counts[i];
    if (i % 2 == 1 && run > 0) {
      any = true;
      const std::uint64_t first = pos;
      const std::uint64_t last = pos + run - 1;
      const std::uint64_t fx = first / h, lx = last / h;
      x0 = std::min(x0, fx);
      x1 = std::max(x1, lx);
      if (fx == lx) {
        y0 = std::min(y0, first % h);
        y1 = std::max(y1, last % h);
      } else {
        // A run wrapping into the next column touches both row 0 and row h-1.
        y0 = 0;
        y1 = h - 1;
      }
    }
    pos += run;
  }
  if (!any) return {};
  return Box{static_cast<double>(x0), static_cast<double>(y0),
             static_cast<double>(x1 - x0 + 1), static_cast<double>(y1 - y0 + 1)};
}

}  // namespace layoutcut
