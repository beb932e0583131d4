// Reference implementations for tests, written independently of the library
// routines they check.

#ifndef LAYOUTCUT_TESTS_ORACLES_HPP_
#define LAYOUTCUT_TESTS_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "layoutcut/binary_mask.hpp"
#include "layoutcut/mask_io.hpp"
#include "layoutcut/rle.hpp"

namespace oracle {

using Matrix = std::vector<std::vector<double>>;

// All eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
inline std::vector<double> jacobi_eigenvalues(Matrix a) {
  const std::size_t n = a.size();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) off += a[i][j] * a[i][j];
    }
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(a[p][q]) < 1e-300) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p];
          const double akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k];
          const double aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = a[i][i];
  std::sort(ev.begin(), ev.end());
  return ev;
}

// Spectrum of (D - W) x = lambda D x through D^{-1/2} (D - W) D^{-1/2}.
inline std::vector<double> generalized_spectrum(const Matrix& w) {
  const std::size_t n = w.size();
  std::vector<double> d(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) d[i] += w[i][j];
  }
  Matrix l(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      l[i][j] = ((i == j ? d[i] : 0.0) - w[i][j]) / std::sqrt(d[i] * d[j]);
    }
  }
  return jacobi_eigenvalues(std::move(l));
}

// Pixel-set IoU of two integer boxes by counting covered pixels.
inline double pixel_box_iou(const layoutcut::Box& a, const layoutcut::Box& b) {
  const int x0 = static_cast<int>(std::min(a.x, b.x));
  const int y0 = static_cast<int>(std::min(a.y, b.y));
  const int x1 = static_cast<int>(std::max(a.x + a.w, b.x + b.w));
  const int y1 = static_cast<int>(std::max(a.y + a.h, b.y + b.h));
  long inter = 0;
  long uni = 0;
  for (int y = y0; y < y1; ++y) {
    for (int x = x0; x < x1; ++x) {
      const bool in_a = x >= a.x && x < a.x + a.w && y >= a.y && y < a.y + a.h;
      const bool in_b = x >= b.x && x < b.x + b.w && y >= b.y && y < b.y + b.h;
      inter += in_a && in_b;
      uni += in_a || in_b;
    }
  }
  return uni > 0 ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

inline double bitmap_iou(const layoutcut::Rle& a, const layoutcut::Rle& b) {
  const auto ma = layoutcut::rle_decode(a);
  const auto mb = layoutcut::rle_decode(b);
  long inter = 0;
  long uni = 0;
  for (std::size_t i = 0; i < ma.size(); ++i) {
    inter += ma[i] && mb[i];
    uni += ma[i] || mb[i];
  }
  return uni > 0 ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

// AP from the raw PR points: at each recall level r the interpolated
// precision is the best precision over every point with recall >= r.
inline double brute_force_ap(const std::vector<bool>& flags, int n_gt) {
  if (n_gt == 0) return 0.0;
  std::vector<std::pair<double, double>> points;  // (recall, precision)
  int tp = 0;
  for (std::size_t i = 0; i < flags.size(); ++i) {
    tp += flags[i] ? 1 : 0;
    points.emplace_back(static_cast<double>(tp) / n_gt, static_cast<double>(tp) / (i + 1.0));
  }
  double total = 0.0;
  for (int k = 0; k <= 100; ++k) {
    const double r = k / 100.0;
    double best = 0.0;
    for (const auto& [rec, prec] : points) {
      if (rec >= r) best = std::max(best, prec);
    }
    total += best;
  }
  return total / 101.0;
}

// COCO-protocol AP for one threshold from an explicit IoU table and a global
// (score desc, image, input position) ordering.
inline double reference_ap(const layoutcut::DetectionsByImage& dets,
                           const std::map<std::string, std::vector<layoutcut::InstanceMask>>& gts,
                           double threshold, bool use_mask) {
  struct Entry {
    double score;
    int image;
    int rank;
    bool tp;
  };
  std::vector<std::string> ids;
  for (const auto& [id, d] : dets) ids.push_back(id);
  for (const auto& [id, g] : gts) ids.push_back(id);
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  std::vector<Entry> entries;
  int n_gt = 0;
  for (int im = 0; im < static_cast<int>(ids.size()); ++im) {
    std::vector<layoutcut::Detection> d;
    std::vector<layoutcut::InstanceMask> g;
    if (auto it = dets.find(ids[im]); it != dets.end()) d = it->second;
    if (auto it = gts.find(ids[im]); it != gts.end()) g = it->second;
    n_gt += static_cast<int>(g.size());
    std::vector<int> order(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return std::make_tuple(-d[a].score, a) < std::make_tuple(-d[b].score, b);
    });
    std::vector<std::vector<double>> iou(d.size(), std::vector<double>(g.size()));
    for (std::size_t i = 0; i < d.size(); ++i) {
      for (std::size_t j = 0; j < g.size(); ++j) {
        iou[i][j] = use_mask ? bitmap_iou(d[i].segmentation, g[j].pixel_mask)
                             : pixel_box_iou(d[i].bbox, g[j].bbox);
      }
    }
    std::vector<bool> used(g.size(), false);
    for (int rank = 0; rank < static_cast<int>(order.size()); ++rank) {
      const int i = order[rank];
      int best = -1;
      for (std::size_t j = 0; j < g.size(); ++j) {
        if (used[j] || iou[i][j] < threshold) continue;
        if (best < 0 || iou[i][j] > iou[i][best]) best = static_cast<int>(j);
      }
      if (best >= 0) used[best] = true;
      entries.push_back({d[i].score, im, rank, best >= 0});
    }
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return std::make_tuple(-a.score, a.image, a.rank) < std::make_tuple(-b.score, b.image, b.rank);
  });
  std::vector<bool> flags;
  for (const auto& e : entries) flags.push_back(e.tp);
  return brute_force_ap(flags, n_gt);
}

// Random mask covering a few random integer rectangles; never empty.
inline layoutcut::BinaryMask random_blob_mask(std::mt19937_64& rng, int height, int width) {
  layoutcut::BinaryMask m(height, width);
  const int pieces = 1 + static_cast<int>(rng() % 2);
  for (int k = 0; k < pieces; ++k) {
    const int w = 1 + static_cast<int>(rng() % (width / 2));
    const int h = 1 + static_cast<int>(rng() % (height / 2));
    const int x = static_cast<int>(rng() % (width - w + 1));
    const int y = static_cast<int>(rng() % (height - h + 1));
    for (int r = y; r < y + h; ++r) {
      for (int c = x; c < x + w; ++c) m.set(r, c);
    }
  }
  return m;
}

}  // namespace oracle

#endif  // LAYOUTCUT_TESTS_ORACLES_HPP_
