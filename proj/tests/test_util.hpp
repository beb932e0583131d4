#ifndef LAYOUTCUT_TESTS_TEST_UTIL_HPP_
#define LAYOUTCUT_TESTS_TEST_UTIL_HPP_

#include <unistd.h>

#include <filesystem>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "layoutcut/binary_mask.hpp"
#include "layoutcut/error.hpp"
#include "layoutcut/features.hpp"
#include "layoutcut/maskcut.hpp"
#include "layoutcut/rle.hpp"

#define EXPECT_LAYOUTCUT_ERROR(stmt, expected_code)                             \
  do {                                                                          \
    try {                                                                       \
      stmt;                                                                     \
      ADD_FAILURE() << "expected " << layoutcut::error_name(expected_code);     \
    } catch (const layoutcut::Error& e) {                                       \
      EXPECT_EQ(e.code(), expected_code) << e.what();                           \
    }                                                                           \
  } while (0)

namespace testutil {

inline layoutcut::BinaryMask rect_mask(int height, int width, int x, int y, int w, int h) {
  layoutcut::BinaryMask m(height, width);
  for (int r = y; r < y + h; ++r) {
    for (int c = x; c < x + w; ++c) m.set(r, c);
  }
  return m;
}

inline layoutcut::InstanceMask rect_instance(int height, int width, int x, int y, int w, int h,
                                             double score = 1.0) {
  layoutcut::InstanceMask inst;
  const auto m = rect_mask(height, width, x, y, w, h);
  inst.pixel_mask = layoutcut::rle_encode(m);
  inst.bbox = layoutcut::Box{double(x), double(y), double(w), double(h)};
  inst.score = score;
  return inst;
}

// Grid over a square image of side rows*patch from per-patch vectors.
inline layoutcut::FeatureGrid grid_from(int rows, int cols, int patch,
                                        const std::vector<std::vector<double>>& patches) {
  std::vector<double> data;
  for (const auto& p : patches) data.insert(data.end(), p.begin(), p.end());
  return layoutcut::FeatureGrid(rows, cols, static_cast<int>(patches.at(0).size()), rows * patch,
                                patch, std::move(data));
}

// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    path_ = std::filesystem::temp_directory_path() /
            ("layoutcut_test_" + std::to_string(::getpid()) +
             "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name() + "_" +
             std::to_string(counter()++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  static int& counter() {
    static int c = 0;
    return c;
  }
  std::filesystem::path path_;
};

}  // namespace testutil

#endif  // LAYOUTCUT_TESTS_TEST_UTIL_HPP_
