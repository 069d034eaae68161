#pragma once

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "rfm/image.hpp"

namespace rfm::test {

inline GrayImage random_image(std::uint64_t seed, int width, int height, int lo = 0, int hi = 255) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> dist(lo, hi);
  std::vector<int> px(static_cast<std::size_t>(width) * height);
  for (int& v : px) v = dist(rng);
  return GrayImage(width, height, std::move(px));
}

// Smooth blobs plus noise; gives texture maps with real spatial structure.
inline GrayImage textured_image(std::uint64_t seed, int width, int height) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 12.0);
  const double fx = 1.0 + 3.0 * unit(rng), fy = 1.0 + 3.0 * unit(rng), phase = 6.28 * unit(rng);
  std::vector<int> px(static_cast<std::size_t>(width) * height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const double u = static_cast<double>(x) / width, v = static_cast<double>(y) / height;
      double g = 128 + 70 * std::sin(6.28 * fx * u + phase) * std::cos(6.28 * fy * v) + noise(rng);
      // Coarse bands on the left, fine noise on the right.
      if (x < width / 2) g = 32 * std::floor(g / 32);
      px[static_cast<std::size_t>(y) * width + x] = static_cast<int>(std::clamp(g, 0.0, 255.0));
    }
  }
  return GrayImage(width, height, std::move(px));
}

inline FloatMap random_map(std::uint64_t seed, int width, int height) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> v(static_cast<std::size_t>(width) * height);
  for (double& x : v) x = dist(rng);
  return FloatMap(width, height, std::move(v));
}

// |a - b| <= tol * max(1, |b|)
inline bool close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("rfm_test_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace rfm::test

