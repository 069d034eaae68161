#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace rfm {

/// Grayscale raster with an explicit number of representable levels.
/// Pixels are row-major and every value is below depth().
class GrayImage {
 public:
  GrayImage(int width, int height, std::vector<int> pixels, int depth = 256);

  static GrayImage filled(int width, int height, int value, int depth = 256);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int depth() const noexcept { return depth_; }
  std::span<const int> pixels() const noexcept { return pixels_; }
  int at(int x, int y) const noexcept { return pixels_[static_cast<std::size_t>(y) * width_ + x]; }

  int min_value() const noexcept;
  int max_value() const noexcept;

  friend bool operator==(const GrayImage&, const GrayImage&) = default;

 private:
  int width_;
  int height_;
  int depth_;
  std::vector<int> pixels_;
};

/// Real-valued map with image geometry. Non-finite values are rejected on construction.
class FloatMap {
 public:
  FloatMap(int width, int height, std::vector<double> values);

  static FloatMap filled(int width, int height, double value);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  double at(int x, int y) const noexcept { return values_[static_cast<std::size_t>(y) * width_ + x]; }

  bool same_shape(const FloatMap& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_;
  }

  friend bool operator==(const FloatMap&, const FloatMap&) = default;

 private:
  int width_;
  int height_;
  std::vector<double> values_;
};

/// Reads an 8-bit grayscale PNG or binary PGM (P5); pixel values are copied verbatim.
GrayImage load_image(const std::filesystem::path& path);

/// Writes an 8-bit grayscale PNG. Requires depth <= 256.
void save_png(const GrayImage& img, const std::filesystem::path& path);

/// Writes a binary PGM (P5). Requires depth <= 256.
void save_pgm(const GrayImage& img, const std::filesystem::path& path);

/// Linear min-max rescale onto [0, 255]; a constant image maps to all zeros.
GrayImage normalize_levels(const GrayImage& img);

/// Cubic B-spline resampling with mirror boundary and align-centers coordinates.
GrayImage resize_bspline(const GrayImage& img, int out_width, int out_height);

// Index reflection without edge repeat: -1 -> 1, n -> n - 2.
inline int reflect_index(int i, int n) noexcept {
  if (n == 1) return 0;
  const int period = 2 * (n - 1);
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - i;
}

}  // namespace rfm
