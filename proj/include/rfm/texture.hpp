#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "rfm/image.hpp"

namespace rfm {

inline constexpr int kGlcmFeatureCount = 21;
inline constexpr int kGlrlmFeatureCount = 16;
inline constexpr int kFeatureCount = kGlcmFeatureCount + kGlrlmFeatureCount;

enum class FeatureFamily { glcm, glrlm };

struct FeatureInfo {
  int index;
  std::string_view name;
  FeatureFamily family;
  std::string_view formula;
};

/// Canonical feature table, indices 0..36. GLCM entries come first.
///
/// In the formulas p(i,j) is the normalized merged co-occurrence matrix and
/// r(i,j) the merged run-length matrix with Nr runs; gray levels i, j are
/// 1-based, run lengths j are 1-based, and log is base 2 with 0 log 0 = 0.
const std::array<FeatureInfo, kFeatureCount>& feature_table() noexcept;

std::optional<int> feature_index(std::string_view name) noexcept;

inline FeatureFamily family_of(int index) noexcept {
  return index < kGlcmFeatureCount ? FeatureFamily::glcm : FeatureFamily::glrlm;
}

/// Gray levels in [0, ng) on a rectangular grid.
class QuantizedPatch {
 public:
  QuantizedPatch(int width, int height, std::vector<int> levels, int ng);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int ng() const noexcept { return ng_; }
  std::span<const int> levels() const noexcept { return levels_; }
  int at(int x, int y) const noexcept { return levels_[static_cast<std::size_t>(y) * width_ + x]; }

 private:
  int width_;
  int height_;
  int ng_;
  std::vector<int> levels_;
};

// Uniform binning of [lo, hi] into ng bins; values outside the range are clamped.
inline int quantize_value(int g, int ng, int lo, int hi) noexcept {
  if (hi <= lo) return 0;
  if (g < lo) g = lo;
  if (g > hi) g = hi;
  const long long level = static_cast<long long>(ng) * (g - lo) / (static_cast<long long>(hi) - lo + 1);
  return level < ng - 1 ? static_cast<int>(level) : ng - 1;
}

QuantizedPatch quantize(const GrayImage& img, int ng, int lo, int hi);

/// Quantizes against the image's own min/max.
QuantizedPatch quantize(const GrayImage& img, int ng);

/// Symmetric gray-level co-occurrence counts merged over the four
/// distance-1 directions.
class CooccurrenceMatrix {
 public:
  explicit CooccurrenceMatrix(int ng);

  int ng() const noexcept { return ng_; }
  std::int64_t total() const noexcept { return total_; }
  std::int64_t count(int i, int j) const noexcept { return counts_[static_cast<std::size_t>(i) * ng_ + j]; }
  std::span<const std::int64_t> counts() const noexcept { return counts_; }

  // Records the unordered neighbour pair (a, b) in both orders.
  void add_pair(int a, int b) noexcept {
    ++counts_[static_cast<std::size_t>(a) * ng_ + b];
    ++counts_[static_cast<std::size_t>(b) * ng_ + a];
    total_ += 2;
  }
  void remove_pair(int a, int b) noexcept {
    --counts_[static_cast<std::size_t>(a) * ng_ + b];
    --counts_[static_cast<std::size_t>(b) * ng_ + a];
    total_ -= 2;
  }
  void clear() noexcept;

  friend bool operator==(const CooccurrenceMatrix&, const CooccurrenceMatrix&) = default;

 private:
  int ng_;
  std::int64_t total_ = 0;
  std::vector<std::int64_t> counts_;
};

/// Run counts indexed by (gray level, run length - 1), merged over directions.
class RunLengthMatrix {
 public:
  RunLengthMatrix(int ng, int rmax, std::int64_t npixels, int directions);

  int ng() const noexcept { return ng_; }
  int rmax() const noexcept { return rmax_; }
  std::int64_t npixels() const noexcept { return npixels_; }
  int directions() const noexcept { return directions_; }
  std::int64_t runs() const noexcept { return runs_; }

  // Number of runs of `level` with the given 1-based length.
  std::int64_t count(int level, int length) const noexcept {
    return counts_[static_cast<std::size_t>(level) * rmax_ + (length - 1)];
  }
  std::span<const std::int64_t> counts() const noexcept { return counts_; }

  void add_run(int level, int length) noexcept {
    ++counts_[static_cast<std::size_t>(level) * rmax_ + (length - 1)];
    ++runs_;
  }
  void clear() noexcept;

  friend bool operator==(const RunLengthMatrix&, const RunLengthMatrix&) = default;

 private:
  int ng_;
  int rmax_;
  std::int64_t npixels_;
  int directions_;
  std::int64_t runs_ = 0;
  std::vector<std::int64_t> counts_;
};

using GlcmFeatures = std::array<double, kGlcmFeatureCount>;
using GlrlmFeatures = std::array<double, kGlrlmFeatureCount>;

/// The 37 features of one window in canonical order.
class FeatureVector {
 public:
  FeatureVector() = default;
  FeatureVector(const GlcmFeatures& glcm, const GlrlmFeatures& glrlm);

  double operator[](int index) const noexcept { return values_[static_cast<std::size_t>(index)]; }
  std::span<const double, kFeatureCount> values() const noexcept { return values_; }
  std::span<const double> glcm() const noexcept { return std::span(values_).first(kGlcmFeatureCount); }
  std::span<const double> glrlm() const noexcept { return std::span(values_).last(kGlrlmFeatureCount); }

 private:
  std::array<double, kFeatureCount> values_{};
};

/// Throws no_pairs for a 1x1 patch.
CooccurrenceMatrix glcm_accumulate(const QuantizedPatch& patch);

/// Throws empty_matrix when the matrix holds no pairs.
GlcmFeatures glcm_features(const CooccurrenceMatrix& m);

RunLengthMatrix glrlm_accumulate(const QuantizedPatch& patch);

/// Throws empty_matrix when the matrix holds no runs.
GlrlmFeatures glrlm_features(const RunLengthMatrix& m);

FeatureVector compute_features(const QuantizedPatch& patch);

}  // namespace rfm
