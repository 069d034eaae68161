#pragma once

#include <string_view>
#include <utility>
#include <vector>

#include "rfm/image.hpp"
#include "rfm/texture.hpp"

namespace rfm {

/// Sliding-window settings. `features` holds canonical indices in ascending order.
struct RfmConfig {
  int kernel = 13;
  int ng = 32;
  std::vector<int> features = all_features();

  static std::vector<int> all_features();

  // Throws invalid_argument unless kernel is odd and >= 3, ng >= 2 and the
  // feature list is a non-empty, strictly ascending set of valid indices.
  void validate() const;
};

/// Parses "all", "glcm", "glrlm" or a comma-separated list of feature names.
std::vector<int> parse_feature_selection(std::string_view spec);

/// One full-resolution map per selected feature, in canonical order.
class FeatureMapStack {
 public:
  FeatureMapStack(int width, int height, std::vector<std::pair<int, FloatMap>> maps);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  const std::vector<std::pair<int, FloatMap>>& maps() const noexcept { return maps_; }

  const FloatMap* find(int feature_index) const noexcept;
  const FloatMap* find(std::string_view feature_name) const noexcept;

 private:
  int width_;
  int height_;
  std::vector<std::pair<int, FloatMap>> maps_;
};

/// Renders feature maps by sweeping a kernel x kernel window over the
/// mirror-padded, globally quantized image. GLCM counts are updated
/// incrementally along each row; runs come from per-direction run caches.
/// Output is bitwise independent of `threads` (0 = hardware concurrency).
FeatureMapStack extract_maps(const GrayImage& img, const RfmConfig& cfg, unsigned threads = 0);

/// Reference implementation: rebuilds every window and its matrices from scratch.
FeatureMapStack oracle_extract(const GrayImage& img, const RfmConfig& cfg);

}  // namespace rfm
