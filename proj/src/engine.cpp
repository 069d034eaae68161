#include "rfm/engine.hpp"

#include <algorithm>
#include <cstdint>
#include <string>
#include <thread>

#include "rfm/error.hpp"

namespace rfm {

namespace {

// Mirror-padded level raster plus, for each of the four directions, the
// length of the equal-level run starting at every pixel.
class PaddedLevels {
 public:
  static constexpr int kDirs[4][2] = {{1, 0}, {0, 1}, {1, 1}, {-1, 1}};

  PaddedLevels(const GrayImage& img, int ng, int radius)
      : width_(img.width() + 2 * radius), height_(img.height() + 2 * radius) {
    const int lo = img.min_value();
    const int hi = img.max_value();
    const auto n = static_cast<std::size_t>(width_) * height_;
    levels_.resize(n);
    for (int y = 0; y < height_; ++y) {
      const int sy = reflect_index(y - radius, img.height());
      for (int x = 0; x < width_; ++x) {
        const int sx = reflect_index(x - radius, img.width());
        levels_[index(x, y)] = quantize_value(img.at(sx, sy), ng, lo, hi);
      }
    }
    for (int d = 0; d < 4; ++d) {
      auto& run = runs_[d];
      run.resize(n);
      const int dx = kDirs[d][0];
      const int dy = kDirs[d][1];
      for (int y = height_ - 1; y >= 0; --y) {
        for (int x = width_ - 1; x >= 0; --x) {
          const int nx = x + dx;
          const int ny = y + dy;
          const bool inside = nx >= 0 && nx < width_ && ny < height_;
          const std::size_t i = index(x, y);
          run[i] = (inside && levels_[index(nx, ny)] == levels_[i]) ? run[index(nx, ny)] + 1 : 1;
        }
      }
    }
  }

  int level(int x, int y) const noexcept { return levels_[index(x, y)]; }
  int run(int d, int x, int y) const noexcept { return runs_[d][index(x, y)]; }

 private:
  std::size_t index(int x, int y) const noexcept { return static_cast<std::size_t>(y) * width_ + x; }

  int width_;
  int height_;
  std::vector<int> levels_;
  std::vector<int> runs_[4];
};

class WindowSweeper {
 public:
  WindowSweeper(const PaddedLevels& padded, const RfmConfig& cfg, int out_width,
                std::vector<std::vector<double>>& outputs)
      : padded_(padded),
        k_(cfg.kernel),
        out_width_(out_width),
        features_(cfg.features),
        outputs_(outputs),
        glcm_(cfg.ng),
        rlm_(cfg.ng, cfg.kernel, static_cast<std::int64_t>(cfg.kernel) * cfg.kernel, 4) {
    for (int f : features_) {
      (family_of(f) == FeatureFamily::glcm ? need_glcm_ : need_glrlm_) = true;
    }
  }

  void run_rows(int y_begin, int y_end) {
    for (int y = y_begin; y < y_end; ++y) {
      if (need_glcm_) fill_glcm(y);
      for (int x = 0; x < out_width_; ++x) {
        if (need_glcm_ && x > 0) slide_glcm(x - 1, y);
        emit(x, y);
      }
    }
  }

 private:
  void add(int ax, int ay, int bx, int by) { glcm_.add_pair(padded_.level(ax, ay), padded_.level(bx, by)); }
  void remove(int ax, int ay, int bx, int by) { glcm_.remove_pair(padded_.level(ax, ay), padded_.level(bx, by)); }

  // Window with top-left (0, y0) in padded coordinates.
  void fill_glcm(int y0) {
    glcm_.clear();
    for (int y = y0; y < y0 + k_; ++y) {
      for (int x = 0; x < k_; ++x) {
        const bool right = x + 1 < k_;
        const bool down = y + 1 < y0 + k_;
        if (right) add(x, y, x + 1, y);
        if (down) add(x, y, x, y + 1);
        if (right && down) add(x, y, x + 1, y + 1);
        if (right && down) add(x + 1, y, x, y + 1);
      }
    }
  }

  // Moves the window from left column `gone` to left column gone + 1.
  void slide_glcm(int gone, int y0) {
    const int last = y0 + k_ - 1;
    const int fresh = gone + k_;
    for (int y = y0; y <= last; ++y) {
      remove(gone, y, gone + 1, y);
      add(fresh - 1, y, fresh, y);
      if (y < last) {
        remove(gone, y, gone, y + 1);
        remove(gone, y, gone + 1, y + 1);
        remove(gone + 1, y, gone, y + 1);
        add(fresh, y, fresh, y + 1);
        add(fresh - 1, y, fresh, y + 1);
        add(fresh, y, fresh - 1, y + 1);
      }
    }
  }

  void walk(int d, int x, int y, int length) {
    const int dx = PaddedLevels::kDirs[d][0];
    const int dy = PaddedLevels::kDirs[d][1];
    while (length > 0) {
      const int run = std::min(padded_.run(d, x, y), length);
      rlm_.add_run(padded_.level(x, y), run);
      x += dx * run;
      y += dy * run;
      length -= run;
    }
  }

  void fill_glrlm(int x0, int y0) {
    rlm_.clear();
    for (int i = 0; i < k_; ++i) {
      walk(0, x0, y0 + i, k_);
      walk(1, x0 + i, y0, k_);
      walk(2, x0 + i, y0, k_ - i);
      walk(3, x0 + i, y0, i + 1);
      if (i > 0) {
        walk(2, x0, y0 + i, k_ - i);
        walk(3, x0 + k_ - 1, y0 + i, k_ - i);
      }
    }
  }

  void emit(int x, int y) {
    GlcmFeatures glcm{};
    GlrlmFeatures glrlm{};
    if (need_glcm_) glcm = glcm_features(glcm_);
    if (need_glrlm_) {
      fill_glrlm(x, y);
      glrlm = glrlm_features(rlm_);
    }
    const std::size_t at = static_cast<std::size_t>(y) * out_width_ + x;
    for (std::size_t s = 0; s < features_.size(); ++s) {
      const int f = features_[s];
      outputs_[s][at] = f < kGlcmFeatureCount ? glcm[f] : glrlm[f - kGlcmFeatureCount];
    }
  }

  const PaddedLevels& padded_;
  int k_;
  int out_width_;
  const std::vector<int>& features_;
  std::vector<std::vector<double>>& outputs_;
  CooccurrenceMatrix glcm_;
  RunLengthMatrix rlm_;
  bool need_glcm_ = false;
  bool need_glrlm_ = false;
};

FeatureMapStack assemble(const GrayImage& img, const RfmConfig& cfg, std::vector<std::vector<double>> outputs) {
  std::vector<std::pair<int, FloatMap>> maps;
  maps.reserve(cfg.features.size());
  for (std::size_t s = 0; s < cfg.features.size(); ++s) {
    maps.emplace_back(cfg.features[s], FloatMap(img.width(), img.height(), std::move(outputs[s])));
  }
  return FeatureMapStack(img.width(), img.height(), std::move(maps));
}

}  // namespace

std::vector<int> RfmConfig::all_features() {
  std::vector<int> all(kFeatureCount);
  for (int i = 0; i < kFeatureCount; ++i) all[i] = i;
  return all;
}

void RfmConfig::validate() const {
  if (kernel < 3 || kernel % 2 == 0) {
    throw Error(ErrorCode::invalid_argument, "kernel must be odd and >= 3, got " + std::to_string(kernel));
  }
  if (ng < 2) throw Error(ErrorCode::invalid_argument, "ng must be >= 2, got " + std::to_string(ng));
  if (features.empty()) throw Error(ErrorCode::invalid_argument, "feature selection is empty");
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (features[i] < 0 || features[i] >= kFeatureCount || (i > 0 && features[i] <= features[i - 1])) {
      throw Error(ErrorCode::invalid_argument, "feature selection must be ascending canonical indices");
    }
  }
}

std::vector<int> parse_feature_selection(std::string_view spec) {
  if (spec == "all") return RfmConfig::all_features();
  std::vector<int> picked;
  std::size_t start = 0;
  while (start <= spec.size()) {
    const std::size_t comma = std::min(spec.find(',', start), spec.size());
    std::string_view token = spec.substr(start, comma - start);
    while (!token.empty() && token.front() == ' ') token.remove_prefix(1);
    while (!token.empty() && token.back() == ' ') token.remove_suffix(1);
    if (token == "glcm" || token == "glrlm") {
      const auto family = token == "glcm" ? FeatureFamily::glcm : FeatureFamily::glrlm;
      for (int i = 0; i < kFeatureCount; ++i) {
        if (family_of(i) == family) picked.push_back(i);
      }
    } else if (auto index = feature_index(token)) {
      picked.push_back(*index);
    } else {
      throw Error(ErrorCode::invalid_argument, "unknown feature '" + std::string(token) + "'");
    }
    start = comma + 1;
  }
  std::sort(picked.begin(), picked.end());
  picked.erase(std::unique(picked.begin(), picked.end()), picked.end());
  return picked;
}

FeatureMapStack::FeatureMapStack(int width, int height, std::vector<std::pair<int, FloatMap>> maps)
    : width_(width), height_(height), maps_(std::move(maps)) {
  for (std::size_t i = 0; i < maps_.size(); ++i) {
    const auto& [index, map] = maps_[i];
    if (map.width() != width || map.height() != height) {
      throw Error(ErrorCode::dimension_mismatch, "feature map dimensions differ from the stack");
    }
    if (index < 0 || index >= kFeatureCount || (i > 0 && index <= maps_[i - 1].first)) {
      throw Error(ErrorCode::invalid_argument, "feature maps must follow canonical order");
    }
  }
}

const FloatMap* FeatureMapStack::find(int feature_index) const noexcept {
  for (const auto& [index, map] : maps_) {
    if (index == feature_index) return &map;
  }
  return nullptr;
}

const FloatMap* FeatureMapStack::find(std::string_view feature_name) const noexcept {
  const auto index = feature_index(feature_name);
  return index ? find(*index) : nullptr;
}

FeatureMapStack extract_maps(const GrayImage& img, const RfmConfig& cfg, unsigned threads) {
  cfg.validate();
  const int radius = (cfg.kernel - 1) / 2;
  const PaddedLevels padded(img, cfg.ng, radius);
  const auto npix = static_cast<std::size_t>(img.width()) * img.height();
  std::vector<std::vector<double>> outputs(cfg.features.size(), std::vector<double>(npix));

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  const int bands = static_cast<int>(std::min<unsigned>(threads, static_cast<unsigned>(img.height())));
  if (bands <= 1) {
    WindowSweeper(padded, cfg, img.width(), outputs).run_rows(0, img.height());
  } else {
    // Row bands write disjoint output rows; every window is computed from
    // exact integer counts, so the split cannot change any value.
    std::vector<std::jthread> workers;
    workers.reserve(static_cast<std::size_t>(bands));
    for (int b = 0; b < bands; ++b) {
      const int y0 = img.height() * b / bands;
      const int y1 = img.height() * (b + 1) / bands;
      workers.emplace_back([&, y0, y1] { WindowSweeper(padded, cfg, img.width(), outputs).run_rows(y0, y1); });
    }
  }
  return assemble(img, cfg, std::move(outputs));
}

FeatureMapStack oracle_extract(const GrayImage& img, const RfmConfig& cfg) {
  cfg.validate();
  const int k = cfg.kernel;
  const int radius = (k - 1) / 2;
  const QuantizedPatch levels = quantize(img, cfg.ng);
  const auto npix = static_cast<std::size_t>(img.width()) * img.height();
  std::vector<std::vector<double>> outputs(cfg.features.size(), std::vector<double>(npix));

  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      std::vector<int> window(static_cast<std::size_t>(k) * k);
      for (int wy = 0; wy < k; ++wy) {
        const int sy = reflect_index(y - radius + wy, img.height());
        for (int wx = 0; wx < k; ++wx) {
          const int sx = reflect_index(x - radius + wx, img.width());
          window[static_cast<std::size_t>(wy) * k + wx] = levels.at(sx, sy);
        }
      }
      const FeatureVector fv = compute_features(QuantizedPatch(k, k, std::move(window), cfg.ng));
      for (std::size_t s = 0; s < cfg.features.size(); ++s) {
        outputs[s][static_cast<std::size_t>(y) * img.width() + x] = fv[cfg.features[s]];
      }
    }
  }
  return assemble(img, cfg, std::move(outputs));
}

}  // namespace rfm
