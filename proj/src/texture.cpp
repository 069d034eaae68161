#include "rfm/texture.hpp"

#include <algorithm>
#include <cmath>

#include "rfm/error.hpp"

namespace rfm {

namespace {

constexpr FeatureFamily G = FeatureFamily::glcm;
constexpr FeatureFamily R = FeatureFamily::glrlm;

constexpr std::array<FeatureInfo, kFeatureCount> kTable = {{
    {0, "GLCM_Energy", G, "sum p^2"},
    {1, "GLCM_Contrast", G, "sum (i-j)^2 p"},
    {2, "GLCM_Correlation", G, "sum (i-mu)(j-mu) p / sigma^2; 1 when sigma = 0"},
    {3, "GLCM_Variance", G, "sum (i-mu)^2 p"},
    {4, "GLCM_InverseDifferenceMoment", G, "sum p / (1 + (i-j)^2)"},
    {5, "GLCM_SumAverage", G, "sum k p_{x+y}(k)"},
    {6, "GLCM_SumVariance", G, "sum (k - SumAverage)^2 p_{x+y}(k)"},
    {7, "GLCM_SumEntropy", G, "-sum p_{x+y} log p_{x+y}"},
    {8, "GLCM_Entropy", G, "-sum p log p"},
    {9, "GLCM_DifferenceVariance", G, "sum (k - DA)^2 p_{x-y}(k), DA = sum k p_{x-y}(k)"},
    {10, "GLCM_DifferenceEntropy", G, "-sum p_{x-y} log p_{x-y}"},
    {11, "GLCM_IMC1", G, "(HXY - HXY1) / HX; 0 when HX = 0"},
    {12, "GLCM_IMC2", G, "sqrt(1 - exp(-2 (HXY2 - HXY))); 0 when HXY2 <= HXY"},
    {13, "GLCM_MaxProbability", G, "max p"},
    {14, "GLCM_Autocorrelation", G, "sum i j p"},
    {15, "GLCM_Dissimilarity", G, "sum |i-j| p"},
    {16, "GLCM_ClusterShade", G, "sum (i + j - 2 mu)^3 p"},
    {17, "GLCM_ClusterProminence", G, "sum (i + j - 2 mu)^4 p"},
    {18, "GLCM_ClusterTendency", G, "sum (i + j - 2 mu)^2 p"},
    {19, "GLCM_InverseDifference", G, "sum p / (1 + |i-j|)"},
    {20, "GLCM_InverseDifferenceMomentNormalized", G, "sum p / (1 + (i-j)^2 / Ng^2)"},
    {21, "GLRLM_SRE", R, "sum r / j^2 / Nr"},
    {22, "GLRLM_LRE", R, "sum r j^2 / Nr"},
    {23, "GLRLM_GLN", R, "sum_i (sum_j r)^2 / Nr"},
    {24, "GLRLM_GLNN", R, "sum_i (sum_j r)^2 / Nr^2"},
    {25, "GLRLM_RLN", R, "sum_j (sum_i r)^2 / Nr"},
    {26, "GLRLM_RLNN", R, "sum_j (sum_i r)^2 / Nr^2"},
    {27, "GLRLM_RunPercentage", R, "Nr / (Npixels * directions)"},
    {28, "GLRLM_GrayLevelVariance", R, "sum (i - mu_i)^2 r / Nr"},
    {29, "GLRLM_RunLengthVariance", R, "sum (j - mu_j)^2 r / Nr"},
    {30, "GLRLM_RunEntropy", R, "-sum (r/Nr) log (r/Nr)"},
    {31, "GLRLM_LGLRE", R, "sum r / i^2 / Nr"},
    {32, "GLRLM_HGLRE", R, "sum r i^2 / Nr"},
    {33, "GLRLM_SRLGLE", R, "sum r / (i^2 j^2) / Nr"},
    {34, "GLRLM_SRHGLE", R, "sum r i^2 / j^2 / Nr"},
    {35, "GLRLM_LRLGLE", R, "sum r j^2 / i^2 / Nr"},
    {36, "GLRLM_LRHGLE", R, "sum r i^2 j^2 / Nr"},
}};

double xlog2x(double p) noexcept { return p > 0.0 ? p * std::log2(p) : 0.0; }

// Four distance-1 directions as (dx, dy); runs and pairs are orientation-free.
constexpr int kDirections[4][2] = {{1, 0}, {1, 1}, {0, 1}, {-1, 1}};

}  // namespace

const std::array<FeatureInfo, kFeatureCount>& feature_table() noexcept { return kTable; }

std::optional<int> feature_index(std::string_view name) noexcept {
  for (const auto& f : kTable) {
    if (f.name == name) return f.index;
  }
  return std::nullopt;
}

QuantizedPatch::QuantizedPatch(int width, int height, std::vector<int> levels, int ng)
    : width_(width), height_(height), ng_(ng), levels_(std::move(levels)) {
  if (width < 1 || height < 1) throw Error(ErrorCode::invalid_argument, "patch dimensions must be >= 1");
  if (ng < 2) throw Error(ErrorCode::invalid_argument, "ng must be >= 2");
  if (levels_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw Error(ErrorCode::dimension_mismatch, "level count does not match width x height");
  }
  for (int v : levels_) {
    if (v < 0 || v >= ng) throw Error(ErrorCode::invalid_argument, "level outside [0, ng)");
  }
}

QuantizedPatch quantize(const GrayImage& img, int ng, int lo, int hi) {
  if (ng < 2) throw Error(ErrorCode::invalid_argument, "ng must be >= 2");
  if (lo > hi) throw Error(ErrorCode::invalid_argument, "quantization range requires lo <= hi");
  std::vector<int> levels(img.pixels().size());
  std::transform(img.pixels().begin(), img.pixels().end(), levels.begin(),
                 [&](int g) { return quantize_value(g, ng, lo, hi); });
  return QuantizedPatch(img.width(), img.height(), std::move(levels), ng);
}

QuantizedPatch quantize(const GrayImage& img, int ng) {
  return quantize(img, ng, img.min_value(), img.max_value());
}

CooccurrenceMatrix::CooccurrenceMatrix(int ng) : ng_(ng) {
  if (ng < 2) throw Error(ErrorCode::invalid_argument, "ng must be >= 2");
  counts_.assign(static_cast<std::size_t>(ng) * ng, 0);
}

void CooccurrenceMatrix::clear() noexcept {
  std::fill(counts_.begin(), counts_.end(), 0);
  total_ = 0;
}

RunLengthMatrix::RunLengthMatrix(int ng, int rmax, std::int64_t npixels, int directions)
    : ng_(ng), rmax_(rmax), npixels_(npixels), directions_(directions) {
  if (ng < 2) throw Error(ErrorCode::invalid_argument, "ng must be >= 2");
  if (rmax < 1 || npixels < 1 || directions < 1) {
    throw Error(ErrorCode::invalid_argument, "run-length matrix needs rmax, npixels, directions >= 1");
  }
  counts_.assign(static_cast<std::size_t>(ng) * rmax, 0);
}

void RunLengthMatrix::clear() noexcept {
  std::fill(counts_.begin(), counts_.end(), 0);
  runs_ = 0;
}

FeatureVector::FeatureVector(const GlcmFeatures& glcm, const GlrlmFeatures& glrlm) {
  std::copy(glcm.begin(), glcm.end(), values_.begin());
  std::copy(glrlm.begin(), glrlm.end(), values_.begin() + kGlcmFeatureCount);
}

CooccurrenceMatrix glcm_accumulate(const QuantizedPatch& patch) {
  if (patch.width() * patch.height() < 2) throw Error(ErrorCode::no_pairs, "no pairs in a 1x1 patch");
  CooccurrenceMatrix m(patch.ng());
  const int w = patch.width();
  const int h = patch.height();
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (const auto& d : kDirections) {
        const int nx = x + d[0];
        const int ny = y + d[1];
        if (nx >= 0 && nx < w && ny < h) m.add_pair(patch.at(x, y), patch.at(nx, ny));
      }
    }
  }
  return m;
}

GlcmFeatures glcm_features(const CooccurrenceMatrix& m) {
  if (m.total() <= 0) throw Error(ErrorCode::empty_matrix, "co-occurrence matrix is empty");
  const int ng = m.ng();
  const double total = static_cast<double>(m.total());
  const auto counts = m.counts();

  // Marginal (identical for rows and columns) and the occupied level range.
  std::vector<double> px(static_cast<std::size_t>(ng), 0.0);
  std::vector<double> log_px(static_cast<std::size_t>(ng), 0.0);
  int lo = ng;
  int hi = -1;
  for (int i = 0; i < ng; ++i) {
    std::int64_t row = 0;
    for (int j = 0; j < ng; ++j) row += counts[static_cast<std::size_t>(i) * ng + j];
    if (row > 0) {
      px[i] = static_cast<double>(row) / total;
      log_px[i] = std::log2(px[i]);
      lo = std::min(lo, i);
      hi = std::max(hi, i);
    }
  }

  double mu = 0.0;
  double hx = 0.0;
  for (int i = lo; i <= hi; ++i) {
    mu += (i + 1) * px[i];
    hx -= xlog2x(px[i]);
  }

  std::vector<double> p_sum(static_cast<std::size_t>(2 * ng + 1), 0.0);
  std::vector<double> p_diff(static_cast<std::size_t>(ng), 0.0);
  double energy = 0, contrast = 0, corr_num = 0, variance = 0, idm = 0, entropy = 0, max_p = 0;
  double autocorr = 0, dissimilarity = 0, shade = 0, prominence = 0, tendency = 0, id = 0, idmn = 0;
  double hxy1 = 0;
  const double ng2 = static_cast<double>(ng) * ng;
  for (int a = lo; a <= hi; ++a) {
    const double i = a + 1;
    for (int b = lo; b <= hi; ++b) {
      const std::int64_t c = counts[static_cast<std::size_t>(a) * ng + b];
      if (c == 0) continue;
      const double j = b + 1;
      const double p = static_cast<double>(c) / total;
      const double d = i - j;
      const double ad = std::abs(d);
      const double s = i + j - 2.0 * mu;
      energy += p * p;
      contrast += d * d * p;
      corr_num += (i - mu) * (j - mu) * p;
      variance += (i - mu) * (i - mu) * p;
      idm += p / (1.0 + d * d);
      entropy -= p * std::log2(p);
      max_p = std::max(max_p, p);
      autocorr += i * j * p;
      dissimilarity += ad * p;
      shade += s * s * s * p;
      prominence += s * s * s * s * p;
      tendency += s * s * p;
      id += p / (1.0 + ad);
      idmn += p / (1.0 + d * d / ng2);
      hxy1 -= p * (log_px[a] + log_px[b]);
      p_sum[static_cast<std::size_t>(a + b + 2)] += p;
      p_diff[static_cast<std::size_t>(std::abs(a - b))] += p;
    }
  }

  double sum_average = 0, sum_entropy = 0;
  for (std::size_t k = 2; k < p_sum.size(); ++k) {
    sum_average += static_cast<double>(k) * p_sum[k];
    sum_entropy -= xlog2x(p_sum[k]);
  }
  double sum_variance = 0;
  for (std::size_t k = 2; k < p_sum.size(); ++k) {
    const double dk = static_cast<double>(k) - sum_average;
    sum_variance += dk * dk * p_sum[k];
  }

  double diff_average = 0, diff_entropy = 0;
  for (std::size_t k = 0; k < p_diff.size(); ++k) {
    diff_average += static_cast<double>(k) * p_diff[k];
    diff_entropy -= xlog2x(p_diff[k]);
  }
  double diff_variance = 0;
  for (std::size_t k = 0; k < p_diff.size(); ++k) {
    const double dk = static_cast<double>(k) - diff_average;
    diff_variance += dk * dk * p_diff[k];
  }

  // Marginals coincide, so HXY2 = HX + HY = 2 HX.
  const double hxy2 = 2.0 * hx;
  const double correlation = variance > 0.0 ? corr_num / variance : 1.0;
  const double imc1 = hx > 0.0 ? (entropy - hxy1) / hx : 0.0;
  const double gap = hxy2 - entropy;
  const double imc2 = gap > 0.0 ? std::sqrt(1.0 - std::exp(-2.0 * gap)) : 0.0;

  return {energy,        contrast,      correlation, variance,       idm,          sum_average,  sum_variance,
          sum_entropy,   entropy,       diff_variance, diff_entropy, imc1,         imc2,         max_p,
          autocorr,      dissimilarity, shade,       prominence,     tendency,     id,           idmn};
}

RunLengthMatrix glrlm_accumulate(const QuantizedPatch& patch) {
  const int w = patch.width();
  const int h = patch.height();
  RunLengthMatrix m(patch.ng(), std::max(w, h), static_cast<std::int64_t>(w) * h, 4);
  for (const auto& d : kDirections) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        // Start a walk only at the first pixel of each line.
        const int px = x - d[0];
        const int py = y - d[1];
        if (px >= 0 && px < w && py >= 0 && py < h) continue;
        int cx = x;
        int cy = y;
        int level = patch.at(cx, cy);
        int length = 0;
        while (cx >= 0 && cx < w && cy < h) {
          const int v = patch.at(cx, cy);
          if (v == level) {
            ++length;
          } else {
            m.add_run(level, length);
            level = v;
            length = 1;
          }
          cx += d[0];
          cy += d[1];
        }
        m.add_run(level, length);
      }
    }
  }
  return m;
}

GlrlmFeatures glrlm_features(const RunLengthMatrix& m) {
  if (m.runs() <= 0) throw Error(ErrorCode::empty_matrix, "run-length matrix is empty");
  const int ng = m.ng();
  const int rmax = m.rmax();
  const double nr = static_cast<double>(m.runs());
  const auto counts = m.counts();

  std::vector<double> by_level(static_cast<std::size_t>(ng), 0.0);
  std::vector<double> by_length(static_cast<std::size_t>(rmax), 0.0);
  double sre = 0, lre = 0, lglre = 0, hglre = 0, srlgle = 0, srhgle = 0, lrlgle = 0, lrhgle = 0;
  double mu_i = 0, mu_j = 0, entropy = 0;
  for (int a = 0; a < ng; ++a) {
    const double i2 = static_cast<double>(a + 1) * (a + 1);
    for (int b = 0; b < rmax; ++b) {
      const std::int64_t c = counts[static_cast<std::size_t>(a) * rmax + b];
      if (c == 0) continue;
      const double r = static_cast<double>(c);
      const double j = b + 1;
      const double j2 = j * j;
      const double p = r / nr;
      sre += r / j2;
      lre += r * j2;
      lglre += r / i2;
      hglre += r * i2;
      srlgle += r / (i2 * j2);
      srhgle += r * i2 / j2;
      lrlgle += r * j2 / i2;
      lrhgle += r * i2 * j2;
      by_level[a] += r;
      by_length[b] += r;
      mu_i += p * (a + 1);
      mu_j += p * j;
      entropy -= p * std::log2(p);
    }
  }

  double gln = 0, rln = 0, glv = 0, rlv = 0;
  for (int a = 0; a < ng; ++a) {
    gln += by_level[a] * by_level[a];
    const double di = (a + 1) - mu_i;
    glv += di * di * by_level[a] / nr;
  }
  for (int b = 0; b < rmax; ++b) {
    rln += by_length[b] * by_length[b];
    const double dj = (b + 1) - mu_j;
    rlv += dj * dj * by_length[b] / nr;
  }

  const double run_percentage = nr / (static_cast<double>(m.npixels()) * m.directions());
  return {sre / nr,    lre / nr,       gln / nr, gln / (nr * nr), rln / nr,    rln / (nr * nr),
          run_percentage, glv,         rlv,      entropy,         lglre / nr,  hglre / nr,
          srlgle / nr, srhgle / nr,    lrlgle / nr, lrhgle / nr};
}

FeatureVector compute_features(const QuantizedPatch& patch) {
  return FeatureVector(glcm_features(glcm_accumulate(patch)), glrlm_features(glrlm_accumulate(patch)));
}

}  // namespace rfm
