#include "rfm/similarity.hpp"

#include <algorithm>
#include <cmath>

#include "rfm/error.hpp"

namespace rfm {

namespace {

void require_same_shape(const FloatMap& a, const FloatMap& b) {
  if (!a.same_shape(b)) {
    throw Error(ErrorCode::dimension_mismatch,
                "map dimensions differ: " + std::to_string(a.width()) + "x" + std::to_string(a.height()) + " vs " +
                    std::to_string(b.width()) + "x" + std::to_string(b.height()));
  }
}

bool is_constant(const FloatMap& m) {
  const auto v = m.values();
  return std::all_of(v.begin(), v.end(), [first = v.front()](double x) { return x == first; });
}

std::vector<int> bin_map(const FloatMap& m, int bins) {
  const auto v = m.values();
  const auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
  const double lo = *lo_it;
  const double span = *hi_it - lo;
  std::vector<int> out(v.size(), 0);
  if (span > 0.0) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      const int b = static_cast<int>(std::floor(bins * (v[i] - lo) / span));
      out[i] = std::min(b, bins - 1);
    }
  }
  return out;
}

double entropy_bits(const std::vector<double>& counts, double total) {
  double h = 0.0;
  for (double c : counts) {
    if (c > 0.0) {
      const double p = c / total;
      h -= p * std::log2(p);
    }
  }
  return h;
}

}  // namespace

double pearson_cc(const FloatMap& a, const FloatMap& b) {
  require_same_shape(a, b);
  if (a.size() < 2) throw Error(ErrorCode::invalid_argument, "correlation needs at least 2 pixels");
  if (is_constant(a) || is_constant(b)) return 0.0;

  const auto va = a.values();
  const auto vb = b.values();
  const double n = static_cast<double>(va.size());
  double mean_a = 0.0, mean_b = 0.0;
  for (std::size_t i = 0; i < va.size(); ++i) {
    mean_a += va[i];
    mean_b += vb[i];
  }
  mean_a /= n;
  mean_b /= n;

  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < va.size(); ++i) {
    const double da = va[i] - mean_a;
    const double db = vb[i] - mean_b;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa <= 0.0 || sbb <= 0.0) return 0.0;
  // sqrt(fl(x*x)) == x, so a map against itself gives exactly 1.
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

double normalized_mi(const FloatMap& a, const FloatMap& b, int bins) {
  require_same_shape(a, b);
  if (bins < 2) throw Error(ErrorCode::invalid_argument, "nmi needs at least 2 bins");
  const auto ba = bin_map(a, bins);
  const auto bb = bin_map(b, bins);
  const auto nb = static_cast<std::size_t>(bins);
  std::vector<double> joint(nb * nb, 0.0), ha(nb, 0.0), hb(nb, 0.0);
  for (std::size_t i = 0; i < ba.size(); ++i) {
    joint[static_cast<std::size_t>(ba[i]) * nb + static_cast<std::size_t>(bb[i])] += 1.0;
    ha[static_cast<std::size_t>(ba[i])] += 1.0;
    hb[static_cast<std::size_t>(bb[i])] += 1.0;
  }
  const double total = static_cast<double>(ba.size());
  const double h_a = entropy_bits(ha, total);
  const double h_b = entropy_bits(hb, total);
  if (h_a <= 0.0 || h_b <= 0.0) return 0.0;
  const double h_ab = entropy_bits(joint, total);
  const double mi = h_a + h_b - h_ab;
  return std::clamp(2.0 * mi / (h_a + h_b), 0.0, 1.0);
}

RfmRanking rank_rfms(const std::vector<FeatureMapStack>& stacks, const std::vector<FloatMap>& saliency,
                     int nmi_bins) {
  if (stacks.empty()) throw Error(ErrorCode::empty_collection, "no feature map stacks to rank");
  if (stacks.size() != saliency.size()) {
    throw Error(ErrorCode::invalid_argument, "stack count (" + std::to_string(stacks.size()) +
                                                 ") differs from saliency count (" +
                                                 std::to_string(saliency.size()) + ")");
  }
  std::vector<int> features;
  for (const auto& [index, map] : stacks.front().maps()) features.push_back(index);
  for (const auto& stack : stacks) {
    if (stack.maps().size() != features.size()) {
      throw Error(ErrorCode::invalid_argument, "stacks carry different feature sets");
    }
    for (std::size_t f = 0; f < features.size(); ++f) {
      if (stack.maps()[f].first != features[f]) {
        throw Error(ErrorCode::invalid_argument, "stacks carry different feature sets");
      }
    }
  }

  std::vector<SimilarityScore> sums(features.size());
  for (std::size_t s = 0; s < stacks.size(); ++s) {
    for (std::size_t f = 0; f < features.size(); ++f) {
      const FloatMap& map = stacks[s].maps()[f].second;
      sums[f].cc += pearson_cc(map, saliency[s]);
      sums[f].nmi += normalized_mi(map, saliency[s], nmi_bins);
    }
  }

  RfmRanking ranking;
  const double n = static_cast<double>(stacks.size());
  for (std::size_t f = 0; f < features.size(); ++f) {
    RankedFeature entry{features[f], {sums[f].cc / n, sums[f].nmi / n}};
    (family_of(features[f]) == FeatureFamily::glcm ? ranking.glcm : ranking.glrlm).push_back(entry);
  }
  if (ranking.glcm.empty() || ranking.glrlm.empty()) {
    throw Error(ErrorCode::invalid_argument, "ranking needs at least one feature from each family");
  }
  const auto by_cc = [](const RankedFeature& x, const RankedFeature& y) { return x.mean.cc > y.mean.cc; };
  std::stable_sort(ranking.glcm.begin(), ranking.glcm.end(), by_cc);
  std::stable_sort(ranking.glrlm.begin(), ranking.glrlm.end(), by_cc);
  ranking.selected_glcm = ranking.glcm.front().feature;
  ranking.selected_glrlm = ranking.glrlm.front().feature;
  return ranking;
}

CcMatrix sm_cc_matrix(const std::vector<FloatMap>& saliency, const std::vector<Cohort>& cohorts) {
  if (saliency.size() < 2) throw Error(ErrorCode::empty_collection, "cc matrix needs at least 2 maps");
  if (cohorts.size() != saliency.size()) {
    throw Error(ErrorCode::invalid_argument, "cohort count differs from saliency map count");
  }
  for (const auto& m : saliency) require_same_shape(saliency.front(), m);

  CcMatrix out;
  out.n = saliency.size();
  out.cohorts = cohorts;
  out.entries.assign(out.n * out.n, 0.0);
  for (std::size_t i = 0; i < out.n; ++i) {
    out.entries[i * out.n + i] = 1.0;
    for (std::size_t j = i + 1; j < out.n; ++j) {
      const double cc = pearson_cc(saliency[i], saliency[j]);
      out.entries[i * out.n + j] = cc;
      out.entries[j * out.n + i] = cc;
    }
  }

  double sum[3][3] = {};
  std::size_t count[3][3] = {};
  for (std::size_t i = 0; i < out.n; ++i) {
    for (std::size_t j = i + 1; j < out.n; ++j) {
      auto a = static_cast<int>(cohorts[i]);
      auto b = static_cast<int>(cohorts[j]);
      if (a > b) std::swap(a, b);
      sum[a][b] += out.entries[i * out.n + j];
      ++count[a][b];
    }
  }
  for (int a = 0; a < 3; ++a) {
    for (int b = a; b < 3; ++b) {
      if (count[a][b] == 0) continue;
      out.cohort_means.push_back({static_cast<Cohort>(a), static_cast<Cohort>(b), count[a][b],
                                  sum[a][b] / static_cast<double>(count[a][b])});
    }
  }
  return out;
}

}  // namespace rfm
