#pragma once

#include <string>
#include <vector>

#include "rfm/cohort.hpp"
#include "rfm/engine.hpp"
#include "rfm/image.hpp"

namespace rfm {

/// Pearson correlation over all pixels. Returns 0 when either map is constant.
double pearson_cc(const FloatMap& a, const FloatMap& b);

/// Normalized mutual information 2 I(A;B) / (H(A) + H(B)) in bits, each map
/// min-max binned into `bins` equal-width bins. Constant maps score 0.
double normalized_mi(const FloatMap& a, const FloatMap& b, int bins = 32);

struct SimilarityScore {
  double cc = 0.0;
  double nmi = 0.0;
};

struct RankedFeature {
  int feature = 0;
  SimilarityScore mean;
};

/// Mean similarity of every feature map to the saliency maps, sorted by
/// descending mean CC within each family (ties keep canonical order).
struct RfmRanking {
  std::vector<RankedFeature> glcm;
  std::vector<RankedFeature> glrlm;
  int selected_glcm = -1;
  int selected_glrlm = -1;
};

/// Stacks and saliency maps are paired by position. Every stack must carry the
/// same features, including at least one per family.
RfmRanking rank_rfms(const std::vector<FeatureMapStack>& stacks, const std::vector<FloatMap>& saliency,
                     int nmi_bins = 32);

struct CohortPairMean {
  Cohort first;
  Cohort second;
  std::size_t pairs = 0;
  double mean = 0.0;
};

/// Pairwise CC of saliency maps; symmetric with a unit diagonal.
struct CcMatrix {
  std::size_t n = 0;
  std::vector<double> entries;
  std::vector<Cohort> cohorts;
  std::vector<CohortPairMean> cohort_means;

  double at(std::size_t i, std::size_t j) const noexcept { return entries[i * n + j]; }
};

/// Cohort-pair means average the off-diagonal entries of each unordered
/// cohort pair; pairs with no entries are omitted.
CcMatrix sm_cc_matrix(const std::vector<FloatMap>& saliency, const std::vector<Cohort>& cohorts);

}  // namespace rfm
