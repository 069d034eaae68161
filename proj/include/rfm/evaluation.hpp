#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "rfm/cohort.hpp"

namespace rfm {

struct Prediction {
  std::string id;
  Cohort truth = Cohort::healthy;
  std::array<double, 3> scores{};  // healthy, pneumonia, covid

  Cohort predicted() const noexcept;  // argmax, ties to the lowest class index
};

/// Validated three-class predictions: unique ids, finite non-negative scores
/// summing to 1 within 1e-6.
class PredictionSet {
 public:
  explicit PredictionSet(std::vector<Prediction> records);

  const std::vector<Prediction>& records() const noexcept { return records_; }
  std::size_t size() const noexcept { return records_.size(); }

 private:
  std::vector<Prediction> records_;
};

inline constexpr std::string_view kPredictionsHeader = "id,true_label,score_healthy,score_pneumonia,score_covid";

PredictionSet parse_predictions_csv(std::istream& in, const std::string& source = "<stream>");
PredictionSet read_predictions_csv(const std::filesystem::path& path);
void write_predictions_csv(const PredictionSet& set, std::ostream& out);

struct ConfusionCounts {
  std::size_t tp = 0, fn = 0, tn = 0, fp = 0;
};

struct ClassScores {
  ConfusionCounts counts;
  double sensitivity = 0.0;
  double specificity = 0.0;
  double accuracy = 0.0;
  double auc = 0.0;
};

/// One-vs-rest metrics per class, indexed by class index.
struct ClassMetrics {
  std::array<ClassScores, 3> per_class;

  const ClassScores& operator[](Cohort c) const noexcept { return per_class[static_cast<std::size_t>(index_of(c))]; }
};

/// Requires every class to be present at least once.
ClassMetrics class_metrics(const PredictionSet& p);

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
};

struct RocCurve {
  Cohort cls = Cohort::healthy;
  std::vector<RocPoint> points;  // (0,0) first, (1,1) last
  double auc = 0.0;
};

/// One-vs-rest ROC from a descending sweep over the distinct scores of `cls`.
/// The trapezoid area is accumulated in integer counts, so it equals the
/// Mann-Whitney concordance with ties counted as one half.
RocCurve roc_auc(const PredictionSet& p, Cohort cls);

/// 0, 0.01, ..., 1.
std::vector<double> roc_grid();

/// TPR on roc_grid() by linear interpolation; on a vertical segment the
/// highest TPR at that FPR is taken.
std::vector<double> resample_tpr(const RocCurve& curve);

struct RocBand {
  Cohort cls = Cohort::healthy;
  std::vector<double> fpr;
  std::vector<double> mean;
  std::vector<double> stddev;  // population standard deviation
  std::vector<double> lower;   // mean - stddev, clamped to [0, 1]
  std::vector<double> upper;   // mean + stddev, clamped to [0, 1]
};

/// Needs at least two curves of the same class.
RocBand roc_band(const std::vector<RocCurve>& curves);

struct WilcoxonResult {
  std::size_t n = 0;       // non-zero differences
  double w_plus = 0.0;     // rank sum of positive differences
  double p_value = 1.0;    // two-sided
  bool exact = true;
};

/// Two-sided Wilcoxon signed-rank test on x - y. Zero differences are dropped
/// and tied magnitudes get average ranks. Up to `exact_max_n` differences the
/// null distribution is enumerated exactly; beyond that a tie- and
/// continuity-corrected normal approximation is used. All-zero input gives p = 1.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> x, std::span<const double> y,
                                    std::size_t exact_max_n = 20);

struct MeanStd {
  double mean = 0.0;
  double stddev = 0.0;  // population
};

MeanStd mean_std(std::span<const double> values);

}  // namespace rfm
