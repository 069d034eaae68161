#include "rfm/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include "rfm/error.hpp"

namespace rfm {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_score(const std::string& text, const std::string& where) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size()) {
    throw Error(ErrorCode::malformed_file, where + ": '" + text + "' is not a number");
  }
  return v;
}

}  // namespace

Cohort Prediction::predicted() const noexcept {
  std::size_t best = 0;
  for (std::size_t c = 1; c < scores.size(); ++c) {
    if (scores[c] > scores[best]) best = c;
  }
  return static_cast<Cohort>(best);
}

PredictionSet::PredictionSet(std::vector<Prediction> records) : records_(std::move(records)) {
  std::set<std::string> ids;
  for (const auto& r : records_) {
    if (!ids.insert(r.id).second) throw Error(ErrorCode::invalid_argument, "duplicate prediction id '" + r.id + "'");
    double sum = 0.0;
    for (double s : r.scores) {
      if (!std::isfinite(s) || s < 0.0) {
        throw Error(ErrorCode::invalid_argument, "scores for '" + r.id + "' must be finite and non-negative");
      }
      sum += s;
    }
    if (std::abs(sum - 1.0) > 1e-6) {
      throw Error(ErrorCode::invalid_argument, "scores for '" + r.id + "' do not sum to 1");
    }
  }
}

PredictionSet parse_predictions_csv(std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::malformed_file, source + ": missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kPredictionsHeader) {
    throw Error(ErrorCode::malformed_file, source + ": header must be '" + std::string(kPredictionsHeader) + "'");
  }
  std::vector<Prediction> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = source + ":" + std::to_string(line_no);
    const auto fields = split_csv_line(line);
    if (fields.size() != 5) throw Error(ErrorCode::malformed_file, where + ": expected 5 fields");
    if (fields[0].empty()) throw Error(ErrorCode::malformed_file, where + ": empty id");
    Prediction p;
    p.id = fields[0];
    try {
      p.truth = parse_cohort(fields[1]);
    } catch (const Error& e) {
      throw Error(ErrorCode::malformed_file, where + ": " + e.what());
    }
    for (std::size_t c = 0; c < 3; ++c) p.scores[c] = parse_score(fields[2 + c], where);
    records.push_back(std::move(p));
  }
  return PredictionSet(std::move(records));
}

PredictionSet read_predictions_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_failure, "cannot open '" + path.string() + "'");
  return parse_predictions_csv(in, path.string());
}

void write_predictions_csv(const PredictionSet& set, std::ostream& out) {
  out << kPredictionsHeader << '\n';
  const auto old_precision = out.precision(17);
  for (const auto& r : set.records()) {
    out << r.id << ',' << to_string(r.truth) << ',' << r.scores[0] << ',' << r.scores[1] << ',' << r.scores[2]
        << '\n';
  }
  out.precision(old_precision);
}

ClassMetrics class_metrics(const PredictionSet& p) {
  if (p.size() == 0) throw Error(ErrorCode::empty_collection, "prediction set is empty");
  ClassMetrics out;
  for (Cohort c : kCohorts) {
    const bool present = std::any_of(p.records().begin(), p.records().end(),
                                     [c](const Prediction& r) { return r.truth == c; });
    if (!present) throw Error(ErrorCode::missing_class, "class '" + to_string(c) + "' has no samples");
  }
  const double n = static_cast<double>(p.size());
  for (Cohort c : kCohorts) {
    ClassScores& s = out.per_class[static_cast<std::size_t>(index_of(c))];
    for (const auto& r : p.records()) {
      const bool actual = r.truth == c;
      const bool called = r.predicted() == c;
      if (actual && called) ++s.counts.tp;
      if (actual && !called) ++s.counts.fn;
      if (!actual && called) ++s.counts.fp;
      if (!actual && !called) ++s.counts.tn;
    }
    s.sensitivity = static_cast<double>(s.counts.tp) / static_cast<double>(s.counts.tp + s.counts.fn);
    s.specificity = static_cast<double>(s.counts.tn) / static_cast<double>(s.counts.tn + s.counts.fp);
    s.accuracy = static_cast<double>(s.counts.tp + s.counts.tn) / n;
    s.auc = roc_auc(p, c).auc;
  }
  return out;
}

RocCurve roc_auc(const PredictionSet& p, Cohort cls) {
  const auto k = static_cast<std::size_t>(index_of(cls));
  std::vector<std::pair<double, bool>> scored;
  scored.reserve(p.size());
  for (const auto& r : p.records()) scored.emplace_back(r.scores[k], r.truth == cls);
  const auto positives = static_cast<std::int64_t>(
      std::count_if(scored.begin(), scored.end(), [](const auto& s) { return s.second; }));
  const auto negatives = static_cast<std::int64_t>(scored.size()) - positives;
  if (positives == 0 || negatives == 0) {
    throw Error(ErrorCode::degenerate_classes,
                "ROC for '" + to_string(cls) + "' needs at least one positive and one negative sample");
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) { return a.first > b.first; });

  RocCurve curve;
  curve.cls = cls;
  curve.points.push_back({0.0, 0.0});
  std::int64_t tp = 0, fp = 0, twice_area = 0;
  for (std::size_t i = 0; i < scored.size();) {
    std::int64_t group_tp = 0, group_fp = 0;
    const double threshold = scored[i].first;
    for (; i < scored.size() && scored[i].first == threshold; ++i) {
      (scored[i].second ? group_tp : group_fp) += 1;
    }
    twice_area += group_fp * (2 * tp + group_tp);
    tp += group_tp;
    fp += group_fp;
    curve.points.push_back({static_cast<double>(fp) / static_cast<double>(negatives),
                            static_cast<double>(tp) / static_cast<double>(positives)});
  }
  curve.auc = static_cast<double>(twice_area) / (2.0 * static_cast<double>(positives) * static_cast<double>(negatives));
  return curve;
}

std::vector<double> roc_grid() {
  std::vector<double> grid(101);
  for (int i = 0; i <= 100; ++i) grid[i] = i / 100.0;
  return grid;
}

std::vector<double> resample_tpr(const RocCurve& curve) {
  const auto& pts = curve.points;
  const auto grid = roc_grid();
  std::vector<double> out(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const double x = grid[g];
    // Last point with fpr <= x.
    const auto it = std::upper_bound(pts.begin(), pts.end(), x,
                                     [](double v, const RocPoint& p) { return v < p.fpr; });
    const std::size_t i = static_cast<std::size_t>(std::distance(pts.begin(), it)) - 1;
    if (pts[i].fpr == x || i + 1 == pts.size()) {
      out[g] = pts[i].tpr;
    } else {
      const RocPoint& a = pts[i];
      const RocPoint& b = pts[i + 1];
      out[g] = a.tpr + (b.tpr - a.tpr) * (x - a.fpr) / (b.fpr - a.fpr);
    }
  }
  return out;
}

MeanStd mean_std(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorCode::empty_collection, "mean of an empty sample");
  const double n = static_cast<double>(values.size());
  // Offsets from the first value keep identical samples exact: mean = v, std = 0.
  const double ref = values.front();
  double shift = 0.0;
  for (double v : values) shift += v - ref;
  const double mean = ref + shift / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / n)};
}

RocBand roc_band(const std::vector<RocCurve>& curves) {
  if (curves.size() < 2) throw Error(ErrorCode::invalid_argument, "a ROC band needs at least 2 curves");
  for (const auto& c : curves) {
    if (c.cls != curves.front().cls) throw Error(ErrorCode::invalid_argument, "ROC band curves mix classes");
  }
  std::vector<std::vector<double>> tprs;
  tprs.reserve(curves.size());
  for (const auto& c : curves) tprs.push_back(resample_tpr(c));

  RocBand band;
  band.cls = curves.front().cls;
  band.fpr = roc_grid();
  const std::size_t m = band.fpr.size();
  band.mean.resize(m);
  band.stddev.resize(m);
  band.lower.resize(m);
  band.upper.resize(m);
  std::vector<double> column(curves.size());
  for (std::size_t g = 0; g < m; ++g) {
    for (std::size_t c = 0; c < curves.size(); ++c) column[c] = tprs[c][g];
    const MeanStd ms = mean_std(column);
    band.mean[g] = ms.mean;
    band.stddev[g] = ms.stddev;
    band.lower[g] = std::clamp(ms.mean - ms.stddev, 0.0, 1.0);
    band.upper[g] = std::clamp(ms.mean + ms.stddev, 0.0, 1.0);
  }
  return band;
}

WilcoxonResult wilcoxon_signed_rank(std::span<const double> x, std::span<const double> y, std::size_t exact_max_n) {
  if (x.size() != y.size()) throw Error(ErrorCode::invalid_argument, "paired samples differ in length");
  if (x.empty()) throw Error(ErrorCode::empty_collection, "paired samples are empty");

  std::vector<double> diffs;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    if (d != 0.0) diffs.push_back(d);
  }
  WilcoxonResult result;
  result.n = diffs.size();
  if (diffs.empty()) return result;

  std::sort(diffs.begin(), diffs.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
  // Doubled average ranks keep tied ranks integral: positions i..j share i + j + 2.
  const std::size_t n = diffs.size();
  std::vector<std::int64_t> rank2(n);
  double tie_term = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && std::abs(diffs[j + 1]) == std::abs(diffs[i])) ++j;
    for (std::size_t t = i; t <= j; ++t) rank2[t] = static_cast<std::int64_t>(i + j + 2);
    const double t = static_cast<double>(j - i + 1);
    tie_term += t * t * t - t;
    i = j + 1;
  }
  std::int64_t w2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (diffs[i] > 0.0) w2 += rank2[i];
  }
  result.w_plus = static_cast<double>(w2) / 2.0;

  if (n <= exact_max_n) {
    // Distribution of the doubled positive-rank sum over all 2^n sign patterns.
    const std::int64_t max_sum = std::accumulate(rank2.begin(), rank2.end(), std::int64_t{0});
    std::vector<double> ways(static_cast<std::size_t>(max_sum) + 1, 0.0);
    ways[0] = 1.0;
    std::int64_t reach = 0;
    for (std::int64_t r : rank2) {
      for (std::int64_t s = reach; s >= 0; --s) ways[static_cast<std::size_t>(s + r)] += ways[static_cast<std::size_t>(s)];
      reach += r;
    }
    double below = 0.0, above = 0.0;
    for (std::int64_t s = 0; s <= max_sum; ++s) {
      if (s <= w2) below += ways[static_cast<std::size_t>(s)];
      if (s >= w2) above += ways[static_cast<std::size_t>(s)];
    }
    const double total = std::ldexp(1.0, static_cast<int>(n));
    result.p_value = std::min(1.0, 2.0 * std::min(below, above) / total);
    result.exact = true;
    return result;
  }

  const double nn = static_cast<double>(n);
  const double mean = nn * (nn + 1.0) / 4.0;
  const double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - tie_term / 48.0;
  const double z = std::max(0.0, std::abs(result.w_plus - mean) - 0.5) / std::sqrt(var);
  result.p_value = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
  result.exact = false;
  return result;
}

}  // namespace rfm
