#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "rfm/error.hpp"
#include "rfm/evaluation.hpp"
#include "support/predictions.hpp"
#include "support/stats_oracle.hpp"

using namespace rfm;
using test::pred;

TEST_CASE("argmax ties go to the lowest class index") {
  CHECK(pred("a", Cohort::covid, 0.4, 0.4, 0.2).predicted() == Cohort::healthy);
  CHECK(pred("a", Cohort::covid, 0.2, 0.4, 0.4).predicted() == Cohort::pneumonia);
}

TEST_CASE("PredictionSet validation") {
  CHECK_THROWS_AS(PredictionSet({pred("a", Cohort::covid, 0.5, 0.5, 0.1)}), Error);
  CHECK_THROWS_AS(PredictionSet({pred("a", Cohort::covid, -0.1, 0.6, 0.5)}), Error);
  CHECK_THROWS_AS(PredictionSet({pred("a", Cohort::covid, 0.2, 0.3, 0.5), pred("a", Cohort::healthy, 1, 0, 0)}),
                  Error);
  CHECK_NOTHROW(PredictionSet({pred("a", Cohort::covid, 0.2, 0.3, 0.5 + 5e-7)}));
}

TEST_CASE("predictions CSV") {
  std::istringstream good(
      "id,true_label,score_healthy,score_pneumonia,score_covid\r\n"
      "x1,healthy,0.7,0.2,0.1\r\n"
      "x2,covid,0,0,1\n\n");
  const auto set = parse_predictions_csv(good);
  REQUIRE(set.size() == 2);
  CHECK(set.records()[1].truth == Cohort::covid);
  CHECK(set.records()[0].scores[1] == 0.2);

  std::ostringstream out;
  write_predictions_csv(set, out);
  std::istringstream back(out.str());
  const auto again = parse_predictions_csv(back);
  CHECK(again.records()[0].scores == set.records()[0].scores);

  auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return parse_predictions_csv(in);
  };
  CHECK_THROWS_AS(parse("id,label,a,b,c\n"), Error);
  CHECK_THROWS_AS(parse(std::string(kPredictionsHeader) + "\nx,flu,0.2,0.3,0.5\n"), Error);
  CHECK_THROWS_AS(parse(std::string(kPredictionsHeader) + "\nx,covid,0.2,0.3\n"), Error);
  CHECK_THROWS_AS(parse(std::string(kPredictionsHeader) + "\nx,covid,0.2,abc,0.5\n"), Error);
}

TEST_CASE("class_metrics examples") {
  const auto perfect = PredictionSet({pred("a", Cohort::healthy, 1, 0, 0), pred("b", Cohort::pneumonia, 0, 1, 0),
                                      pred("c", Cohort::covid, 0, 0, 1)});
  const auto m = class_metrics(perfect);
  for (Cohort c : kCohorts) {
    CHECK(m[c].sensitivity == 1.0);
    CHECK(m[c].specificity == 1.0);
    CHECK(m[c].accuracy == 1.0);
    CHECK(m[c].auc == 1.0);
  }

  const auto six = class_metrics(test::six_sample_example());
  CHECK(six[Cohort::covid].sensitivity == 0.5);
  CHECK(six[Cohort::covid].specificity == 1.0);
  CHECK(six[Cohort::covid].accuracy == 5.0 / 6.0);
  CHECK(six[Cohort::pneumonia].sensitivity == 1.0);
  CHECK(six[Cohort::pneumonia].specificity == 0.75);
  CHECK(six[Cohort::pneumonia].accuracy == 5.0 / 6.0);
  CHECK(six[Cohort::healthy].accuracy == 1.0);

  CHECK_THROWS_AS(class_metrics(PredictionSet({})), Error);
  CHECK_THROWS_AS(class_metrics(PredictionSet({pred("a", Cohort::healthy, 1, 0, 0)})), Error);
}

TEST_CASE("confusion identities hold on random sets") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto set = test::random_predictions(seed, 20 + seed);
    const auto m = class_metrics(set);
    for (Cohort c : kCohorts) {
      std::size_t pos = 0;
      for (const auto& r : set.records()) pos += r.truth == c;
      const auto& k = m[c].counts;
      CHECK(k.tp + k.fn == pos);
      CHECK(k.tn + k.fp == set.size() - pos);
      CHECK(m[c].accuracy == static_cast<double>(k.tp + k.tn) / static_cast<double>(set.size()));
    }
  }
}

TEST_CASE("roc_auc examples") {
  const auto ex = PredictionSet({pred("p1", Cohort::covid, 0.3, 0.35, 0.35), pred("p2", Cohort::covid, 0.1, 0.1, 0.8),
                                 pred("n1", Cohort::healthy, 0.5, 0.4, 0.1), pred("n2", Cohort::healthy, 0.3, 0.3, 0.4)});
  const auto curve = roc_auc(ex, Cohort::covid);
  CHECK(curve.auc == 0.75);
  CHECK(curve.points.front().fpr == 0.0);
  CHECK(curve.points.front().tpr == 0.0);
  CHECK(curve.points.back().fpr == 1.0);
  CHECK(curve.points.back().tpr == 1.0);

  const auto ties = PredictionSet({pred("a", Cohort::covid, 0.25, 0.25, 0.5), pred("b", Cohort::healthy, 0.25, 0.25, 0.5),
                                   pred("c", Cohort::pneumonia, 0.25, 0.25, 0.5)});
  CHECK(roc_auc(ties, Cohort::covid).auc == 0.5);

  const auto sep = PredictionSet({pred("a", Cohort::covid, 0, 0.1, 0.9), pred("b", Cohort::healthy, 0.9, 0, 0.1)});
  CHECK(roc_auc(sep, Cohort::covid).auc == 1.0);
  CHECK_THROWS_AS(roc_auc(sep, Cohort::pneumonia), Error);
}

TEST_CASE("roc_auc properties") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto set = test::random_predictions(seed, 15 + seed % 40, seed % 3 ? 0.0 : 0.1);
    for (Cohort c : kCohorts) {
      const auto curve = roc_auc(set, c);
      CHECK(std::abs(curve.auc - test::mann_whitney_auc(set, c)) <= 1e-12);
      for (std::size_t i = 1; i < curve.points.size(); ++i) {
        CHECK(curve.points[i].fpr >= curve.points[i - 1].fpr);
        CHECK(curve.points[i].tpr >= curve.points[i - 1].tpr);
      }
      // Strictly increasing transform of the class scores.
      std::vector<Prediction> warped(set.records());
      const auto k = static_cast<std::size_t>(index_of(c));
      for (auto& r : warped) {
        const double s = std::pow(r.scores[k], 3.0) / 2.0;
        const double rest = (1.0 - s) / (1.0 - r.scores[k] + 1e-300);
        for (std::size_t o = 0; o < 3; ++o) r.scores[o] = o == k ? s : r.scores[o] * rest;
      }
      CHECK(roc_auc(PredictionSet(warped), c).auc == curve.auc);
    }
  }
}

TEST_CASE("roc_band") {
  const auto set = test::random_predictions(1, 40);
  const auto curve = roc_auc(set, Cohort::covid);
  const auto same = roc_band({curve, curve, curve});
  const auto tpr = resample_tpr(curve);
  REQUIRE(same.fpr.size() == 101);
  for (std::size_t g = 0; g < 101; ++g) {
    CHECK(same.stddev[g] == 0.0);
    CHECK(same.mean[g] == tpr[g]);
    CHECK(same.lower[g] == tpr[g]);
  }

  const auto other = roc_auc(test::random_predictions(2, 30), Cohort::covid);
  const auto two = roc_band({curve, other});
  const auto tpr2 = resample_tpr(other);
  for (std::size_t g = 0; g < 101; ++g) CHECK(std::abs(two.mean[g] - (tpr[g] + tpr2[g]) / 2) <= 1e-15);

  // Five seeded versions against a per-grid-point oracle.
  std::vector<RocCurve> curves;
  std::vector<std::vector<double>> grids;
  for (std::uint64_t s = 10; s < 15; ++s) {
    curves.push_back(roc_auc(test::random_predictions(s, 50), Cohort::pneumonia));
    grids.push_back(resample_tpr(curves.back()));
  }
  const auto band = roc_band(curves);
  for (std::size_t g = 0; g < 101; ++g) {
    double sum = 0;
    for (const auto& v : grids) sum += v[g];
    const double mean = sum / 5;
    double var = 0;
    for (const auto& v : grids) var += (v[g] - mean) * (v[g] - mean);
    const double sd = std::sqrt(var / 5);
    CHECK(std::abs(band.mean[g] - mean) <= 1e-12);
    CHECK(std::abs(band.stddev[g] - sd) <= 1e-12);
    CHECK(band.upper[g] == std::min(1.0, band.mean[g] + band.stddev[g]));
    CHECK(band.lower[g] == std::max(0.0, band.mean[g] - band.stddev[g]));
  }

  CHECK_THROWS_AS(roc_band({curve}), Error);
  CHECK_THROWS_AS(roc_band({curve, roc_auc(set, Cohort::healthy)}), Error);
}

TEST_CASE("resample_tpr interpolates and takes the top of vertical steps") {
  RocCurve c;
  c.points = {{0, 0}, {0, 0.5}, {0.5, 0.5}, {1.0, 1.0}};
  const auto t = resample_tpr(c);
  CHECK(t[0] == 0.5);
  CHECK(t[50] == 0.5);
  CHECK(std::abs(t[75] - 0.75) <= 1e-15);
  CHECK(t[100] == 1.0);
}

TEST_CASE("wilcoxon_signed_rank examples") {
  const std::vector<double> x{1, 2, 3};
  CHECK(wilcoxon_signed_rank(x, x).p_value == 1.0);

  const std::vector<double> five{1.1, 2.2, 3.3, 4.4, 5.5}, zero5(5, 0.0);
  const auto r5 = wilcoxon_signed_rank(five, zero5);
  CHECK(r5.w_plus == 15.0);
  CHECK(r5.p_value == 0.0625);
  CHECK(r5.exact);

  const std::vector<double> six{1, 2, 3, 4, 5, 6}, zero6(6, 0.0);
  CHECK(wilcoxon_signed_rank(six, zero6).p_value == 0.03125);

  CHECK_THROWS_AS(wilcoxon_signed_rank(five, six), Error);
}

TEST_CASE("wilcoxon_signed_rank matches enumeration and is symmetric") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 1 + rng() % 12;
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      // Coarse values create zero differences and tied magnitudes.
      x[i] = static_cast<double>(rng() % 7);
      y[i] = static_cast<double>(rng() % 7);
    }
    const double p = wilcoxon_signed_rank(x, y).p_value;
    CHECK(std::abs(p - test::wilcoxon_by_enumeration(x, y)) <= 1e-12);
    CHECK(wilcoxon_signed_rank(y, x).p_value == p);
  }
}

TEST_CASE("wilcoxon normal approximation") {
  std::vector<double> x(30), y(30, 0.0);
  for (int i = 0; i < 30; ++i) x[i] = (i % 3 == 0 ? -1.0 : 1.0) * (i + 1);
  const auto approx = wilcoxon_signed_rank(x, y);
  CHECK_FALSE(approx.exact);
  // Exact DP at the same n should be close to the approximation.
  const auto exact = wilcoxon_signed_rank(x, y, 40);
  CHECK(exact.exact);
  CHECK(std::abs(approx.p_value - exact.p_value) < 0.01);
  CHECK(approx.p_value == wilcoxon_signed_rank(y, x).p_value);
}
