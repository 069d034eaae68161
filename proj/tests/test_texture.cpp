#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "rfm/error.hpp"
#include "rfm/texture.hpp"
#include "support/fixtures.hpp"
#include "support/texture_oracle.hpp"

using namespace rfm;

namespace {

QuantizedPatch random_patch(std::uint64_t seed, int w, int h, int ng, int used_levels) {
  std::mt19937_64 rng(seed);
  std::vector<int> v(static_cast<std::size_t>(w) * h);
  for (int& x : v) x = static_cast<int>(rng() % static_cast<unsigned>(used_levels));
  return QuantizedPatch(w, h, std::move(v), ng);
}

QuantizedPatch transpose(const QuantizedPatch& p) {
  std::vector<int> t(p.levels().size());
  for (int y = 0; y < p.height(); ++y)
    for (int x = 0; x < p.width(); ++x) t[static_cast<std::size_t>(x) * p.height() + y] = p.at(x, y);
  return QuantizedPatch(p.height(), p.width(), std::move(t), p.ng());
}

void check_all_close(std::span<const double> got, std::span<const double> want, double tol) {
  REQUIRE(got.size() == want.size());
  for (std::size_t i = 0; i < got.size(); ++i) {
    INFO("feature " << i);
    CHECK(test::close(got[i], want[i], tol));
  }
}

}  // namespace

TEST_CASE("feature table is canonical") {
  const auto& t = feature_table();
  std::set<std::string_view> names;
  for (int i = 0; i < kFeatureCount; ++i) {
    CHECK(t[i].index == i);
    CHECK(family_of(i) == t[i].family);
    names.insert(t[i].name);
  }
  CHECK(names.size() == 37);
  CHECK(feature_index("GLCM_Entropy") == 8);
  CHECK(feature_index("GLRLM_SRE") == 21);
  CHECK_FALSE(feature_index("nope").has_value());
}

TEST_CASE("quantize examples") {
  for (int g = 0; g < 256; ++g) CHECK(quantize_value(g, 32, 0, 255) == g / 8);
  CHECK(quantize_value(255, 32, 0, 255) == 31);
  CHECK(quantize_value(127, 2, 0, 255) == 0);
  CHECK(quantize_value(128, 2, 0, 255) == 1);

  const auto flat = quantize(GrayImage::filled(4, 4, 99), 8);
  for (int v : flat.levels()) CHECK(v == 0);
  CHECK_THROWS_AS(quantize(GrayImage::filled(2, 2, 1), 1, 0, 1), Error);
  CHECK_THROWS_AS(quantize(GrayImage::filled(2, 2, 1), 8, 5, 4), Error);
}

TEST_CASE("glcm_accumulate examples") {
  const auto m = glcm_accumulate(QuantizedPatch(2, 2, {3, 3, 3, 3}, 8));
  CHECK(m.count(3, 3) == 12);
  CHECK(m.total() == 12);

  const auto h = glcm_accumulate(QuantizedPatch(2, 1, {0, 1}, 4));
  CHECK(h.count(0, 1) == 1);
  CHECK(h.count(1, 0) == 1);
  CHECK(h.total() == 2);

  CHECK_THROWS_AS(glcm_accumulate(QuantizedPatch(1, 1, {0}, 4)), Error);

  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto p = random_patch(seed, 3 + static_cast<int>(seed % 7), 2 + static_cast<int>(seed % 5), 8, 8);
    const auto g = glcm_accumulate(p);
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 8; ++j) REQUIRE(g.count(i, j) == g.count(j, i));
    CHECK(static_cast<std::size_t>(g.total()) == test::enumerate_pairs(p).size());
  }
}

TEST_CASE("glcm_features examples") {
  CooccurrenceMatrix single(8);
  single.add_pair(3, 3);
  const auto f = glcm_features(single);
  CHECK(f[8] == 0.0);   // Entropy
  CHECK(f[0] == 1.0);   // Energy
  CHECK(f[1] == 0.0);   // Contrast
  CHECK(f[13] == 1.0);  // MaxProbability
  CHECK(f[2] == 1.0);   // Correlation, zero variance

  const QuantizedPatch checker(2, 2, {0, 1, 1, 0}, 2);
  const auto got = glcm_features(glcm_accumulate(checker));
  const auto want = test::oracle_glcm(checker);
  CHECK(std::abs(got[8] - want[8]) <= 1e-12);
  CHECK(std::abs(got[1] - want[1]) <= 1e-12);
  CHECK(std::abs(got[2] - want[2]) <= 1e-12);

  // Uniform over k = 4 cells.
  CooccurrenceMatrix uniform(8);
  uniform.add_pair(0, 1);
  uniform.add_pair(2, 3);
  CHECK(glcm_features(uniform)[8] == doctest::Approx(2.0).epsilon(1e-15));

  CHECK_THROWS_AS(glcm_features(CooccurrenceMatrix(4)), Error);
}

TEST_CASE("glrlm_accumulate examples") {
  const auto row = glrlm_accumulate(QuantizedPatch(4, 1, {5, 5, 5, 5}, 8));
  CHECK(row.count(5, 4) == 1);
  CHECK(row.count(5, 1) == 12);
  CHECK(row.runs() == 13);

  const auto sq = glrlm_accumulate(QuantizedPatch(2, 2, {1, 1, 1, 1}, 4));
  // Horizontal 2+2, vertical 2+2, each diagonal one length-2 and two length-1.
  CHECK(sq.count(1, 2) == 6);
  CHECK(sq.count(1, 1) == 4);

  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto p = random_patch(seed, 1 + static_cast<int>(seed % 9), 1 + static_cast<int>(seed % 6), 8, 3);
    const auto m = glrlm_accumulate(p);
    std::int64_t weighted = 0;
    for (int l = 0; l < 8; ++l)
      for (int j = 1; j <= m.rmax(); ++j) weighted += m.count(l, j) * j;
    CHECK(weighted == m.npixels() * 4);
  }
}

TEST_CASE("glrlm_features examples") {
  RunLengthMatrix unit(4, 1, 1, 1);
  unit.add_run(2, 1);
  const auto u = glrlm_features(unit);
  CHECK(u[0] == 1.0);  // SRE
  CHECK(u[1] == 1.0);  // LRE
  CHECK(u[6] == 1.0);  // RunPercentage

  RunLengthMatrix four(4, 4, 4, 1);
  four.add_run(0, 4);
  const auto l = glrlm_features(four);
  CHECK(l[0] == 0.0625);
  CHECK(l[1] == 16.0);

  CHECK_THROWS_AS(glrlm_features(RunLengthMatrix(4, 3, 9, 4)), Error);
}

TEST_CASE("features match the enumeration oracle on random patches") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const int ng = seed % 2 ? 8 : 32;
    const int used = 1 + static_cast<int>(seed % static_cast<std::uint64_t>(ng));
    const auto p = random_patch(seed, 2 + static_cast<int>(seed % 12), 2 + static_cast<int>(seed % 9), ng, used);
    const auto fv = compute_features(p);
    check_all_close(fv.glcm(), test::oracle_glcm(p), 1e-12);
    check_all_close(fv.glrlm(), test::oracle_glrlm(p), 1e-12);
  }
}

TEST_CASE("feature invariants") {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const int used = 1 + static_cast<int>(seed % 6);
    const auto p = random_patch(seed, 2 + static_cast<int>(seed % 10), 2 + static_cast<int>(seed % 7), 8, used);
    const auto fv = compute_features(p);
    for (double v : fv.values()) REQUIRE(std::isfinite(v));

    // Transpose invariance of the merged symmetric GLCM.
    const auto ft = glcm_features(glcm_accumulate(transpose(p)));
    for (int i = 0; i < kGlcmFeatureCount; ++i) CHECK(test::close(ft[i], fv[i], 1e-12));

    const auto m = glcm_accumulate(p);
    int nonzero = 0;
    for (auto c : m.counts()) nonzero += c > 0;
    CHECK(fv[8] >= 0.0);
    CHECK((fv[8] == 0.0) == (nonzero == 1));
    CHECK(fv[0] > 0.0);
    CHECK(fv[0] <= 1.0);
    CHECK(fv[13] > 0.0);
    CHECK(fv[13] <= 1.0);

    const double sre = fv[21];
    const double lre = fv[22];
    CHECK(sre > 0.0);
    CHECK(sre <= 1.0);
    CHECK(lre >= 1.0);
    const auto r = glrlm_accumulate(p);
    bool all_unit = true;
    for (int l = 0; l < 8; ++l)
      for (int j = 2; j <= r.rmax(); ++j) all_unit = all_unit && r.count(l, j) == 0;
    CHECK((sre == 1.0) == all_unit);

    // Strictly increasing relabeling keeps run-length-only features.
    std::vector<int> relabeled(p.levels().begin(), p.levels().end());
    for (int& v : relabeled) v = 2 * v + 1;
    const auto q = compute_features(QuantizedPatch(p.width(), p.height(), relabeled, 16));
    for (int k : {21, 22, 25, 26, 27}) CHECK(test::close(q[k], fv[k], 1e-12));
  }

  // Constant windows stay finite.
  const auto c = compute_features(QuantizedPatch(13, 13, std::vector<int>(169, 4), 32));
  for (double v : c.values()) CHECK(std::isfinite(v));
  CHECK(c[8] == 0.0);
  CHECK(c[11] == 0.0);
  CHECK(c[12] == 0.0);
}
