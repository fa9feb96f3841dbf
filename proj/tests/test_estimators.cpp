#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "maternsim/estimators.hpp"
#include "maternsim/sampler.hpp"
#include "maternsim/stats.hpp"
#include "maternsim/thinning.hpp"

using namespace maternsim;

TEST_CASE("box intensity on homogeneous poisson") {
  Window w({0, 0}, {5, 5});
  RngStream rng(1);
  std::vector<PointPattern> pats;
  for (int r = 0; r < 500; ++r) {
    RngStream s = rng.derive(r);
    pats.push_back(sample_poisson(3.0, w, s));
  }
  auto est = box_intensity(pats, w);
  CHECK(std::abs(est.value - 3.0) < 3.0 * est.std_error);

  // half region stays unbiased: overlapping 3-SE intervals
  auto half = box_intensity(pats, Window({0, 0}, {2.5, 5}));
  CHECK(std::abs(half.value - est.value) < 3.0 * (half.std_error + est.std_error));

  // translation consistency across disjoint congruent regions
  auto left = box_intensity(pats, Window({0, 0}, {2.5, 5}));
  auto right = box_intensity(pats, Window({2.5, 0}, {5, 5}));
  CHECK(std::abs(left.value - right.value) < 3.0 * (left.std_error + right.std_error));

  // empty patterns give 0 with zero spread
  std::vector<PointPattern> empties(3, PointPattern(w));
  auto none = box_intensity(empties, w);
  CHECK(none.value == 0.0);
  CHECK(none.std_error == 0.0);

  CHECK_THROWS_AS(box_intensity(pats, Window({-1, 0}, {5, 5})), ConfigError);
  std::vector<PointPattern> one(1, PointPattern(w));
  CHECK_THROWS_AS(box_intensity(one, w), ConfigError);
}

TEST_CASE("pair correlation of poisson is flat") {
  Window w({0, 0}, {8, 8});
  RngStream rng(2);
  std::vector<PointPattern> pats;
  for (int r = 0; r < 500; ++r) {
    RngStream s = rng.derive(r);
    pats.push_back(sample_poisson(1.5, w, s));
  }
  auto pcf = pair_correlation(pats, 1.5, 6, 1.5);
  for (int bin = 0; bin < 6; ++bin)
    CHECK(std::abs(pcf.g_values[bin] - 1.0) < 3.0 * pcf.g_se[bin] + 0.02);
  CHECK_THROWS_AS(pair_correlation(pats, 5.0, 6, 1.0), ConfigError);
  CHECK_THROWS_AS(pair_correlation(pats, -1.0, 6, 1.0), ConfigError);
  CHECK_THROWS_AS(pair_correlation(pats, 1.0, 0, 1.0), ConfigError);
}

TEST_CASE("pair correlation of thinned patterns") {
  const double R = 0.5;
  Window core({0, 0}, {8, 8});
  Window dilated = core.dilated(R);
  RngStream rng(3);
  std::vector<PointPattern> m1_pats, m2_pats;
  for (int r = 0; r < 300; ++r) {
    RngStream s = rng.derive(r);
    PointPattern ground = sample_poisson(2.0, dilated, s);
    MarkedPointPattern marked = attach_marks(ground, UniformScalarLaw{0, 1}, s);
    m1_pats.push_back(crop(thinned_ground(thin(matern_i(R), marked, s)), core));
    m2_pats.push_back(crop(thinned_ground(thin(matern_ii(R), marked, s)), core));
  }
  // hard core: g = 0 exactly below R
  auto pcf1 = pair_correlation(m1_pats, 1.0, 10, 1.0);
  for (int bin = 0; bin < 10; ++bin) {
    if ((bin + 1) * 0.1 <= R) CHECK(pcf1.g_values[bin] == 0.0);
  }
  // scalar-mark model at long range: g within 3 SE of 1
  auto pcf2 = pair_correlation(m2_pats, 2.0, 8, 2.0);
  const int last = 7;  // bin centred at 1.875 = 3.75 R
  CHECK(std::abs(pcf2.g_values[last] - 1.0) < 3.0 * pcf2.g_se[last] + 0.02);
}

TEST_CASE("pair correlation is bit-identical under exact translation") {
  // coordinates quantized so the translation is exact in floating point
  Window w({0, 0}, {4, 4});
  RngStream rng(4);
  PointPattern a(w);
  std::vector<double> p(2);
  for (int i = 0; i < 200; ++i) {
    p[0] = std::floor(rng.next_uniform(0, 4) * 1048576.0) / 1048576.0;
    p[1] = std::floor(rng.next_uniform(0, 4) * 1048576.0) / 1048576.0;
    a.push_back(p);
  }
  Window wt({16, 16}, {20, 20});
  PointPattern b(wt);
  for (std::size_t i = 0; i < a.size(); ++i) {
    p[0] = a.point(i)[0] + 16.0;
    p[1] = a.point(i)[1] + 16.0;
    b.push_back(p);
  }
  std::vector<PointPattern> pa{a, a}, pb{b, b};
  auto ga = pair_correlation(pa, 1.0, 5, 1.0);
  auto gb = pair_correlation(pb, 1.0, 5, 1.0);
  CHECK(ga.g_values == gb.g_values);
  CHECK(ga.counts == gb.counts);
}

TEST_CASE("empirical cdf distance") {
  RngStream rng(5);
  // inverse-transform samples from the unit Frechet law
  const int n = 10000;
  std::vector<double> samples(n);
  for (int i = 0; i < n; ++i) samples[i] = -1.0 / std::log(rng.next_uniform());
  auto frechet = [](double z) { return std::exp(-1.0 / z); };
  auto d = empirical_cdf_distance(samples, frechet, 0.0);
  CHECK(!d.restricted_empty);
  CHECK(d.distance < 1.36 / std::sqrt(static_cast<double>(n)) * 1.5);

  // single sample at the reference median
  std::vector<double> one{1.0 / std::log(2.0)};
  auto dm = empirical_cdf_distance(one, frechet, 0.0);
  CHECK(dm.distance == doctest::Approx(0.5));

  // restriction above all samples: 0 by convention, flagged
  auto de = empirical_cdf_distance(samples, frechet, 1e9);
  CHECK(de.distance == 0.0);
  CHECK(de.restricted_empty);

  CHECK_THROWS_AS(empirical_cdf_distance({}, frechet, 0.0), ConfigError);
}
