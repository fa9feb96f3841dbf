#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "maternsim/estimators.hpp"
#include "maternsim/palm.hpp"
#include "maternsim/stats.hpp"

using namespace maternsim;

namespace {

constexpr double kPi = 3.14159265358979323846;

LgcpSpec degenerate_lgcp(double log_intensity) {
  LgcpSpec s;
  s.mean = MeanFunction(log_intensity);
  s.cov = CovarianceModel(CovFamily::exponential, 1e-12, 1.0);
  return s;
}

Grid neighbourhood_grid(const std::vector<double>& centre, double radius, double h) {
  std::vector<double> lo(centre), hi(centre);
  for (std::size_t i = 0; i < centre.size(); ++i) {
    lo[i] -= radius;
    hi[i] += radius;
  }
  return Grid::with_cell_width(Window(lo, hi), h);
}

}  // namespace

TEST_CASE("scalar-mark retaining probability closed form") {
  CHECK(matern2_retaining_prob(1.0, 0.4, 2, 0.0) == 1.0);
  CHECK(matern2_retaining_prob(0.0, 0.4, 2, 0.8) == 1.0);
  // |B_R| = 1 at R = 1/sqrt(pi): value is e^{-1}
  const double R = 1.0 / std::sqrt(kPi);
  CHECK(matern2_retaining_prob(1.0, R, 2, 1.0) == doctest::Approx(std::exp(-1.0)));
  CHECK_THROWS_AS(matern2_retaining_prob(1.0, 0.4, 2, 1.5), ConfigError);
  CHECK_THROWS_AS(matern2_retaining_prob(1.0, 0.4, 2, -0.1), ConfigError);
}

TEST_CASE("scalar-mark thinned intensity closed form and limits") {
  const double R = 1.0 / std::sqrt(kPi);
  CHECK(matern2_thinned_intensity(1.0, R, 2) == doctest::Approx(1.0 - std::exp(-1.0)));
  // lambda -> 0: value ~ lambda
  CHECK(std::abs(matern2_thinned_intensity(1e-6, 0.5, 2) - 1e-6) < 1e-9);
  // lambda -> infinity: value -> |B_R|^{-1} = 4/pi for R = 0.5
  CHECK(std::abs(matern2_thinned_intensity(1e3, 0.5, 2) - 4.0 / kPi) < 1e-6);
  // R = 0 limit
  CHECK(matern2_thinned_intensity(3.0, 0.0, 2) == 3.0);
}

TEST_CASE("hard-core thinned intensity closed form") {
  CHECK(matern1_thinned_intensity(0.0, 0.5, 2) == 0.0);
  CHECK(matern1_thinned_intensity(2.5, 0.0, 2) == 2.5);
  const double R = 1.0 / std::sqrt(kPi);
  CHECK(matern1_thinned_intensity(1.0, R, 2) == doctest::Approx(std::exp(-1.0)));
}

TEST_CASE("hard-core intensity against brute-force simulation") {
  const double lambda = 2.0, R = 0.5;
  const double target = matern1_thinned_intensity(lambda, R, 2);
  const Window core({0, 0}, {8, 8});
  const Window dilated = core.dilated(R);
  RngStream rng(31);
  const int reps = 200;
  std::vector<double> intensities(reps);
  for (int r = 0; r < reps; ++r) {
    RngStream s = rng.derive(r);
    PointPattern ground = sample_poisson(lambda, dilated, s);
    MarkedPointPattern marked(PointPattern(dilated, ground.coords()),
                              std::vector<MarkValue>(ground.size(), MarkValue(0.0)));
    MarkedPointPattern kept = thin(matern_i(R), marked, s);
    intensities[r] = static_cast<double>(crop(kept, core).size()) / core.volume();
  }
  const MeanSd ms = mean_sd(intensities);
  CHECK(std::abs(ms.mean - target) < 3.0 * ms.std_error);
}

TEST_CASE("generating functional examples") {
  Window w({0}, {1});
  RngStream rng(3);
  const GroundProcess poisson = GroundProcess::poisson(1.0, w);

  // u == 1: exactly one, zero spread
  auto one = estimate_generating_functional(
      poisson, [](std::span<const double>) { return 1.0; }, 500, rng);
  CHECK(one.value == 1.0);
  CHECK(one.std_error == 0.0);

  // u == 0: void probability exp(-lambda |W|)
  auto zero = estimate_generating_functional(
      poisson, [](std::span<const double>) { return 0.0; }, 4000, rng);
  const double void_prob = std::exp(-1.0);
  CHECK(std::abs(zero.value - void_prob) < 3.0 * zero.std_error);

  // u(x) = e^{-x}: Simpson quadrature oracle for exp(-int_0^1 (1 - e^{-x}) dx)
  const int n = 1000;
  double integral = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double x = static_cast<double>(i) / n;
    const double f = 1.0 - std::exp(-x);
    const double wgt = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    integral += wgt * f;
  }
  integral /= 3.0 * n;
  const double target = std::exp(-integral);
  auto est = estimate_generating_functional(
      poisson, [](std::span<const double> x) { return std::exp(-x[0]); }, 4000, rng);
  CHECK(std::abs(est.value - target) < 3.0 * est.std_error);

  // u outside [0,1] is rejected
  CHECK_THROWS_AS(estimate_generating_functional(
                      poisson, [](std::span<const double>) { return 1.5; }, 10, rng),
                  ConfigError);
}

TEST_CASE("first-order estimator is exact without competition") {
  LgcpSpec lgcp = degenerate_lgcp(std::log(2.0));
  ThinningModel model = matern_i(0.5, 0.7);
  model.zeta = [](auto, const MarkValue&, auto, const MarkValue&) { return false; };
  std::vector<double> xi{0.0, 0.0};
  Grid grid = neighbourhood_grid(xi, 0.6, 0.05);
  RngStream rng(4);
  auto est = first_order_intensity_mc(lgcp, model, std::nullopt, xi, grid, 4, 4, rng);
  CHECK(est.value == doctest::Approx(0.7 * 2.0));
  CHECK(est.std_error == doctest::Approx(0.0));
}

TEST_CASE("first-order estimator matches the scalar-mark closed form") {
  const double lambda = 2.0, R = 0.5;
  LgcpSpec lgcp = degenerate_lgcp(std::log(lambda));
  const ThinningModel model = matern_ii(R);
  const MarkLaw law = UniformScalarLaw{0, 1};
  std::vector<double> xi{0.0, 0.0};
  Grid grid = neighbourhood_grid(xi, R + 0.05, 0.025);
  RngStream rng(5);
  auto est = first_order_intensity_mc(lgcp, model, law, xi, grid, 1, 4000, rng, 16);
  const double target = matern2_thinned_intensity(lambda, R, 2);
  CHECK(std::abs(est.value - target) < 3.0 * est.std_error + 0.01 * target);
}

TEST_CASE("coarse grids raise a warning") {
  LgcpSpec lgcp = degenerate_lgcp(0.0);
  const ThinningModel model = matern_i(0.5);
  std::vector<double> xi{0.0, 0.0};
  Grid coarse = neighbourhood_grid(xi, 0.6, 0.3);
  RngStream rng(6);
  auto est = first_order_intensity_mc(lgcp, model, std::nullopt, xi, coarse, 2, 2, rng);
  CHECK(!est.warnings.empty());
}

TEST_CASE("second-order estimator exact cases") {
  LgcpSpec lgcp = degenerate_lgcp(std::log(2.0));
  std::vector<double> xi{0.0, 0.0}, eta{0.25, 0.0};
  Grid grid(Window({-0.6, -0.6}, {0.9, 0.6}), {30, 24});
  RngStream rng(7);

  // no competition: p0^2 rho2 exactly
  ThinningModel none = matern_i(0.5, 0.8);
  none.zeta = [](auto, const MarkValue&, auto, const MarkValue&) { return false; };
  auto est = second_order_intensity_mc(lgcp, none, std::nullopt, xi, eta, grid, 3, 3, rng);
  CHECK(est.value == doctest::Approx(0.8 * 0.8 * 4.0).epsilon(1e-9));

  // hard core within R: exactly zero
  auto zero =
      second_order_intensity_mc(lgcp, matern_i(0.5), std::nullopt, xi, eta, grid, 3, 3, rng);
  CHECK(zero.value == 0.0);

  // xi == eta rejected
  CHECK_THROWS_AS(
      second_order_intensity_mc(lgcp, none, std::nullopt, xi, xi, grid, 2, 2, rng),
      ConfigError);
}

TEST_CASE("second-order estimator at long range factorizes") {
  const double lambda = 2.0, R = 0.5;
  LgcpSpec lgcp = degenerate_lgcp(std::log(lambda));
  const ThinningModel model = matern_ii(R);
  const MarkLaw law = UniformScalarLaw{0, 1};
  std::vector<double> xi{0.0, 0.0}, eta{3.0 * R, 0.0};
  Grid grid(Window({-0.55, -0.55}, {2.05, 0.55}), {52, 22});
  RngStream rng(8);
  auto est = second_order_intensity_mc(lgcp, model, law, xi, eta, grid, 1, 3000, rng, 16);
  const double lt = matern2_thinned_intensity(lambda, R, 2);
  CHECK(std::abs(est.value - lt * lt) < 3.0 * est.std_error + 0.02 * lt * lt);
}

TEST_CASE("second-order estimator is exactly symmetric") {
  LgcpSpec lgcp = degenerate_lgcp(0.3);
  lgcp.cov = CovarianceModel(CovFamily::exponential, 0.4, 0.8);
  const ThinningModel model = generalized_matern_ii(0.5);
  const MarkLaw law = UniformScalarLaw{0, 1};
  std::vector<double> xi{0.1, 0.2}, eta{0.6, 0.4};
  Grid grid(Window({-0.5, -0.4}, {1.2, 1.0}), {17, 14});
  RngStream r1(99), r2(99);
  auto ab = second_order_intensity_mc(lgcp, model, law, xi, eta, grid, 8, 8, r1);
  auto ba = second_order_intensity_mc(lgcp, model, law, eta, xi, grid, 8, 8, r2);
  CHECK(ab.value == ba.value);
  CHECK(ab.std_error == ba.std_error);
}

TEST_CASE("standard error halves when the sample count quadruples") {
  LgcpSpec lgcp = degenerate_lgcp(std::log(1.5));
  lgcp.cov = CovarianceModel(CovFamily::exponential, 0.3, 0.5);
  const ThinningModel model = matern_i(0.4);
  std::vector<double> xi{0.0, 0.0};
  Grid grid = neighbourhood_grid(xi, 0.5, 0.1);
  RngStream r1(11), r2(11);
  auto small = first_order_intensity_mc(lgcp, model, std::nullopt, xi, grid, 500, 1, r1);
  auto large = first_order_intensity_mc(lgcp, model, std::nullopt, xi, grid, 2000, 1, r2);
  const double ratio = large.std_error / small.std_error;
  CHECK(ratio > 0.4);
  CHECK(ratio < 0.6);
}

TEST_CASE("consistency chain: estimator to closed form for the hard-core preset") {
  const double lambda = 1.5, R = 0.4;
  LgcpSpec lgcp = degenerate_lgcp(std::log(lambda));
  std::vector<double> xi{0.0, 0.0};
  Grid grid = neighbourhood_grid(xi, R + 0.05, 0.02);
  RngStream rng(12);
  auto est = first_order_intensity_mc(lgcp, matern_i(R), std::nullopt, xi, grid, 8, 1, rng);
  const double target = matern1_thinned_intensity(lambda, R, 2);
  // degenerate field: only quadrature error remains
  CHECK(est.value == doctest::Approx(target).epsilon(0.01));
}
