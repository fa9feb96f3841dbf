#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "maternsim/sampler.hpp"
#include "maternsim/stats.hpp"

using namespace maternsim;

TEST_CASE("poisson sampling: zero intensity and moments") {
  Window w({0, 0}, {10, 10});
  RngStream rng(1);
  CHECK(sample_poisson(0.0, w, rng).empty());

  const int reps = 1000;
  std::vector<double> counts(reps);
  for (int r = 0; r < reps; ++r) {
    RngStream s = rng.derive(r);
    counts[r] = static_cast<double>(sample_poisson(2.0, w, s).size());
  }
  const MeanSd ms = mean_sd(counts);
  CHECK(std::abs(ms.mean - 200.0) < 3.0 * ms.std_error);
  const double var = ms.sd * ms.sd;
  const double se_var = std::sqrt((200.0 + 2.0 * 200.0 * 200.0) / reps);
  CHECK(std::abs(var - 200.0) < 3.0 * se_var);
}

TEST_CASE("conditional uniformity chi-square") {
  // constant intensity: given the counts, coordinates are uniform
  Window w({0, 0}, {4, 4});
  RngStream rng(23);
  std::vector<std::size_t> cell_counts(16, 0);
  std::size_t total = 0;
  for (int r = 0; r < 200; ++r) {
    RngStream s = rng.derive(r);
    PointPattern p = sample_poisson(3.0, w, s);
    for (std::size_t i = 0; i < p.size(); ++i) {
      const auto pt = p.point(i);
      const int ix = std::min(3, static_cast<int>(pt[0]));
      const int iy = std::min(3, static_cast<int>(pt[1]));
      ++cell_counts[4 * ix + iy];
      ++total;
    }
  }
  const double expected = static_cast<double>(total) / 16.0;
  double chi2 = 0.0;
  for (std::size_t c : cell_counts) {
    const double d = static_cast<double>(c) - expected;
    chi2 += d * d / expected;
  }
  CHECK(chi2 < 37.70);  // 99.9th percentile of chi-square with 15 dof
}

TEST_CASE("cox sampling follows the field") {
  Grid grid(Window({0, 0}, {1, 1}), {10, 10});
  RngStream rng(2);
  CHECK(sample_cox(GridField(grid, 0.0), rng).empty());

  const int reps = 2000;
  std::vector<double> counts(reps);
  for (int r = 0; r < reps; ++r) {
    RngStream s = rng.derive(r);
    counts[r] = static_cast<double>(sample_cox(GridField(grid, 3.0), s).size());
  }
  const MeanSd ms = mean_sd(counts);
  CHECK(std::abs(ms.mean - 3.0) < 3.0 * ms.std_error);

  // counts split between half-windows in proportion to the field mass
  Grid grid2(Window({0, 0}, {2, 1}), {10, 5});
  std::vector<double> values(grid2.cell_count());
  std::vector<double> c(2);
  for (std::size_t i = 0; i < grid2.cell_count(); ++i) {
    grid2.cell_centre(i, c);
    values[i] = c[0] < 1.0 ? 1.0 : 4.0;  // right half carries 4x the mass
  }
  GridField field(grid2, values);
  double left = 0.0, right = 0.0;
  for (int r = 0; r < reps; ++r) {
    RngStream s = rng.derive(100000 + r);
    PointPattern p = sample_cox(field, s);
    for (std::size_t i = 0; i < p.size(); ++i)
      (p.point(i)[0] < 1.0 ? left : right) += 1.0;
  }
  const double ratio = right / left;
  CHECK(ratio == doctest::Approx(4.0).epsilon(0.1));

  GridField negative(grid, -1.0);
  CHECK_THROWS_AS(sample_cox(negative, rng), NumericError);
}

TEST_CASE("degenerate lgcp behaves like poisson") {
  Grid grid(Window({0, 0}, {3, 3}), {12, 12});
  LgcpSpec spec;
  spec.mean = MeanFunction(std::log(2.0));
  spec.cov = CovarianceModel(CovFamily::exponential, 1e-12, 1.0);
  RngStream rng(5);
  const int reps = 1000;
  std::vector<double> counts(reps);
  for (int r = 0; r < reps; ++r) {
    RngStream s = rng.derive(r);
    counts[r] = static_cast<double>(sample_lgcp(spec, grid, s).first.size());
  }
  const MeanSd ms = mean_sd(counts);
  CHECK(std::abs(ms.mean - 2.0 * 9.0) < 3.0 * ms.std_error);

  // identical seed gives the identical (pattern, field) pair
  RngStream s1(77), s2(77);
  auto [p1, f1] = sample_lgcp(spec, grid, s1);
  auto [p2, f2] = sample_lgcp(spec, grid, s2);
  CHECK(p1.coords() == p2.coords());
  CHECK(f1.values() == f2.values());
}

TEST_CASE("lgcp intensity matches the lognormal mean") {
  Grid grid(Window({0, 0}, {2, 2}), {8, 8});
  LgcpSpec spec;
  spec.mean = MeanFunction(0.1);
  spec.cov = CovarianceModel(CovFamily::exponential, 0.5, 0.8);
  RngStream rng(6);
  const int reps = 1000;
  std::vector<double> counts(reps);
  for (int r = 0; r < reps; ++r) {
    RngStream s = rng.derive(r);
    counts[r] = static_cast<double>(sample_lgcp(spec, grid, s).first.size()) / 4.0;
  }
  const MeanSd ms = mean_sd(counts);
  const double expected = std::exp(0.1 + 0.25);
  CHECK(std::abs(ms.mean - expected) < 3.0 * ms.std_error);
}

TEST_CASE("mark attachment") {
  Window w({0}, {1});
  RngStream rng(8);
  CHECK(attach_marks(PointPattern(w), UniformScalarLaw{0, 1}, rng).empty());

  PointPattern pat(w);
  std::vector<double> p(1);
  for (int i = 0; i < 10000; ++i) {
    p[0] = rng.next_uniform();
    pat.push_back(p);
  }
  MarkedPointPattern scalar = attach_marks(pat, UniformScalarLaw{0, 1}, rng);
  std::vector<double> marks(scalar.size());
  for (std::size_t i = 0; i < scalar.size(); ++i) marks[i] = scalar.mark(i).scalar();
  const MeanSd ms = mean_sd(marks);
  CHECK(std::abs(ms.mean - 0.5) < 3.0 * ms.std_error);

  // pareto tail: P(U > 2 tau) = 1/2, all samples above tau, kernels centred
  // at their points
  const double tau = 1.0;
  MarkedPointPattern kern =
      attach_marks(pat, ScaledKernelLaw{KernelIntensityLaw::pareto_tail, tau,
                                        ShapeId::gauss_density},
                   rng);
  std::size_t above = 0;
  for (std::size_t i = 0; i < kern.size(); ++i) {
    const ScaledKernelMark& k = kern.mark(i).kernel();
    CHECK(k.u > tau);
    CHECK(k.centre[0] == kern.point(i)[0]);
    if (k.u > 2.0 * tau) ++above;
  }
  const double frac = static_cast<double>(above) / kern.size();
  const double se = std::sqrt(0.25 / kern.size());
  CHECK(std::abs(frac - 0.5) < 3.0 * se);
}

TEST_CASE("pareto survival curve on [tau, 10 tau]") {
  RngStream rng(10);
  const double tau = 0.4;
  const int n = 20000;
  std::vector<double> us(n);
  for (int i = 0; i < n; ++i) us[i] = rng.next_pareto(tau);
  for (double mult : {1.5, 2.0, 4.0, 8.0, 10.0}) {
    const double u = mult * tau;
    std::size_t above = 0;
    for (double v : us)
      if (v > u) ++above;
    const double frac = static_cast<double>(above) / n;
    const double target = tau / u;
    const double se = std::sqrt(target * (1.0 - target) / n);
    CHECK(std::abs(frac - target) < 3.5 * se);
  }
}
