#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include <nlohmann/json.hpp>

#include "maternsim/geometry.hpp"
#include "maternsim/io.hpp"
#include "maternsim/pattern.hpp"
#include "maternsim/rng.hpp"
#include "maternsim/stats.hpp"

using namespace maternsim;

TEST_CASE("window volume") {
  CHECK(window_volume(Window({0, 0}, {1, 1})) == doctest::Approx(1.0));
  CHECK(window_volume(Window({0, 0}, {10, 5})) == doctest::Approx(50.0));
  CHECK(window_volume(Window({0, 0, 0}, {2, 2, 2})) == doctest::Approx(8.0));
  CHECK_THROWS_AS(Window({0, 0}, {0, 1}), ConfigError);
  CHECK_THROWS_AS(Window({1}, {0}), ConfigError);
}

TEST_CASE("ball volume") {
  CHECK(ball_volume(2, 1.0) == doctest::Approx(3.14159265358979));
  CHECK(ball_volume(1, 0.5) == doctest::Approx(1.0));
  CHECK(ball_volume(3, 1.0) == doctest::Approx(4.0 * 3.14159265358979 / 3.0));
  CHECK(ball_volume(2, 0.0) == doctest::Approx(0.0));
  CHECK_THROWS_AS(ball_volume(2, -1.0), ConfigError);
}

TEST_CASE("grid basics") {
  Grid g(Window({0, 0}, {1, 2}), {4, 8});
  CHECK(g.cell_count() == 32);
  CHECK(g.cell_volume() == doctest::Approx(1.0 / 16.0));
  auto c0 = g.cell_centre(0);
  CHECK(c0[0] == doctest::Approx(0.125));
  CHECK(c0[1] == doctest::Approx(0.125));
  // centres strictly inside, index round-trip
  for (std::size_t i = 0; i < g.cell_count(); ++i) {
    auto c = g.cell_centre(i);
    CHECK(g.window().contains(c));
    CHECK(g.cell_index(c) == i);
  }
  Grid gb = g.buffered(0.3);
  CHECK(gb.cell_width(0) == doctest::Approx(g.cell_width(0)));
  CHECK(gb.window().lower()[0] <= -0.3 + 1e-12);
  CHECK(gb.cells_per_axis()[0] == 4 + 2 * 2);  // ceil(0.3/0.25) = 2 extra per side
}

TEST_CASE("derived streams reproduce and differ") {
  RngStream master(7);
  RngStream a = master.derive(0);
  RngStream a2 = master.derive(0);
  RngStream b = master.derive(1);
  std::vector<double> xs, ys, zs;
  for (int i = 0; i < 10000; ++i) {
    xs.push_back(a.next_uniform());
    ys.push_back(a2.next_uniform());
    zs.push_back(b.next_uniform());
  }
  CHECK(xs == ys);  // determinism, bit for bit
  CHECK(xs != zs);  // distinct ids diverge
  // sample correlation of streams 0 and 1 within +-0.03 of 0
  const MeanSd mx = mean_sd(xs), mz = mean_sd(zs);
  double cov = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) cov += (xs[i] - mx.mean) * (zs[i] - mz.mean);
  cov /= static_cast<double>(xs.size() - 1);
  CHECK(std::abs(cov / (mx.sd * mz.sd)) < 0.03);
}

TEST_CASE("uniforms avoid the endpoints") {
  RngStream s(3);
  for (int i = 0; i < 100000; ++i) {
    const double u = s.next_uniform();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("poisson sampler moments") {
  RngStream s(11);
  // small-mean regime
  std::vector<double> small_counts;
  for (int i = 0; i < 20000; ++i) small_counts.push_back(double(s.next_poisson(3.0)));
  MeanSd ms = mean_sd(small_counts);
  CHECK(std::abs(ms.mean - 3.0) < 3.0 * ms.std_error);
  // large-mean regime (PTRS)
  std::vector<double> big_counts;
  for (int i = 0; i < 20000; ++i) big_counts.push_back(double(s.next_poisson(200.0)));
  ms = mean_sd(big_counts);
  CHECK(std::abs(ms.mean - 200.0) < 3.0 * ms.std_error);
  // variance of Poisson(200): SE of the sample variance is about
  // sqrt((mu4 - sigma^4)/n), mu4 = lambda + 3 lambda^2
  const double var = ms.sd * ms.sd;
  const double se_var = std::sqrt((200.0 + 2.0 * 200.0 * 200.0) / 20000.0);
  CHECK(std::abs(var - 200.0) < 3.0 * se_var);
}

TEST_CASE("pairwise sum and mean_sd") {
  std::vector<double> xs{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  CHECK(pairwise_sum(xs) == doctest::Approx(55.0));
  MeanSd ms = mean_sd(xs);
  CHECK(ms.mean == doctest::Approx(5.5));
  CHECK(ms.sd == doctest::Approx(3.0276503541));
}

TEST_CASE("pattern invariants") {
  Window w({0, 0}, {1, 1});
  PointPattern p(w);
  std::vector<double> inside{0.5, 0.5}, boundary{1.0, 1.0}, outside{1.1, 0.5};
  p.push_back(inside);
  p.push_back(boundary);  // closed window: boundary points are inside
  CHECK_THROWS_AS(p.push_back(outside), ConfigError);
  CHECK(p.size() == 2);
  MarkedPointPattern mp(PointPattern(w, {0.5, 0.5}), {MarkValue(0.3)});
  CHECK(mp.mark(0).scalar() == 0.3);
  CHECK_THROWS_AS(MarkedPointPattern(PointPattern(w, {0.5, 0.5}), {}), ConfigError);
}

TEST_CASE("mark evaluation") {
  MarkValue scalar(0.7);
  CHECK(scalar.eval(std::vector<double>{0.0}) == 0.7);
  ScaledKernelMark k{2.0, ShapeId::gauss_density, {0.0, 0.0}};
  MarkValue kernel(k);
  // peak at the centre is u * (2 pi)^{-1}
  CHECK(kernel.eval(std::vector<double>{0.0, 0.0}) ==
        doctest::Approx(2.0 / (2.0 * 3.14159265358979)));
  CHECK_THROWS_AS(MarkValue(ScaledKernelMark{0.0, ShapeId::triangle, {0.0}}), ConfigError);
}

TEST_CASE("csv round trips are bit exact") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "maternsim_io_test";
  fs::create_directories(dir);

  RngStream rng(5);
  Window w({0, 0}, {3, 2});
  PointPattern pat(w);
  std::vector<double> p(2);
  for (int i = 0; i < 50; ++i) {
    p[0] = rng.next_uniform(0, 3);
    p[1] = rng.next_uniform(0, 2);
    pat.push_back(p);
  }
  write_pattern_csv(dir / "pat.csv", pat, json::object());
  PointPattern back = read_pattern_csv(dir / "pat.csv");
  CHECK(back.coords() == pat.coords());
  CHECK(back.window() == pat.window());

  // marked round trips for all three kinds
  MarkedPointPattern scalar_pat(w);
  MarkedPointPattern kernel_pat(w);
  MarkedPointPattern pair_pat(w);
  for (int i = 0; i < 20; ++i) {
    p[0] = rng.next_uniform(0, 3);
    p[1] = rng.next_uniform(0, 2);
    scalar_pat.push_back(p, MarkValue(rng.next_uniform()));
    kernel_pat.push_back(p, MarkValue(ScaledKernelMark{rng.next_pareto(0.5),
                                                       ShapeId::gauss_density, {p[0], p[1]}}));
    pair_pat.push_back(p, MarkValue(PairMark{rng.next_uniform(), rng.next_uniform()}));
  }
  write_pattern_csv(dir / "s.csv", scalar_pat, json::object());
  write_pattern_csv(dir / "k.csv", kernel_pat, json::object());
  write_pattern_csv(dir / "q.csv", pair_pat, json::object());
  MarkedPointPattern s2 = read_marked_pattern_csv(dir / "s.csv");
  MarkedPointPattern k2 = read_marked_pattern_csv(dir / "k.csv");
  MarkedPointPattern q2 = read_marked_pattern_csv(dir / "q.csv");
  REQUIRE(s2.size() == scalar_pat.size());
  for (std::size_t i = 0; i < s2.size(); ++i) {
    CHECK(s2.mark(i).scalar() == scalar_pat.mark(i).scalar());
    CHECK(k2.mark(i).kernel().u == kernel_pat.mark(i).kernel().u);
    CHECK(k2.mark(i).kernel().centre == kernel_pat.mark(i).kernel().centre);
    CHECK(q2.mark(i).pair().a == pair_pat.mark(i).pair().a);
    CHECK(q2.mark(i).pair().b == pair_pat.mark(i).pair().b);
  }

  // field round trip
  Grid grid(w, {6, 4});
  std::vector<double> values;
  for (std::size_t i = 0; i < grid.cell_count(); ++i) values.push_back(rng.next_normal());
  GridField field(grid, values);
  write_field_csv(dir / "f.csv", field, json::object());
  GridField f2 = read_field_csv(dir / "f.csv");
  CHECK(f2.values() == field.values());
  CHECK(f2.grid() == field.grid());

  // corrupt artifacts report the line number
  atomic_write_text(dir / "bad.csv", "x1,x2\n0.1,zzz\n");
  atomic_write_text(dir / "bad.csv.meta.json",
                    json{{"kind", "point_pattern"},
                         {"dim", 2},
                         {"mark_kind", "none"},
                         {"window", {{"lower", {0.0, 0.0}}, {"upper", {1.0, 1.0}}}}}
                        .dump());
  try {
    read_pattern_csv(dir / "bad.csv");
    CHECK(false);
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find(":2:") != std::string::npos);
  }
  fs::remove_all(dir);
}

TEST_CASE("sha256 known value") {
  namespace fs = std::filesystem;
  const fs::path f = fs::temp_directory_path() / "maternsim_sha_test.txt";
  atomic_write_text(f, "abc");
  CHECK(sha256_file(f) == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  fs::remove(f);
}
