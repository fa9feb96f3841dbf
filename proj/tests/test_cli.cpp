#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "maternsim/io.hpp"

using namespace maternsim;
namespace fs = std::filesystem;

namespace {

std::string cli_path() {
  const char* env = std::getenv("MATERNSIM_CLI");
  REQUIRE(env != nullptr);
  return env;
}

int run(const std::string& args) {
  const std::string cmd = cli_path() + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("maternsim_cli_" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("minimal simulation run produces artifacts and a manifest") {
  const fs::path dir = fresh_dir("sim");
  REQUIRE(run("--seed 5 --out-dir " + dir.string() +
              " simulate-lgcp --mu 0.3 --sigma2 0.2 --range 1 --window 0,0,4,4 "
              "--cells 16,16 --reps 2") == 0);
  CHECK(fs::exists(dir / "pattern_0.csv"));
  CHECK(fs::exists(dir / "pattern_1.csv"));
  CHECK(fs::exists(dir / "field_0.csv"));
  CHECK(fs::exists(dir / "manifest.json"));
  const json manifest = json::parse(read_text(dir / "manifest.json"));
  CHECK(manifest.at("subcommand") == "simulate-lgcp");
  CHECK(manifest.at("outputs").size() == 4);
  fs::remove_all(dir);
}

TEST_CASE("reruns and thread counts are byte-identical") {
  const fs::path a = fresh_dir("det_a");
  const fs::path b = fresh_dir("det_b");
  const fs::path c = fresh_dir("det_c");
  const std::string args =
      " simulate-lgcp --mu 0 --sigma2 0.4 --range 0.8 --window 0,0,3,3 --cells 12,12 --reps 3";
  REQUIRE(run("--seed 9 --threads 1 --out-dir " + a.string() + args) == 0);
  REQUIRE(run("--seed 9 --threads 1 --out-dir " + b.string() + args) == 0);
  REQUIRE(run("--seed 9 --threads 4 --out-dir " + c.string() + args) == 0);
  for (const char* name : {"pattern_0.csv", "pattern_1.csv", "pattern_2.csv", "field_2.csv",
                           "manifest.json"}) {
    CHECK(read_text(a / name) == read_text(b / name));
    CHECK(read_text(a / name) == read_text(c / name));
  }
  fs::remove_all(a);
  fs::remove_all(b);
  fs::remove_all(c);
}

TEST_CASE("invalid preset fails with the config exit code and no artifacts") {
  const fs::path sim = fresh_dir("pipe_sim");
  REQUIRE(run("--seed 2 --out-dir " + sim.string() +
              " simulate-lgcp --window 0,0,3,3 --cells 8,8 --sigma2 0.2 --reps 1") == 0);
  const fs::path bad = fresh_dir("pipe_bad");
  CHECK(run("--out-dir " + bad.string() + " thin --input " +
            (sim / "pattern_0.csv").string() + " --preset not-a-preset") == 2);
  CHECK(!fs::exists(bad / "retained.csv"));
  fs::remove_all(sim);
  fs::remove_all(bad);
}

TEST_CASE("pipeline: simulate, thin, estimate, plot") {
  const fs::path sim = fresh_dir("pl_sim");
  REQUIRE(run("--seed 3 --out-dir " + sim.string() +
              " simulate-lgcp --mu 0.7 --sigma2 0.2 --range 1 --window 0,0,6,6 "
              "--cells 24,24 --reps 4") == 0);

  const fs::path thin_dir = fresh_dir("pl_thin");
  REQUIRE(run("--seed 4 --out-dir " + thin_dir.string() + " thin --input " +
              (sim / "pattern_0.csv").string() + " --preset matern2 --R 0.4") == 0);
  CHECK(fs::exists(thin_dir / "retained.csv"));
  const json report = json::parse(read_text(thin_dir / "thin_report.json"));
  CHECK(report.at("retained_count").get<int>() <= report.at("input_count").get<int>());

  const fs::path est = fresh_dir("pl_est");
  REQUIRE(run("--out-dir " + est.string() + " estimate --inputs '" +
              (sim / "pattern_*.csv").string() + "' --stat intensity") == 0);
  const json ereport = json::parse(read_text(est / "estimate_report.json"));
  CHECK(ereport.at("value").get<double>() > 0.0);

  const fs::path plot = fresh_dir("pl_plot");
  REQUIRE(run("--out-dir " + plot.string() + " plot-data --input " +
              (sim / "field_0.csv").string()) == 0);
  CHECK(fs::exists(plot / "field_plot.csv"));
  // emitted plot CSV has one row per grid cell plus a header
  std::istringstream ss(read_text(plot / "field_plot.csv"));
  std::size_t lines = 0;
  std::string line;
  while (std::getline(ss, line))
    if (!line.empty()) ++lines;
  CHECK(lines == 24 * 24 + 1);

  const fs::path plot2 = fresh_dir("pl_plot2");
  REQUIRE(run("--out-dir " + plot2.string() + " plot-data --input " +
              (sim / "pattern_1.csv").string()) == 0);
  CHECK(fs::exists(plot2 / "points_plot.csv"));

  fs::remove_all(sim);
  fs::remove_all(thin_dir);
  fs::remove_all(est);
  fs::remove_all(plot);
  fs::remove_all(plot2);
}

TEST_CASE("config file supplies subcommand options and rejects unknown keys") {
  const fs::path dir = fresh_dir("cfg");
  fs::create_directories(dir);
  atomic_write_text(dir / "run.toml", "[simulate-lgcp]\nmu=0.25\nsigma2=0.4\nreps=2\n");
  REQUIRE(run("--seed 6 --out-dir " + (dir / "out").string() + " --config " +
              (dir / "run.toml").string() + " simulate-lgcp --window 0,0,3,3 --cells 8,8") ==
          0);
  const json manifest = json::parse(read_text(dir / "out" / "manifest.json"));
  CHECK(manifest.at("config").at("lgcp").at("mu").get<double>() == 0.25);
  CHECK(manifest.at("config").at("reps").get<int>() == 2);
  CHECK(fs::exists(dir / "out" / "pattern_1.csv"));

  atomic_write_text(dir / "bad.toml", "[simulate-lgcp]\nbogus=1\n");
  CHECK(run("--out-dir " + (dir / "out2").string() + " --config " +
            (dir / "bad.toml").string() + " simulate-lgcp --window 0,0,3,3 --cells 8,8") == 2);
  fs::remove_all(dir);
}

TEST_CASE("output root environment variable sets the default out dir") {
  const fs::path root = fresh_dir("envroot");
  fs::create_directories(root);
  const std::string cmd = "MATERNSIM_OUT_ROOT=" + root.string() + " " + cli_path() +
                          " --seed 2 simulate-lgcp --window 0,0,2,2 --cells 4,4 --sigma2 0.2"
                          " --reps 1 >/dev/null 2>&1";
  REQUIRE(WEXITSTATUS(std::system(cmd.c_str())) == 0);
  CHECK(fs::exists(root / "maternsim_out" / "manifest.json"));
  fs::remove_all(root);
}

TEST_CASE("extremal visible-centres and mc intensity subcommands") {
  const fs::path vc = fresh_dir("vc");
  REQUIRE(run("--seed 12 --out-dir " + vc.string() +
              " extremal --mode visible-centres --psi-constant --shape gauss --tau 0.2"
              " --window 0,0,4,4 --cells 16,16 --buffer 4 --reps 3") == 0);
  const json report = json::parse(read_text(vc / "extremal_report.json"));
  CHECK(report.at("empirical_intensity").get<double>() > 0.0);
  CHECK(fs::exists(vc / "retained_2.csv"));
  CHECK(fs::exists(vc / "surface_0.csv"));

  const fs::path mi = fresh_dir("mi");
  REQUIRE(run("--seed 13 --out-dir " + mi.string() +
              " intensity --mode mc-first-order --preset matern1 --R 0.4 --mu 0.2"
              " --sigma2 0.3 --range 1 --xi 0,0 --grid-h 0.08 --n-psi 16 --n-mark 1") == 0);
  const json mreport = json::parse(read_text(mi / "intensity.json"));
  CHECK(mreport.at("value").get<double>() > 0.0);
  CHECK(mreport.at("std_error").get<double>() >= 0.0);

  // plot-data accepts report JSON artifacts too
  const fs::path plot = fresh_dir("plot_report");
  REQUIRE(run("--out-dir " + plot.string() + " plot-data --input " +
              (mi / "intensity.json").string()) == 0);
  CHECK(fs::exists(plot / "report_plot.csv"));
  fs::remove_all(vc);
  fs::remove_all(mi);
  fs::remove_all(plot);
}

TEST_CASE("mda and estimate cdf subcommands") {
  const fs::path mda = fresh_dir("mda");
  REQUIRE(run("--seed 14 --out-dir " + mda.string() +
              " extremal --mode mda --psi-constant --shape gauss --tau 0.25"
              " --window -3,-3,3,3 --cells 12,12 --buffer 3 --reps 200 --n-aggregate 8") == 0);
  const json report = json::parse(read_text(mda / "extremal_report.json"));
  CHECK(report.at("ks_distance").get<double>() < 0.2);
  CHECK(fs::exists(mda / "mda_samples.csv"));

  const fs::path est = fresh_dir("cdf");
  REQUIRE(run("--out-dir " + est.string() + " estimate --inputs " +
              (mda / "mda_samples.csv").string() + " --stat cdf --z-min 0.15") == 0);
  const json ereport = json::parse(read_text(est / "estimate_report.json"));
  CHECK(ereport.at("ks_distance").get<double>() >= 0.0);
  fs::remove_all(mda);
  fs::remove_all(est);
}

TEST_CASE("closed-form intensity subcommand") {
  const fs::path dir = fresh_dir("cf");
  REQUIRE(run("--out-dir " + dir.string() +
              " intensity --mode closed-form --preset matern2 --lambda 2 --R 0.5 --d 2") == 0);
  const json report = json::parse(read_text(dir / "intensity.json"));
  const double b = 3.14159265358979323846 * 0.25;
  CHECK(report.at("value").get<double>() ==
        doctest::Approx((1.0 - std::exp(-2.0 * b)) / b));
  fs::remove_all(dir);
}

TEST_CASE("extremal fidi subcommand") {
  const fs::path dir = fresh_dir("fidi");
  REQUIRE(run("--out-dir " + dir.string() +
              " extremal --mode fidi --psi-constant --tau 0.05 --shape gauss "
              "--window -5,-5,6,5 --cells 110,100 --buffer 1 --points '0,0;1,0' "
              "--thresholds 1,2") == 0);
  const json report = json::parse(read_text(dir / "extremal_report.json"));
  const double v = report.at("fidi_value").get<double>();
  CHECK(v > 0.1);
  CHECK(v < 0.9);
  fs::remove_all(dir);
}
