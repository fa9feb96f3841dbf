// maternsim command line: simulation and evaluation pipeline for dependent
// thinning of point processes and the extremal constructions built on them.
//
// Exit codes: 0 ok, 2 config error, 3 numeric error, 4 i/o error.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "maternsim/estimators.hpp"
#include "maternsim/extremal.hpp"
#include "maternsim/io.hpp"
#include "maternsim/palm.hpp"
#include "maternsim/sampler.hpp"
#include "maternsim/stats.hpp"
#include "maternsim/thinning.hpp"

namespace fs = std::filesystem;
using namespace maternsim;

namespace {

constexpr const char* kVersion = "0.1.0";

std::vector<double> parse_doubles(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(std::stod(item));
  return out;
}

std::vector<int> parse_ints(const std::string& text) {
  std::vector<int> out;
  for (double v : parse_doubles(text)) out.push_back(static_cast<int>(v));
  return out;
}

Window parse_window(const std::string& text) {
  const std::vector<double> v = parse_doubles(text);
  if (v.empty() || v.size() % 2 != 0)
    throw ConfigError("window must be lo1,..,lod,hi1,..,hid");
  const std::size_t d = v.size() / 2;
  return Window({v.begin(), v.begin() + d}, {v.begin() + d, v.end()});
}

std::vector<std::vector<double>> parse_points(const std::string& text) {
  std::vector<std::vector<double>> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';'))
    if (!item.empty()) out.push_back(parse_doubles(item));
  return out;
}

fs::path default_out_root() {
  if (const char* env = std::getenv("MATERNSIM_OUT_ROOT")) return fs::path(env);
  return fs::path(".");
}

struct Manifest {
  std::string subcommand;
  json config = json::object();
  std::vector<fs::path> outputs;

  void add(const fs::path& p) { outputs.push_back(p); }

  void write(const fs::path& dir) const {
    json j{{"tool", "maternsim"}, {"version", kVersion}, {"subcommand", subcommand},
           {"config", config}};
    json outs = json::array();
    for (const fs::path& p : outputs)
      outs.push_back({{"file", p.filename().string()}, {"sha256", sha256_file(p)}});
    j["outputs"] = outs;
    atomic_write_text(dir / "manifest.json", j.dump(2) + "\n");
  }
};

struct LgcpOptions {
  double mu = 0.0;
  std::string family = "exponential";
  double sigma2 = 1.0;
  double range = 1.0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--mu", mu, "constant mean of the log intensity");
    cmd->add_option("--family", family, "covariance family")
        ->check(CLI::IsMember({"exponential", "squared-exponential", "matern-3/2"}));
    cmd->add_option("--sigma2", sigma2, "covariance variance")->check(CLI::PositiveNumber);
    cmd->add_option("--range", range, "covariance range")->check(CLI::PositiveNumber);
  }

  LgcpSpec spec() const {
    LgcpSpec s;
    s.mean = MeanFunction(mu);
    s.cov = CovarianceModel(cov_family_from_string(family), sigma2, range);
    return s;
  }

  json echo() const {
    return json{{"mu", mu}, {"family", family}, {"sigma2", sigma2}, {"range", range}};
  }
};

ThinningModel make_preset(const std::string& name, double R, double p0, double p_range,
                          const std::string& p_form = "triangle", double p_amp = 1.0,
                          double p_scale = 1.0) {
  if (name == "matern1") return matern_i(R, p0);
  if (name == "matern2") return matern_ii(R, p0);
  if (name == "generalized-matern1") return generalized_matern_i(R, p0);
  if (name == "generalized-matern2") return generalized_matern_ii(R, p0);
  if (name == "soft-core") return soft_core_kernel(p_range, p0);
  if (name == "visible-centres") return visible_centre_model(p0);
  if (name == "distance") {
    // parametric deletion-probability forms for mark-free stochastic thinning
    if (p_form == "triangle")
      return distance_thinning([p_range](double d) { return 1.0 - d / p_range; }, p_range, p0);
    if (p_form == "expdecay") {
      // negligible beyond the point where p drops under 1e-6
      const double reach = p_scale * std::log(std::max(p_amp, 1e-6) / 1e-6);
      return distance_thinning(
          [p_amp, p_scale](double d) { return p_amp * std::exp(-d / p_scale); }, reach, p0);
    }
    if (p_form == "constant")
      return distance_thinning([p_amp](double) { return p_amp; }, p_range, p0);
    throw ConfigError("unknown p form: " + p_form);
  }
  throw ConfigError("unknown preset: " + name);
}

bool preset_needs_scalar_marks(const std::string& name) {
  return name == "matern2" || name == "generalized-matern2";
}

bool preset_needs_kernel_marks(const std::string& name) {
  return name == "soft-core" || name == "visible-centres";
}

// ---------------------------------------------------------------- simulate

int run_simulate_lgcp(const LgcpOptions& lgcp, const std::string& window_text,
                      const std::string& cells_text, double offset, int reps,
                      std::uint64_t seed, int threads, const fs::path& out_dir) {
  const Window window = parse_window(window_text);
  Grid grid(window, parse_ints(cells_text));
  LgcpSpec spec = lgcp.spec();
  spec.log_scale_offset = offset;
  fs::create_directories(out_dir);

  const GrfSampler sampler(grid, spec.cov);
  const std::vector<double> mean_vec = sampler.mean_vector(spec);
  RngStream master(seed);

  std::vector<PointPattern> patterns;
  std::vector<GridField> fields;
  patterns.reserve(reps);
  fields.reserve(reps);
  for (int r = 0; r < reps; ++r) {
    patterns.emplace_back(window);
    fields.emplace_back(grid, 0.0);
  }
  parallel_for(reps, threads, [&](std::size_t r) {
    RngStream s = master.derive(r);
    GridField psi = sampler.sample(mean_vec, s);
    for (double& v : psi.values()) v = std::exp(v);
    patterns[r] = sample_cox(psi, s);
    fields[r] = std::move(psi);
  });

  Manifest manifest;
  manifest.subcommand = "simulate-lgcp";
  manifest.config = {{"lgcp", lgcp.echo()}, {"window", window_text}, {"cells", cells_text},
                     {"offset", offset},    {"reps", reps},          {"seed", seed}};
  for (int r = 0; r < reps; ++r) {
    const json meta{{"seed", seed}, {"replicate", r}};
    const fs::path ppath = out_dir / ("pattern_" + std::to_string(r) + ".csv");
    const fs::path fpath = out_dir / ("field_" + std::to_string(r) + ".csv");
    write_pattern_csv(ppath, patterns[r], meta);
    write_field_csv(fpath, fields[r], meta);
    manifest.add(ppath);
    manifest.add(fpath);
  }
  manifest.write(out_dir);
  return 0;
}

// -------------------------------------------------------------------- thin

int run_thin(const std::string& input, const std::string& preset, double R, double p0,
             double p_range, const std::string& p_form, double p_amp, double p_scale,
             const std::string& mark_law, double mark_tau, const std::string& shape_name,
             double crop_border, std::uint64_t seed, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  RngStream rng(seed);

  // load marked or plain pattern; attach marks when the preset needs them
  MarkedPointPattern marked(Window({0}, {1}));
  const json meta = json::parse(read_text(input + ".meta.json"));
  const std::string input_marks = meta.value("mark_kind", "none");
  if (input_marks == "none") {
    PointPattern ground = read_pattern_csv(input);
    if (mark_law == "uniform01" || (mark_law == "auto" && preset_needs_scalar_marks(preset))) {
      marked = attach_marks(ground, UniformScalarLaw{0, 1}, rng);
    } else if (mark_law == "pareto-kernel" ||
               (mark_law == "auto" && preset_needs_kernel_marks(preset))) {
      marked = attach_marks(
          ground,
          ScaledKernelLaw{KernelIntensityLaw::pareto_tail, mark_tau,
                          shape_from_string(shape_name)},
          rng);
    } else if (mark_law == "uniform-kernel") {
      marked = attach_marks(ground,
                            ScaledKernelLaw{KernelIntensityLaw::uniform01, 1.0,
                                            shape_from_string(shape_name)},
                            rng);
    } else {
      marked = MarkedPointPattern(PointPattern(ground.window(), ground.coords()),
                                  std::vector<MarkValue>(ground.size(), MarkValue(0.0)));
    }
  } else {
    marked = read_marked_pattern_csv(input);
  }

  const ThinningModel model = make_preset(preset, R, p0, p_range, p_form, p_amp, p_scale);
  MarkedPointPattern kept = thin(model, marked, rng);
  const Window target =
      crop_border > 0.0 ? marked.base().window().eroded(crop_border) : marked.base().window();
  MarkedPointPattern cropped = crop(kept, target);

  Manifest manifest;
  manifest.subcommand = "thin";
  manifest.config = {{"input", input},       {"preset", preset},   {"R", R},
                     {"p0", p0},             {"p_range", p_range}, {"p_form", p_form},
                     {"mark_law", mark_law}, {"crop_border", crop_border}, {"seed", seed}};
  const fs::path out_csv = out_dir / "retained.csv";
  write_pattern_csv(out_csv, cropped, json{{"seed", seed}, {"preset", preset}});
  manifest.add(out_csv);

  const json report{{"input_count", marked.size()},
                    {"retained_count", kept.size()},
                    {"cropped_count", cropped.size()},
                    {"empirical_retention_rate",
                     marked.empty() ? 0.0
                                    : static_cast<double>(kept.size()) /
                                          static_cast<double>(marked.size())}};
  const fs::path report_path = out_dir / "thin_report.json";
  atomic_write_text(report_path, report.dump(2) + "\n");
  manifest.add(report_path);
  manifest.write(out_dir);
  return 0;
}

// --------------------------------------------------------------- intensity

json estimate_to_json(const IntensityEstimate& est) {
  return json{{"value", est.value},
              {"std_error", est.std_error},
              {"n_outer", est.n_outer},
              {"n_inner", est.n_inner},
              {"warnings", est.warnings}};
}

int run_intensity(const std::string& mode, const std::string& preset, double lambda, double R,
                  int d, double p0, double p_range, const LgcpOptions& lgcp,
                  const std::string& xi_text, const std::string& eta_text, double grid_h,
                  int n_psi, int n_mark, int n_mark_inner, std::uint64_t seed,
                  const fs::path& out_dir) {
  fs::create_directories(out_dir);
  json report;
  Manifest manifest;
  manifest.subcommand = "intensity";
  manifest.config = {{"mode", mode},     {"preset", preset}, {"lambda", lambda},
                     {"R", R},           {"d", d},           {"p0", p0},
                     {"lgcp", lgcp.echo()}, {"xi", xi_text}, {"eta", eta_text},
                     {"grid_h", grid_h}, {"n_psi", n_psi},   {"n_mark", n_mark},
                     {"seed", seed}};

  if (mode == "closed-form") {
    double value = 0.0;
    if (preset == "matern1") {
      value = matern1_thinned_intensity(lambda, R, d);
    } else if (preset == "matern2") {
      value = matern2_thinned_intensity(lambda, R, d);
    } else {
      throw ConfigError("closed-form mode supports presets matern1 and matern2");
    }
    report = {{"value", value}, {"std_error", 0.0}, {"n_outer", 0}, {"n_inner", 0},
              {"warnings", json::array()}};
  } else {
    const ThinningModel model = make_preset(preset, R, p0, p_range);
    std::optional<MarkLaw> law;
    if (preset_needs_scalar_marks(preset)) law = UniformScalarLaw{0, 1};
    if (preset_needs_kernel_marks(preset))
      law = ScaledKernelLaw{KernelIntensityLaw::uniform01, 1.0, ShapeId::gauss_density};
    const std::vector<double> xi = parse_doubles(xi_text);
    const double reach = std::isfinite(model.interaction_range)
                             ? model.interaction_range + grid_h
                             : 5.0;
    RngStream rng(seed);
    if (mode == "mc-first-order") {
      std::vector<double> lo(xi), hi(xi);
      for (auto& v : lo) v -= reach;
      for (auto& v : hi) v += reach;
      Grid grid = Grid::with_cell_width(Window(lo, hi), grid_h);
      const auto est = first_order_intensity_mc(lgcp.spec(), model, law, xi, grid, n_psi,
                                                n_mark, rng, n_mark_inner);
      report = estimate_to_json(est);
    } else if (mode == "mc-second-order") {
      const std::vector<double> eta = parse_doubles(eta_text);
      std::vector<double> lo(xi), hi(xi);
      for (std::size_t ax = 0; ax < lo.size(); ++ax) {
        lo[ax] = std::min(lo[ax], eta[ax]) - reach;
        hi[ax] = std::max(hi[ax], eta[ax]) + reach;
      }
      Grid grid = Grid::with_cell_width(Window(lo, hi), grid_h);
      const auto est = second_order_intensity_mc(lgcp.spec(), model, law, xi, eta, grid, n_psi,
                                                 n_mark, rng, n_mark_inner);
      report = estimate_to_json(est);
    } else {
      throw ConfigError("unknown intensity mode: " + mode);
    }
  }
  const fs::path path = out_dir / "intensity.json";
  atomic_write_text(path, report.dump(2) + "\n");
  manifest.add(path);
  manifest.write(out_dir);
  return 0;
}

// ---------------------------------------------------------------- extremal

int run_extremal(const std::string& mode, const std::string& shape_name, double tau,
                 const std::string& buffer_text, const std::string& window_text,
                 const std::string& cells_text, int reps, const LgcpOptions& lgcp,
                 bool psi_constant, const std::string& points_text,
                 const std::string& thresholds_text, int n_aggregate, std::uint64_t seed,
                 int threads, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  const Window window = parse_window(window_text);
  const StormShape& shape = get_shape(shape_from_string(shape_name), window.dim());
  const double buffer = buffer_text == "auto" ? envelope_buffer_radius(shape, tau, window)
                                              : std::stod(buffer_text);
  Grid grid(window, parse_ints(cells_text));
  RngStream master(seed);

  Manifest manifest;
  manifest.subcommand = "extremal";
  manifest.config = {{"mode", mode},       {"shape", shape_name}, {"tau", tau},
                     {"buffer", buffer},   {"window", window_text}, {"cells", cells_text},
                     {"reps", reps},       {"lgcp", lgcp.echo()},  {"psi_constant", psi_constant},
                     {"seed", seed}};
  json report{{"mode", mode}, {"tau", tau}, {"buffer", buffer}};

  auto simulate_pattern = [&](RngStream& s) -> MarkedPointPattern {
    if (psi_constant) {
      auto storms = simulate_m3_truncated(shape, tau, window, buffer, s);
      MarkedPointPattern pat(window.dilated(buffer));
      for (const StormPoint& st : storms)
        pat.push_back(st.centre, MarkValue(ScaledKernelMark{st.u, st.shape, st.centre}));
      return pat;
    }
    return simulate_cox_extremal_points(lgcp.spec(), tau, shape, grid, buffer, s).first;
  };

  if (mode == "m3" || mode == "cox") {
    std::vector<double> counts(reps);
    for (int r = 0; r < reps; ++r) {
      RngStream s = master.derive(r);
      if (mode == "m3") {
        MarkedPointPattern pat = simulate_pattern(s);
        counts[r] = static_cast<double>(pat.size());
        const fs::path p = out_dir / ("storms_" + std::to_string(r) + ".csv");
        write_pattern_csv(p, pat, json{{"replicate", r}, {"tau", tau}});
        manifest.add(p);
      } else {
        auto [pat, psi] = simulate_cox_extremal_points(lgcp.spec(), tau, shape, grid, buffer, s);
        counts[r] = static_cast<double>(pat.size());
        const fs::path p = out_dir / ("storms_" + std::to_string(r) + ".csv");
        const fs::path f = out_dir / ("psi_" + std::to_string(r) + ".csv");
        write_pattern_csv(p, pat, json{{"replicate", r}, {"tau", tau}});
        write_field_csv(f, psi, json{{"replicate", r}});
        manifest.add(p);
        manifest.add(f);
      }
    }
    const MeanSd ms = mean_sd(counts);
    report["mean_storm_count"] = ms.mean;
    report["storm_count_se"] = ms.std_error;
  } else if (mode == "matern-extremal" || mode == "visible-centres") {
    const Grid bgrid = grid.buffered(buffer);
    std::vector<double> retained_intensity(reps);
    std::vector<MarkedPointPattern> retained;
    retained.reserve(reps);
    for (int r = 0; r < reps; ++r) retained.emplace_back(window.dilated(buffer));
    parallel_for(reps, threads, [&](std::size_t r) {
      RngStream s = master.derive(r);
      MarkedPointPattern pat = simulate_pattern(s);
      retained[r] = mode == "visible-centres" ? thin_visible_centres(pat)
                                              : thin_extremal_dominance(pat, bgrid);
      retained_intensity[r] =
          static_cast<double>(crop(retained[r], window).size()) / window.volume();
    });
    for (int r = 0; r < std::min(reps, 4); ++r) {
      // surfaces for the first few replicates only; patterns for all
      ExtremalSurface surf = accumulate_surface(retained[r], grid);
      const fs::path sp = out_dir / ("surface_" + std::to_string(r) + ".csv");
      write_field_csv(sp, GridField(grid, surf.values), json{{"replicate", r}});
      manifest.add(sp);
    }
    for (int r = 0; r < reps; ++r) {
      const fs::path p = out_dir / ("retained_" + std::to_string(r) + ".csv");
      write_pattern_csv(p, retained[r], json{{"replicate", r}});
      manifest.add(p);
    }
    const MeanSd ms = mean_sd(retained_intensity);
    report["empirical_intensity"] = ms.mean;
    report["empirical_intensity_se"] = ms.std_error;
  } else if (mode == "mda") {
    std::vector<double> samples(reps);
    const std::vector<double> centre = grid.cell_centre(grid.cell_count() / 2);
    parallel_for(reps, threads, [&](std::size_t r) {
      RngStream s = master.derive(r);
      double m = 0.0;
      for (int i = 0; i < n_aggregate; ++i) {
        RngStream si = s.derive(i);
        MarkedPointPattern pat = simulate_pattern(si);
        for (std::size_t k = 0; k < pat.size(); ++k)
          m = std::max(m, pat.mark(k).eval(centre));
      }
      samples[r] = m / n_aggregate;
    });
    auto d = empirical_cdf_distance(
        samples, [](double z) { return std::exp(-1.0 / z); }, 5.0 * tau / n_aggregate);
    report["n_aggregate"] = n_aggregate;
    report["ks_distance"] = d.distance;
    report["ks_restricted_empty"] = d.restricted_empty;
    const fs::path sp = out_dir / "mda_samples.csv";
    std::string body = "value\n";
    for (double v : samples) body += format_double(v) + "\n";
    atomic_write_text(sp, body);
    manifest.add(sp);
  } else if (mode == "fidi") {
    const auto points = parse_points(points_text);
    const auto thresholds = parse_doubles(thresholds_text);
    const Grid bgrid = grid.buffered(buffer);
    double value;
    if (psi_constant) {
      value = fidi_prob_pi(1.0, shape, tau, points, thresholds, bgrid);
    } else {
      std::vector<GridField> fields;
      RngStream s = master.derive(0);
      for (int r = 0; r < reps; ++r) {
        RngStream sr = s.derive(r);
        fields.push_back(intensity_field(lgcp.spec(), bgrid, sr));
      }
      value = fidi_prob_pi(fields, shape, tau, points, thresholds, bgrid);
    }
    report["fidi_value"] = value;
    report["points"] = points;
    report["thresholds"] = thresholds;
  } else {
    throw ConfigError("unknown extremal mode: " + mode);
  }

  const fs::path rp = out_dir / "extremal_report.json";
  atomic_write_text(rp, report.dump(2) + "\n");
  manifest.add(rp);
  manifest.write(out_dir);
  return 0;
}

// ---------------------------------------------------------------- estimate

std::vector<fs::path> expand_glob(const std::string& pattern) {
  const fs::path p(pattern);
  const fs::path dir = p.parent_path().empty() ? fs::path(".") : p.parent_path();
  const std::string name = p.filename().string();
  const auto star = name.find('*');
  if (star == std::string::npos) return {p};
  const std::string prefix = name.substr(0, star);
  const std::string suffix = name.substr(star + 1);
  std::vector<fs::path> out;
  if (!fs::exists(dir)) return out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string f = entry.path().filename().string();
    if (f.size() >= prefix.size() + suffix.size() && f.rfind(prefix, 0) == 0 &&
        f.compare(f.size() - suffix.size(), suffix.size(), suffix) == 0)
      out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

int run_estimate(const std::string& inputs, const std::string& stat,
                 const std::string& region_text, double r_max, int n_bins, double border,
                 double z_min, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  const std::vector<fs::path> files = expand_glob(inputs);
  if (files.empty()) throw ConfigError("estimate: no inputs match " + inputs);

  Manifest manifest;
  manifest.subcommand = "estimate";
  manifest.config = {{"inputs", inputs}, {"stat", stat},   {"region", region_text},
                     {"r_max", r_max},   {"bins", n_bins}, {"border", border}};
  json report{{"stat", stat}, {"n_inputs", files.size()}};

  if (stat == "intensity" || stat == "pcf") {
    std::vector<PointPattern> patterns;
    for (const fs::path& f : files) patterns.push_back(read_pattern_csv(f));
    if (stat == "intensity") {
      const Window region =
          region_text.empty() ? patterns[0].window() : parse_window(region_text);
      auto est = box_intensity(patterns, region);
      report["value"] = est.value;
      report["std_error"] = est.std_error;
    } else {
      auto pcf = pair_correlation(patterns, r_max, n_bins, border);
      std::string body = "r,g,g_se,rho2,rho2_se,mean_count\n";
      for (std::size_t b = 0; b < pcf.radii.size(); ++b)
        body += format_double(pcf.radii[b]) + "," + format_double(pcf.g_values[b]) + "," +
                format_double(pcf.g_se[b]) + "," + format_double(pcf.rho2_values[b]) + "," +
                format_double(pcf.rho2_se[b]) + "," + format_double(pcf.counts[b]) + "\n";
      const fs::path pcf_path = out_dir / "pcf.csv";
      atomic_write_text(pcf_path, body);
      manifest.add(pcf_path);
      report["bins"] = pcf.radii.size();
    }
  } else if (stat == "cdf") {
    // one scalar sample per row, first column of each file
    std::vector<double> samples;
    for (const fs::path& f : files) {
      std::istringstream ss(read_text(f));
      std::string line;
      std::size_t ln = 0;
      while (std::getline(ss, line)) {
        ++ln;
        if (ln == 1 || line.empty()) continue;
        samples.push_back(std::stod(line));
      }
    }
    auto d = empirical_cdf_distance(
        samples, [](double z) { return std::exp(-1.0 / z); }, z_min);
    report["ks_distance"] = d.distance;
    report["restricted_empty"] = d.restricted_empty;
    report["n_samples"] = samples.size();
  } else {
    throw ConfigError("unknown statistic: " + stat);
  }

  const fs::path rp = out_dir / "estimate_report.json";
  atomic_write_text(rp, report.dump(2) + "\n");
  manifest.add(rp);
  manifest.write(out_dir);
  return 0;
}

// --------------------------------------------------------------- plot-data

int run_plot_data(const std::string& input, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  Manifest manifest;
  manifest.subcommand = "plot-data";
  manifest.config = {{"input", input}};

  const fs::path in(input);
  fs::path out_path;
  if (in.extension() == ".json") {
    json j;
    try {
      j = json::parse(read_text(in));
    } catch (const json::exception& e) {
      throw IoError(input + ": cannot parse report (" + std::string(e.what()) + ")");
    }
    std::string body = "key,value\n";
    for (const auto& [k, v] : j.items())
      if (v.is_number()) body += k + "," + format_double(v.get<double>()) + "\n";
    out_path = out_dir / "report_plot.csv";
    atomic_write_text(out_path, body);
  } else {
    const json meta = json::parse(read_text(input + ".meta.json"));
    const std::string kind = meta.value("kind", "");
    if (kind == "grid_field") {
      GridField f = read_field_csv(in);
      std::string body = "x,y,value\n";
      std::vector<double> c(f.grid().dim());
      for (std::size_t i = 0; i < f.grid().cell_count(); ++i) {
        f.grid().cell_centre(i, c);
        body += format_double(c[0]) + "," + format_double(c.size() > 1 ? c[1] : 0.0) + "," +
                format_double(f.values()[i]) + "\n";
      }
      out_path = out_dir / "field_plot.csv";
      atomic_write_text(out_path, body);
    } else if (kind == "point_pattern") {
      PointPattern p = read_pattern_csv(in);
      std::string body = "x,y\n";
      for (std::size_t i = 0; i < p.size(); ++i)
        body += format_double(p.point(i)[0]) + "," +
                format_double(p.dim() > 1 ? p.point(i)[1] : 0.0) + "\n";
      out_path = out_dir / "points_plot.csv";
      atomic_write_text(out_path, body);
    } else {
      throw IoError(input + ": unknown artifact kind '" + kind + "'");
    }
  }
  manifest.add(out_path);
  manifest.write(out_dir);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"maternsim: dependent thinning and extremal point process toolkit"};
  app.require_subcommand(1);
  app.set_config("--config")->configurable(false);
  app.allow_config_extras(CLI::config_extras_mode::error);  // reject unknown keys

  std::string out_dir_text = (default_out_root() / "maternsim_out").string();
  std::uint64_t seed = 1;
  int threads = 1;
  app.add_option("--out-dir", out_dir_text, "output directory")->configurable(true);
  app.add_option("--seed", seed, "master seed");
  app.add_option("--threads", threads, "worker threads for replicate loops");

  // simulate-lgcp
  auto* sim = app.add_subcommand("simulate-lgcp", "sample LGCP patterns and fields");
  LgcpOptions sim_lgcp;
  sim_lgcp.attach(sim);
  std::string sim_window = "0,0,10,10", sim_cells = "64,64";
  double sim_offset = 0.0;
  int sim_reps = 1;
  sim->add_option("--window", sim_window, "lo1,..,lod,hi1,..,hid");
  sim->add_option("--cells", sim_cells, "cells per axis");
  sim->add_option("--offset", sim_offset, "additive log-intensity offset");
  sim->add_option("--reps", sim_reps, "replicates")->check(CLI::PositiveNumber);

  // thin
  auto* th = app.add_subcommand("thin", "apply a dependent-thinning preset");
  std::string th_input, th_preset = "matern2", th_mark_law = "auto", th_shape = "gauss";
  std::string th_p_form = "triangle";
  double th_R = 0.5, th_p0 = 1.0, th_p_range = 1.0, th_p_amp = 1.0, th_p_scale = 1.0;
  double th_mark_tau = 1.0, th_crop = 0.0;
  th->add_option("--input", th_input, "input pattern CSV")->required();
  th->add_option("--preset", th_preset, "thinning preset")
      ->check(CLI::IsMember({"matern1", "matern2", "generalized-matern1",
                             "generalized-matern2", "soft-core", "visible-centres",
                             "distance"}));
  th->add_option("--R", th_R, "hard-core distance");
  th->add_option("--p0", th_p0, "independent retention probability");
  th->add_option("--p-range", th_p_range, "soft-core / triangle deletion range");
  th->add_option("--p-form", th_p_form,
                 "deletion probability for the distance preset: triangle|expdecay|constant")
      ->check(CLI::IsMember({"triangle", "expdecay", "constant"}));
  th->add_option("--p-amp", th_p_amp, "amplitude of the expdecay/constant p forms");
  th->add_option("--p-scale", th_p_scale, "length scale of the expdecay p form");
  th->add_option("--mark-law", th_mark_law,
                 "marks for unmarked inputs: auto|none|uniform01|uniform-kernel|pareto-kernel");
  th->add_option("--mark-tau", th_mark_tau, "pareto truncation for kernel marks");
  th->add_option("--shape", th_shape, "kernel mark shape");
  th->add_option("--crop,--dilation", th_crop,
                 "erode the output window by this border (the dilation radius the input "
                 "was simulated with)");

  // intensity
  auto* in = app.add_subcommand("intensity", "closed-form and Monte Carlo intensities");
  LgcpOptions in_lgcp;
  in_lgcp.attach(in);
  std::string in_mode = "closed-form", in_preset = "matern2", in_xi = "0,0", in_eta = "";
  double in_lambda = 1.0, in_R = 0.5, in_p0 = 1.0, in_p_range = 1.0, in_grid_h = 0.05;
  int in_d = 2, in_n_psi = 64, in_n_mark = 64, in_n_mark_inner = 32;
  in->add_option("--mode", in_mode, "closed-form | mc-first-order | mc-second-order")
      ->check(CLI::IsMember({"closed-form", "mc-first-order", "mc-second-order"}));
  in->add_option("--preset", in_preset, "thinning preset");
  in->add_option("--lambda", in_lambda, "ground intensity for closed forms");
  in->add_option("--R", in_R, "hard-core distance");
  in->add_option("--d", in_d, "dimension for closed forms");
  in->add_option("--p0", in_p0, "independent retention probability");
  in->add_option("--p-range", in_p_range, "soft-core deletion range");
  in->add_option("--xi", in_xi, "evaluation point");
  in->add_option("--eta", in_eta, "second evaluation point");
  in->add_option("--grid-h", in_grid_h, "integration cell width");
  in->add_option("--n-psi", in_n_psi, "field replicates");
  in->add_option("--n-mark", in_n_mark, "outer mark draws");
  in->add_option("--n-mark-inner", in_n_mark_inner, "inner mark draws per cell");

  // extremal
  auto* ex = app.add_subcommand("extremal", "storm simulation and extremal thinning");
  LgcpOptions ex_lgcp;
  ex_lgcp.attach(ex);
  std::string ex_mode = "m3", ex_shape = "gauss", ex_buffer = "auto";
  std::string ex_window = "0,0,4,4", ex_cells = "40,40";
  std::string ex_points = "0,0;1,0", ex_thresholds = "1,2";
  double ex_tau = 0.1;
  int ex_reps = 1, ex_aggregate = 10;
  bool ex_psi_const = false;
  ex->add_option("--mode", ex_mode,
                 "m3 | cox | matern-extremal | visible-centres | mda | fidi")
      ->check(CLI::IsMember(
          {"m3", "cox", "matern-extremal", "visible-centres", "mda", "fidi"}));
  ex->add_option("--shape", ex_shape, "storm shape");
  ex->add_option("--tau", ex_tau, "truncation level")->check(CLI::PositiveNumber);
  ex->add_option("--buffer", ex_buffer, "buffer radius or 'auto'");
  ex->add_option("--window", ex_window, "observation window");
  ex->add_option("--cells", ex_cells, "grid cells per axis");
  ex->add_option("--reps", ex_reps, "replicates");
  ex->add_flag("--psi-constant", ex_psi_const, "use deterministic Psi == 1");
  ex->add_option("--points", ex_points, "fidi evaluation points, e.g. 0,0;1,0");
  ex->add_option("--thresholds", ex_thresholds, "fidi thresholds");
  ex->add_option("--n-aggregate", ex_aggregate, "aggregation count for mda");

  // estimate
  auto* es = app.add_subcommand("estimate", "nonparametric summaries of patterns");
  std::string es_inputs, es_stat = "intensity", es_region = "";
  double es_rmax = 1.0, es_border = 1.0, es_zmin = 0.0;
  int es_bins = 10;
  es->add_option("--inputs", es_inputs, "input CSV glob (prefix*suffix)")->required();
  es->add_option("--stat", es_stat, "intensity | pcf | cdf")
      ->check(CLI::IsMember({"intensity", "pcf", "cdf"}));
  es->add_option("--region", es_region, "count region (defaults to the pattern window)");
  es->add_option("--r-max", es_rmax, "largest pair distance");
  es->add_option("--bins", es_bins, "distance bins");
  es->add_option("--border", es_border, "minus-sampling depth");
  es->add_option("--z-min", es_zmin, "lower end of the cdf comparison");

  // plot-data
  auto* pl = app.add_subcommand("plot-data", "reshape artifacts into plot-ready CSV");
  std::string pl_input;
  pl->add_option("--input", pl_input, "artifact CSV or report JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // any command-line/config rejection is a config error
  }

  try {
    const fs::path out_dir(out_dir_text);
    if (sim->parsed())
      return run_simulate_lgcp(sim_lgcp, sim_window, sim_cells, sim_offset, sim_reps, seed,
                               threads, out_dir);
    if (th->parsed())
      return run_thin(th_input, th_preset, th_R, th_p0, th_p_range, th_p_form, th_p_amp,
                      th_p_scale, th_mark_law, th_mark_tau, th_shape, th_crop, seed, out_dir);
    if (in->parsed())
      return run_intensity(in_mode, in_preset, in_lambda, in_R, in_d, in_p0, in_p_range,
                           in_lgcp, in_xi, in_eta, in_grid_h, in_n_psi, in_n_mark,
                           in_n_mark_inner, seed, out_dir);
    if (ex->parsed())
      return run_extremal(ex_mode, ex_shape, ex_tau, ex_buffer, ex_window, ex_cells, ex_reps,
                          ex_lgcp, ex_psi_const, ex_points, ex_thresholds, ex_aggregate, seed,
                          threads, out_dir);
    if (es->parsed())
      return run_estimate(es_inputs, es_stat, es_region, es_rmax, es_bins, es_border, es_zmin,
                          out_dir);
    if (pl->parsed()) return run_plot_data(pl_input, out_dir);
  } catch (const ConfigError& e) {
    std::cerr << json{{"error", "config"}, {"message", e.what()}}.dump() << "\n";
    return 2;
  } catch (const NumericError& e) {
    std::cerr << json{{"error", "numeric"}, {"message", e.what()}}.dump() << "\n";
    return 3;
  } catch (const IoError& e) {
    std::cerr << json{{"error", "io"}, {"message", e.what()}}.dump() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", "internal"}, {"message", e.what()}}.dump() << "\n";
    return 3;
  }
  return 0;
}
