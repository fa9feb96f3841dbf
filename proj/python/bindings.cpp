// Python bindings: a functional, numpy-centric surface over the core
// operations (sampling, thinning, closed forms, the extremal layer and the
// Monte Carlo intensity estimators).

#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "maternsim/estimators.hpp"
#include "maternsim/extremal.hpp"
#include "maternsim/palm.hpp"
#include "maternsim/sampler.hpp"
#include "maternsim/thinning.hpp"

namespace py = pybind11;
using namespace maternsim;

namespace {

Window make_window(const std::vector<double>& lower, const std::vector<double>& upper) {
  return Window(lower, upper);
}

py::array_t<double> coords_to_array(const PointPattern& pat) {
  const std::size_t n = pat.size();
  const int d = pat.dim();
  py::array_t<double> out({static_cast<py::ssize_t>(n), static_cast<py::ssize_t>(d)});
  auto r = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < n; ++i)
    for (int ax = 0; ax < d; ++ax) r(i, ax) = pat.point(i)[ax];
  return out;
}

PointPattern array_to_pattern(const py::array_t<double>& coords, const Window& w) {
  const auto buf = coords.unchecked<2>();
  if (buf.shape(1) != w.dim()) throw ConfigError("coordinate dimension mismatch");
  std::vector<double> flat;
  flat.reserve(buf.shape(0) * buf.shape(1));
  for (py::ssize_t i = 0; i < buf.shape(0); ++i)
    for (py::ssize_t j = 0; j < buf.shape(1); ++j) flat.push_back(buf(i, j));
  return PointPattern(w, std::move(flat));
}

LgcpSpec make_lgcp(double mu, const std::string& family, double sigma2, double range,
                   double offset) {
  LgcpSpec s;
  s.mean = MeanFunction(mu);
  s.cov = CovarianceModel(cov_family_from_string(family), sigma2, range);
  s.log_scale_offset = offset;
  return s;
}

ThinningModel preset_model(const std::string& preset, double R, double p0, double p_range) {
  if (preset == "matern1") return matern_i(R, p0);
  if (preset == "matern2") return matern_ii(R, p0);
  if (preset == "generalized-matern1") return generalized_matern_i(R, p0);
  if (preset == "generalized-matern2") return generalized_matern_ii(R, p0);
  if (preset == "soft-core") return soft_core_kernel(p_range, p0);
  if (preset == "visible-centres") return visible_centre_model(p0);
  throw ConfigError("unknown preset: " + preset);
}

py::dict estimate_to_dict(const IntensityEstimate& est) {
  py::dict d;
  d["value"] = est.value;
  d["std_error"] = est.std_error;
  d["n_outer"] = est.n_outer;
  d["n_inner"] = est.n_inner;
  d["warnings"] = est.warnings;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "dependent thinning and extremal point process toolkit";

  py::register_exception<ConfigError>(m, "MaternsimConfigError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "MaternsimNumericError", PyExc_RuntimeError);

  m.def("ball_volume", &ball_volume, py::arg("d"), py::arg("radius"),
        "volume of the d-ball of the given radius");
  m.def(
      "window_volume",
      [](const std::vector<double>& lower, const std::vector<double>& upper) {
        return make_window(lower, upper).volume();
      },
      py::arg("lower"), py::arg("upper"));

  m.def("matern1_intensity", &matern1_thinned_intensity, py::arg("intensity"), py::arg("R"),
        py::arg("d"), "intensity of the plain hard-core process");
  m.def("matern2_intensity", &matern2_thinned_intensity, py::arg("intensity"), py::arg("R"),
        py::arg("d"), "intensity of the scalar-mark hard-core process");
  m.def("matern2_retaining_prob", &matern2_retaining_prob, py::arg("intensity"), py::arg("R"),
        py::arg("d"), py::arg("mark"));

  m.def(
      "sample_poisson",
      [](double lam, const std::vector<double>& lower, const std::vector<double>& upper,
         std::uint64_t seed) {
        RngStream rng(seed);
        return coords_to_array(sample_poisson(lam, make_window(lower, upper), rng));
      },
      py::arg("intensity"), py::arg("lower"), py::arg("upper"), py::arg("seed"));

  m.def(
      "sample_lgcp",
      [](double mu, const std::string& family, double sigma2, double range,
         const std::vector<double>& lower, const std::vector<double>& upper,
         const std::vector<int>& cells, std::uint64_t seed, double offset) {
        RngStream rng(seed);
        Grid grid(make_window(lower, upper), cells);
        auto [pat, psi] = sample_lgcp(make_lgcp(mu, family, sigma2, range, offset), grid, rng);
        py::array_t<double> field(cells);
        std::copy(psi.values().begin(), psi.values().end(), field.mutable_data());
        return py::make_tuple(coords_to_array(pat), field);
      },
      py::arg("mu"), py::arg("family"), py::arg("sigma2"), py::arg("range"), py::arg("lower"),
      py::arg("upper"), py::arg("cells"), py::arg("seed"), py::arg("offset") = 0.0);

  m.def(
      "thin_preset",
      [](const std::string& preset, const py::array_t<double>& coords,
         const std::vector<double>& lower, const std::vector<double>& upper, double R,
         double p0, double p_range, std::uint64_t seed) {
        const Window w = make_window(lower, upper);
        PointPattern ground = array_to_pattern(coords, w);
        RngStream rng(seed);
        MarkedPointPattern marked = [&] {
          if (preset == "matern2" || preset == "generalized-matern2")
            return attach_marks(ground, UniformScalarLaw{0, 1}, rng);
          if (preset == "soft-core" || preset == "visible-centres")
            return attach_marks(
                ground,
                ScaledKernelLaw{KernelIntensityLaw::uniform01, 1.0, ShapeId::gauss_density},
                rng);
          return MarkedPointPattern(PointPattern(w, ground.coords()),
                                    std::vector<MarkValue>(ground.size(), MarkValue(0.0)));
        }();
        MarkedPointPattern kept = thin(preset_model(preset, R, p0, p_range), marked, rng);
        return coords_to_array(kept.base());
      },
      py::arg("preset"), py::arg("coords"), py::arg("lower"), py::arg("upper"),
      py::arg("R") = 0.5, py::arg("p0") = 1.0, py::arg("p_range") = 1.0, py::arg("seed") = 1,
      "attach marks as the preset requires, thin, and return retained coordinates");

  m.def(
      "first_order_intensity_mc",
      [](const std::string& preset, double R, double p0, double p_range, double mu,
         const std::string& family, double sigma2, double range,
         const std::vector<double>& xi, double grid_h, int n_psi, int n_mark,
         std::uint64_t seed) {
        const ThinningModel model = preset_model(preset, R, p0, p_range);
        std::optional<MarkLaw> law;
        if (preset == "matern2" || preset == "generalized-matern2")
          law = UniformScalarLaw{0, 1};
        if (preset == "soft-core")
          law = ScaledKernelLaw{KernelIntensityLaw::uniform01, 1.0, ShapeId::gauss_density};
        const double reach =
            std::isfinite(model.interaction_range) ? model.interaction_range + grid_h : 5.0;
        std::vector<double> lo(xi), hi(xi);
        for (auto& v : lo) v -= reach;
        for (auto& v : hi) v += reach;
        Grid grid = Grid::with_cell_width(Window(lo, hi), grid_h);
        RngStream rng(seed);
        return estimate_to_dict(first_order_intensity_mc(
            make_lgcp(mu, family, sigma2, range, 0.0), model, law, xi, grid, n_psi, n_mark,
            rng));
      },
      py::arg("preset"), py::arg("R"), py::arg("p0"), py::arg("p_range"), py::arg("mu"),
      py::arg("family"), py::arg("sigma2"), py::arg("range"), py::arg("xi"),
      py::arg("grid_h") = 0.05, py::arg("n_psi") = 64, py::arg("n_mark") = 64,
      py::arg("seed") = 1);

  m.def(
      "simulate_m3",
      [](const std::string& shape_name, double tau, const std::vector<double>& lower,
         const std::vector<double>& upper, double buffer, std::uint64_t seed) {
        const Window w = make_window(lower, upper);
        const StormShape& shape = get_shape(shape_from_string(shape_name), w.dim());
        RngStream rng(seed);
        auto storms = simulate_m3_truncated(shape, tau, w, buffer, rng);
        py::array_t<double> centres({static_cast<py::ssize_t>(storms.size()),
                                     static_cast<py::ssize_t>(w.dim())});
        py::array_t<double> us(static_cast<py::ssize_t>(storms.size()));
        auto rc = centres.mutable_unchecked<2>();
        auto ru = us.mutable_unchecked<1>();
        for (std::size_t i = 0; i < storms.size(); ++i) {
          for (int ax = 0; ax < w.dim(); ++ax) rc(i, ax) = storms[i].centre[ax];
          ru(i) = storms[i].u;
        }
        return py::make_tuple(centres, us);
      },
      py::arg("shape"), py::arg("tau"), py::arg("lower"), py::arg("upper"),
      py::arg("buffer") = 0.0, py::arg("seed") = 1);

  m.def(
      "thin_visible_centres",
      [](const std::string& shape_name, const py::array_t<double>& centres,
         const py::array_t<double>& intensities) {
        const auto c = centres.unchecked<2>();
        const auto u = intensities.unchecked<1>();
        const int d = static_cast<int>(c.shape(1));
        std::vector<double> lo(d, 0.0), hi(d, 1.0);
        for (py::ssize_t i = 0; i < c.shape(0); ++i)
          for (int ax = 0; ax < d; ++ax) {
            lo[ax] = std::min(lo[ax], c(i, ax));
            hi[ax] = std::max(hi[ax], c(i, ax) + 1e-9);
          }
        MarkedPointPattern pat(Window(lo, hi));
        const ShapeId shape = shape_from_string(shape_name);
        for (py::ssize_t i = 0; i < c.shape(0); ++i) {
          std::vector<double> p(d);
          for (int ax = 0; ax < d; ++ax) p[ax] = c(i, ax);
          pat.push_back(p, MarkValue(ScaledKernelMark{u(i), shape, p}));
        }
        MarkedPointPattern kept = thin_visible_centres(pat);
        return coords_to_array(kept.base());
      },
      py::arg("shape"), py::arg("centres"), py::arg("intensities"),
      "retain storms whose own peak is not covered at their centre");

  m.def(
      "accumulate_surface",
      [](const std::string& shape_name, const py::array_t<double>& centres,
         const py::array_t<double>& intensities, const std::vector<double>& lower,
         const std::vector<double>& upper, const std::vector<int>& cells) {
        const auto c = centres.unchecked<2>();
        const auto u = intensities.unchecked<1>();
        const int d = static_cast<int>(c.shape(1));
        const ShapeId shape = shape_from_string(shape_name);
        std::vector<StormPoint> storms;
        for (py::ssize_t i = 0; i < c.shape(0); ++i) {
          StormPoint s;
          s.centre.resize(d);
          for (int ax = 0; ax < d; ++ax) s.centre[ax] = c(i, ax);
          s.u = u(i);
          s.shape = shape;
          storms.push_back(std::move(s));
        }
        Grid grid(make_window(lower, upper), cells);
        ExtremalSurface surf = accumulate_surface(storms, grid);
        py::array_t<double> out(cells);
        std::copy(surf.values.begin(), surf.values.end(), out.mutable_data());
        return out;
      },
      py::arg("shape"), py::arg("centres"), py::arg("intensities"), py::arg("lower"),
      py::arg("upper"), py::arg("cells"));

  m.def(
      "fidi_prob",
      [](const std::string& shape_name, double tau,
         const std::vector<std::vector<double>>& points, const std::vector<double>& thresholds,
         const std::vector<double>& lower, const std::vector<double>& upper,
         const std::vector<int>& cells, double psi) {
        const Window w = make_window(lower, upper);
        const StormShape& shape = get_shape(shape_from_string(shape_name), w.dim());
        return fidi_prob_pi(psi, shape, tau, points, thresholds, Grid(w, cells));
      },
      py::arg("shape"), py::arg("tau"), py::arg("points"), py::arg("thresholds"),
      py::arg("lower"), py::arg("upper"), py::arg("cells"), py::arg("psi") = 1.0);

  m.def(
      "visible_centre_intensity",
      [](const std::string& shape_name, double tau, const std::vector<double>& xi,
         const std::vector<double>& lower, const std::vector<double>& upper,
         const std::vector<int>& cells, double psi) {
        const Window w = make_window(lower, upper);
        const StormShape& shape = get_shape(shape_from_string(shape_name), w.dim());
        Grid grid(w, cells);
        const std::vector<GridField> flat{GridField(grid, psi)};
        return estimate_to_dict(
            visible_centre_intensity_fields(shape, tau, xi, grid, flat, psi));
      },
      py::arg("shape"), py::arg("tau"), py::arg("xi"), py::arg("lower"), py::arg("upper"),
      py::arg("cells"), py::arg("psi") = 1.0,
      "visible-centre intensity with a deterministic driving field");

  m.def(
      "envelope_buffer_radius",
      [](const std::string& shape_name, double tau, const std::vector<double>& lower,
         const std::vector<double>& upper, int dim) {
        (void)dim;
        const Window w = make_window(lower, upper);
        return envelope_buffer_radius(get_shape(shape_from_string(shape_name), w.dim()), tau,
                                      w);
      },
      py::arg("shape"), py::arg("tau"), py::arg("lower"), py::arg("upper"), py::arg("dim") = 2);

  m.def(
      "pair_correlation",
      [](const std::vector<py::array_t<double>>& patterns, const std::vector<double>& lower,
         const std::vector<double>& upper, double r_max, int n_bins, double border) {
        const Window w = make_window(lower, upper);
        std::vector<PointPattern> pats;
        for (const auto& a : patterns) pats.push_back(array_to_pattern(a, w));
        auto pcf = pair_correlation(pats, r_max, n_bins, border);
        py::dict d;
        d["radii"] = pcf.radii;
        d["g"] = pcf.g_values;
        d["g_se"] = pcf.g_se;
        d["rho2"] = pcf.rho2_values;
        d["rho2_se"] = pcf.rho2_se;
        return d;
      },
      py::arg("patterns"), py::arg("lower"), py::arg("upper"), py::arg("r_max"),
      py::arg("bins"), py::arg("border"));

  m.def(
      "frechet_cdf_distance",
      [](const std::vector<double>& samples, double z_min) {
        auto d = empirical_cdf_distance(
            samples, [](double z) { return std::exp(-1.0 / z); }, z_min);
        return py::make_tuple(d.distance, d.restricted_empty);
      },
      py::arg("samples"), py::arg("z_min") = 0.0,
      "sup distance between the empirical cdf and exp(-1/z)");
}
