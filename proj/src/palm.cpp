#include "maternsim/palm.hpp"

#include <algorithm>
#include <cmath>

#include "maternsim/stats.hpp"

namespace maternsim {

double matern2_retaining_prob(double lambda, double R, int d, double m) {
  if (lambda < 0.0) throw ConfigError("matern2_retaining_prob: lambda must be >= 0");
  if (m < 0.0 || m > 1.0) throw ConfigError("matern2_retaining_prob: mark must lie in [0,1]");
  return std::exp(-lambda * ball_volume(d, R) * m);
}

double matern2_thinned_intensity(double lambda, double R, int d) {
  if (lambda < 0.0) throw ConfigError("matern2_thinned_intensity: lambda must be >= 0");
  if (R < 0.0) throw ConfigError("matern2_thinned_intensity: R must be >= 0");
  if (R == 0.0) return lambda;  // no competition limit
  const double b = ball_volume(d, R);
  return -std::expm1(-lambda * b) / b;
}

double matern1_thinned_intensity(double lambda, double R, int d) {
  if (lambda < 0.0) throw ConfigError("matern1_thinned_intensity: lambda must be >= 0");
  return lambda * std::exp(-lambda * ball_volume(d, R));
}

GroundProcess GroundProcess::poisson(double lambda, Window w) {
  GroundProcess g;
  g.poisson_lambda = lambda;
  g.window = std::move(w);
  return g;
}

GroundProcess GroundProcess::cox(LgcpSpec spec, Grid grid) {
  GroundProcess g;
  g.lgcp = std::move(spec);
  g.grid = std::move(grid);
  return g;
}

IntensityEstimate estimate_generating_functional(
    const GroundProcess& source, const std::function<double(std::span<const double>)>& u,
    int n_reps, RngStream& rng) {
  if (n_reps < 1) throw ConfigError("estimate_generating_functional: n_reps must be >= 1");
  const RngStream base = rng.derive(rng.next_u64());
  std::optional<GrfSampler> sampler;
  if (source.lgcp) sampler.emplace(*source.grid, source.lgcp->cov);

  std::vector<double> products(n_reps);
  for (int r = 0; r < n_reps; ++r) {
    RngStream s = base.derive(r);
    PointPattern pat = [&] {
      if (source.poisson_lambda) return sample_poisson(*source.poisson_lambda, *source.window, s);
      GridField w = sampler->sample(*source.lgcp, s);
      for (double& v : w.values()) v = std::exp(v);
      return sample_cox(w, s);
    }();
    double prod = 1.0;
    for (std::size_t i = 0; i < pat.size(); ++i) {
      const double v = u(pat.point(i));
      if (v < 0.0 || v > 1.0)
        throw ConfigError("estimate_generating_functional: u must take values in [0,1]");
      prod *= v;
    }
    products[r] = prod;
  }
  const MeanSd ms = mean_sd(products);
  IntensityEstimate out;
  out.value = ms.mean;
  out.std_error = ms.std_error;
  out.n_outer = static_cast<std::size_t>(n_reps);
  out.n_inner = 1;
  return out;
}

namespace {

const MarkValue kNoMark(0.0);

// cell weights vol * mark-inner-average of zeta*p against the competitor mark
// law, for a fixed own mark at xi. Cells beyond the interaction range carry
// weight zero and are skipped downstream.
std::vector<double> competition_weights(const ThinningModel& model,
                                        const std::optional<MarkLaw>& marklaw,
                                        std::span<const double> xi, const MarkValue& own,
                                        const Grid& grid, int n_inner, RngStream& inner_rng) {
  const std::size_t n = grid.cell_count();
  const double vol = grid.cell_volume();
  const double range2 = model.interaction_range * model.interaction_range;
  std::vector<double> w(n, 0.0);
  std::vector<double> c(grid.dim());
  for (std::size_t cell = 0; cell < n; ++cell) {
    grid.cell_centre(cell, c);
    if (squared_distance(xi, c) > range2) continue;
    double acc = 0.0;
    if (marklaw) {
      for (int k = 0; k < n_inner; ++k) {
        const MarkValue m = draw_mark(*marklaw, c, inner_rng);
        if (model.zeta(xi, own, c, m)) acc += model.p(xi, own, c, m);
      }
      acc /= n_inner;
    } else if (model.zeta(xi, own, c, kNoMark)) {
      acc = model.p(xi, own, c, kNoMark);
    }
    w[cell] = acc * vol;
  }
  return w;
}

void warn_if_coarse(const ThinningModel& model, const Grid& grid, IntensityEstimate& est) {
  if (std::isfinite(model.interaction_range) && model.interaction_range > 0.0 &&
      grid.max_cell_diameter() > model.interaction_range / 5.0)
    est.warnings.push_back("grid cell diameter exceeds interaction range / 5");
}

}  // namespace

IntensityEstimate first_order_intensity_mc(const LgcpSpec& lgcp, const ThinningModel& model,
                                           const std::optional<MarkLaw>& marklaw,
                                           std::span<const double> xi, const Grid& grid,
                                           int n_psi, int n_mark, RngStream& rng,
                                           int n_mark_inner) {
  if (n_psi < 1 || n_mark < 1 || n_mark_inner < 1)
    throw ConfigError("first_order_intensity_mc: sample counts must be >= 1");
  const RngStream base = rng.derive(rng.next_u64());
  const LgcpSpec shifted = palm_shift(lgcp, {{xi.begin(), xi.end()}});
  const GrfSampler sampler(grid, lgcp.cov);
  const std::size_t n_cells = grid.cell_count();
  const std::vector<double> mean_vec = sampler.mean_vector(shifted);

  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(n_psi) * n_mark);
  for (int j = 0; j < n_mark; ++j) {
    RngStream mark_rng = base.derive(2 * j);
    RngStream inner_rng = base.derive(2 * j + 1);
    const MarkValue own = marklaw ? draw_mark(*marklaw, xi, mark_rng) : kNoMark;
    const std::vector<double> w =
        competition_weights(model, marklaw, xi, own, grid, n_mark_inner, inner_rng);
    for (int i = 0; i < n_psi; ++i) {
      RngStream field_rng = base.derive((static_cast<std::uint64_t>(j) << 32) ^ (0x100000ULL + i));
      GridField field = sampler.sample(mean_vec, field_rng);
      double s = 0.0;
      for (std::size_t c = 0; c < n_cells; ++c)
        if (w[c] != 0.0) s += w[c] * std::exp(field.values()[c]);
      terms.push_back(std::exp(-s));
    }
  }
  const MeanSd ms = mean_sd(terms);
  const double rho = lgcp.intensity_at(xi);
  IntensityEstimate out;
  out.value = model.p0 * rho * ms.mean;
  out.std_error = model.p0 * rho * ms.std_error;
  out.n_outer = static_cast<std::size_t>(n_mark);
  out.n_inner = static_cast<std::size_t>(n_psi);
  warn_if_coarse(model, grid, out);
  return out;
}

IntensityEstimate second_order_intensity_mc(const LgcpSpec& lgcp, const ThinningModel& model,
                                            const std::optional<MarkLaw>& marklaw,
                                            std::span<const double> xi,
                                            std::span<const double> eta, const Grid& grid,
                                            int n_psi, int n_mark, RngStream& rng,
                                            int n_mark_inner) {
  if (n_psi < 1 || n_mark < 1 || n_mark_inner < 1)
    throw ConfigError("second_order_intensity_mc: sample counts must be >= 1");
  if (squared_distance(xi, eta) == 0.0)
    throw ConfigError("second_order_intensity_mc: xi and eta must differ");
  // canonical order makes the estimator exactly symmetric in (xi, eta)
  std::vector<double> a(xi.begin(), xi.end()), b(eta.begin(), eta.end());
  if (std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end())) std::swap(a, b);

  const RngStream base = rng.derive(rng.next_u64());
  const LgcpSpec shifted = palm_shift(lgcp, {a, b});
  const GrfSampler sampler(grid, lgcp.cov);
  const std::size_t n_cells = grid.cell_count();
  const double range2 = model.interaction_range * model.interaction_range;
  const std::vector<double> mean_vec = sampler.mean_vector(shifted);

  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(n_psi) * n_mark);
  std::vector<double> c(grid.dim());
  for (int j = 0; j < n_mark; ++j) {
    RngStream mark_rng = base.derive(2 * j);
    RngStream inner_rng = base.derive(2 * j + 1);
    const MarkValue ma = marklaw ? draw_mark(*marklaw, a, mark_rng) : kNoMark;
    const MarkValue mb = marklaw ? draw_mark(*marklaw, b, mark_rng) : kNoMark;
    // pair factor h(a,b) h(b,a)
    double pair_factor = 1.0;
    if (squared_distance(a, b) <= range2) {
      if (model.zeta(a, ma, b, mb)) pair_factor *= 1.0 - model.p(a, ma, b, mb);
      if (model.zeta(b, mb, a, ma)) pair_factor *= 1.0 - model.p(b, mb, a, ma);
    }
    // cell weights vol * inner-average of 1 - h(a,.) h(b,.)
    const double vol = grid.cell_volume();
    std::vector<double> w(n_cells, 0.0);
    for (std::size_t cell = 0; cell < n_cells; ++cell) {
      grid.cell_centre(cell, c);
      const bool near_a = squared_distance(a, c) <= range2;
      const bool near_b = squared_distance(b, c) <= range2;
      if (!near_a && !near_b) continue;
      double acc = 0.0;
      const int reps = marklaw ? n_mark_inner : 1;
      for (int k = 0; k < reps; ++k) {
        const MarkValue m = marklaw ? draw_mark(*marklaw, c, inner_rng) : kNoMark;
        double ha = 1.0, hb = 1.0;
        if (near_a && model.zeta(a, ma, c, m)) ha = 1.0 - model.p(a, ma, c, m);
        if (near_b && model.zeta(b, mb, c, m)) hb = 1.0 - model.p(b, mb, c, m);
        acc += 1.0 - ha * hb;
      }
      w[cell] = acc / reps * vol;
    }
    for (int i = 0; i < n_psi; ++i) {
      RngStream field_rng = base.derive((static_cast<std::uint64_t>(j) << 32) ^ (0x100000ULL + i));
      GridField field = sampler.sample(mean_vec, field_rng);
      double s = 0.0;
      for (std::size_t cell = 0; cell < n_cells; ++cell)
        if (w[cell] != 0.0) s += w[cell] * std::exp(field.values()[cell]);
      terms.push_back(pair_factor * std::exp(-s));
    }
  }
  const MeanSd ms = mean_sd(terms);
  const double rho2 = lgcp.second_order_intensity(a, b);
  IntensityEstimate out;
  out.value = model.p0 * model.p0 * rho2 * ms.mean;
  out.std_error = model.p0 * model.p0 * rho2 * ms.std_error;
  out.n_outer = static_cast<std::size_t>(n_mark);
  out.n_inner = static_cast<std::size_t>(n_psi);
  warn_if_coarse(model, grid, out);
  return out;
}

}  // namespace maternsim
