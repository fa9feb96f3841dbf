#include "maternsim/extremal.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "maternsim/sampler.hpp"
#include "maternsim/stats.hpp"

namespace maternsim {

std::vector<StormPoint> simulate_m3_truncated(const StormShape& shape, double tau,
                                              const Window& w, double buffer, RngStream& rng) {
  if (!(tau > 0.0)) throw ConfigError("simulate_m3_truncated: tau must be > 0");
  if (buffer < 0.0) throw ConfigError("simulate_m3_truncated: buffer must be >= 0");
  const Window wb = buffer > 0.0 ? w.dilated(buffer) : w;
  const std::uint64_t n = rng.next_poisson(wb.volume() / tau);
  std::vector<StormPoint> storms;
  storms.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    StormPoint s;
    s.centre.resize(wb.dim());
    for (int ax = 0; ax < wb.dim(); ++ax)
      s.centre[ax] = rng.next_uniform(wb.lower()[ax], wb.upper()[ax]);
    s.u = rng.next_pareto(tau);
    s.shape = shape.id();
    storms.push_back(std::move(s));
  }
  return storms;
}

std::pair<MarkedPointPattern, GridField> simulate_cox_extremal_points(
    const LgcpSpec& base, double tau, const StormShape& shape, const Grid& grid, double buffer,
    RngStream& rng) {
  if (!(tau > 0.0)) throw ConfigError("simulate_cox_extremal_points: tau must be > 0");
  const Grid bgrid = grid.buffered(buffer);
  GridField psi = intensity_field(base, bgrid, rng);
  GridField ground(bgrid, psi.values());
  for (double& v : ground.values()) v /= tau;
  PointPattern pat = sample_cox(ground, rng);
  const MarkLaw law = ScaledKernelLaw{KernelIntensityLaw::pareto_tail, tau, shape.id()};
  MarkedPointPattern marked = attach_marks(pat, law, rng);
  return {std::move(marked), std::move(psi)};
}

namespace {

struct StormView {
  const double* centre;
  double u;
  const StormShape* shape;
};

std::vector<StormView> storm_views(std::span<const StormPoint> storms, int dim) {
  std::vector<StormView> v;
  v.reserve(storms.size());
  for (const StormPoint& s : storms)
    v.push_back({s.centre.data(), s.u, &get_shape(s.shape, dim)});
  return v;
}

std::vector<StormView> storm_views(const MarkedPointPattern& pat) {
  std::vector<StormView> v;
  v.reserve(pat.size());
  for (std::size_t i = 0; i < pat.size(); ++i) {
    const ScaledKernelMark& k = pat.mark(i).kernel();
    v.push_back({k.centre.data(), k.u, &get_shape(k.shape, pat.dim())});
  }
  return v;
}

double storm_value(const StormView& s, std::span<const double> t) {
  double d2 = 0.0;
  for (std::size_t ax = 0; ax < t.size(); ++ax) {
    const double d = t[ax] - s.centre[ax];
    d2 += d * d;
  }
  return s.u * s.shape->profile(std::sqrt(d2));
}

ExtremalSurface accumulate(std::span<const StormView> storms, const Grid& grid) {
  ExtremalSurface surf{grid, std::vector<double>(grid.cell_count(), 0.0),
                       std::vector<int>(grid.cell_count(), -1)};
  const int d = grid.dim();
  // per-axis index bounds of the box the storm can influence
  std::vector<int> lo(d), hi(d);
  std::vector<double> t(d);
  for (std::size_t si = 0; si < storms.size(); ++si) {
    const StormView& s = storms[si];
    // contributions below 1e-18 of the storm peak are dropped
    double r_cut = s.shape->radius_for_relative_level(1e-18);
    bool any = true;
    for (int ax = 0; ax < d; ++ax) {
      const double w = grid.cell_width(ax);
      const double lo_edge = grid.window().lower()[ax];
      lo[ax] = std::max(0, static_cast<int>(std::floor((s.centre[ax] - r_cut - lo_edge) / w)));
      hi[ax] = std::min(grid.cells_per_axis()[ax] - 1,
                        static_cast<int>(std::floor((s.centre[ax] + r_cut - lo_edge) / w)));
      if (lo[ax] > hi[ax]) any = false;
    }
    if (!any) continue;
    // iterate the index box
    std::vector<int> idx(lo);
    for (;;) {
      std::size_t flat = 0;
      for (int ax = 0; ax < d; ++ax) {
        flat = flat * grid.cells_per_axis()[ax] + idx[ax];
        t[ax] = grid.window().lower()[ax] + (idx[ax] + 0.5) * grid.cell_width(ax);
      }
      if (s.u * s.shape->peak() > surf.values[flat]) {
        const double v = storm_value(s, t);
        if (v > surf.values[flat]) {
          surf.values[flat] = v;
          surf.contributors[flat] = static_cast<int>(si);
        }
      }
      int ax = d - 1;
      while (ax >= 0 && ++idx[ax] > hi[ax]) idx[ax] = lo[ax], --ax;
      if (ax < 0) break;
    }
  }
  return surf;
}

}  // namespace

ExtremalSurface accumulate_surface(std::span<const StormPoint> storms, const Grid& grid) {
  return accumulate(storm_views(storms, grid.dim()), grid);
}

ExtremalSurface accumulate_surface(const MarkedPointPattern& pat, const Grid& grid) {
  return accumulate(storm_views(pat), grid);
}

MarkedPointPattern thin_extremal_dominance(const MarkedPointPattern& pat, const Grid& grid) {
  const std::size_t n = pat.size();
  MarkedPointPattern out(pat.base().window());
  if (n == 0) return out;
  const std::vector<StormView> storms = storm_views(pat);
  const int d = pat.dim();

  // survivors by construction: every cellwise or centre-wise maximum
  std::vector<char> is_max_winner(n, 0);
  const ExtremalSurface surf = accumulate(storms, grid);
  for (int c : surf.contributors)
    if (c >= 0) is_max_winner[c] = 1;
  for (std::size_t i = 0; i < n; ++i) {
    double best = -1.0;
    std::size_t arg = 0;
    for (std::size_t j = 0; j < n; ++j) {
      const double v = storm_value(storms[j], pat.point(i));
      if (v > best) best = v, arg = j;
    }
    is_max_winner[arg] = 1;
  }

  // candidate dominators sorted by peak, strongest first
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return storms[a].u * storms[a].shape->peak() > storms[b].u * storms[b].shape->peak();
  });

  const std::size_t n_cells = grid.cell_count();
  std::vector<double> t(d);
  std::vector<char> retained(n, 1);
  for (std::size_t i = 0; i < n; ++i) {
    if (is_max_winner[i]) continue;
    const double own_centre_value = storm_value(storms[i], pat.point(i));
    for (std::size_t oj = 0; oj < n && retained[i]; ++oj) {
      const std::size_t j = order[oj];
      if (j == i) continue;
      const StormView& sj = storms[j];
      if (sj.u * sj.shape->peak() <= own_centre_value) break;  // no later j can dominate
      if (storm_value(sj, pat.point(i)) <= own_centre_value) continue;
      // full strict-domination scan over cells, then over all storm centres
      bool dominated = true;
      for (std::size_t c = 0; c < n_cells && dominated; ++c) {
        grid.cell_centre(c, t);
        if (storm_value(sj, t) <= storm_value(storms[i], t)) dominated = false;
      }
      for (std::size_t k = 0; k < n && dominated; ++k) {
        const auto tk = pat.point(k);
        if (storm_value(sj, tk) <= storm_value(storms[i], tk)) dominated = false;
      }
      if (dominated) retained[i] = 0;
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    if (retained[i]) out.push_back(pat.point(i), pat.mark(i));
  return out;
}

MarkedPointPattern thin_visible_centres(const MarkedPointPattern& pat) {
  const std::size_t n = pat.size();
  MarkedPointPattern out(pat.base().window());
  if (n == 0) return out;
  const std::vector<StormView> storms = storm_views(pat);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return storms[a].u * storms[a].shape->peak() > storms[b].u * storms[b].shape->peak();
  });
  for (std::size_t i = 0; i < n; ++i) {
    const double own = storms[i].u * storms[i].shape->peak();  // m_i at its own centre
    bool retained = true;
    for (std::size_t oj = 0; oj < n; ++oj) {
      const std::size_t j = order[oj];
      if (j == i) continue;
      if (storms[j].u * storms[j].shape->peak() <= own) break;  // sorted: no violation possible
      if (storm_value(storms[j], pat.point(i)) > own) {
        retained = false;
        break;
      }
    }
    if (retained) out.push_back(pat.point(i), pat.mark(i));
  }
  return out;
}

namespace {

double fidi_exponent(const GridField* psi, double psi_const, const StormShape& shape, double tau,
                     const std::vector<std::vector<double>>& points,
                     const std::vector<double>& thresholds, const Grid& grid) {
  const double inv_tau = 1.0 / tau;
  const double vol = grid.cell_volume();
  std::vector<double> c(grid.dim());
  double s = 0.0;
  for (std::size_t cell = 0; cell < grid.cell_count(); ++cell) {
    grid.cell_centre(cell, c);
    double m = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      const double v = shape.value(c, points[i]) / thresholds[i];
      if (v > m) m = v;
    }
    const double integrand = std::min(inv_tau, m);
    s += integrand * (psi ? psi->value_at(c) : psi_const);
  }
  return s * vol;
}

void check_fidi_args(const StormShape& shape, double tau,
                     const std::vector<std::vector<double>>& points,
                     const std::vector<double>& thresholds) {
  if (!(tau > 0.0)) throw ConfigError("fidi_prob_pi: tau must be > 0");
  if (points.empty() || points.size() != thresholds.size())
    throw ConfigError("fidi_prob_pi: one threshold per evaluation point required");
  for (double y : thresholds)
    if (!(y > 0.0)) throw ConfigError("fidi_prob_pi: thresholds must be > 0");
  for (const auto& p : points)
    if (static_cast<int>(p.size()) != shape.dim())
      throw ConfigError("fidi_prob_pi: point dimension mismatch");
}

}  // namespace

double fidi_prob_pi(double psi_const, const StormShape& shape, double tau,
                    const std::vector<std::vector<double>>& points,
                    const std::vector<double>& thresholds, const Grid& grid) {
  check_fidi_args(shape, tau, points, thresholds);
  if (psi_const < 0.0) throw ConfigError("fidi_prob_pi: psi must be >= 0");
  return std::exp(-fidi_exponent(nullptr, psi_const, shape, tau, points, thresholds, grid));
}

double fidi_prob_pi(const std::vector<GridField>& psi_fields, const StormShape& shape, double tau,
                    const std::vector<std::vector<double>>& points,
                    const std::vector<double>& thresholds, const Grid& grid) {
  check_fidi_args(shape, tau, points, thresholds);
  if (psi_fields.empty()) throw ConfigError("fidi_prob_pi: at least one field required");
  std::vector<double> terms(psi_fields.size());
  for (std::size_t k = 0; k < psi_fields.size(); ++k)
    terms[k] = std::exp(-fidi_exponent(&psi_fields[k], 0.0, shape, tau, points, thresholds, grid));
  return pairwise_sum(terms) / static_cast<double>(terms.size());
}

ExtremalSurface mda_aggregate(std::span<const ExtremalSurface> replicates) {
  if (replicates.empty()) throw ConfigError("mda_aggregate: at least one replicate required");
  const Grid& grid = replicates[0].grid;
  for (const ExtremalSurface& s : replicates)
    if (!(s.grid == grid)) throw ConfigError("mda_aggregate: replicate grids must match");
  const double inv_n = 1.0 / static_cast<double>(replicates.size());
  ExtremalSurface out{grid, std::vector<double>(grid.cell_count(), 0.0),
                      std::vector<int>(grid.cell_count(), -1)};
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    double best = 0.0;
    int arg = -1;
    for (std::size_t r = 0; r < replicates.size(); ++r) {
      if (replicates[r].values[c] > best) {
        best = replicates[r].values[c];
        arg = static_cast<int>(r);  // winning replicate
      }
    }
    out.values[c] = best * inv_n;
    out.contributors[c] = arg;
  }
  return out;
}

IntensityEstimate visible_centre_intensity_fields(const StormShape& shape, double tau,
                                                  std::span<const double> xi, const Grid& grid,
                                                  std::span<const GridField> palm_fields,
                                                  double mean_psi_at_xi, double p0) {
  if (!(tau > 0.0)) throw ConfigError("visible_centre_intensity: tau must be > 0");
  if (palm_fields.empty()) throw ConfigError("visible_centre_intensity: fields required");
  const std::size_t n_cells = grid.cell_count();
  const double vol = grid.cell_volume();
  std::vector<double> w(n_cells);
  std::vector<double> c(grid.dim());
  for (std::size_t cell = 0; cell < n_cells; ++cell) {
    grid.cell_centre(cell, c);
    w[cell] = shape.value(xi, c) * vol;  // X(xi - c) * cell volume
  }
  const double x0 = shape.peak();
  const double scale = 1.0 / (tau * x0);
  std::vector<double> brackets(palm_fields.size());
  std::vector<double> centre(grid.dim());
  for (std::size_t k = 0; k < palm_fields.size(); ++k) {
    const bool aligned = palm_fields[k].grid() == grid;
    double cw = 0.0;
    for (std::size_t cell = 0; cell < n_cells; ++cell) {
      if (w[cell] == 0.0) continue;
      double psi;
      if (aligned) {
        psi = palm_fields[k].values()[cell];
      } else {
        grid.cell_centre(cell, centre);
        psi = palm_fields[k].value_at(centre);
      }
      cw += w[cell] * psi;
    }
    brackets[k] = cw > 0.0 ? -std::expm1(-scale * cw) / cw : scale;
  }
  const MeanSd ms = mean_sd(brackets);
  const double factor = p0 * mean_psi_at_xi * x0;
  IntensityEstimate out;
  out.value = factor * ms.mean;
  out.std_error = factor * ms.std_error;
  out.n_outer = palm_fields.size();
  out.n_inner = n_cells;
  return out;
}

IntensityEstimate visible_centre_intensity_mc(const LgcpSpec& base, const StormShape& shape,
                                              double tau, std::span<const double> xi,
                                              const Grid& grid, int n_psi, RngStream& rng,
                                              double p0) {
  if (n_psi < 1) throw ConfigError("visible_centre_intensity_mc: n_psi must be >= 1");
  const RngStream stream_base = rng.derive(rng.next_u64());
  const LgcpSpec shifted = palm_shift(base, {{xi.begin(), xi.end()}});
  const GrfSampler sampler(grid, base.cov);
  const std::vector<double> mean_vec = sampler.mean_vector(shifted);
  std::vector<GridField> fields;
  fields.reserve(n_psi);
  for (int k = 0; k < n_psi; ++k) {
    RngStream field_rng = stream_base.derive(k);
    GridField f = sampler.sample(mean_vec, field_rng);
    for (double& v : f.values()) v = std::exp(v);
    fields.push_back(std::move(f));
  }
  return visible_centre_intensity_fields(shape, tau, xi, grid, fields, base.intensity_at(xi), p0);
}

IntensityEstimate visible_centre_intensity2_fields(const StormShape& shape, double tau,
                                                   std::span<const double> xi,
                                                   std::span<const double> eta, const Grid& grid,
                                                   std::span<const GridField> palm_fields,
                                                   double mean_psi_product, int n_quad,
                                                   double p0) {
  if (!(tau > 0.0)) throw ConfigError("visible_centre_intensity2: tau must be > 0");
  if (palm_fields.empty() || n_quad < 2)
    throw ConfigError("visible_centre_intensity2: fields and n_quad >= 2 required");
  if (squared_distance(xi, eta) == 0.0)
    throw ConfigError("visible_centre_intensity2: xi and eta must differ");
  std::vector<double> a(xi.begin(), xi.end()), b(eta.begin(), eta.end());
  if (std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end())) std::swap(a, b);

  const int n_psi = static_cast<int>(palm_fields.size());
  const std::size_t n_cells = grid.cell_count();
  const double vol = grid.cell_volume();
  const double x0 = shape.peak();
  const double xd = shape.profile(distance(a, b));  // X at the separation

  // per-field integrals against the two kernels, and sorted ratio prefix sums
  // for the min-coupling term
  struct FieldData {
    double a_int = 0.0;
    double b_int = 0.0;
    std::vector<double> q;         // sorted A_c/B_c over cells with A_c, B_c > 0
    std::vector<double> prefix_a;  // prefix sums of A_c in q-order
    std::vector<double> suffix_b;  // suffix sums of B_c in q-order
  };
  std::vector<FieldData> fields(n_psi);
  {
    std::vector<double> c(grid.dim());
    std::vector<double> wa(n_cells), wb(n_cells);
    for (std::size_t cell = 0; cell < n_cells; ++cell) {
      grid.cell_centre(cell, c);
      wa[cell] = shape.value(std::span<const double>(a), c) * vol;
      wb[cell] = shape.value(std::span<const double>(b), c) * vol;
    }
    for (int k = 0; k < n_psi; ++k) {
      const bool aligned = palm_fields[k].grid() == grid;
      FieldData& fd = fields[k];
      std::vector<std::pair<double, std::pair<double, double>>> entries;
      for (std::size_t cell = 0; cell < n_cells; ++cell) {
        double psi;
        if (aligned) {
          psi = palm_fields[k].values()[cell];
        } else {
          grid.cell_centre(cell, c);
          psi = palm_fields[k].value_at(c);
        }
        const double ac = wa[cell] * psi;
        const double bc = wb[cell] * psi;
        fd.a_int += ac;
        fd.b_int += bc;
        if (ac > 0.0 && bc > 0.0) entries.push_back({ac / bc, {ac, bc}});
      }
      std::sort(entries.begin(), entries.end(),
                [](const auto& l, const auto& r) { return l.first < r.first; });
      const std::size_t m = entries.size();
      fd.q.resize(m);
      fd.prefix_a.assign(m + 1, 0.0);
      fd.suffix_b.assign(m + 1, 0.0);
      for (std::size_t i = 0; i < m; ++i) {
        fd.q[i] = entries[i].first;
        fd.prefix_a[i + 1] = fd.prefix_a[i] + entries[i].second.first;
      }
      for (std::size_t i = m; i-- > 0;)
        fd.suffix_b[i] = fd.suffix_b[i + 1] + entries[i].second.second;
    }
  }

  // quadrature nodes u = tau / v, composite midpoint in v
  std::vector<double> u_nodes(n_quad);
  for (int i = 0; i < n_quad; ++i) u_nodes[i] = tau / ((i + 0.5) / n_quad);

  auto log_mean_exp = [](std::span<const double> xs) {
    const double mx = *std::max_element(xs.begin(), xs.end());
    double s = 0.0;
    for (double x : xs) s += std::exp(x - mx);
    return mx + std::log(s / static_cast<double>(xs.size()));
  };

  // Double u-integral of r(xi) r(eta) r(xi,eta) over the admissible regions.
  // With u = tau/v the measure u^-2 du becomes tau^-1 dv per axis, so the
  // integral is tau^-2 times the midpoint average over the v-nodes.
  auto integrate = [&](std::span<const std::size_t> members) {
    std::vector<double> buf(members.size());
    std::vector<double> log_r_a(n_quad), log_r_b(n_quad);
    for (int i = 0; i < n_quad; ++i) {
      for (std::size_t k = 0; k < members.size(); ++k)
        buf[k] = -fields[members[k]].a_int / (u_nodes[i] * x0);
      log_r_a[i] = log_mean_exp(buf);
      for (std::size_t k = 0; k < members.size(); ++k)
        buf[k] = -fields[members[k]].b_int / (u_nodes[i] * x0);
      log_r_b[i] = log_mean_exp(buf);
    }
    double total = 0.0;
    for (int i = 0; i < n_quad; ++i) {
      const double u_a = u_nodes[i];
      for (int j = 0; j < n_quad; ++j) {
        const double u_b = u_nodes[j];
        const bool region_pos = xd == 0.0 || u_a < u_b * x0 / xd;
        const bool region_neg = xd > 0.0 && u_b > u_a * x0 / xd;
        if (!region_pos && !region_neg) continue;
        const double theta = u_a / u_b;
        for (std::size_t k = 0; k < members.size(); ++k) {
          const FieldData& fd = fields[members[k]];
          const std::size_t split =
              std::upper_bound(fd.q.begin(), fd.q.end(), theta) - fd.q.begin();
          buf[k] = fd.prefix_a[split] / (u_a * x0) + fd.suffix_b[split] / (u_b * x0);
        }
        const double term = std::exp(log_r_a[i] + log_r_b[j] + log_mean_exp(buf));
        if (region_pos) total += term;
        if (region_neg) total -= term;
      }
    }
    return total / (tau * tau * static_cast<double>(n_quad) * n_quad);
  };

  std::vector<std::size_t> all(n_psi);
  std::iota(all.begin(), all.end(), std::size_t{0});
  const double factor = p0 * p0 * mean_psi_product;

  IntensityEstimate out;
  out.value = factor * integrate(all);
  out.n_outer = static_cast<std::size_t>(n_psi);
  out.n_inner = static_cast<std::size_t>(n_quad) * n_quad;

  // group-split standard error over fields
  const int n_groups = std::min(8, n_psi);
  if (n_groups >= 2) {
    std::vector<double> group_values(n_groups);
    for (int g = 0; g < n_groups; ++g) {
      std::vector<std::size_t> members;
      for (int k = g; k < n_psi; k += n_groups) members.push_back(k);
      group_values[g] = factor * integrate(members);
    }
    out.std_error = mean_sd(group_values).std_error;
  }
  return out;
}

IntensityEstimate visible_centre_intensity2_mc(const LgcpSpec& base, const StormShape& shape,
                                               double tau, std::span<const double> xi,
                                               std::span<const double> eta, const Grid& grid,
                                               int n_psi, RngStream& rng, int n_quad, double p0) {
  if (n_psi < 1) throw ConfigError("visible_centre_intensity2_mc: n_psi must be >= 1");
  const RngStream stream_base = rng.derive(rng.next_u64());
  const LgcpSpec shifted =
      palm_shift(base, {{xi.begin(), xi.end()}, {eta.begin(), eta.end()}});
  const GrfSampler sampler(grid, base.cov);
  const std::vector<double> mean_vec = sampler.mean_vector(shifted);
  std::vector<GridField> fields;
  fields.reserve(n_psi);
  for (int k = 0; k < n_psi; ++k) {
    RngStream field_rng = stream_base.derive(k);
    GridField f = sampler.sample(mean_vec, field_rng);
    for (double& v : f.values()) v = std::exp(v);
    fields.push_back(std::move(f));
  }
  return visible_centre_intensity2_fields(shape, tau, xi, eta, grid, fields,
                                          base.second_order_intensity(xi, eta), n_quad, p0);
}

}  // namespace maternsim
