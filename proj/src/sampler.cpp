#include "maternsim/sampler.hpp"

namespace maternsim {

MarkValue draw_mark(const MarkLaw& law, std::span<const double> location, RngStream& rng) {
  if (const auto* u = std::get_if<UniformScalarLaw>(&law))
    return MarkValue(rng.next_uniform(u->lo, u->hi));
  if (const auto* k = std::get_if<ScaledKernelLaw>(&law)) {
    const double u = k->u_law == KernelIntensityLaw::uniform01 ? rng.next_uniform()
                                                               : rng.next_pareto(k->tau);
    return MarkValue(ScaledKernelMark{u, k->shape, {location.begin(), location.end()}});
  }
  const auto& p = std::get<PairLaw>(law);
  const double a = rng.next_uniform(p.a.lo, p.a.hi);
  const double b = rng.next_uniform(p.b.lo, p.b.hi);
  return MarkValue(PairMark{a, b});
}

PointPattern sample_poisson(double lambda, const Window& w, RngStream& rng) {
  if (lambda < 0.0) throw ConfigError("sample_poisson: lambda must be >= 0");
  const std::uint64_t n = rng.next_poisson(lambda * w.volume());
  PointPattern pat(w);
  std::vector<double> p(w.dim());
  for (std::uint64_t i = 0; i < n; ++i) {
    for (int ax = 0; ax < w.dim(); ++ax)
      p[ax] = rng.next_uniform(w.lower()[ax], w.upper()[ax]);
    pat.push_back(p);
  }
  return pat;
}

PointPattern sample_cox(const GridField& intensity, RngStream& rng) {
  const Grid& grid = intensity.grid();
  const double vol = grid.cell_volume();
  PointPattern pat(grid.window());
  const int d = grid.dim();
  std::vector<double> centre(d), p(d);
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    const double value = intensity.values()[c];
    if (value < 0.0) throw NumericError("sample_cox: negative intensity value in cell");
    if (value == 0.0) continue;
    const std::uint64_t n = rng.next_poisson(value * vol);
    if (n == 0) continue;
    grid.cell_centre(c, centre);
    for (std::uint64_t i = 0; i < n; ++i) {
      for (int ax = 0; ax < d; ++ax)
        p[ax] = centre[ax] + (rng.next_uniform() - 0.5) * grid.cell_width(ax);
      pat.push_back(p);
    }
  }
  return pat;
}

std::pair<PointPattern, GridField> sample_lgcp(const LgcpSpec& spec, const Grid& grid,
                                               RngStream& rng) {
  GridField psi = intensity_field(spec, grid, rng);
  PointPattern pat = sample_cox(psi, rng);
  return {std::move(pat), std::move(psi)};
}

MarkedPointPattern attach_marks(const PointPattern& pat, const MarkLaw& law, RngStream& rng) {
  std::vector<MarkValue> marks;
  marks.reserve(pat.size());
  for (std::size_t i = 0; i < pat.size(); ++i) marks.push_back(draw_mark(law, pat.point(i), rng));
  return MarkedPointPattern(PointPattern(pat.window(), pat.coords()), std::move(marks));
}

}  // namespace maternsim
