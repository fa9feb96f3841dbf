#include "maternsim/estimators.hpp"

#include <algorithm>
#include <cmath>

#include "maternsim/stats.hpp"

namespace maternsim {

IntensityEstimate box_intensity(std::span<const PointPattern> patterns, const Window& region) {
  if (patterns.size() < 2) throw ConfigError("box_intensity: at least two replicates required");
  const double vol = region.volume();
  if (!(vol > 0.0)) throw ConfigError("box_intensity: region volume must be > 0");
  for (const PointPattern& p : patterns) {
    for (int ax = 0; ax < region.dim(); ++ax)
      if (region.lower()[ax] < p.window().lower()[ax] - 1e-12 ||
          region.upper()[ax] > p.window().upper()[ax] + 1e-12)
        throw ConfigError("box_intensity: region must lie inside the pattern window");
  }
  std::vector<double> values(patterns.size());
  for (std::size_t r = 0; r < patterns.size(); ++r) {
    std::size_t count = 0;
    for (std::size_t i = 0; i < patterns[r].size(); ++i)
      if (region.contains(patterns[r].point(i))) ++count;
    values[r] = static_cast<double>(count) / vol;
  }
  const MeanSd ms = mean_sd(values);
  IntensityEstimate out;
  out.value = ms.mean;
  out.std_error = ms.std_error;
  out.n_outer = patterns.size();
  out.n_inner = 1;
  return out;
}

PairCorrelationEstimate pair_correlation(std::span<const PointPattern> patterns, double r_max,
                                         int n_bins, double border) {
  if (patterns.empty()) throw ConfigError("pair_correlation: patterns required");
  if (n_bins < 1) throw ConfigError("pair_correlation: n_bins must be >= 1");
  if (!(r_max > 0.0)) throw ConfigError("pair_correlation: r_max must be > 0");
  const Window& w = patterns[0].window();
  if (!(r_max < 0.5 * w.min_side()))
    throw ConfigError("pair_correlation: r_max must be below half the shortest window side");
  const int d = w.dim();
  const Window eroded = border > 0.0 ? w.eroded(border) : w;
  const double eroded_vol = eroded.volume();
  const double bin_width = r_max / n_bins;

  // pooled intensity over the full windows
  double total_points = 0.0;
  for (const PointPattern& p : patterns) total_points += static_cast<double>(p.size());
  const double lambda_hat = total_points / (w.volume() * static_cast<double>(patterns.size()));

  std::vector<std::vector<double>> per_rep_density(n_bins,
                                                   std::vector<double>(patterns.size(), 0.0));
  std::vector<double> mean_counts(n_bins, 0.0);
  for (std::size_t rep = 0; rep < patterns.size(); ++rep) {
    const PointPattern& p = patterns[rep];
    std::vector<std::size_t> bin_counts(n_bins, 0);
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (!eroded.contains(p.point(i))) continue;
      for (std::size_t j = 0; j < p.size(); ++j) {
        if (j == i) continue;
        const double dist = distance(p.point(i), p.point(j));
        if (dist >= r_max) continue;
        const int bin = std::min(n_bins - 1, static_cast<int>(dist / bin_width));
        ++bin_counts[bin];
      }
    }
    for (int bin = 0; bin < n_bins; ++bin) {
      const double shell =
          ball_volume(d, (bin + 1) * bin_width) - ball_volume(d, bin * bin_width);
      per_rep_density[bin][rep] =
          static_cast<double>(bin_counts[bin]) / (eroded_vol * shell);
      mean_counts[bin] += static_cast<double>(bin_counts[bin]);
    }
  }

  PairCorrelationEstimate out;
  out.radii.resize(n_bins);
  out.g_values.resize(n_bins);
  out.g_se.resize(n_bins);
  out.rho2_values.resize(n_bins);
  out.rho2_se.resize(n_bins);
  out.counts.resize(n_bins);
  const double lambda2 = lambda_hat * lambda_hat;
  for (int bin = 0; bin < n_bins; ++bin) {
    const MeanSd ms = mean_sd(per_rep_density[bin]);
    out.radii[bin] = (bin + 0.5) * bin_width;
    out.rho2_values[bin] = ms.mean;
    out.rho2_se[bin] = patterns.size() > 1 ? ms.std_error : 0.0;
    out.g_values[bin] = lambda2 > 0.0 ? ms.mean / lambda2 : 0.0;
    out.g_se[bin] = lambda2 > 0.0 && patterns.size() > 1 ? ms.std_error / lambda2 : 0.0;
    out.counts[bin] = mean_counts[bin] / static_cast<double>(patterns.size());
  }
  return out;
}

CdfDistance empirical_cdf_distance(std::span<const double> samples,
                                   const std::function<double(double)>& cdf, double z_min) {
  if (samples.empty()) throw ConfigError("empirical_cdf_distance: samples required");
  std::vector<double> xs(samples.begin(), samples.end());
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  CdfDistance out;
  bool any = false;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] < z_min) continue;
    any = true;
    const double f = cdf(xs[i]);
    const double hi = (static_cast<double>(i) + 1.0) / n;
    const double lo = static_cast<double>(i) / n;
    out.distance = std::max(out.distance, std::max(std::abs(hi - f), std::abs(f - lo)));
  }
  out.restricted_empty = !any;
  return out;
}

}  // namespace maternsim
