#pragma once

#include <functional>
#include <span>
#include <vector>

#include "maternsim/palm.hpp"
#include "maternsim/pattern.hpp"

namespace maternsim {

/// Empirical pair-correlation and pair-density estimates per distance bin.
struct PairCorrelationEstimate {
  std::vector<double> radii;        // bin centres, strictly increasing
  std::vector<double> g_values;     // pair correlation per bin
  std::vector<double> g_se;         // across-replicate standard error of g
  std::vector<double> rho2_values;  // second-order intensity per bin
  std::vector<double> rho2_se;
  std::vector<double> counts;       // mean ordered-pair count per replicate
};

/// Mean count per unit volume over a region, with across-replicate SE.
IntensityEstimate box_intensity(std::span<const PointPattern> patterns, const Window& region);

/// Translation-free minus-sampling estimator: ordered pairs (x, y) with x in
/// the window eroded by `border`, binned by distance, normalized by the
/// pooled squared intensity, shell volume and eroded volume.
PairCorrelationEstimate pair_correlation(std::span<const PointPattern> patterns, double r_max,
                                         int n_bins, double border);

struct CdfDistance {
  double distance = 0.0;
  bool restricted_empty = false;  // no sample reached z_min; distance is 0 by convention
};

/// sup over sample points >= z_min of |empirical CDF - reference CDF|
/// (two-sided, standard KS form).
CdfDistance empirical_cdf_distance(std::span<const double> samples,
                                   const std::function<double(double)>& cdf, double z_min);

}  // namespace maternsim
