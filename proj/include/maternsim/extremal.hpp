#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "maternsim/gauss_field.hpp"
#include "maternsim/palm.hpp"
#include "maternsim/pattern.hpp"
#include "maternsim/rng.hpp"
#include "maternsim/storm_shape.hpp"

namespace maternsim {

/// One storm: centre s, intensity u > tau, deterministic shape.
struct StormPoint {
  std::vector<double> centre;
  double u;
  ShapeId shape;
};

/// Pointwise maximum of storm contributions on a grid, with the index of the
/// winning storm per cell (-1 where no storm contributes).
struct ExtremalSurface {
  Grid grid;
  std::vector<double> values;
  std::vector<int> contributors;
};

/// Truncated mixed-moving-maxima storm set: Poisson(|w dilated|/tau) centres
/// uniform on the dilated window, intensities Pareto(tau).
std::vector<StormPoint> simulate_m3_truncated(const StormShape& shape, double tau,
                                              const Window& w, double buffer, RngStream& rng);

/// Cox-driven storm set: LGCP ground points with intensity tau^{-1} Psi on the
/// buffered grid, each carrying a Pareto(tau)-scaled kernel mark centred at
/// itself. Returns the marked pattern and the Psi realization (normalized,
/// without the tau^{-1} factor).
std::pair<MarkedPointPattern, GridField> simulate_cox_extremal_points(
    const LgcpSpec& base, double tau, const StormShape& shape, const Grid& grid, double buffer,
    RngStream& rng);

ExtremalSurface accumulate_surface(std::span<const StormPoint> storms, const Grid& grid);
ExtremalSurface accumulate_surface(const MarkedPointPattern& pat, const Grid& grid);

/// Everywhere-domination thinning: a point is deleted iff some other mark
/// function is strictly larger at every test point. Test points are the cell
/// centres of `grid` plus all storm centres, so the survivor set always
/// contains the visible-centre set and every cellwise maximum.
MarkedPointPattern thin_extremal_dominance(const MarkedPointPattern& pat, const Grid& grid);

/// Visible-centre thinning: a point is retained iff its own mark at its own
/// centre is >= every other mark there (ties retain).
MarkedPointPattern thin_visible_centres(const MarkedPointPattern& pat);

/// Finite-dimensional probability P(max surface <= y_i at t_i for all i) of
/// the truncated extremal construction, by Riemann sum of
/// min(1/tau, max_i X(t_i - s)/y_i) over the grid. Deterministic Psi gives the
/// exact expression; a list of field realizations is averaged.
double fidi_prob_pi(double psi_const, const StormShape& shape, double tau,
                    const std::vector<std::vector<double>>& points,
                    const std::vector<double>& thresholds, const Grid& grid);
double fidi_prob_pi(const std::vector<GridField>& psi_fields, const StormShape& shape, double tau,
                    const std::vector<std::vector<double>>& points,
                    const std::vector<double>& thresholds, const Grid& grid);

/// Cellwise max over replicate surfaces, divided by the replicate count.
ExtremalSurface mda_aggregate(std::span<const ExtremalSurface> replicates);

/// Intensity of the visible-centre process at xi:
/// p0 E Psi(xi) X(0) E_field[(1 - exp(-tau^{-1} X(0)^{-1} c)) / c] with
/// c = int X(xi - .) Psi~ over the (buffered) grid and Psi~ from the one-point
/// Palm shift. The c -> 0 limit of the bracket is tau^{-1} X(0)^{-1}.
/// The _fields form takes the Palm-shifted intensity realizations directly
/// (one constant field reproduces the deterministic case exactly).
IntensityEstimate visible_centre_intensity_fields(const StormShape& shape, double tau,
                                                  std::span<const double> xi, const Grid& grid,
                                                  std::span<const GridField> palm_fields,
                                                  double mean_psi_at_xi, double p0 = 1.0);
IntensityEstimate visible_centre_intensity_mc(const LgcpSpec& base, const StormShape& shape,
                                              double tau, std::span<const double> xi,
                                              const Grid& grid, int n_psi, RngStream& rng,
                                              double p0 = 1.0);

/// Second-order intensity of the visible-centre process at (xi, eta): double
/// u-quadrature (substitution u = tau/v, midpoint rule with n_quad nodes per
/// axis) of r(xi) r(eta) r(xi,eta) over the two admissible regions, r-terms
/// averaged over two-point Palm-shifted fields. Exactly symmetric in
/// (xi, eta).
IntensityEstimate visible_centre_intensity2_fields(const StormShape& shape, double tau,
                                                   std::span<const double> xi,
                                                   std::span<const double> eta, const Grid& grid,
                                                   std::span<const GridField> palm_fields,
                                                   double mean_psi_product, int n_quad = 64,
                                                   double p0 = 1.0);
IntensityEstimate visible_centre_intensity2_mc(const LgcpSpec& base, const StormShape& shape,
                                               double tau, std::span<const double> xi,
                                               std::span<const double> eta, const Grid& grid,
                                               int n_psi, RngStream& rng, int n_quad = 64,
                                               double p0 = 1.0);

}  // namespace maternsim
