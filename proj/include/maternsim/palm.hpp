#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "maternsim/gauss_field.hpp"
#include "maternsim/sampler.hpp"
#include "maternsim/thinning.hpp"

namespace maternsim {

/// Monte Carlo estimate with its standard error and sample sizes.
struct IntensityEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t n_outer = 0;
  std::size_t n_inner = 0;
  std::vector<std::string> warnings;
};

/// Retaining probability of a scalar-mark hard-core point with mark m:
/// exp(-lambda |B_R| m).
double matern2_retaining_prob(double lambda, double R, int d, double m);

/// Intensity of the scalar-mark hard-core process:
/// |B_R|^{-1} (1 - exp(-lambda |B_R|)); the R = 0 limit is lambda.
double matern2_thinned_intensity(double lambda, double R, int d);

/// Intensity of the plain hard-core process: lambda exp(-lambda |B_R|).
double matern1_thinned_intensity(double lambda, double R, int d);

/// Ground process for generating-functional estimation: homogeneous Poisson
/// on a window or an LGCP on a grid.
struct GroundProcess {
  std::optional<double> poisson_lambda;
  std::optional<Window> window;
  std::optional<LgcpSpec> lgcp;
  std::optional<Grid> grid;

  static GroundProcess poisson(double lambda, Window w);
  static GroundProcess cox(LgcpSpec spec, Grid g);
};

/// Monte Carlo estimate of E prod_{x in Phi} u(x) for a test function with
/// values in [0,1].
IntensityEstimate estimate_generating_functional(
    const GroundProcess& source, const std::function<double(std::span<const double>)>& u,
    int n_reps, RngStream& rng);

/// Nested Monte Carlo evaluation of the thinned first-order intensity at xi:
/// p0 * rho(xi) * E_mark E_field exp(-sum_cells mark-averaged(zeta p) Psi~ vol),
/// with Psi~ simulated from the one-point Palm shift of `lgcp` on `grid`.
/// The grid must cover the interaction neighbourhood of xi. Terms are iid
/// across (mark, field) pairs, so value +- std_error is an honest interval.
IntensityEstimate first_order_intensity_mc(const LgcpSpec& lgcp, const ThinningModel& model,
                                           const std::optional<MarkLaw>& marklaw,
                                           std::span<const double> xi, const Grid& grid,
                                           int n_psi, int n_mark, RngStream& rng,
                                           int n_mark_inner = 32);

/// Same scheme for the thinned second-order intensity at (xi, eta), with the
/// two-point Palm shift and the pair factor h(xi,eta) h(eta,xi). Arguments are
/// canonicalized so the estimate is exactly symmetric in (xi, eta).
IntensityEstimate second_order_intensity_mc(const LgcpSpec& lgcp, const ThinningModel& model,
                                            const std::optional<MarkLaw>& marklaw,
                                            std::span<const double> xi,
                                            std::span<const double> eta, const Grid& grid,
                                            int n_psi, int n_mark, RngStream& rng,
                                            int n_mark_inner = 32);

}  // namespace maternsim
