#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "maternsim/geometry.hpp"
#include "maternsim/pattern.hpp"
#include "maternsim/rng.hpp"

namespace maternsim {

enum class CovFamily { exponential, squared_exponential, matern32 };

std::string to_string(CovFamily f);
CovFamily cov_family_from_string(const std::string& name);

/// Stationary covariance model C(x,y) = sigma2 * corr(|x-y| / range).
struct CovarianceModel {
  CovFamily family = CovFamily::exponential;
  double sigma2 = 1.0;
  double range = 1.0;

  CovarianceModel() = default;
  CovarianceModel(CovFamily f, double s2, double rho);

  double correlation(double r) const;
  double operator()(std::span<const double> a, std::span<const double> b) const {
    return sigma2 * correlation(distance(a, b));
  }
};

/// Mean function of the Gaussian field: a constant or a tabulated field.
struct MeanFunction {
  double constant = 0.0;
  std::optional<GridField> table;

  MeanFunction() = default;
  explicit MeanFunction(double c) : constant(c) {}
  explicit MeanFunction(GridField t) : table(std::move(t)) {}

  double base_at(std::span<const double> x) const {
    return table ? table->value_at(x) : constant;
  }
};

/// Log-Gaussian Cox process specification: Psi = exp(W), W ~ GRF(mean, cov).
/// `log_scale_offset` shifts the mean (the -log(tau) device of the extremal
/// construction); shift anchors add C(., anchor) terms, turning the spec into
/// the one- or two-point Palm version of itself.
struct LgcpSpec {
  MeanFunction mean;
  CovarianceModel cov;
  double log_scale_offset = 0.0;
  std::vector<std::vector<double>> anchors;

  /// Full mean including offset and Palm anchor shifts.
  double mean_at(std::span<const double> x) const {
    double m = mean.base_at(x) + log_scale_offset;
    for (const auto& a : anchors) m += cov(x, a);
    return m;
  }

  /// First-order intensity of the (un-anchored) LGCP at x (lognormal mean).
  double intensity_at(std::span<const double> x) const {
    return std::exp(mean.base_at(x) + log_scale_offset + 0.5 * cov.sigma2);
  }

  /// Second-order intensity of the LGCP at (x, y).
  double second_order_intensity(std::span<const double> x, std::span<const double> y) const {
    return std::exp(mean.base_at(x) + mean.base_at(y) + 2.0 * log_scale_offset + cov.sigma2 +
                    cov(x, y));
  }
};

/// Palm shift: mean replaced by mu(.) + sum C(., anchor); covariance
/// unchanged. At most two anchors in total.
LgcpSpec palm_shift(const LgcpSpec& spec, const std::vector<std::vector<double>>& anchors);

/// Dense Cholesky sampler for a Gaussian random field on a grid. The
/// factorization depends only on (covariance, grid) and is reused across mean
/// shifts and replicates; jitter escalates from 1e-12*sigma2 to 1e-8*sigma2.
class GrfSampler {
 public:
  GrfSampler(Grid grid, CovarianceModel cov);
  ~GrfSampler();
  GrfSampler(GrfSampler&&) noexcept;
  GrfSampler& operator=(GrfSampler&&) noexcept;

  const Grid& grid() const { return grid_; }
  double jitter_used() const { return jitter_; }

  /// One realization of W with the mean profile of `spec` (offset and anchors
  /// included). The covariance of `spec` must match the sampler's.
  GridField sample(const LgcpSpec& spec, RngStream& rng) const;

  /// Same with a precomputed mean vector (one value per cell).
  GridField sample(const std::vector<double>& mean, RngStream& rng) const;

  /// Mean vector of `spec` at the grid cell centres.
  std::vector<double> mean_vector(const LgcpSpec& spec) const;

 private:
  struct Impl;
  Grid grid_;
  CovarianceModel cov_;
  double jitter_ = 0.0;
  std::unique_ptr<Impl> impl_;
};

/// One GRF realization at the cell centres of `grid`.
GridField simulate_grf(const LgcpSpec& spec, const Grid& grid, RngStream& rng);

/// Random intensity field Psi = exp(W), cellwise.
GridField intensity_field(const LgcpSpec& spec, const Grid& grid, RngStream& rng);

}  // namespace maternsim
