#pragma once

#include <cmath>
#include <span>
#include <string>

#include "maternsim/errors.hpp"
#include "maternsim/geometry.hpp"

namespace maternsim {

enum class ShapeId { gauss_density, epanechnikov, triangle };

std::string to_string(ShapeId id);
ShapeId shape_from_string(const std::string& name);

/// Deterministic storm shape X: a radially monotone decreasing kernel with
/// known peak X(0) and total mass. The radial profile doubles as the
/// monotone envelope used for buffer-radius bounds.
class StormShape {
 public:
  StormShape(ShapeId id, int dim);

  ShapeId id() const { return id_; }
  int dim() const { return dim_; }

  /// Radial profile; X(t) = profile(|t|).
  double profile(double r) const {
    switch (id_) {
      case ShapeId::gauss_density:
        return peak_ * std::exp(-0.5 * r * r);
      case ShapeId::epanechnikov: {
        const double v = 1.0 - r * r;
        return v > 0.0 ? v : 0.0;
      }
      case ShapeId::triangle: {
        const double v = 1.0 - r;
        return v > 0.0 ? v : 0.0;
      }
    }
    return 0.0;
  }

  double value(std::span<const double> t) const {
    return profile(std::sqrt(squared_distance_to_origin(t)));
  }

  /// X evaluated at (t - centre).
  double value(std::span<const double> t, std::span<const double> centre) const {
    return profile(distance(t, centre));
  }

  double peak() const { return peak_; }             // X(0)
  double total_mass() const { return total_mass_; }  // integral of X over R^d

  /// Radius beyond which the profile vanishes; infinity for the Gaussian.
  double support_radius() const {
    return id_ == ShapeId::gauss_density ? std::numeric_limits<double>::infinity() : 1.0;
  }

  /// Smallest r with profile(r) <= v * peak().
  double radius_for_relative_level(double v) const;

 private:
  static double squared_distance_to_origin(std::span<const double> t) {
    double s = 0.0;
    for (double x : t) s += x * x;
    return s;
  }

  ShapeId id_;
  int dim_;
  double peak_;
  double total_mass_;
};

/// Shared immutable shape instances (construction runs a one-off envelope
/// mass check, so hot paths should go through here).
const StormShape& get_shape(ShapeId id, int dim);

/// Buffer radius r_buf such that the strongest storm plausibly present in a
/// run (intensity ~ tau * expected storm count) contributes less than 1e-6 of
/// the weakest storm peak beyond r_buf. Expected counts come from the
/// truncated directing measure, |window dilated by r|/tau, iterated once so
/// the buffer accounts for its own storms.
double envelope_buffer_radius(const StormShape& shape, double tau, const Window& window,
                              double psi_mean = 1.0);

/// Expected number of storms outside the buffered window whose value somewhere
/// on `window` still exceeds the weakest storm peak tau*X(0); a bias bound for
/// truncated simulation on the buffered window.
double truncation_bias_bound(const StormShape& shape, double tau, const Window& window,
                             double buffer, double psi_mean = 1.0);

}  // namespace maternsim
