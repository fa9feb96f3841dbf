#include "maternsim/storm_shape.hpp"

#include <limits>

namespace maternsim {

std::string to_string(ShapeId id) {
  switch (id) {
    case ShapeId::gauss_density: return "gauss";
    case ShapeId::epanechnikov: return "epanechnikov";
    case ShapeId::triangle: return "triangle";
  }
  return "?";
}

ShapeId shape_from_string(const std::string& name) {
  if (name == "gauss" || name == "gauss_density") return ShapeId::gauss_density;
  if (name == "epanechnikov") return ShapeId::epanechnikov;
  if (name == "triangle") return ShapeId::triangle;
  throw ConfigError("unknown storm shape: " + name);
}

namespace {

constexpr double kPi = 3.14159265358979323846;

// Surface area of the unit (d-1)-sphere.
double sphere_surface(int d) {
  return 2.0 * std::pow(kPi, 0.5 * d) / std::tgamma(0.5 * d);
}

double epanechnikov_mass(int d) {
  // integral over the unit ball of (1 - r^2): S_{d-1} * (1/d - 1/(d+2)).
  return sphere_surface(d) * (1.0 / d - 1.0 / (d + 2));
}

double triangle_mass(int d) {
  // integral over the unit ball of (1 - r): S_{d-1} * (1/d - 1/(d+1)).
  return sphere_surface(d) * (1.0 / d - 1.0 / (d + 1));
}

// integral over |t| > r0 of profile(|t|) dt, by radial quadrature.
double tail_mass(const StormShape& shape, double r0) {
  const int d = shape.dim();
  const double surf = sphere_surface(d);
  const double r_hi = std::min(shape.support_radius(), std::max(r0 + 1.0, 12.0));
  if (r0 >= r_hi) return 0.0;
  const int n = 4000;
  const double h = (r_hi - r0) / n;
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const double r = r0 + (i + 0.5) * h;
    s += shape.profile(r) * std::pow(r, d - 1);
  }
  return surf * s * h;
}

}  // namespace

StormShape::StormShape(ShapeId id, int dim) : id_(id), dim_(dim) {
  if (dim < 1 || dim > 3) throw ConfigError("StormShape: dimension must be 1, 2 or 3");
  switch (id_) {
    case ShapeId::gauss_density:
      peak_ = std::pow(2.0 * kPi, -0.5 * dim);
      total_mass_ = 1.0;
      break;
    case ShapeId::epanechnikov:
      peak_ = 1.0;
      total_mass_ = epanechnikov_mass(dim);
      break;
    case ShapeId::triangle:
      peak_ = 1.0;
      total_mass_ = triangle_mass(dim);
      break;
  }
  // Integrability sanity check on the monotone envelope: the tail mass must be
  // finite and consistent with the analytic total mass.
  const double m = tail_mass(*this, 0.0);
  if (!(std::isfinite(m)) || std::abs(m - total_mass_) > 1e-3 * total_mass_)
    throw NumericError("StormShape: envelope mass check failed for " + to_string(id_));
}

double StormShape::radius_for_relative_level(double v) const {
  if (v >= 1.0) return 0.0;
  if (id_ != ShapeId::gauss_density) {
    // profile vanishes at 1, so any level <= 0 is reached there.
    if (v <= 0.0) return 1.0;
    return id_ == ShapeId::epanechnikov ? std::sqrt(1.0 - v) : 1.0 - v;
  }
  if (v <= 0.0) return std::numeric_limits<double>::infinity();
  return std::sqrt(-2.0 * std::log(v));
}

const StormShape& get_shape(ShapeId id, int dim) {
  static const StormShape shapes[3][3] = {
      {StormShape(ShapeId::gauss_density, 1), StormShape(ShapeId::gauss_density, 2),
       StormShape(ShapeId::gauss_density, 3)},
      {StormShape(ShapeId::epanechnikov, 1), StormShape(ShapeId::epanechnikov, 2),
       StormShape(ShapeId::epanechnikov, 3)},
      {StormShape(ShapeId::triangle, 1), StormShape(ShapeId::triangle, 2),
       StormShape(ShapeId::triangle, 3)}};
  if (dim < 1 || dim > 3) throw ConfigError("get_shape: dimension must be 1, 2 or 3");
  return shapes[static_cast<int>(id)][dim - 1];
}

double envelope_buffer_radius(const StormShape& shape, double tau, const Window& window,
                              double psi_mean) {
  if (!(tau > 0.0)) throw ConfigError("envelope_buffer_radius: tau must be > 0");
  double r = 0.0;
  for (int pass = 0; pass < 2; ++pass) {
    double vol = 1.0;
    for (int ax = 0; ax < window.dim(); ++ax) vol *= window.side(ax) + 2.0 * r;
    const double expected_storms = std::max(1.0, psi_mean * vol / tau);
    // strongest plausible intensity ~ tau * N; require u_max * f(r) <= 1e-6 * tau * f(0)
    r = shape.radius_for_relative_level(1e-6 / expected_storms);
    if (!std::isfinite(r)) r = shape.support_radius();
  }
  return r;
}

double truncation_bias_bound(const StormShape& shape, double tau, const Window& window,
                             double buffer, double psi_mean) {
  // E #{storms with dist(centre, window) > buffer and peak contribution on the
  // window above tau * X(0)} = psi_mean/tau * int_{dist>buffer} P(U > tau X(0)/f(dist)) ds
  // with P(U > x) = min(1, tau/x). The set {dist in [r, r+dr]} has measure
  // A'(r) dr with A(r) = prod(L_i + 2r) (Steiner formula for boxes).
  const int d = window.dim();
  const double r_hi = std::min(shape.support_radius(), buffer + 15.0);
  if (buffer >= r_hi) return 0.0;
  const int n = 4000;
  const double h = (r_hi - buffer) / n;
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const double r = buffer + (i + 0.5) * h;
    double aprime = 0.0;  // d/dr prod(L_k + 2r)
    for (int ax = 0; ax < d; ++ax) {
      double term = 2.0;
      for (int k = 0; k < d; ++k)
        if (k != ax) term *= window.side(k) + 2.0 * r;
      aprime += term;
    }
    s += aprime * std::min(1.0, shape.profile(r) / shape.peak());
  }
  return psi_mean / tau * s * h;
}

}  // namespace maternsim
