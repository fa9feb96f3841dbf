#pragma once

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "maternsim/errors.hpp"
#include "maternsim/geometry.hpp"
#include "maternsim/storm_shape.hpp"

namespace maternsim {

/// Mark of the form m(t) = u * X(t - centre) with intensity u > 0.
struct ScaledKernelMark {
  double u;
  ShapeId shape;
  std::vector<double> centre;
};

/// Two-component mark (first component drives competition, second drives the
/// deletion probability).
struct PairMark {
  double a;
  double b;
};

/// Mark attached to a point: a scalar, a scaled kernel function, or a pair.
class MarkValue {
 public:
  MarkValue() : value_(0.0) {}
  explicit MarkValue(double scalar) : value_(scalar) {}
  MarkValue(ScaledKernelMark k) : value_(std::move(k)) {
    if (!(std::get<ScaledKernelMark>(value_).u > 0.0))
      throw ConfigError("ScaledKernelMark: u must be > 0");
  }
  MarkValue(PairMark p) : value_(p) {}

  bool is_scalar() const { return std::holds_alternative<double>(value_); }
  bool is_kernel() const { return std::holds_alternative<ScaledKernelMark>(value_); }
  bool is_pair() const { return std::holds_alternative<PairMark>(value_); }

  double scalar() const { return std::get<double>(value_); }
  const ScaledKernelMark& kernel() const { return std::get<ScaledKernelMark>(value_); }
  const PairMark& pair() const { return std::get<PairMark>(value_); }

  /// Mark function evaluated at t. Scalars are constant functions; pairs
  /// expose their first component.
  double eval(std::span<const double> t) const {
    if (is_scalar()) return scalar();
    if (is_pair()) return pair().a;
    const ScaledKernelMark& k = kernel();
    return k.u * get_shape(k.shape, static_cast<int>(k.centre.size())).value(t, k.centre);
  }

 private:
  std::variant<double, ScaledKernelMark, PairMark> value_;
};

/// Finite point configuration in a window. Coordinates are stored flat
/// (point i occupies [i*d, (i+1)*d)) for cache-friendly pair loops.
class PointPattern {
 public:
  explicit PointPattern(Window window) : window_(std::move(window)) {}

  PointPattern(Window window, std::vector<double> flat_coords)
      : window_(std::move(window)), coords_(std::move(flat_coords)) {
    if (coords_.size() % window_.dim() != 0)
      throw ConfigError("PointPattern: coordinate count not divisible by dimension");
    for (std::size_t i = 0; i < size(); ++i)
      if (!window_.contains(point(i)))
        throw ConfigError("PointPattern: point outside the window");
  }

  int dim() const { return window_.dim(); }
  const Window& window() const { return window_; }
  std::size_t size() const { return coords_.size() / window_.dim(); }
  bool empty() const { return coords_.empty(); }
  const std::vector<double>& coords() const { return coords_; }

  std::span<const double> point(std::size_t i) const {
    return {coords_.data() + i * window_.dim(), static_cast<std::size_t>(window_.dim())};
  }

  void push_back(std::span<const double> p) {
    if (!window_.contains(p)) throw ConfigError("PointPattern: point outside the window");
    coords_.insert(coords_.end(), p.begin(), p.end());
  }

 private:
  Window window_;
  std::vector<double> coords_;
};

/// Point pattern with one mark per point.
class MarkedPointPattern {
 public:
  explicit MarkedPointPattern(Window window) : base_(std::move(window)) {}

  MarkedPointPattern(PointPattern base, std::vector<MarkValue> marks)
      : base_(std::move(base)), marks_(std::move(marks)) {
    if (marks_.size() != base_.size())
      throw ConfigError("MarkedPointPattern: one mark per point required");
  }

  const PointPattern& base() const { return base_; }
  const std::vector<MarkValue>& marks() const { return marks_; }
  std::size_t size() const { return base_.size(); }
  bool empty() const { return base_.empty(); }
  int dim() const { return base_.dim(); }

  std::span<const double> point(std::size_t i) const { return base_.point(i); }
  const MarkValue& mark(std::size_t i) const { return marks_[i]; }

  void push_back(std::span<const double> p, MarkValue m) {
    base_.push_back(p);
    marks_.push_back(std::move(m));
  }

 private:
  PointPattern base_;
  std::vector<MarkValue> marks_;
};

/// Strip marks: the thinned ground process of a marked pattern.
inline PointPattern thinned_ground(const MarkedPointPattern& pat) {
  return PointPattern(pat.base().window(), pat.base().coords());
}

/// Restrict a pattern to a subwindow (used for minus-sampling after thinning
/// on a dilated window).
inline PointPattern crop(const PointPattern& pat, const Window& target) {
  PointPattern out(target);
  for (std::size_t i = 0; i < pat.size(); ++i)
    if (target.contains(pat.point(i))) out.push_back(pat.point(i));
  return out;
}

inline MarkedPointPattern crop(const MarkedPointPattern& pat, const Window& target) {
  MarkedPointPattern out(target);
  for (std::size_t i = 0; i < pat.size(); ++i)
    if (target.contains(pat.point(i))) out.push_back(pat.point(i), pat.mark(i));
  return out;
}

/// Scalar field sampled at the cell centres of a grid.
class GridField {
 public:
  GridField(Grid grid, std::vector<double> values)
      : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_.cell_count())
      throw ConfigError("GridField: one value per grid cell required");
  }

  GridField(Grid grid, double constant)
      : grid_(std::move(grid)), values_(grid_.cell_count(), constant) {}

  const Grid& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }
  std::size_t size() const { return values_.size(); }

  /// Nearest-cell lookup, consistent with Riemann-sum integration.
  double value_at(std::span<const double> p) const { return values_[grid_.cell_index(p)]; }

  double integral() const {
    double s = 0.0;
    for (double v : values_) s += v;
    return s * grid_.cell_volume();
  }

 private:
  Grid grid_;
  std::vector<double> values_;
};

}  // namespace maternsim
