#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "maternsim/errors.hpp"

namespace maternsim {

/// Axis-aligned rectangular observation window in R^d. Boundary points count
/// as inside (closed window).
class Window {
 public:
  Window(std::vector<double> lower, std::vector<double> upper)
      : lower_(std::move(lower)), upper_(std::move(upper)) {
    if (lower_.empty() || lower_.size() != upper_.size())
      throw ConfigError("Window: lower/upper must be non-empty and of equal dimension");
    for (std::size_t i = 0; i < lower_.size(); ++i) {
      if (!(lower_[i] < upper_[i]))
        throw ConfigError("Window: lower[i] < upper[i] required on every axis");
    }
  }

  int dim() const { return static_cast<int>(lower_.size()); }
  const std::vector<double>& lower() const { return lower_; }
  const std::vector<double>& upper() const { return upper_; }
  double side(int axis) const { return upper_[axis] - lower_[axis]; }

  double volume() const {
    double v = 1.0;
    for (std::size_t i = 0; i < lower_.size(); ++i) v *= upper_[i] - lower_[i];
    return v;
  }

  double min_side() const {
    double m = side(0);
    for (int i = 1; i < dim(); ++i) m = std::min(m, side(i));
    return m;
  }

  bool contains(std::span<const double> p) const {
    for (std::size_t i = 0; i < lower_.size(); ++i)
      if (p[i] < lower_[i] || p[i] > upper_[i]) return false;
    return true;
  }

  /// Window grown by r on every side (Minkowski dilation with a box).
  Window dilated(double r) const {
    if (r < 0.0) throw ConfigError("Window::dilated: radius must be >= 0");
    std::vector<double> lo(lower_), hi(upper_);
    for (std::size_t i = 0; i < lo.size(); ++i) {
      lo[i] -= r;
      hi[i] += r;
    }
    return Window(std::move(lo), std::move(hi));
  }

  /// Window shrunk by r on every side (minus-sampling erosion).
  Window eroded(double r) const {
    if (r < 0.0) throw ConfigError("Window::eroded: radius must be >= 0");
    std::vector<double> lo(lower_), hi(upper_);
    for (std::size_t i = 0; i < lo.size(); ++i) {
      lo[i] += r;
      hi[i] -= r;
      if (!(lo[i] < hi[i])) throw ConfigError("Window::eroded: erosion exhausts the window");
    }
    return Window(std::move(lo), std::move(hi));
  }

  bool operator==(const Window& o) const { return lower_ == o.lower_ && upper_ == o.upper_; }

 private:
  std::vector<double> lower_;
  std::vector<double> upper_;
};

/// Volume of the d-ball of radius R: pi^{d/2} R^d / Gamma(d/2+1).
inline double ball_volume(int d, double radius) {
  if (d < 1) throw ConfigError("ball_volume: dimension must be >= 1");
  if (radius < 0.0) throw ConfigError("ball_volume: radius must be >= 0");
  const double half_d = 0.5 * static_cast<double>(d);
  return std::pow(3.14159265358979323846, half_d) * std::pow(radius, d) /
         std::tgamma(half_d + 1.0);
}

/// Regular lattice of cell centres over a window; the discretization carrier
/// for every Riemann-sum integral in the library.
class Grid {
 public:
  Grid(Window window, std::vector<int> cells_per_axis)
      : window_(std::move(window)), cells_(std::move(cells_per_axis)) {
    if (static_cast<int>(cells_.size()) != window_.dim())
      throw ConfigError("Grid: cells_per_axis size must match window dimension");
    n_cells_ = 1;
    for (int c : cells_) {
      if (c < 1) throw ConfigError("Grid: cells_per_axis must be positive");
      n_cells_ *= static_cast<std::size_t>(c);
    }
    widths_.resize(cells_.size());
    for (std::size_t i = 0; i < cells_.size(); ++i)
      widths_[i] = window_.side(static_cast<int>(i)) / cells_[i];
  }

  /// Grid over `window` with square-ish cells of target width h.
  static Grid with_cell_width(const Window& window, double h) {
    if (!(h > 0.0)) throw ConfigError("Grid: cell width must be > 0");
    std::vector<int> cells(window.dim());
    for (int i = 0; i < window.dim(); ++i)
      cells[i] = std::max(1, static_cast<int>(std::ceil(window.side(i) / h - 1e-9)));
    return Grid(window, std::move(cells));
  }

  const Window& window() const { return window_; }
  int dim() const { return window_.dim(); }
  const std::vector<int>& cells_per_axis() const { return cells_; }
  std::size_t cell_count() const { return n_cells_; }
  double cell_width(int axis) const { return widths_[axis]; }

  double cell_volume() const {
    double v = 1.0;
    for (double w : widths_) v *= w;
    return v;
  }

  double max_cell_diameter() const {
    double s = 0.0;
    for (double w : widths_) s += w * w;
    return std::sqrt(s);
  }

  void cell_centre(std::size_t idx, std::span<double> out) const {
    for (int ax = dim() - 1; ax >= 0; --ax) {
      const std::size_t n = static_cast<std::size_t>(cells_[ax]);
      const std::size_t k = idx % n;
      idx /= n;
      out[ax] = window_.lower()[ax] + (static_cast<double>(k) + 0.5) * widths_[ax];
    }
  }

  std::vector<double> cell_centre(std::size_t idx) const {
    std::vector<double> c(dim());
    cell_centre(idx, c);
    return c;
  }

  /// Flat index of the cell containing p (clamped to the grid).
  std::size_t cell_index(std::span<const double> p) const {
    std::size_t idx = 0;
    for (int ax = 0; ax < dim(); ++ax) {
      double t = (p[ax] - window_.lower()[ax]) / widths_[ax];
      long k = static_cast<long>(std::floor(t));
      k = std::max(0L, std::min(static_cast<long>(cells_[ax]) - 1L, k));
      idx = idx * static_cast<std::size_t>(cells_[ax]) + static_cast<std::size_t>(k);
    }
    return idx;
  }

  /// Grid extended by >= r on every side, keeping the cell widths bit-exact.
  Grid buffered(double r) const {
    if (r < 0.0) throw ConfigError("Grid::buffered: radius must be >= 0");
    if (r == 0.0) return *this;
    std::vector<double> lo = window_.lower(), hi = window_.upper();
    std::vector<int> cells = cells_;
    for (int ax = 0; ax < dim(); ++ax) {
      const int extra = static_cast<int>(std::ceil(r / widths_[ax] - 1e-12));
      lo[ax] -= extra * widths_[ax];
      hi[ax] += extra * widths_[ax];
      cells[ax] += 2 * extra;
    }
    return Grid(Window(std::move(lo), std::move(hi)), std::move(cells));
  }

  bool operator==(const Grid& o) const {
    return window_ == o.window_ && cells_ == o.cells_;
  }

 private:
  Window window_;
  std::vector<int> cells_;
  std::vector<double> widths_;
  std::size_t n_cells_;
};

inline double window_volume(const Window& w) { return w.volume(); }

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

inline double distance(std::span<const double> a, std::span<const double> b) {
  return std::sqrt(squared_distance(a, b));
}

}  // namespace maternsim
