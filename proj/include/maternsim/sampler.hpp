#pragma once

#include <utility>
#include <variant>

#include "maternsim/gauss_field.hpp"
#include "maternsim/pattern.hpp"
#include "maternsim/rng.hpp"

namespace maternsim {

/// Scalar mark, uniform on [lo, hi].
struct UniformScalarLaw {
  double lo = 0.0;
  double hi = 1.0;
};

enum class KernelIntensityLaw { uniform01, pareto_tail };

/// Mark function m(.) = u * X(. - point) with random intensity u. The kernel
/// is centred at the point it is attached to.
struct ScaledKernelLaw {
  KernelIntensityLaw u_law = KernelIntensityLaw::uniform01;
  double tau = 1.0;  // truncation level when u_law == pareto_tail
  ShapeId shape = ShapeId::gauss_density;
};

/// Two independent scalar components, each uniform on its interval.
struct PairLaw {
  UniformScalarLaw a;
  UniformScalarLaw b;
};

/// Law of the iid marks attached to every point of a pattern.
using MarkLaw = std::variant<UniformScalarLaw, ScaledKernelLaw, PairLaw>;

/// Draw one mark at `location` (only kernel marks use the location).
MarkValue draw_mark(const MarkLaw& law, std::span<const double> location, RngStream& rng);

/// Homogeneous Poisson pattern with intensity lambda on w.
PointPattern sample_poisson(double lambda, const Window& w, RngStream& rng);

/// Cox pattern given one realization of the intensity field: cell counts are
/// independent Poisson(value * cell volume), points uniform within their cell.
PointPattern sample_cox(const GridField& intensity, RngStream& rng);

/// LGCP pattern together with the intensity realization that produced it.
std::pair<PointPattern, GridField> sample_lgcp(const LgcpSpec& spec, const Grid& grid,
                                               RngStream& rng);

/// Attach one independent mark per point.
MarkedPointPattern attach_marks(const PointPattern& pat, const MarkLaw& law, RngStream& rng);

}  // namespace maternsim
