#pragma once

#include <functional>
#include <limits>
#include <span>
#include <string>

#include "maternsim/pattern.hpp"
#include "maternsim/rng.hpp"

namespace maternsim {

/// Competition predicate: does (xj, mj) endanger (xi, mi)?
using CompetitionFn = std::function<bool(std::span<const double> xi, const MarkValue& mi,
                                         std::span<const double> xj, const MarkValue& mj)>;

/// Deletion probability applied when the competition predicate fires.
using DeletionProbFn = std::function<double(std::span<const double> xi, const MarkValue& mi,
                                            std::span<const double> xj, const MarkValue& mj)>;

/// Generalized dependent-thinning model: the triple (zeta, p, p0). By
/// construction the self-pair always competes with deletion probability
/// 1 - p0, which folds independent p0-thinning into the same product.
struct ThinningModel {
  CompetitionFn zeta;
  DeletionProbFn p;
  double p0 = 1.0;
  /// Pairs farther apart than this never interact (enables pruning and sets
  /// the dilation radius callers should use). Infinity when unknown.
  double interaction_range = std::numeric_limits<double>::infinity();
  std::string name = "custom";
};

/// Classical hard core: delete any point with a neighbour within distance R.
ThinningModel matern_i(double R, double p0 = 1.0);

/// Matern I with distance-tapered deletion probability (1 - |xi-xj|/R)_+.
ThinningModel generalized_matern_i(double R, double p0 = 1.0);

/// Scalar-mark hard core: a point is endangered by strictly smaller marks
/// within distance R. Mark ties break toward "no competition".
ThinningModel matern_ii(double R, double p0 = 1.0);

/// Matern II with distance-tapered deletion probability.
ThinningModel generalized_matern_ii(double R, double p0 = 1.0);

/// Distance-only stochastic thinning: every other point competes, deletion
/// probability f(|xi-xj|).
ThinningModel distance_thinning(std::function<double(double)> f, double interaction_range,
                                double p0 = 1.0);

/// Pair-mark rule: endangered when the own first mark component is >= the
/// competitor's; deletion probability f(distance, own second, competitor second).
ThinningModel pair_mark_thinning(std::function<double(double, double, double)> f,
                                 double interaction_range, double p0 = 1.0);

/// Soft-core kernel rule: endangered when the competitor's mark function
/// exceeds the own mark function at the own location; deletion probability
/// (1 - |xi-xj|/p_range)_+.
ThinningModel soft_core_kernel(double p_range = 1.0, double p0 = 1.0);

/// Everywhere-domination rule for kernel marks: endangered (and then surely
/// deleted) when the competitor's mark function is strictly larger at every
/// test point. Used by the extremal layer.
ThinningModel extremal_dominance_model(std::vector<std::vector<double>> test_points,
                                       double p0 = 1.0);

/// Visible-centre rule for kernel marks: endangered (and surely deleted) when
/// the competitor's mark at the own centre strictly exceeds the own peak.
/// Ties retain the point.
ThinningModel visible_centre_model(double p0 = 1.0);

/// Retention probability of point `index` given the rest of the pattern:
/// p0 * prod over other points of (1 - zeta * p).
double thinning_function(const ThinningModel& model, const MarkedPointPattern& pat,
                         std::size_t index);

/// One realization of the generalized Matern thinning. Point i is retained
/// iff its p0-uniform is below p0 and, for every competitor j, the pair
/// uniform V_{ij} is >= p(i,j). Uniforms are keyed by the point coordinates
/// (not by index), so the output is invariant under relabeling and the O(n^2)
/// loop may be partitioned freely.
MarkedPointPattern thin(const ThinningModel& model, const MarkedPointPattern& pat,
                        RngStream& rng);

}  // namespace maternsim
