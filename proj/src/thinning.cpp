#include "maternsim/thinning.hpp"

#include <bit>
#include <cmath>

namespace maternsim {

namespace {

double clamp01(double v) { return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v); }

bool within(std::span<const double> a, std::span<const double> b, double R) {
  return squared_distance(a, b) <= R * R;
}

std::uint64_t hash_coords(std::span<const double> p, std::uint64_t h) {
  for (double x : p) h = detail::mix64(h ^ std::bit_cast<std::uint64_t>(x));
  return h;
}

// Two uniforms per unordered coordinate pair, assigned to the two ordered
// directions by the lexicographic order of the coordinates. Keying by
// coordinates (not indices) makes thin() invariant under relabeling.
struct PairUniforms {
  double first_endangered;   // deletion uniform for the lexicographically smaller point
  double second_endangered;  // and for the larger one
};

bool lex_less(std::span<const double> a, std::span<const double> b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) return true;
    if (a[i] > b[i]) return false;
  }
  return false;
}

PairUniforms pair_uniforms(const RngStream& base, std::span<const double> a,
                           std::span<const double> b) {
  const bool a_first = lex_less(a, b);
  std::uint64_t h = hash_coords(a_first ? a : b, 0x70616972ULL);
  h = hash_coords(a_first ? b : a, h);
  RngStream s = base.derive(h);
  PairUniforms u;
  u.first_endangered = s.next_uniform();
  u.second_endangered = s.next_uniform();
  return u;
}

double point_uniform(const RngStream& base, std::span<const double> p) {
  RngStream s = base.derive(hash_coords(p, 0x73656C66ULL));
  return s.next_uniform();
}

}  // namespace

ThinningModel matern_i(double R, double p0) {
  if (R < 0.0) throw ConfigError("matern_i: R must be >= 0");
  ThinningModel m;
  m.zeta = [R](std::span<const double> xi, const MarkValue&, std::span<const double> xj,
               const MarkValue&) { return within(xi, xj, R); };
  m.p = [](auto, const MarkValue&, auto, const MarkValue&) { return 1.0; };
  m.p0 = p0;
  m.interaction_range = R;
  m.name = "matern1";
  return m;
}

ThinningModel generalized_matern_i(double R, double p0) {
  ThinningModel m = matern_i(R, p0);
  m.p = [R](std::span<const double> xi, const MarkValue&, std::span<const double> xj,
            const MarkValue&) { return clamp01(1.0 - distance(xi, xj) / R); };
  m.name = "generalized-matern1";
  return m;
}

ThinningModel matern_ii(double R, double p0) {
  if (R < 0.0) throw ConfigError("matern_ii: R must be >= 0");
  ThinningModel m;
  m.zeta = [R](std::span<const double> xi, const MarkValue& mi, std::span<const double> xj,
               const MarkValue& mj) {
    return within(xi, xj, R) && mj.scalar() < mi.scalar();
  };
  m.p = [](auto, const MarkValue&, auto, const MarkValue&) { return 1.0; };
  m.p0 = p0;
  m.interaction_range = R;
  m.name = "matern2";
  return m;
}

ThinningModel generalized_matern_ii(double R, double p0) {
  ThinningModel m = matern_ii(R, p0);
  m.p = [R](std::span<const double> xi, const MarkValue&, std::span<const double> xj,
            const MarkValue&) { return clamp01(1.0 - distance(xi, xj) / R); };
  m.name = "generalized-matern2";
  return m;
}

ThinningModel distance_thinning(std::function<double(double)> f, double interaction_range,
                                double p0) {
  ThinningModel m;
  m.zeta = [](auto, const MarkValue&, auto, const MarkValue&) { return true; };
  m.p = [f = std::move(f)](std::span<const double> xi, const MarkValue&,
                           std::span<const double> xj, const MarkValue&) {
    return clamp01(f(distance(xi, xj)));
  };
  m.p0 = p0;
  m.interaction_range = interaction_range;
  m.name = "distance-thinning";
  return m;
}

ThinningModel pair_mark_thinning(std::function<double(double, double, double)> f,
                                 double interaction_range, double p0) {
  ThinningModel m;
  m.zeta = [](auto, const MarkValue& mi, auto, const MarkValue& mj) {
    return mi.pair().a >= mj.pair().a;
  };
  m.p = [f = std::move(f)](std::span<const double> xi, const MarkValue& mi,
                           std::span<const double> xj, const MarkValue& mj) {
    return clamp01(f(distance(xi, xj), mi.pair().b, mj.pair().b));
  };
  m.p0 = p0;
  m.interaction_range = interaction_range;
  m.name = "pair-mark-thinning";
  return m;
}

ThinningModel soft_core_kernel(double p_range, double p0) {
  if (!(p_range > 0.0)) throw ConfigError("soft_core_kernel: p_range must be > 0");
  ThinningModel m;
  m.zeta = [](std::span<const double> xi, const MarkValue& mi, std::span<const double>,
              const MarkValue& mj) { return mj.eval(xi) > mi.eval(xi); };
  m.p = [p_range](std::span<const double> xi, const MarkValue&, std::span<const double> xj,
                  const MarkValue&) { return clamp01(1.0 - distance(xi, xj) / p_range); };
  m.p0 = p0;
  m.interaction_range = p_range;
  m.name = "soft-core";
  return m;
}

ThinningModel extremal_dominance_model(std::vector<std::vector<double>> test_points, double p0) {
  ThinningModel m;
  m.zeta = [pts = std::move(test_points)](std::span<const double>, const MarkValue& mi,
                                          std::span<const double>, const MarkValue& mj) {
    for (const auto& t : pts)
      if (mj.eval(t) <= mi.eval(t)) return false;
    return true;
  };
  m.p = [](auto, const MarkValue&, auto, const MarkValue&) { return 1.0; };
  m.p0 = p0;
  m.name = "extremal-dominance";
  return m;
}

ThinningModel visible_centre_model(double p0) {
  ThinningModel m;
  m.zeta = [](std::span<const double> xi, const MarkValue& mi, std::span<const double>,
              const MarkValue& mj) { return mj.eval(xi) > mi.eval(xi); };
  m.p = [](auto, const MarkValue&, auto, const MarkValue&) { return 1.0; };
  m.p0 = p0;
  m.name = "visible-centres";
  return m;
}

double thinning_function(const ThinningModel& model, const MarkedPointPattern& pat,
                         std::size_t index) {
  if (index >= pat.size()) throw ConfigError("thinning_function: index out of range");
  const auto xi = pat.point(index);
  const MarkValue& mi = pat.mark(index);
  const double range2 = model.interaction_range * model.interaction_range;
  double prod = model.p0;
  for (std::size_t j = 0; j < pat.size() && prod > 0.0; ++j) {
    if (j == index) continue;
    const auto xj = pat.point(j);
    if (squared_distance(xi, xj) > range2) continue;
    if (!model.zeta(xi, mi, xj, pat.mark(j))) continue;
    prod *= 1.0 - clamp01(model.p(xi, mi, xj, pat.mark(j)));
  }
  return prod;
}

MarkedPointPattern thin(const ThinningModel& model, const MarkedPointPattern& pat,
                        RngStream& rng) {
  const std::size_t n = pat.size();
  const double range2 = model.interaction_range * model.interaction_range;
  // fresh sub-stream per call, keyed by a draw from the caller's stream
  const RngStream base = rng.derive(rng.next_u64());
  MarkedPointPattern out(pat.base().window());
  for (std::size_t i = 0; i < n; ++i) {
    const auto xi = pat.point(i);
    const MarkValue& mi = pat.mark(i);
    if (point_uniform(base, xi) >= model.p0) continue;
    bool retained = true;
    for (std::size_t j = 0; j < n && retained; ++j) {
      if (j == i) continue;
      const auto xj = pat.point(j);
      if (squared_distance(xi, xj) > range2) continue;
      if (!model.zeta(xi, mi, xj, pat.mark(j))) continue;
      const double pij = clamp01(model.p(xi, mi, xj, pat.mark(j)));
      if (pij <= 0.0) continue;
      const PairUniforms u = pair_uniforms(base, xi, xj);
      const double v = lex_less(xi, xj) ? u.first_endangered : u.second_endangered;
      if (v < pij) retained = false;
    }
    if (retained) out.push_back(xi, mi);
  }
  return out;
}

}  // namespace maternsim
