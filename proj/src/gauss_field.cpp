#include "maternsim/gauss_field.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>

namespace maternsim {

std::string to_string(CovFamily f) {
  switch (f) {
    case CovFamily::exponential: return "exponential";
    case CovFamily::squared_exponential: return "squared-exponential";
    case CovFamily::matern32: return "matern-3/2";
  }
  return "?";
}

CovFamily cov_family_from_string(const std::string& name) {
  if (name == "exponential" || name == "exp") return CovFamily::exponential;
  if (name == "squared-exponential" || name == "gauss") return CovFamily::squared_exponential;
  if (name == "matern-3/2" || name == "matern32") return CovFamily::matern32;
  throw ConfigError("unknown covariance family: " + name);
}

CovarianceModel::CovarianceModel(CovFamily f, double s2, double rho)
    : family(f), sigma2(s2), range(rho) {
  if (!(sigma2 > 0.0)) throw ConfigError("CovarianceModel: sigma2 must be > 0");
  if (!(range > 0.0)) throw ConfigError("CovarianceModel: range must be > 0");
}

double CovarianceModel::correlation(double r) const {
  const double t = r / range;
  switch (family) {
    case CovFamily::exponential:
      return std::exp(-t);
    case CovFamily::squared_exponential:
      return std::exp(-0.5 * t * t);
    case CovFamily::matern32: {
      const double s = 1.7320508075688772 * t;
      return (1.0 + s) * std::exp(-s);
    }
  }
  return 0.0;
}

LgcpSpec palm_shift(const LgcpSpec& spec, const std::vector<std::vector<double>>& anchors) {
  LgcpSpec shifted = spec;
  for (const auto& a : anchors) shifted.anchors.push_back(a);
  if (shifted.anchors.size() > 2)
    throw ConfigError("palm_shift: at most two shift anchors are supported");
  return shifted;
}

struct GrfSampler::Impl {
  Eigen::MatrixXd chol;  // lower-triangular factor L with K + jitter*I = L L^T
};

GrfSampler::GrfSampler(Grid grid, CovarianceModel cov)
    : grid_(std::move(grid)), cov_(cov), impl_(new Impl) {
  const std::size_t n = grid_.cell_count();
  if (n > 20000)
    throw ConfigError("GrfSampler: grid has " + std::to_string(n) +
                      " cells; dense factorization is limited to ~1e4");
  const int d = grid_.dim();
  std::vector<double> centres(n * d);
  for (std::size_t i = 0; i < n; ++i)
    grid_.cell_centre(i, {centres.data() + i * d, static_cast<std::size_t>(d)});

  Eigen::MatrixXd k(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    std::span<const double> xi(centres.data() + i * d, d);
    k(i, i) = cov_.sigma2;
    for (std::size_t j = i + 1; j < n; ++j) {
      std::span<const double> xj(centres.data() + j * d, d);
      const double v = cov_(xi, xj);
      k(i, j) = v;
      k(j, i) = v;
    }
  }

  double jitter = 1e-12 * cov_.sigma2;
  const double jitter_max = 1e-8 * cov_.sigma2;
  for (;;) {
    Eigen::MatrixXd kj = k;
    kj.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(kj);
    if (llt.info() == Eigen::Success) {
      impl_->chol = llt.matrixL();
      jitter_ = jitter;
      return;
    }
    if (jitter >= jitter_max) {
      // crude condition estimate from the diagonal spread
      const double cond = k.diagonal().maxCoeff() / jitter_max;
      throw NumericError("GrfSampler: Cholesky failed on a " + std::to_string(n) +
                         "-cell grid after maximal jitter " + std::to_string(jitter_max) +
                         " (condition estimate ~" + std::to_string(cond) + ")");
    }
    jitter = std::min(jitter * 10.0, jitter_max);
  }
}

GrfSampler::~GrfSampler() = default;
GrfSampler::GrfSampler(GrfSampler&&) noexcept = default;
GrfSampler& GrfSampler::operator=(GrfSampler&&) noexcept = default;

std::vector<double> GrfSampler::mean_vector(const LgcpSpec& spec) const {
  const std::size_t n = grid_.cell_count();
  std::vector<double> mu(n);
  std::vector<double> c(grid_.dim());
  for (std::size_t i = 0; i < n; ++i) {
    grid_.cell_centre(i, c);
    mu[i] = spec.mean_at(c);
  }
  return mu;
}

GridField GrfSampler::sample(const LgcpSpec& spec, RngStream& rng) const {
  return sample(mean_vector(spec), rng);
}

GridField GrfSampler::sample(const std::vector<double>& mean, RngStream& rng) const {
  const std::size_t n = grid_.cell_count();
  if (mean.size() != n) throw ConfigError("GrfSampler::sample: mean vector size mismatch");
  Eigen::VectorXd z(n);
  for (std::size_t i = 0; i < n; ++i) z(i) = rng.next_normal();
  Eigen::VectorXd w = impl_->chol.triangularView<Eigen::Lower>() * z;
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = mean[i] + w(i);
  return GridField(grid_, std::move(values));
}

GridField simulate_grf(const LgcpSpec& spec, const Grid& grid, RngStream& rng) {
  GrfSampler sampler(grid, spec.cov);
  return sampler.sample(spec, rng);
}

GridField intensity_field(const LgcpSpec& spec, const Grid& grid, RngStream& rng) {
  GridField w = simulate_grf(spec, grid, rng);
  for (double& v : w.values()) v = std::exp(v);
  return w;
}

}  // namespace maternsim
