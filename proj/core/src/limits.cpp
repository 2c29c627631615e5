#include "reldiff/limits.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <numbers>

#include "reldiff/error.hpp"
#include "reldiff/quadrature.hpp"

namespace reldiff {

void validate_probes(const ProbeSet& probes) {
  if (probes.empty()) throw ValidationError("probe set must not be empty");
  for (const auto& p : probes) {
    if (!(p.t > 0.0) || !std::isfinite(p.t)) throw ValidationError("probe times must be positive");
    if (!std::isfinite(p.weight)) throw ValidationError("probe weights must be finite");
    if (!std::isfinite(p.x[0]) || !std::isfinite(p.x[1])) throw ValidationError("probe points must be finite");
  }
}

std::string to_string(LimitKind kind) {
  switch (kind) {
    case LimitKind::gaussian_large:
      return "gaussian_large";
    case LimitKind::gaussian_small:
      return "gaussian_small";
    case LimitKind::hermite_large:
      return "hermite_large";
    case LimitKind::hermite_small:
      return "hermite_small";
  }
  return "?";
}

bool is_large(LimitKind kind) { return kind == LimitKind::gaussian_large || kind == LimitKind::hermite_large; }
bool is_hermite(LimitKind kind) { return kind == LimitKind::hermite_large || kind == LimitKind::hermite_small; }

void LimitSpec::validate() const {
  if (dim != 1 && dim != 2) throw ValidationError("limit dimension must be 1 or 2");
  if (!(alpha > 0.0 && alpha < 2.0)) throw ValidationError("alpha must lie in (0, 2)");
  if (is_large(kind) && !(mass > 0.0)) throw ValidationError("large-scale limits need a positive mass");
  if (!is_hermite(kind)) {
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ValidationError("sigma must be finite and >= 0");
    return;
  }
  if (!(b0 > 0.0)) throw ValidationError("hermite limits need B(0) > 0");
  if (m < 1) throw ValidationError("Hermite rank must be >= 1");
  if (classify(kappa, dim, m).tag != ConditionTag::C) throw ValidationError("hermite limits need m kappa < n");
}

double LimitSpec::symbol(double mu) const {
  if (is_large(kind)) return ModelParams(dim, alpha, mass).heat_coefficient() * mu * mu;
  return std::pow(std::abs(mu), alpha);
}

double spectral_integral(const LimitSpec& spec, double z_norm, double tau, double gamma) {
  if (!(tau > 0.0)) throw ValidationError("spectral_integral needs t + s > 0");
  double cutoff = 0.0;
  std::function<double(double)> g;
  if (is_large(spec.kind)) {
    const double c = ModelParams(spec.dim, spec.alpha, spec.mass).heat_coefficient();
    cutoff = std::sqrt(41.5 / (tau * c));
    g = [=](double r) { return std::exp(-tau * c * r * r); };
  } else {
    const double a = spec.alpha;
    cutoff = std::pow(41.5 / tau, 1.0 / a);
    g = [=](double r) { return std::exp(-tau * std::pow(r, a)); };
  }
  return radial_fourier_integral(spec.dim, z_norm, g, gamma, cutoff);
}

double riesz_constant(int n, double beta) {
  if (!(beta > 0.0 && beta < n)) throw ValidationError("riesz_constant needs 0 < beta < n");
  return std::pow(std::numbers::pi, 0.5 * n) * std::pow(2.0, beta) * std::tgamma(0.5 * beta) /
         std::tgamma(0.5 * (n - beta));
}

double riesz_composition(int n, double kappa, int m) {
  if (m < 1) throw ValidationError("riesz_composition needs m >= 1");
  if (!(m * kappa < n)) throw ValidationError("riesz_composition needs m kappa < n");
  if (m == 1) return 1.0;
  return std::pow(riesz_constant(n, kappa), m) / riesz_constant(n, m * kappa);
}

double riesz_pair_constant_1d(double kappa) {
  if (!(kappa > 0.0 && kappa < 0.5)) throw ValidationError("riesz_pair_constant_1d needs 0 < kappa < 1/2");
  return boost::math::beta(kappa, kappa) + 2.0 * boost::math::beta(1.0 - 2.0 * kappa, kappa);
}

double limit_covariance(const LimitSpec& spec, double t, const std::array<double, 2>& x, double s,
                        const std::array<double, 2>& y) {
  spec.validate();
  if (!(t > 0.0) || !(s > 0.0)) throw ValidationError("limit_covariance needs t, s > 0");
  const double z = spec.dim == 1 ? std::abs(x[0] - y[0]) : std::hypot(x[0] - y[0], x[1] - y[1]);
  if (!is_hermite(spec.kind)) return spec.sigma * spec.sigma * spectral_integral(spec, z, t + s, 0.0);
  const double pre = spec.cm * spec.cm * std::pow(spec.b0, spec.m) * riesz_composition(spec.dim, spec.kappa, spec.m);
  return pre * spectral_integral(spec, z, t + s, spec.m * spec.kappa - spec.dim);
}

std::vector<std::vector<double>> limit_covariance_matrix(const LimitSpec& spec, const ProbeSet& probes) {
  validate_probes(probes);
  const std::size_t M = probes.size();
  std::vector<std::vector<double>> out(M, std::vector<double>(M));
  for (std::size_t i = 0; i < M; ++i) {
    for (std::size_t j = i; j < M; ++j) {
      out[i][j] = out[j][i] = limit_covariance(spec, probes[i].t, probes[i].x, probes[j].t, probes[j].x);
    }
  }
  return out;
}

double limit_probe_variance(const LimitSpec& spec, const ProbeSet& probes) {
  const auto C = limit_covariance_matrix(spec, probes);
  double v = 0.0;
  for (std::size_t i = 0; i < probes.size(); ++i) {
    for (std::size_t j = 0; j < probes.size(); ++j) v += probes[i].weight * probes[j].weight * C[i][j];
  }
  return v;
}

}  // namespace reldiff
