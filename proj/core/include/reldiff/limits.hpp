#pragma once

#include <array>
#include <string>
#include <vector>

#include "reldiff/green.hpp"
#include "reldiff/spectrum.hpp"

namespace reldiff {

/// One term a * Y(t, x) of a linear probe combination.
struct Probe {
  double weight = 1.0;
  double t = 1.0;
  std::array<double, 2> x{0.0, 0.0};
};
using ProbeSet = std::vector<Probe>;

/// Requires at least one probe, t > 0, finite weights and points.
void validate_probes(const ProbeSet& probes);

enum class LimitKind { gaussian_large, gaussian_small, hermite_large, hermite_small };
std::string to_string(LimitKind kind);
bool is_large(LimitKind kind);
bool is_hermite(LimitKind kind);

/// Target field of a scaling limit and everything its covariance depends on.
struct LimitSpec {
  LimitKind kind = LimitKind::gaussian_large;
  int dim = 1;
  double alpha = 1.0;
  double mass = 1.0;
  /// gaussian kinds.
  double sigma = 1.0;
  /// hermite kinds.
  double cm = 0.0;
  double b0 = 0.0;
  double kappa = 0.0;
  int m = 2;

  void validate() const;
  /// Exponent K(|mu|) of the limit multiplier exp(-t K).
  double symbol(double mu) const;
};

/// int_{R^n} e^{i <mu, z>} exp(-tau K(|mu|)) |mu|^gamma d mu with K = spec.symbol.
double spectral_integral(const LimitSpec& spec, double z_norm, double tau, double gamma);

/// a_beta = pi^{n/2} 2^beta Gamma(beta/2) / Gamma((n - beta)/2), so that
/// int e^{i<lambda, x>} |lambda|^{beta - n} d lambda = a_beta |x|^{-beta} for 0 < beta < n.
double riesz_constant(int n, double beta);

/// g_m(mu) = riesz_composition(n, kappa, m) |mu|^{m kappa - n}, the m-fold
/// convolution of |.|^{kappa - n}. Requires m kappa < n.
double riesz_composition(int n, double kappa, int m);

/// B(kappa, kappa) + 2 B(1 - 2 kappa, kappa): the n = 1, m = 2 constant by direct integration.
double riesz_pair_constant_1d(double kappa);

/// Covariance of the limit field between (t, x) and (s, y).
double limit_covariance(const LimitSpec& spec, double t, const std::array<double, 2>& x, double s,
                        const std::array<double, 2>& y);

/// Limit covariance matrix over the probes (unweighted entries).
std::vector<std::vector<double>> limit_covariance_matrix(const LimitSpec& spec, const ProbeSet& probes);

/// Variance of sum_j a_j X(t_j, x_j) under the limit.
double limit_probe_variance(const LimitSpec& spec, const ProbeSet& probes);

}  // namespace reldiff
