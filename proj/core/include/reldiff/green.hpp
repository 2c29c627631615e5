#pragma once

#include <span>
#include <vector>

namespace reldiff {

/// Parameters of the relativistic diffusion operator
/// m - (m^{2/alpha} - Laplacian)^{alpha/2} acting on R^dim.
class ModelParams {
 public:
  ModelParams(int dim, double alpha, double mass);

  int dim() const { return dim_; }
  double alpha() const { return alpha_; }
  double mass() const { return mass_; }
  /// mass^{2/alpha}, cached for the frequency loops.
  double mass_pow() const { return mass_pow_; }
  /// Coefficient (alpha/2) mass^{1-2/alpha} of the large-scale heat limit.
  double heat_coefficient() const;

  /// Exponent psi(|lambda|) = (mass^{2/alpha} + |lambda|^2)^{alpha/2} - mass >= 0.
  double symbol(double lambda_norm) const;

 private:
  int dim_;
  double alpha_;
  double mass_;
  double mass_pow_;
};

double norm(std::span<const double> lambda);

/// Fourier multiplier of the Green function, exp(-t psi(|lambda|)).
double green_hat(const ModelParams& p, double t, std::span<const double> lambda);
double green_hat(const ModelParams& p, double t, double lambda_norm);

/// Large-scale rescaling G^(T t, lambda / sqrt(T)). Requires mass > 0.
double green_hat_large(const ModelParams& p, double T, double t, std::span<const double> lambda);
double green_hat_large(const ModelParams& p, double T, double t, double lambda_norm);

/// exp(-t (alpha/2) mass^{1-2/alpha} |lambda|^2). Requires mass > 0.
double limit_kernel_large(const ModelParams& p, double t, std::span<const double> lambda);
double limit_kernel_large(const ModelParams& p, double t, double lambda_norm);

/// Small-scale rescaling G^(eps t, eps^{-1/alpha} lambda), any mass >= 0.
double green_hat_small(const ModelParams& p, double eps, double t, std::span<const double> lambda);
double green_hat_small(const ModelParams& p, double eps, double t, double lambda_norm);

/// exp(-t |lambda|^alpha).
double limit_kernel_small(double alpha, double t, std::span<const double> lambda);
double limit_kernel_small(double alpha, double t, double lambda_norm);

/// |T t (mass - (mass^{2/alpha} + |lambda|^2/T)^{alpha/2}) + t (alpha/2) mass^{1-2/alpha} |lambda|^2|,
/// the second-order Taylor remainder of the large-scale exponent.
double taylor_gap(const ModelParams& p, double T, double t, double lambda_norm);

/// Closed-form majorant of taylor_gap using the worst-case intermediate point
/// c_T = mass^{2/alpha}: t (alpha/4)|1 - alpha/2| mass^{(2/alpha)(alpha/2 - 2)} |lambda|^4 / T.
double taylor_gap_bound(const ModelParams& p, double T, double t, double lambda_norm);

struct MultiplierConvergence {
  double scale = 0.0;
  double sup_error = 0.0;
  double argmax_lambda = 0.0;
};

/// sup over |lambda| = lambda_max * i / points, i = 1..points, of
/// |green_hat_large(T) - limit_kernel_large|, one row per T.
std::vector<MultiplierConvergence> large_scale_convergence(const ModelParams& p, double t, std::span<const double> Ts,
                                                           double lambda_max, int points = 100);
/// Same panel for |green_hat_small(eps) - limit_kernel_small|.
std::vector<MultiplierConvergence> small_scale_convergence(const ModelParams& p, double t, std::span<const double> eps,
                                                           double lambda_max, int points = 100);
/// sup over the panel of |green_hat_small at mass1 - green_hat_small at mass2|.
double small_scale_mass_gap(int dim, double alpha, double mass1, double mass2, double eps, double t,
                            double lambda_max, int points = 100);

}  // namespace reldiff
