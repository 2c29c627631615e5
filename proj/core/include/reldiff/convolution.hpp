#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "reldiff/spectrum.hpp"

namespace reldiff {

class Subordinator;

/// Centered frequency lattice: per axis lambda_i = (i - N/2) * spacing, i = 0..N-1,
/// spacing = 2 half_width / N. Origin sits at index N/2.
struct FrequencyGrid {
  int dim = 1;
  std::size_t points = std::size_t{1} << 20;
  double half_width = 64.0;

  double spacing() const { return 2.0 * half_width / static_cast<double>(points); }
  double coord(std::size_t i) const {
    return (static_cast<double>(i) - static_cast<double>(points / 2)) * spacing();
  }
  std::size_t total() const { return dim == 1 ? points : points * points; }
  std::size_t origin_index() const { return dim == 1 ? points / 2 : (points / 2) * points + points / 2; }
  double cell_volume() const { return dim == 1 ? spacing() : spacing() * spacing(); }
  void validate() const;
};

/// 2^20 points on |lambda| <= 64 (n = 1); 2^10 per axis on |lambda_i| <= 16 (n = 2).
FrequencyGrid default_frequency_grid(int dim);

/// Density values on the grid: point samples where f is bounded, cell averages
/// (mass / cell volume) everywhere when f is singular at the origin.
std::vector<double> sample_density(const SpectralDensity& sd, const FrequencyGrid& grid);

struct ConvolutionPower {
  int k = 1;
  FrequencyGrid grid;
  /// f^{*k} on the grid (row-major for n = 2), from the Fourier route.
  std::vector<double> values;
  /// max |Fourier route - iterated direct route| / max |values|.
  double max_discrepancy = 0.0;
  /// sum(values) * cell volume.
  double mass = 0.0;

  double at_origin() const { return values[grid.origin_index()]; }
};

/// f^{*1} .. f^{*kmax}. Each power is computed as the inverse transform of R^k
/// and cross-checked against iterated zero-padded convolution; a discrepancy above
/// tol throws NumericalError naming a finer grid.
std::vector<ConvolutionPower> convolution_powers(const SpectralDensity& sd, int kmax, const FrequencyGrid& grid,
                                                 double tol = 1e-6);

ConvolutionPower convolve_k(const SpectralDensity& sd, int k, const FrequencyGrid& grid, double tol = 1e-6);

/// CSV with columns lambda,f_star_k (n = 1) or lambda1,lambda2,f_star_k (n = 2).
void write_convolution_csv(std::ostream& os, const ConvolutionPower& power);

enum class Lemma1Regime { power, log, continuous, inconclusive };
std::string to_string(Lemma1Regime regime);

/// Regime predicted from k kappa versus n.
Lemma1Regime predicted_regime(double kappa, int n, int k);

struct Lemma1Report {
  int k = 0;
  double kappa = 0.0;
  int n = 1;
  Lemma1Regime predicted = Lemma1Regime::inconclusive;
  Lemma1Regime regime = Lemma1Regime::inconclusive;
  /// Exponent s of the fit f^{*k} ~ A |lambda|^s + D on the window.
  double exponent_estimate = 0.0;
  double fit_r2 = 0.0;
  /// Slope of log f^{*k} against log |lambda|.
  double loglog_slope = 0.0;
  double loglog_r2 = 0.0;
  /// Fit f^{*k} ~ a + b ln(2 + 1/|lambda|).
  double log_fit_slope = 0.0;
  double log_fit_r2 = 0.0;
  /// Range of f^{*k}(lambda) / ln(2 + 1/|lambda|) over the window.
  double log_ratio_min = 0.0;
  double log_ratio_max = 0.0;
  /// Sup over the window of f^{*k}/|lambda|^{k kappa - n} (power), f^{*k}/ln(2+1/|lambda|)
  /// (log), or sup of f^{*k} over the grid (continuous).
  double sup_Bk_estimate = 0.0;
  double value_at_origin = 0.0;
  double window_lo = 1e-3;
  double window_hi = 1e-1;
};

/// Classifies the origin behaviour of a precomputed f^{*k} over |lambda| in [lo, hi].
Lemma1Report lemma1_regime(const ConvolutionPower& power, double kappa, double lo = 1e-3, double hi = 1e-1);
Lemma1Report lemma1_regime(const SpectralDensity& sd, int k, const FrequencyGrid& grid);

struct SupMonotonicity {
  bool ok = true;
  double sup_k1 = 0.0;
  double sup_k2 = 0.0;
  /// Every f^{*l}, k2 <= l <= k1, bounded by sup f^{*k2}.
  bool chain_ok = true;
  std::optional<double> offending_lambda;
  std::optional<int> offending_k;
};

/// sup f^{*k1} <= sup f^{*k2} on the grid. Requires k1 > k2 > n / kappa.
SupMonotonicity sup_monotonicity_check(const std::vector<ConvolutionPower>& powers, double kappa, int k1, int k2);
SupMonotonicity sup_monotonicity_check(const SpectralDensity& sd, int k1, int k2, const FrequencyGrid& grid);

struct SigmaReport {
  double sigma = 0.0;
  double sigma_sq = 0.0;
  struct Term {
    int r;
    double f_star_r_at_origin;
    double coeff_sq;
  };
  std::vector<Term> terms;
  /// Orders r with r kappa = n, left out of the sum.
  std::vector<int> excluded;
  /// sup f^{*kbar} * sum_{r > N0} C_r^2.
  double tail_bound = 0.0;
  bool degenerate = false;
};

/// sigma_{m,N0} = (sum_{r=m}^{N0} f^{*r}(0) C_r^2)^{1/2}. Rejects Condition C.
/// tail_energy is sum_{r > N0} C_r^2 (defaults to the coefficients beyond N0).
SigmaReport sigma_m(const SpectralDensity& sd, std::span<const double> coeffs, int m, int n0,
                    const FrequencyGrid& grid, std::optional<double> tail_energy = std::nullopt);
SigmaReport sigma_m(const SpectralDensity& sd, const Subordinator& sub, int n0, const FrequencyGrid& grid);

}  // namespace reldiff
