#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "reldiff/convolution.hpp"
#include "reldiff/green.hpp"
#include "reldiff/hermite.hpp"
#include "reldiff/limits.hpp"
#include "reldiff/moments_oracle.hpp"
#include "reldiff/solver.hpp"
#include "reldiff/spectrum.hpp"
#include "reldiff/synth.hpp"

namespace reldiff {

enum class Regime { large_B, small_B, large_C, small_C };
std::string to_string(Regime regime);
Regime regime_from_string(const std::string& name);
bool is_large(Regime regime);
ConditionTag required_condition(Regime regime);
LimitKind limit_kind(Regime regime);

/// Centering exponent theta: n/4, n chi/2, m kappa/4, m kappa chi/2.
double scaling_exponent(Regime regime, int n, int m, double kappa, double chi);

/// Smallest eps for which the fixed rescaled spacing still resolves the dilated
/// initial field: eps^{chi} >= 2 dx'.
double minimal_admissible_eps(double rescaled_spacing, double chi);

struct LadderConfig {
  Regime regime = Regime::large_B;
  /// T values (>= 1) or eps values (in (0, 1]).
  std::vector<double> scales{4, 16, 64, 256};
  /// Small-scale dilation exponent.
  double chi = 0.5;
  int replicates = 2000;
  int n0 = 2;
  std::uint64_t master_seed = 1;
  /// Large: physical spacing. Small: spacing in the rescaled variable x / eps^{1/alpha}.
  double spacing = 0.5;
  /// Large: box >= box_factor * sqrt(T * max(1, t_max)) and >= min_box.
  double box_factor = 64.0;
  double min_box = 256.0;
  /// Small: rescaled box length.
  double small_box = 256.0;
  /// Frequency grid for sigma_m.
  FrequencyGrid sigma_grid = default_frequency_grid(1);
  /// Fourth-moment oracle resolution (Condition C, m = 2, n = 1).
  int oracle_nodes = 1600;
  /// Pre-registered fraction of the oracle excess used as the r4 threshold.
  double oracle_threshold_fraction = 0.5;
  int threads = 1;
};

/// Regime/condition consistency, chi, replicates, scale ranges, grid admissibility.
void validate_ladder(const LadderConfig& config, const ProbeSet& probes, const SpectralDensity& sd,
                     const Subordinator& sub, const ModelParams& params);

/// Physical grid used at one scale.
GridSpec ladder_grid(const LadderConfig& config, const ProbeSet& probes, const ModelParams& params, double scale);

/// T^theta (u(T t, sqrt(T) x) - C0) on a given initial field; theta from the regime.
double rescale_large(const FieldGrid& u0, const ModelParams& params, Regime regime, int m, double kappa, double T,
                     const Probe& probe, double c0);

/// eps^{-theta} (u(eps t, eps^{1/alpha} x; u0(eps^{-1/alpha-chi} .)) - C0) for one replicate:
/// synthesizes the dilated initial field on `grid` (physical units) and solves.
double rescale_small(const SpectralDensity& sd, const Subordinator& sub, double eps, double chi, const Probe& probe,
                     const ModelParams& params, Regime regime, int n0, const GridSpec& grid, const SeedSpec& seed);

/// Majorant sum_{j,k} |a_j a_k| sum_{l > n0} C_l^2 sup f^{*m} int exp(-(t_j + t_k) K) of the
/// variance of the chaos tail left out by the truncation.
double truncation_tail(const SpectralDensity& sd, const Subordinator& sub, int n0, Regime regime,
                       const ModelParams& params, const ProbeSet& probes, const FrequencyGrid& grid);

struct Estimate {
  double value = 0.0;
  double se = 0.0;
};

struct ScaleReport {
  double scale = 0.0;
  GridSpec grid;
  double theta = 0.0;
  int replicates = 0;
  std::vector<std::vector<double>> covariance;
  std::vector<std::vector<double>> covariance_se;
  std::vector<std::vector<double>> limit;
  /// Exact expectation of the estimator on the torus at this scale (truncated chaos).
  std::vector<std::vector<double>> expected;
  Estimate frobenius_rel_err;
  /// ||expected - limit|| / ||limit||: the deterministic part of the error.
  double bias_frobenius = 0.0;
  /// Sum over |k| = 1..3 of the initial-data covariance at lag + k L, max over probe lags.
  double wrap_estimate = 0.0;
  Estimate mean;
  Estimate variance;
  Estimate r2, r3, r4;
  AliasReport alias;
  /// Smallest eigenvalue of the symmetrized empirical and limit matrices.
  double min_eig_empirical = 0.0;
  double min_eig_limit = 0.0;
};

struct LadderReport {
  Regime regime = Regime::large_B;
  LadderConfig config;
  ProbeSet probes;
  LimitSpec limit;
  double c0 = 0.0;
  int rank = 1;
  std::optional<SigmaReport> sigma;
  std::optional<FourthMomentOracle> oracle;
  /// oracle_threshold_fraction * oracle excess (hermite regimes).
  double r4_threshold = 0.0;
  double truncation_tail = 0.0;
  std::vector<ScaleReport> scales;
  /// e_{k+1} <= e_k + 3 sqrt(se_k^2 + se_{k+1}^2) along the ladder.
  bool error_decreasing = false;
  bool bias_decreasing = false;
  std::vector<std::string> notes;
};

/// Runs the Monte Carlo ladder. Results depend only on the inputs and the seed,
/// never on config.threads.
LadderReport run_ladder(const LadderConfig& config, const ProbeSet& probes, const SpectralDensity& sd,
                        const Subordinator& sub, const ModelParams& params);

/// JSON document of a ladder report (schema: regime, scales[] ...).
std::string ladder_report_json(const LadderReport& report);
/// One row per scale.
std::string ladder_report_csv(const LadderReport& report);

}  // namespace reldiff
