#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "reldiff/convolution.hpp"
#include "reldiff/green.hpp"
#include "reldiff/hermite.hpp"
#include "reldiff/limits.hpp"
#include "reldiff/scaling.hpp"
#include "reldiff/spectrum.hpp"
#include "reldiff/synth.hpp"

namespace reldiff {

struct ModelSection {
  int dim = 1;
  double alpha = 1.0;
  double mass = 1.0;
};

struct SpectrumSection {
  double kappa = 1.0;
  BFamily family = BFamily::exponential;
  double decay = 1.0;
};

struct SubordinatorSection {
  /// hermite_series, power, absolute, sign, exp_clipped or table.
  std::string family = "hermite_series";
  /// hermite_series: h = sum_l a_l He_l.
  std::vector<double> coefficients{0.0, 0.0, 1.0};
  int power = 2;
  double rate = 1.0;
  double clip = 3.0;
  std::vector<double> table_x;
  std::vector<double> table_y;
  int lmax = kDefaultLmax;
  int quad_order = 0;
  double rank_tolerance = kDefaultRankTolerance;
};

struct SimulateSection {
  GridSpec grid;
  std::vector<double> times{0.0, 1.0};
  int replicates = 1;
  int n0 = 2;
  /// binary or csv.
  std::string format = "binary";
};

struct Lemma1Section {
  std::vector<double> kappas{0.2, 0.3, 0.5, 1.0};
  std::vector<int> ks{2, 3, 4};
  /// Largest k of the sup-monotonicity chain.
  int sup_kmax = 6;
  FrequencyGrid grid = default_frequency_grid(1);
};

struct GreenSection {
  double t = 1.0;
  std::vector<double> large_scales{1e2, 1e3, 1e4};
  std::vector<double> small_scales{1e-2, 1e-3, 1e-4};
  double lambda_max = 4.0;
  int panel_points = 100;
  /// Second mass for the small-scale mass-independence column.
  double compare_mass = 0.0;
};

struct DiagramsSection {
  int nu = 2;
  int m = 1;
  int n0 = 2;
};

struct ExperimentConfig {
  ModelSection model;
  SpectrumSection spectrum;
  SubordinatorSection subordinator;
  LadderConfig ladder;
  ProbeSet probes{{1.0, 1.0, {0.0, 0.0}}, {1.0, 1.0, {1.0, 0.0}}, {1.0, 2.0, {0.5, 0.0}}};
  SimulateSection simulate;
  Lemma1Section lemma1;
  GreenSection green;
  DiagramsSection diagrams;
  std::uint64_t master_seed = 1;
  std::string output_dir = "out";
  bool svg = true;
};

/// Parses TOML text; unknown sections or keys and ill-typed values throw
/// ValidationError naming the offending field.
ExperimentConfig parse_config(const std::string& text, const std::string& source = "<config>");
ExperimentConfig load_config(const std::string& path);

/// Every field, defaults included, as TOML.
std::string to_toml(const ExperimentConfig& config);
/// Same content as JSON (used in manifests).
std::string to_json(const ExperimentConfig& config);

/// FNV-1a 64-bit hash.
std::uint64_t fnv1a64(const std::string& bytes);

ModelParams make_params(const ExperimentConfig& config);
SpectralDensity make_density(const ExperimentConfig& config);
Subordinator make_subordinator(const ExperimentConfig& config);

struct ValidationReport {
  ConditionClass condition;
  int rank = 1;
  double theta = 0.0;
  std::string limit_kind;
  /// Peak bytes of the largest ladder rung (fields, spectra, buffers per thread, replicate rows).
  double memory_bytes = 0.0;
  std::optional<double> minimal_eps;
  std::vector<std::string> notes;
};

/// Dry run of the ladder preconditions: classification versus regime, N0 versus rank,
/// exponent selection, grid resolution of the smallest eps, memory estimate.
ValidationReport validate_config(const ExperimentConfig& config, int threads = 1);
std::string to_json(const ValidationReport& report);

}  // namespace reldiff
