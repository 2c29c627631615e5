#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "reldiff/rng.hpp"
#include "reldiff/spectrum.hpp"

namespace reldiff {

class Subordinator;

/// Periodic sampling grid on [0, L)^n with N points per axis.
struct GridSpec {
  int dim = 1;
  std::size_t points = 1024;
  double box_length = 512.0;

  double spacing() const { return box_length / static_cast<double>(points); }
  std::size_t total() const { return dim == 1 ? points : points * points; }
  /// 2 pi / L.
  double frequency_step() const;
  void validate() const;
};

/// Real field sampled on a GridSpec; row-major for n = 2.
struct FieldGrid {
  GridSpec grid;
  std::vector<double> values;
  std::uint64_t seed = 0;
};

/// Spectral mass of each lattice frequency 2 pi k / L (full FFT layout, row-major),
/// including every alias k + j N folded in. Bounded densities use point samples
/// f(lambda_k) (2 pi / L)^n; singular ones use exact cell masses.
std::vector<double> lattice_spectrum(const SpectralDensity& sd, const GridSpec& grid);

/// Gaussian field with spectral density sd by Hermitian-noise spectral synthesis.
/// Stream rule: the noise of lattice frequency k is drawn from Philox at counter
/// k (canonical member of the pair {k, -k}), key master seed, words (replicate, stream).
FieldGrid sample_gaussian_field(const SpectralDensity& sd, const GridSpec& grid, const SeedSpec& seed);

/// Same with a precomputed lattice_spectrum (amplitudes are its square roots).
FieldGrid sample_gaussian_field(const std::vector<double>& spectrum, const GridSpec& grid, const SeedSpec& seed);

/// u0 = h_{<= n0}(zeta) pointwise.
FieldGrid make_initial_data(const FieldGrid& field, const Subordinator& sub, int n0);

struct CovarianceEstimate {
  std::vector<std::array<long, 2>> lags;
  std::vector<double> value;
  std::vector<double> standard_error;
};

/// Translation-averaged covariance at integer grid lags, jackknifed over replicates.
/// When known_mean is absent the pooled sample mean is subtracted. Needs >= 30 replicates.
CovarianceEstimate estimate_covariance(const std::vector<FieldGrid>& replicates,
                                       const std::vector<std::array<long, 2>>& lags,
                                       std::optional<double> known_mean = std::nullopt);

/// Little-endian binary: uint32 n, uint64 N, float64 L, uint64 seed, then N^n float64 row-major.
void write_field_binary(std::ostream& os, const FieldGrid& field);
FieldGrid read_field_binary(std::istream& is);
/// Columns x,value (n = 1 only).
void write_field_csv(std::ostream& os, const FieldGrid& field);

}  // namespace reldiff
