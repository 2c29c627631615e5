#pragma once

#include <optional>
#include <span>
#include <string>

namespace reldiff {

/// Shape of the regular factor b(r), r = |lambda|.
enum class BFamily {
  exponential,  ///< exp(-a r)
  gaussian,     ///< exp(-a r^2)
  bump,         ///< exp(-1 / (1 - (r/a)^2)) on r < a, zero beyond
};

std::string to_string(BFamily family);
BFamily bfamily_from_string(const std::string& name);

/// Radial spectral density f(lambda) = B(|lambda|) |lambda|^{kappa - n} with
/// B = norm_const * b(|lambda| / dilation) * dilation^{-kappa}, normalized to unit mass.
///
/// The dilation is the factor c of x -> zeta(c x), whose density is
/// c^{-n} f(lambda / c); c = 1 for freshly built densities.
class SpectralDensity {
 public:
  /// Builds and normalizes; rejects kappa <= 0, decay <= 0, dim outside {1, 2}.
  static SpectralDensity normalized(int dim, double kappa, BFamily family, double decay = 1.0);

  int dim() const { return dim_; }
  double kappa() const { return kappa_; }
  BFamily family() const { return family_; }
  double decay() const { return decay_; }
  double norm_const() const { return norm_const_; }
  double dilation() const { return dilation_; }
  /// kappa < n: unbounded at the origin.
  bool singular() const { return kappa_ < dim_; }

  /// Regular factor B(r) including normalization and dilation.
  double B(double r) const;
  double B0() const { return B(0.0); }

  /// f at radius r > 0, or at r = 0 when the density is bounded there.
  double eval_radial(double r) const;

  /// Radius beyond which B is below 1e-18 of B(0).
  double cutoff() const;

  /// Integral of B(r) r^{kappa-1} over [r0, r1], exact at the origin.
  double radial_profile_integral(double r0, double r1) const;
  /// Mass of f on [lo, hi] (dim 1).
  double interval_mass(double lo, double hi) const;
  /// Mass of f on the rectangle [x0, x1] x [y0, y1] (dim 2).
  double rect_mass(double x0, double x1, double y0, double y1) const;
  /// Total mass by quadrature (should be 1).
  double total_mass() const;

  /// Density of x -> zeta(c x) for the field zeta carrying this density.
  SpectralDensity dilated(double c) const;

  std::string describe() const;

 private:
  SpectralDensity() = default;
  double profile(double r) const;  // b(r / dilation), unnormalized

  int dim_ = 1;
  double kappa_ = 1.0;
  BFamily family_ = BFamily::exponential;
  double decay_ = 1.0;
  double norm_const_ = 1.0;
  double dilation_ = 1.0;
};

/// f(lambda). Throws SingularityError at lambda = 0 when kappa < n.
double eval_f(const SpectralDensity& sd, std::span<const double> lambda);

/// R(x) = int e^{i<lambda, x>} f(lambda) d lambda at |x| = x_norm.
double covariance_R(const SpectralDensity& sd, double x_norm);

/// Same as sd.dilated(c); kept as a free function for the synthesis pipeline.
SpectralDensity dilate_spectrum(const SpectralDensity& sd, double c);

enum class ConditionTag { B, C, boundary };
std::string to_string(ConditionTag tag);

struct ConditionClass {
  ConditionTag tag;
  double kappa;
  int n;
  int m;
};

/// B iff kappa > n/m, C iff kappa < n/m (relative tolerance 1e-12 for the boundary).
ConditionClass classify(double kappa, int n, int m);

/// max{k >= m+1 : k kappa <= n}, or none. Requires Condition C.
std::optional<int> k_star(double kappa, int n, int m);

}  // namespace reldiff
