#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace reldiff {

inline constexpr int kMaxHermiteDegree = 64;
inline constexpr int kDefaultLmax = 12;
inline constexpr double kDefaultRankTolerance = 1e-9;

/// Probabilists' Hermite polynomial He_l(r) via H_{l+1} = r H_l - l H_{l-1}.
double hermite_eval(int l, double r);

/// He_0(r) .. He_lmax(r) into out (size >= lmax + 1).
void hermite_eval_all(int lmax, double r, std::span<double> out);

/// A subordinating function h from one of the supported parametric families.
class SubordinatorFamily {
 public:
  enum class Kind { hermite_series, power, absolute, sign, exp_clipped, table };

  /// h(r) = sum_l a[l] He_l(r) (unnormalized probabilists' basis).
  static SubordinatorFamily hermite_series(std::vector<double> a);
  /// h(r) = r^k.
  static SubordinatorFamily power(int k);
  static SubordinatorFamily absolute();
  static SubordinatorFamily sign();
  /// h(r) = exp(rate * min(r, clip)).
  static SubordinatorFamily exp_clipped(double rate, double clip);
  /// Piecewise-linear interpolation through (x[i], y[i]), constant beyond the ends.
  static SubordinatorFamily table(std::vector<double> x, std::vector<double> y);

  double operator()(double r) const;
  Kind kind() const { return kind_; }
  /// Smooth families integrate with Gauss-Hermite; the rest use composite
  /// Gauss-Legendre split at their kinks.
  bool smooth() const;
  std::vector<double> kinks() const;
  /// Degree when h is a polynomial, -1 otherwise.
  int polynomial_degree() const;
  std::string describe() const;

  const std::vector<double>& params() const { return a_; }
  const std::vector<double>& table_x() const { return x_; }
  const std::vector<double>& table_y() const { return y_; }

 private:
  SubordinatorFamily(Kind kind) : kind_(kind) {}
  Kind kind_;
  std::vector<double> a_;
  std::vector<double> x_, y_;
};

/// C_l = int h(r) He_l(r)/sqrt(l!) p(r) dr for l = 0..lmax. quad_order <= 0 picks
/// a default. The integral is repeated at twice the resolution; disagreement above
/// tol (relative to the largest coefficient) throws NumericalError.
std::vector<double> hermite_coefficients(const SubordinatorFamily& h, int lmax, int quad_order = 0,
                                         double tol = 1e-10);

/// int h^2(r) p(r) dr, the Condition-A second moment.
double second_moment(const SubordinatorFamily& h, int quad_order = 0);

/// Smallest l >= 1 with |C_l| > tol * max_l |C_l|. Throws ValidationError for
/// a constant function.
int hermite_rank(std::span<const double> coeffs, double rank_tolerance = kDefaultRankTolerance);

/// A subordinating function together with its Hermite data.
class Subordinator {
 public:
  static Subordinator build(SubordinatorFamily h, int lmax = kDefaultLmax, int quad_order = 0,
                            double rank_tolerance = kDefaultRankTolerance);
  /// Direct construction from coefficients (used for synthetic spectra in tests).
  static Subordinator from_coefficients(std::vector<double> coeffs,
                                        double rank_tolerance = kDefaultRankTolerance);

  const std::vector<double>& coeffs() const { return coeffs_; }
  double c0() const { return coeffs_.front(); }
  int rank() const { return rank_; }
  int lmax() const { return static_cast<int>(coeffs_.size()) - 1; }
  /// E h^2(zeta(0)).
  double l2_norm_sq() const { return l2_norm_sq_; }
  /// sum_{l > n0} C_l^2 estimated as the Parseval deficit, clamped at 0.
  double tail_energy(int n0) const;
  const SubordinatorFamily* family() const { return family_.has_value() ? &*family_ : nullptr; }

 private:
  std::vector<double> coeffs_;
  int rank_ = 1;
  double l2_norm_sq_ = 0.0;
  std::optional<SubordinatorFamily> family_;
};

/// Pointwise h_{<=n0}(z) = C_0 + sum_{l=rank}^{n0} C_l He_l(z)/sqrt(l!).
void subordinate_truncated(std::span<const double> coeffs, int rank, int n0, std::span<const double> zeta,
                           std::span<double> out);
std::vector<double> subordinate_truncated(std::span<const double> coeffs, int rank, int n0,
                                          std::span<const double> zeta);

}  // namespace reldiff
