#pragma once

#include <functional>
#include <vector>

namespace reldiff {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Hermite rule for the standard normal weight p(r) = exp(-r^2/2)/sqrt(2 pi)
/// (probabilists' convention; weights sum to 1). Golub-Welsch on the Jacobi matrix
/// with off-diagonal sqrt(k); the physicists' rule follows from r = sqrt(2) x.
QuadratureRule gauss_hermite_probabilists(int order);

/// Gauss-Legendre rule on [-1, 1].
QuadratureRule gauss_legendre(int order);
/// Process-wide cache of gauss_legendre(order).
const QuadratureRule& cached_gauss_legendre(int order);

/// Composite Gauss-Legendre integral of f over [a, b], split at the given
/// breakpoints and into panels no wider than max_panel.
double composite_integral(const std::function<double(double)>& f, double a, double b,
                          const std::vector<double>& breakpoints, double max_panel, int order);

/// Adaptive Gauss-Kronrod integral on a finite interval. Throws NumericalError
/// when the error estimate stays above max(abs_tol, rel_tol*|I|).
double adaptive_integral(const std::function<double(double)>& f, double a, double b,
                         double rel_tol = 1e-11, double abs_tol = 1e-15);

/// Integral over R^n (n = 1, 2, 3) of exp(i <lambda, z>) g(|lambda|) |lambda|^gamma
/// for |z| = z_norm, truncated at |lambda| = cutoff. Requires gamma > -n.
/// The origin is handled by the substitution u = r^{gamma+n}; the rest by
/// Gauss-Legendre panels no wider than half an oscillation. Throws NumericalError
/// when two panel orders disagree.
double radial_fourier_integral(int n, double z_norm, const std::function<double(double)>& g, double gamma,
                               double cutoff);

}  // namespace reldiff
