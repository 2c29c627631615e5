#pragma once

#include <vector>

#include "reldiff/limits.hpp"

namespace reldiff {

/// Fourth moment of xi = sum_j a_j U(t_j, x_j) for a second-chaos (m = 2) limit in n = 1.
///
/// In real space U(t, x) = (C_2 / sqrt 2) int k_t(x - y) :eta(y)^2: dy with
/// Cov eta(y1, y2) = B(0) a_kappa |y1 - y2|^{-kappa}, so with A = psi * rho
/// (psi = sum_j a_j k_{t_j}(x_j - .), rho = |.|^{-kappa}) the cumulants are
/// 2^{p-1}(p-1)! Tr A^p and r_4 - 1 = 4 Tr A^4 / (Tr A^2)^2.
struct FourthMomentOracle {
  double excess = 0.0;    ///< r_4 - 1 at the finest resolution
  double variance = 0.0;  ///< C_2^2 B(0)^2 a_kappa^2 Tr A^2, for cross-checking limit_probe_variance
  std::vector<int> nodes;
  std::vector<double> excess_by_nodes;
  /// |excess(finest) - excess(previous)|.
  double resolution_error = 0.0;
};

/// Quantile-grid product-integration discretization of A at nodes/4, nodes/2, nodes points.
/// hermite_small requires alpha = 1 (Cauchy kernel).
FourthMomentOracle hermite2_fourth_moment(const LimitSpec& spec, const ProbeSet& probes, int nodes = 1600);

}  // namespace reldiff
