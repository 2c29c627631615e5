#include "reldiff/moments_oracle.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "reldiff/error.hpp"

namespace reldiff {

namespace {

// Real-space limit kernel k_t: heat kernel (large) or Cauchy (small, alpha = 1).
struct Kernel {
  bool gaussian;
  double coef;  // heat coefficient for the Gaussian kind

  double scale(double t) const { return gaussian ? std::sqrt(2.0 * t * coef) : t; }
  double pdf(double t, double y) const {
    const double s = scale(t);
    if (gaussian) return std::exp(-0.5 * y * y / (s * s)) / (s * std::sqrt(2.0 * std::numbers::pi));
    return s / (std::numbers::pi * (s * s + y * y));
  }
  double cdf(double t, double y) const {
    const double s = scale(t);
    if (gaussian) return 0.5 * std::erfc(-y / (s * std::numbers::sqrt2));
    return 0.5 + std::atan(y / s) / std::numbers::pi;
  }
};

double excess_at(const Kernel& k, const ProbeSet& probes, double kappa, int N, double& trace2) {
  double wsum = 0.0;
  for (const auto& p : probes) wsum += std::abs(p.weight);
  auto mix_cdf = [&](double y) {
    double v = 0.0;
    for (const auto& p : probes) v += std::abs(p.weight) / wsum * k.cdf(p.t, y - p.x[0]);
    return v;
  };
  double lo_all = 0.0, hi_all = 0.0;
  for (const auto& p : probes) {
    const double s = k.scale(p.t);
    const double reach = k.gaussian ? 12.0 * s : 1e6 * s;
    lo_all = std::min(lo_all, p.x[0] - reach);
    hi_all = std::max(hi_all, p.x[0] + reach);
  }

  auto quantile = [&](double u) {
    double lo = lo_all, hi = hi_all;
    for (int it = 0; it < 200 && hi - lo > 1e-13 * (1.0 + std::abs(lo) + std::abs(hi)); ++it) {
      const double mid = 0.5 * (lo + hi);
      (mix_cdf(mid) < u ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };
  // Cells are equal-probability slices of the probe mixture; nodes at their medians.
  std::vector<double> edge(N + 1), y(N), psi(N);
  edge[0] = lo_all;
  edge[N] = hi_all;
  for (int i = 1; i < N; ++i) edge[i] = quantile(static_cast<double>(i) / N);
  for (int i = 0; i < N; ++i) {
    y[i] = quantile((i + 0.5) / N);
    double v = 0.0;
    for (const auto& p : probes) v += p.weight * k.pdf(p.t, p.x[0] - y[i]);
    psi[i] = v;
  }

  // P_ij = psi(y_i) int_{cell j} |y_i - y|^{-kappa} dy (product integration of the singularity).
  auto antider = [&](double d) { return std::copysign(std::pow(std::abs(d), 1.0 - kappa), d) / (1.0 - kappa); };
  Eigen::MatrixXd P(N, N);
  for (int i = 0; i < N; ++i) {
    double prev = antider(edge[0] - y[i]);
    for (int j = 0; j < N; ++j) {
      const double next = antider(edge[j + 1] - y[i]);
      P(i, j) = psi[i] * (next - prev);
      prev = next;
    }
  }
  const Eigen::MatrixXd P2 = P * P;
  trace2 = P2.trace();
  const double t4 = (P2.array() * P2.transpose().array()).sum();
  return 4.0 * t4 / (trace2 * trace2);
}

}  // namespace

FourthMomentOracle hermite2_fourth_moment(const LimitSpec& spec, const ProbeSet& probes, int nodes) {
  spec.validate();
  validate_probes(probes);
  if (!is_hermite(spec.kind) || spec.m != 2 || spec.dim != 1) {
    throw ValidationError("fourth-moment oracle covers hermite limits with m = 2 in n = 1");
  }
  if (!is_large(spec.kind) && std::abs(spec.alpha - 1.0) > 1e-12) {
    throw ValidationError("small-scale fourth-moment oracle needs alpha = 1");
  }
  if (nodes < 64) throw ValidationError("fourth-moment oracle needs at least 64 nodes");
  const Kernel k{is_large(spec.kind),
                 is_large(spec.kind) ? ModelParams(1, spec.alpha, spec.mass).heat_coefficient() : 0.0};
  FourthMomentOracle out;
  double trace2 = 0.0;
  for (int N : {nodes / 4, nodes / 2, nodes}) {
    out.nodes.push_back(N);
    out.excess_by_nodes.push_back(excess_at(k, probes, spec.kappa, N, trace2));
  }
  out.excess = out.excess_by_nodes.back();
  out.resolution_error = std::abs(out.excess_by_nodes[2] - out.excess_by_nodes[1]);
  const double a = riesz_constant(1, spec.kappa);
  out.variance = spec.cm * spec.cm * spec.b0 * spec.b0 * a * a * trace2;
  return out;
}

}  // namespace reldiff
