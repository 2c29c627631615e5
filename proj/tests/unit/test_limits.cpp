#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "reldiff/error.hpp"
#include "reldiff/limits.hpp"
#include "reldiff/moments_oracle.hpp"

using namespace reldiff;

namespace {

LimitSpec gaussian(LimitKind kind, double sigma) {
  LimitSpec s;
  s.kind = kind;
  s.sigma = sigma;
  return s;
}

LimitSpec hermite(LimitKind kind, double kappa) {
  LimitSpec s;
  s.kind = kind;
  s.cm = std::sqrt(2.0);
  s.b0 = 1.0 / (2.0 * std::tgamma(kappa));
  s.kappa = kappa;
  s.m = 2;
  return s;
}

// int e^{i mu z} e^{-tau |mu|} |mu|^g d mu = 2 Gamma(g + 1) Re (tau - i z)^{-(g + 1)}.
double poisson_oracle(double z, double tau, double g) {
  return 2.0 * std::tgamma(g + 1.0) * std::pow(std::complex<double>(tau, -z), -(g + 1.0)).real();
}

}  // namespace

TEST_CASE("gaussian_small closed forms") {
  const auto s = gaussian(LimitKind::gaussian_small, 0.7);
  CHECK(limit_covariance(s, 0.5, {0, 0}, 0.5, {0, 0}) == doctest::Approx(2 * 0.49).epsilon(1e-10));
  for (double z : {0.3, 1.0, 4.0}) {
    CHECK(limit_covariance(s, 0.4, {0, 0}, 0.9, {z, 0}) ==
          doctest::Approx(0.49 * poisson_oracle(z, 1.3, 0.0)).epsilon(1e-9));
  }
}

TEST_CASE("gaussian_large is a heat kernel") {
  const auto s = gaussian(LimitKind::gaussian_large, 1.0);
  // c = 1/2, tau = 2: sqrt(pi) exp(-z^2 / 4).
  for (double z : {0.0, 1.0, 3.0}) {
    CHECK(limit_covariance(s, 1.0, {0, 0}, 1.0, {z, 0}) ==
          doctest::Approx(std::sqrt(std::numbers::pi) * std::exp(-z * z / 4)).epsilon(1e-10));
  }
  const double diag = limit_covariance(s, 1.0, {0, 0}, 1.0, {0, 0});
  CHECK(limit_covariance(s, 1.0, {0, 0}, 1.0, {10, 0}) < 1e-3 * diag);
}

TEST_CASE("hermite kinds") {
  const auto small = hermite(LimitKind::hermite_small, 0.3);
  const double pre = 2.0 * small.b0 * small.b0 * riesz_composition(1, 0.3, 2);
  for (double z : {0.0, 0.5, 2.0}) {
    CHECK(limit_covariance(small, 1.0, {0, 0}, 0.5, {z, 0}) ==
          doctest::Approx(pre * poisson_oracle(z, 1.5, -0.4)).epsilon(1e-8));
  }
  const auto large = hermite(LimitKind::hermite_large, 0.3);
  // z = 0: Gamma((g + 1)/2) (tau c)^{-(g + 1)/2} with c = 1/2.
  const double want = pre * std::tgamma(0.3) * std::pow(1.0, -0.3);
  CHECK(limit_covariance(large, 1.0, {1, 0}, 1.0, {1, 0}) == doctest::Approx(want).epsilon(1e-8));
  for (const auto& s : {small, large}) {
    for (double t : {0.5, 2.0}) CHECK(limit_covariance(s, t, {0, 0}, t, {0, 0}) > 0.0);
  }
}

TEST_CASE("Riesz constants") {
  for (double k : {0.1, 0.25, 0.3, 0.45}) {
    CHECK(riesz_composition(1, k, 2) == doctest::Approx(riesz_pair_constant_1d(k)).epsilon(1e-10));
  }
  CHECK(riesz_composition(1, 0.4, 1) == 1.0);
  CHECK_THROWS_AS(riesz_composition(1, 0.5, 2), ValidationError);
  // beta = 1/2 in n = 1: sqrt(pi) sqrt(2) Gamma(1/4) / Gamma(1/4).
  CHECK(riesz_constant(1, 0.5) == doctest::Approx(std::sqrt(2 * std::numbers::pi)).epsilon(1e-14));
}

TEST_CASE("probe validation and matrix") {
  const auto s = gaussian(LimitKind::gaussian_small, 1.0);
  CHECK_THROWS_AS(limit_covariance_matrix(s, {}), ValidationError);
  CHECK_THROWS_AS(limit_covariance_matrix(s, {{1.0, 0.0, {0, 0}}}), ValidationError);
  const ProbeSet p{{1.0, 1.0, {0, 0}}, {-2.0, 0.5, {1, 0}}};
  const auto C = limit_covariance_matrix(s, p);
  CHECK(C[0][1] == C[1][0]);
  CHECK(limit_probe_variance(s, p) == doctest::Approx(C[0][0] - 4 * C[0][1] + 4 * C[1][1]).epsilon(1e-14));
}

TEST_CASE("fourth-moment oracle") {
  const ProbeSet p{{1.0, 1.0, {0, 0}}, {1.0, 1.0, {2, 0}}, {1.0, 2.0, {1, 0}}};
  for (auto kind : {LimitKind::hermite_large, LimitKind::hermite_small}) {
    const auto s = hermite(kind, 0.3);
    const auto o = hermite2_fourth_moment(s, p, 800);
    CHECK(o.excess > 0.2);
    CHECK(o.resolution_error < 0.05 * o.excess);
    CHECK(o.variance == doctest::Approx(limit_probe_variance(s, p)).epsilon(2e-2));
  }
  CHECK_THROWS_AS(hermite2_fourth_moment(gaussian(LimitKind::gaussian_large, 1.0), p), ValidationError);
}
