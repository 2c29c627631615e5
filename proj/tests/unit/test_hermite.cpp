#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "reldiff/error.hpp"
#include "reldiff/hermite.hpp"
#include "reldiff/quadrature.hpp"

using namespace reldiff;
using boost::multiprecision::cpp_rational;

TEST_CASE("hermite_eval small cases") {
  CHECK(hermite_eval(2, 0.0) == -1.0);
  CHECK(hermite_eval(3, 2.0) == 2.0);
  CHECK(hermite_eval(0, 5.0) == 1.0);
  CHECK(hermite_eval(1, -0.25) == -0.25);
}

TEST_CASE("hermite_eval against an exact rational recurrence") {
  for (int num : {-17, 3, 13, 29}) {
    const cpp_rational r(num, 10);
    std::vector<cpp_rational> h{1, r};
    for (int l = 1; l < 12; ++l) h.push_back(r * h[l] - l * h[l - 1]);
    for (int l = 0; l <= 12; ++l) {
      const double want = static_cast<double>(h[l]);
      CHECK(hermite_eval(l, num / 10.0) == doctest::Approx(want).epsilon(1e-13));
    }
  }
  CHECK(hermite_eval(6, 1.3) == doctest::Approx(23.035309).epsilon(1e-14));
}

TEST_CASE("hermite_eval_all matches single evaluation") {
  std::vector<double> out(9);
  hermite_eval_all(8, 0.77, out);
  for (int l = 0; l <= 8; ++l) CHECK(out[l] == doctest::Approx(hermite_eval(l, 0.77)).epsilon(1e-15));
}

TEST_CASE("Gauss-Hermite orthogonality") {
  const auto q = gauss_hermite_probabilists(30);
  double wsum = 0.0;
  for (double w : q.weights) wsum += w;
  CHECK(wsum == doctest::Approx(1.0).epsilon(1e-14));
  for (int i = 0; i <= 6; ++i) {
    for (int j = 0; j <= 6; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < q.nodes.size(); ++k) s += q.weights[k] * hermite_eval(i, q.nodes[k]) * hermite_eval(j, q.nodes[k]);
      const double want = i == j ? std::tgamma(i + 1.0) : 0.0;
      CHECK(s == doctest::Approx(want).epsilon(1e-11).scale(1.0));
    }
  }
}

TEST_CASE("hermite coefficients of polynomial families") {
  {
    const auto c = hermite_coefficients(SubordinatorFamily::power(1), 8);
    CHECK(c[1] == doctest::Approx(1.0).epsilon(1e-12));
    for (int l : {0, 2, 3, 4, 5, 6, 7, 8}) CHECK(std::abs(c[l]) < 1e-12);
  }
  {
    const auto c = hermite_coefficients(SubordinatorFamily::hermite_series({0, 0, 1}), 8);
    CHECK(c[2] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    for (int l : {0, 1, 3, 4, 5}) CHECK(std::abs(c[l]) < 1e-12);
  }
  {
    const auto c = hermite_coefficients(SubordinatorFamily::power(3), 8);
    CHECK(c[1] == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(c[3] == doctest::Approx(std::sqrt(6.0)).epsilon(1e-12));
    for (int l : {0, 2, 4, 5}) CHECK(std::abs(c[l]) < 1e-12);
  }
}

TEST_CASE("hermite coefficients of |r|") {
  const auto c = hermite_coefficients(SubordinatorFamily::absolute(), 10);
  CHECK(c[0] == doctest::Approx(std::sqrt(2.0 / std::numbers::pi)).epsilon(1e-10));
  CHECK(std::abs(c[1]) < 1e-12);
  // (E|r|^3 - E|r|)/sqrt(2) = 1/sqrt(pi).
  CHECK(c[2] == doctest::Approx(1.0 / std::sqrt(std::numbers::pi)).epsilon(1e-10));
  CHECK(second_moment(SubordinatorFamily::absolute()) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("hermite rank") {
  auto rank_of = [](SubordinatorFamily h) {
    const auto c = hermite_coefficients(h, 8);
    return hermite_rank(c);
  };
  CHECK(rank_of(SubordinatorFamily::power(3)) == 1);
  CHECK(rank_of(SubordinatorFamily::hermite_series({0, 0, 1})) == 2);
  CHECK(rank_of(SubordinatorFamily::absolute()) == 2);
  CHECK(rank_of(SubordinatorFamily::sign()) == 1);
  const std::vector<double> constant{2.0, 0.0, 0.0};
  CHECK_THROWS_AS(hermite_rank(constant), ValidationError);
}

TEST_CASE("Parseval: coefficients exhaust the second moment") {
  const auto h = SubordinatorFamily::exp_clipped(0.5, 2.0);
  const double m2 = second_moment(h);
  // The kink at the clip slows the tail, so only bound and approach are checked.
  const auto c = hermite_coefficients(h, 30);
  double s = 0.0;
  for (std::size_t l = 0; l < c.size(); ++l) {
    s += c[l] * c[l];
    CHECK(s <= m2 * (1 + 1e-12));
  }
  CHECK(m2 - s < 1e-4 * m2);
  const auto smooth = SubordinatorFamily::hermite_series({0.5, -1.0, 0.25, 0.1});
  const auto cs = hermite_coefficients(smooth, 10);
  double ss = 0.0;
  for (double v : cs) ss += v * v;
  CHECK(ss == doctest::Approx(second_moment(smooth)).epsilon(1e-12));
}

TEST_CASE("subordinate_truncated") {
  const std::vector<double> zeta{-1.5, 0.0, 0.3, 2.2};
  {
    const std::vector<double> c{0.0, 1.0};
    const auto out = subordinate_truncated(c, 1, 1, zeta);
    for (std::size_t i = 0; i < zeta.size(); ++i) CHECK(out[i] == zeta[i]);
  }
  {
    const std::vector<double> c{0.0, 0.0, std::sqrt(2.0)};
    const auto out = subordinate_truncated(c, 2, 2, std::vector<double>(5, 0.0));
    for (double v : out) CHECK(v == doctest::Approx(-1.0).epsilon(1e-15));
  }
}

TEST_CASE("variance of the truncated chaos") {
  const auto sub = Subordinator::build(SubordinatorFamily::absolute(), 12);
  const int n0 = 6;
  std::mt19937_64 gen(11);
  std::normal_distribution<double> nd;
  const int N = 1000000;
  std::vector<double> z(N);
  for (double& v : z) v = nd(gen);
  const auto y = subordinate_truncated(sub.coeffs(), sub.rank(), n0, z);
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= N;
  double m2 = 0.0, m4 = 0.0;
  for (double v : y) {
    const double d = (v - mean) * (v - mean);
    m2 += d;
    m4 += d * d;
  }
  m2 /= N;
  m4 /= N;
  const double se = std::sqrt((m4 - m2 * m2) / N);
  double want = 0.0;
  for (int l = 1; l <= n0; ++l) want += sub.coeffs()[l] * sub.coeffs()[l];
  CHECK(std::abs(m2 - want) < 3 * se);
  CHECK(std::abs(mean - sub.c0()) < 3 * std::sqrt(m2 / N));
}

TEST_CASE("tail energy") {
  const auto poly = Subordinator::build(SubordinatorFamily::power(3), 12);
  CHECK(poly.tail_energy(3) < 1e-10);
  const auto abs = Subordinator::build(SubordinatorFamily::absolute(), 16);
  double prev = abs.tail_energy(2);
  for (int n0 = 4; n0 <= 12; n0 += 2) {
    const double t = abs.tail_energy(n0);
    CHECK(t <= prev);
    prev = t;
  }
  // The deficit from N0 = 4 to 8 equals the coefficient energy in between.
  double between = 0.0;
  for (int l = 5; l <= 8; ++l) between += abs.coeffs()[l] * abs.coeffs()[l];
  CHECK(abs.tail_energy(4) - abs.tail_energy(8) == doctest::Approx(between).epsilon(1e-8));
}
