#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <boost/math/special_functions/gamma.hpp>
#include <vector>

#include "reldiff/convolution.hpp"
#include "reldiff/error.hpp"
#include "reldiff/spectrum.hpp"

using namespace reldiff;

namespace {

const SpectralDensity& laplace() {
  static const SpectralDensity sd = SpectralDensity::normalized(1, 1.0, BFamily::exponential);
  return sd;
}

const std::vector<ConvolutionPower>& laplace_powers() {
  static const auto p = convolution_powers(laplace(), 6, default_frequency_grid(1));
  return p;
}

}  // namespace

TEST_CASE("density values and normalization") {
  const std::vector<double> l3{3.0}, lm3{-3.0};
  CHECK(eval_f(laplace(), l3) == doctest::Approx(0.5 * std::exp(-3.0)).epsilon(1e-13));
  CHECK(eval_f(laplace(), lm3) == eval_f(laplace(), l3));
  const auto lrd = SpectralDensity::normalized(1, 0.3, BFamily::exponential);
  CHECK(lrd.B0() == doctest::Approx(1.0 / (2.0 * std::tgamma(0.3))).epsilon(1e-10));
  CHECK(lrd.total_mass() == doctest::Approx(1.0).epsilon(1e-6));
  const std::vector<double> zero{0.0};
  CHECK_THROWS_AS(eval_f(lrd, zero), SingularityError);
  for (auto fam : {BFamily::exponential, BFamily::gaussian, BFamily::bump}) {
    for (int n : {1, 2}) {
      const auto sd = SpectralDensity::normalized(n, 0.7, fam, 1.5);
      CHECK(sd.total_mass() == doctest::Approx(1.0).epsilon(1e-6));
    }
  }
  CHECK_THROWS_AS(SpectralDensity::normalized(1, 0.0, BFamily::exponential), ValidationError);
  CHECK_THROWS_AS(SpectralDensity::normalized(3, 1.0, BFamily::exponential), ValidationError);
}

TEST_CASE("radial integral near the origin") {
  // int_0^r e^{-s} s^{kappa-1} ds = Gamma(kappa) P(kappa, r), with B = e^{-s} up to the constant.
  for (double kappa : {0.2, 0.5, 0.7, 0.9, 1.0}) {
    const auto sd = SpectralDensity::normalized(1, kappa, BFamily::exponential);
    const double c = sd.B(0.0);
    for (double r : {6e-5, 1e-3, 0.02, 0.5, 3.0}) {
      const double exact = c * std::tgamma(kappa) * boost::math::gamma_p(kappa, r);
      CAPTURE(kappa);
      CAPTURE(r);
      CHECK(sd.radial_profile_integral(0.0, r) == doctest::Approx(exact).epsilon(1e-9));
    }
  }
}

TEST_CASE("covariance of the Laplace density") {
  for (double x : {0.0, 0.5, 1.0, 2.0, 7.0}) {
    CHECK(covariance_R(laplace(), x) == doctest::Approx(1.0 / (1.0 + x * x)).epsilon(1e-9));
  }
  const auto lrd = SpectralDensity::normalized(1, 0.3, BFamily::gaussian);
  CHECK(covariance_R(lrd, 0.0) == doctest::Approx(1.0).epsilon(1e-6));
  for (double x : {0.1, 1.0, 10.0, 100.0}) CHECK(std::abs(covariance_R(lrd, x)) <= 1.0);
}

TEST_CASE("dilation") {
  const auto same = laplace().dilated(1.0);
  const std::vector<double> l{0.7};
  CHECK(eval_f(same, l) == eval_f(laplace(), l));
  const auto d = dilate_spectrum(laplace(), 2.5);
  CHECK(d.total_mass() == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(covariance_R(d, 0.8) == doctest::Approx(covariance_R(laplace(), 2.0)).epsilon(1e-8));
}

TEST_CASE("classification and k_star") {
  CHECK(classify(1.0, 1, 2).tag == ConditionTag::B);
  CHECK(classify(0.3, 1, 2).tag == ConditionTag::C);
  CHECK(classify(0.5, 1, 2).tag == ConditionTag::boundary);
  CHECK(k_star(0.3, 1, 2) == 3);
  CHECK(!k_star(0.45, 1, 2).has_value());
  CHECK(k_star(0.25, 1, 2) == 4);
}

TEST_CASE("Laplace self-convolution") {
  const auto& p = laplace_powers();
  const auto& g = p[1].grid;
  CHECK(p[1].at_origin() == doctest::Approx(0.25).epsilon(1e-5));
  for (double lam : {0.5, 1.0, 3.0}) {
    const auto i = static_cast<std::size_t>(std::llround(lam / g.spacing())) + g.points / 2;
    const double x = g.coord(i);
    CHECK(p[1].values[i] == doctest::Approx(0.25 * std::exp(-x) * (1 + x)).epsilon(1e-4));
  }
  // First power is the sampled density itself.
  const auto f = sample_density(laplace(), g);
  for (std::size_t i = 0; i < g.points; i += 4099) CHECK(p[0].values[i] == f[i]);
  for (const auto& pk : p) CHECK(pk.mass == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("lemma1 regimes") {
  const auto grid = default_frequency_grid(1);
  {
    const auto r = lemma1_regime(SpectralDensity::normalized(1, 0.3, BFamily::exponential), 2, grid);
    CHECK(r.predicted == Lemma1Regime::power);
    CHECK(r.regime == Lemma1Regime::power);
    CHECK(r.exponent_estimate >= -0.45);
    CHECK(r.exponent_estimate <= -0.35);
  }
  {
    const auto r = lemma1_regime(SpectralDensity::normalized(1, 0.5, BFamily::exponential), 2, grid);
    CHECK(r.predicted == Lemma1Regime::log);
    CHECK(r.regime == Lemma1Regime::log);
    CHECK(r.log_ratio_max / r.log_ratio_min < 2.0);
  }
  {
    const auto r = lemma1_regime(laplace_powers()[1], 1.0);
    CHECK(r.regime == Lemma1Regime::continuous);
    CHECK(r.value_at_origin == doctest::Approx(0.25).epsilon(1e-5));
  }
}

TEST_CASE("sup monotonicity") {
  const auto& p = laplace_powers();
  CHECK(sup_monotonicity_check(p, 1.0, 4, 3).ok);
  const auto chain = sup_monotonicity_check(p, 1.0, 6, 2);
  CHECK(chain.ok);
  CHECK(chain.chain_ok);
  CHECK_THROWS_AS(sup_monotonicity_check(p, 1.0, 3, 3), ValidationError);
}

TEST_CASE("sigma_m") {
  const auto grid = default_frequency_grid(1);
  const std::vector<double> h2{0.0, 0.0, std::sqrt(2.0)};
  const auto s = sigma_m(laplace(), h2, 2, 2, grid);
  CHECK(s.sigma == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-5));
  CHECK(!s.degenerate);
  const std::vector<double> zero{0.0, 0.0, 0.0};
  CHECK(sigma_m(laplace(), zero, 2, 2, grid).degenerate);
  const std::vector<double> c{0.0, 0.0, 0.8, 0.5, 0.3, 0.2};
  double prev = 0.0;
  for (int n0 = 2; n0 <= 5; ++n0) {
    const double v = sigma_m(laplace(), c, 2, n0, grid).sigma;
    CHECK(v >= prev);
    prev = v;
  }
  CHECK_THROWS_AS(sigma_m(SpectralDensity::normalized(1, 0.3, BFamily::exponential), h2, 2, 2, grid),
                  ValidationError);
}
