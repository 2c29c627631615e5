#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "reldiff/error.hpp"
#include "reldiff/hermite.hpp"
#include "reldiff/rng.hpp"
#include "reldiff/spectrum.hpp"
#include "reldiff/synth.hpp"

using namespace reldiff;

namespace {

const SpectralDensity& laplace() {
  static const SpectralDensity sd = SpectralDensity::normalized(1, 1.0, BFamily::exponential);
  return sd;
}

std::vector<FieldGrid> replicates(const GridSpec& g, int n, std::uint64_t master) {
  const auto spec = lattice_spectrum(laplace(), g);
  std::vector<FieldGrid> out;
  for (int r = 0; r < n; ++r) out.push_back(sample_gaussian_field(spec, g, {master, static_cast<std::uint32_t>(r), 0}));
  return out;
}

}  // namespace

TEST_CASE("Philox-4x32-10 known answers") {
  // Reference vectors of the Random123 distribution.
  const Philox4x32 zero(0);
  CHECK(zero({0, 0, 0, 0}) == Philox4x32::Block{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  const Philox4x32 ones(0xffffffffffffffffull);
  CHECK(ones({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}) ==
        Philox4x32::Block{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  const Philox4x32 pi(0x299f31d0a4093822ull);  // key words (a4093822, 299f31d0)
  CHECK(pi({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}) ==
        Philox4x32::Block{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("uniform and normal draws") {
  CHECK(uniform_open(0, 0) > 0.0);
  CHECK(uniform_open(0xffffffffu, 0xffffffffu) < 1.0);
  const SeedSpec s{42, 3, 1};
  double sum = 0.0, sq = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const auto [a, b] = normal_pair(s, i);
    sum += a + b;
    sq += a * a + b * b;
  }
  CHECK(std::abs(sum / (2 * n)) < 4.0 / std::sqrt(2.0 * n));
  CHECK(std::abs(sq / (2 * n) - 1.0) < 4.0 * std::sqrt(2.0 / (2 * n)));
  CHECK(normal_pair(s, 17) == normal_pair(s, 17));
  CHECK(normal_pair(s, 17) != normal_pair({42, 4, 1}, 17));
}

TEST_CASE("same seed, same field") {
  const GridSpec g{1, 1024, 256.0};
  const auto a = sample_gaussian_field(laplace(), g, {9, 2, 5});
  const auto b = sample_gaussian_field(laplace(), g, {9, 2, 5});
  CHECK(a.values == b.values);
  const auto c = sample_gaussian_field(laplace(), g, {9, 3, 5});
  CHECK(a.values != c.values);
}

TEST_CASE("lattice spectrum carries unit mass") {
  for (double kappa : {1.0, 0.3}) {
    const auto sd = SpectralDensity::normalized(1, kappa, BFamily::exponential);
    const auto spec = lattice_spectrum(sd, GridSpec{1, 4096, 512.0});
    double s = 0.0;
    for (double v : spec) s += v;
    // Point samples of a bounded density carry an O(dlambda^2) quadrature error.
    CHECK(s == doctest::Approx(1.0).epsilon(1e-4));
  }
}

TEST_CASE("empirical covariance of the Laplace field") {
  // One field at L = 512 gives R(1) with SE near 0.07, so 100 fields are pooled.
  const GridSpec g{1, 1u << 16, 512.0};
  const auto spec = lattice_spectrum(laplace(), g);
  const auto step = static_cast<std::size_t>(std::llround(1.0 / g.spacing()));
  double r1 = 0.0;
  for (std::uint32_t r = 0; r < 100; ++r) {
    const auto f = sample_gaussian_field(spec, g, {1, r, 0});
    for (std::size_t i = 0; i < g.points; ++i) r1 += f.values[i] * f.values[(i + step) % g.points];
  }
  CHECK(std::abs(r1 / (100.0 * g.points) - 0.5) < 0.02);

  const GridSpec small{1, 1024, 256.0};
  const auto reps = replicates(small, 200, 3);
  const auto lag = static_cast<long>(std::llround(1.0 / small.spacing()));
  const auto est = estimate_covariance(reps, {{0, 0}, {lag, 0}, {2 * lag, 0}}, 0.0);
  const double want[3] = {1.0, 0.5, 0.2};
  for (int k = 0; k < 3; ++k) CHECK(std::abs(est.value[k] - want[k]) < 3 * est.standard_error[k]);

  // Site variance across replicates.
  double v = 0.0, v4 = 0.0;
  for (const auto& r : reps) {
    v += r.values[17] * r.values[17];
    v4 += std::pow(r.values[17], 4);
  }
  v /= reps.size();
  v4 /= reps.size();
  CHECK(std::abs(v - 1.0) < 3 * std::sqrt((v4 - v * v) / reps.size()));
}

TEST_CASE("covariance estimator is translation invariant") {
  const GridSpec g{1, 512, 128.0};
  auto reps = replicates(g, 40, 5);
  const std::vector<std::array<long, 2>> lags{{0, 0}, {3, 0}, {11, 0}};
  const auto a = estimate_covariance(reps, lags);
  for (auto& r : reps) std::rotate(r.values.begin(), r.values.begin() + 1, r.values.end());
  const auto b = estimate_covariance(reps, lags);
  for (std::size_t k = 0; k < lags.size(); ++k) CHECK(std::abs(a.value[k] - b.value[k]) < 1e-10);
  reps.resize(20);
  CHECK_THROWS_AS(estimate_covariance(reps, lags), ValidationError);
}

TEST_CASE("dilated field covariance") {
  const GridSpec g{1, 2048, 256.0};
  const auto d = dilate_spectrum(laplace(), 0.5);
  const auto spec = lattice_spectrum(d, g);
  std::vector<FieldGrid> reps;
  for (int r = 0; r < 100; ++r) reps.push_back(sample_gaussian_field(spec, g, {8, static_cast<std::uint32_t>(r), 0}));
  const long lag = static_cast<long>(std::llround(2.0 / g.spacing()));
  const auto est = estimate_covariance(reps, {{lag, 0}}, 0.0);
  CHECK(std::abs(est.value[0] - covariance_R(laplace(), 1.0)) < 3 * est.standard_error[0]);
}

TEST_CASE("initial data from a subordinator") {
  const GridSpec g{1, 256, 64.0};
  FieldGrid zero{g, std::vector<double>(g.points, 0.0), 0};
  const auto h2 = Subordinator::build(SubordinatorFamily::hermite_series({0, 0, 1}));
  for (double v : make_initial_data(zero, h2, 2).values) CHECK(v == doctest::Approx(-1.0).epsilon(1e-13));
  const auto id = Subordinator::build(SubordinatorFamily::power(1));
  const auto f = sample_gaussian_field(laplace(), g, {1, 0, 0});
  const auto u = make_initial_data(f, id, 1);
  for (std::size_t i = 0; i < g.points; ++i) CHECK(u.values[i] == doctest::Approx(f.values[i]).epsilon(1e-12));
  CHECK_THROWS_AS(make_initial_data(f, h2, 1), ValidationError);

  // Centered chaos: E h(zeta) = C0.
  const auto absh = Subordinator::build(SubordinatorFamily::absolute());
  const auto reps = replicates(g, 300, 12);
  double s = 0.0, s2 = 0.0;
  for (const auto& r : reps) {
    const double y = make_initial_data(r, absh, 6).values[0] - absh.c0();
    s += y;
    s2 += y * y;
  }
  const double n = static_cast<double>(reps.size());
  CHECK(std::abs(s / n) < 3 * std::sqrt((s2 / n) / n));
}

TEST_CASE("binary field round trip") {
  const GridSpec g{2, 32, 16.0};
  const auto f = sample_gaussian_field(SpectralDensity::normalized(2, 1.5, BFamily::gaussian), g, {4, 1, 2});
  std::stringstream ss;
  write_field_binary(ss, f);
  const auto back = read_field_binary(ss);
  CHECK(back.grid.dim == 2);
  CHECK(back.grid.points == 32);
  CHECK(back.grid.box_length == 16.0);
  CHECK(back.values == f.values);
}
