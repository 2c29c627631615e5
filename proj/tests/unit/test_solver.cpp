#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "reldiff/solver.hpp"
#include "reldiff/spectrum.hpp"

using namespace reldiff;

namespace {

FieldGrid random_field(const GridSpec& g, std::uint64_t seed) {
  return sample_gaussian_field(SpectralDensity::normalized(g.dim, 1.0, BFamily::exponential), g, {seed, 0, 0});
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("t = 0 and constants") {
  const GridSpec g{1, 512, 64.0};
  const auto u0 = random_field(g, 1);
  const ModelParams p(1, 1.2, 0.5);
  CHECK(max_abs_diff(solve(u0, p, 0.0).values, u0.values) < 1e-12);
  FieldGrid c{g, std::vector<double>(g.points, 2.5), 0};
  for (double v : solve(c, p, 3.0).values) CHECK(v == doctest::Approx(2.5).epsilon(1e-13));
}

TEST_CASE("semigroup and mean conservation") {
  for (int dim : {1, 2}) {
    const GridSpec g{dim, dim == 1 ? 1024u : 64u, 64.0};
    const auto u0 = random_field(g, 2);
    const ModelParams p(dim, 0.8, 1.0);
    const auto a = solve(solve(u0, p, 0.3), p, 0.9);
    const auto b = solve(u0, p, 1.2);
    double scale = 0.0;
    for (double v : b.values) scale = std::max(scale, std::abs(v));
    CHECK(max_abs_diff(a.values, b.values) < 1e-10 * scale);
    double m0 = 0.0, m1 = 0.0;
    for (std::size_t i = 0; i < u0.values.size(); ++i) {
      m0 += u0.values[i];
      m1 += b.values[i];
    }
    CHECK(std::abs(m0 - m1) / u0.values.size() < 1e-12);
  }
}

TEST_CASE("single mode") {
  const GridSpec g{1, 256, 32.0};
  const double k = 2 * std::numbers::pi * 5 / g.box_length;
  FieldGrid u0{g, std::vector<double>(g.points), 0};
  for (std::size_t i = 0; i < g.points; ++i) u0.values[i] = std::cos(k * i * g.spacing());
  const ModelParams p(1, 1.0, 1.0);
  const double gh = green_hat(p, 0.7, k);
  const std::vector<std::array<double, 2>> pts{{0.0, 0.0}, {1.2345, 0.0}, {30.1, 0.0}};
  const auto v = solve_at_points(u0, p, 0.7, pts);
  for (std::size_t j = 0; j < pts.size(); ++j) CHECK(v[j] == doctest::Approx(gh * std::cos(k * pts[j][0])).epsilon(1e-10));
}

TEST_CASE("point evaluation at nodes and linearity") {
  const GridSpec g{1, 512, 64.0};
  const auto a = random_field(g, 3), b = random_field(g, 4);
  const ModelParams p(1, 1.5, 0.2);
  const auto sol = solve(a, p, 0.5);
  std::vector<std::array<double, 2>> nodes;
  for (std::size_t i : {0u, 7u, 300u}) nodes.push_back({i * g.spacing(), 0.0});
  const auto at = solve_at_points(a, p, 0.5, nodes);
  CHECK(std::abs(at[0] - sol.values[0]) < 1e-10);
  CHECK(std::abs(at[1] - sol.values[7]) < 1e-10);
  CHECK(std::abs(at[2] - sol.values[300]) < 1e-10);

  FieldGrid sum{g, a.values, 0};
  for (std::size_t i = 0; i < g.points; ++i) sum.values[i] += b.values[i];
  const std::vector<std::array<double, 2>> pts{{3.3, 0.0}, {17.9, 0.0}};
  const auto va = solve_at_points(a, p, 0.5, pts), vb = solve_at_points(b, p, 0.5, pts);
  const auto vs = solve_at_points(sum, p, 0.5, pts);
  for (int j = 0; j < 2; ++j) CHECK(vs[j] == doctest::Approx(va[j] + vb[j]).epsilon(1e-12));
}

TEST_CASE("aliasing check") {
  const ModelParams p(1, 1.0, 1.0);
  CHECK(aliasing_check(p, 1.0, GridSpec{1, 1024, 256.0}).status == AliasStatus::ok);
  CHECK(aliasing_check(p, 1e-3, GridSpec{1, 256, 256.0}).status == AliasStatus::fail);
  const auto r = aliasing_check(p, 1.0, GridSpec{1, 64, 32.0});
  CHECK(r.nyquist_multiplier == doctest::Approx(green_hat(p, 1.0, std::numbers::pi / 0.5)).epsilon(1e-14));
}
