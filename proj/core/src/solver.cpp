#include "reldiff/solver.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include "reldiff/error.hpp"
#include "reldiff/fft.hpp"

namespace reldiff {

namespace {

std::vector<int> fft_dims(const GridSpec& g) {
  const int N = static_cast<int>(g.points);
  return g.dim == 1 ? std::vector<int>{N} : std::vector<int>{N, N};
}

void check_field(const FieldGrid& u0, const ModelParams& params, double t) {
  u0.grid.validate();
  if (u0.values.size() != u0.grid.total()) throw ValidationError("field size does not match its grid");
  if (params.dim() != u0.grid.dim) throw ValidationError("model dimension does not match the field");
  if (!(t >= 0.0) || !std::isfinite(t)) throw ValidationError("time must be finite and >= 0");
}

// Forward transform multiplied by the Green multiplier, half-complex layout.
ComplexBuffer evolved_spectrum(const FieldGrid& u0, const ModelParams& params, double t, const RealFFT& fft) {
  const GridSpec& g = u0.grid;
  RealBuffer in(u0.values.begin(), u0.values.end());
  ComplexBuffer spec;
  fft.forward(in, spec);
  const std::size_t N = g.points, half = N / 2 + 1;
  const double step = g.frequency_step();
  if (g.dim == 1) {
    for (std::size_t k = 0; k < half; ++k) spec[k] *= green_hat(params, t, static_cast<double>(k) * step);
  } else {
    for (std::size_t k1 = 0; k1 < N; ++k1) {
      const double l1 = static_cast<double>(signed_index(k1, N)) * step;
      for (std::size_t k2 = 0; k2 < half; ++k2) {
        spec[k1 * half + k2] *= green_hat(params, t, std::hypot(l1, static_cast<double>(k2) * step));
      }
    }
  }
  return spec;
}

}  // namespace

FieldGrid solve(const FieldGrid& u0, const ModelParams& params, double t) {
  check_field(u0, params, t);
  const RealFFT fft(fft_dims(u0.grid));
  ComplexBuffer spec = evolved_spectrum(u0, params, t, fft);
  RealBuffer out;
  fft.backward(spec, out);
  const double scale = 1.0 / static_cast<double>(u0.grid.total());
  FieldGrid result;
  result.grid = u0.grid;
  result.seed = u0.seed;
  result.values.resize(out.size());
  for (std::size_t i = 0; i < out.size(); ++i) result.values[i] = out[i] * scale;
  return result;
}

std::vector<double> solve_at_points(const FieldGrid& u0, const ModelParams& params, double t,
                                    const std::vector<std::array<double, 2>>& points) {
  check_field(u0, params, t);
  const GridSpec& g = u0.grid;
  for (const auto& p : points) {
    for (int a = 0; a < g.dim; ++a) {
      if (!(p[a] >= 0.0 && p[a] < g.box_length)) throw ValidationError("solve_at_points: point outside the periodic box");
    }
  }
  const RealFFT fft(fft_dims(g));
  const ComplexBuffer spec = evolved_spectrum(u0, params, t, fft);
  const std::size_t N = g.points, half = N / 2 + 1;
  const double step = g.frequency_step();
  const double scale = 1.0 / static_cast<double>(g.total());
  // Columns k2 = 0 and N/2 hold their own conjugate partners; the others stand for two.
  auto weight = [&](std::size_t k) { return (k == 0 || 2 * k == N) ? 1.0 : 2.0; };

  std::vector<double> out;
  out.reserve(points.size());
  for (const auto& p : points) {
    double acc = 0.0;
    if (g.dim == 1) {
      for (std::size_t k = 0; k < half; ++k) {
        const double phase = static_cast<double>(k) * step * p[0];
        acc += weight(k) * (spec[k].real() * std::cos(phase) - spec[k].imag() * std::sin(phase));
      }
    } else {
      for (std::size_t k1 = 0; k1 < N; ++k1) {
        const double l1 = static_cast<double>(signed_index(k1, N)) * step;
        for (std::size_t k2 = 0; k2 < half; ++k2) {
          const double phase = l1 * p[0] + static_cast<double>(k2) * step * p[1];
          const auto c = spec[k1 * half + k2];
          acc += weight(k2) * (c.real() * std::cos(phase) - c.imag() * std::sin(phase));
        }
      }
    }
    out.push_back(acc * scale);
  }
  return out;
}

std::string to_string(AliasStatus status) {
  switch (status) {
    case AliasStatus::ok:
      return "ok";
    case AliasStatus::warn:
      return "warn";
    case AliasStatus::fail:
      return "fail";
  }
  return "?";
}

AliasReport aliasing_check(const ModelParams& params, double t, const GridSpec& grid) {
  grid.validate();
  AliasReport rep;
  rep.nyquist_multiplier = green_hat(params, t, std::numbers::pi / grid.spacing());
  if (rep.nyquist_multiplier > 1e-1) {
    rep.status = AliasStatus::fail;
  } else if (rep.nyquist_multiplier > 1e-3) {
    rep.status = AliasStatus::warn;
  }
  return rep;
}

}  // namespace reldiff
