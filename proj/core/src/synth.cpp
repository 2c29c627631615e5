#include "reldiff/synth.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <numbers>
#include <ostream>

#include "reldiff/error.hpp"
#include "reldiff/fft.hpp"
#include "reldiff/hermite.hpp"

namespace reldiff {

double GridSpec::frequency_step() const { return 2.0 * std::numbers::pi / box_length; }

void GridSpec::validate() const {
  if (dim != 1 && dim != 2) throw ValidationError("grid dimension must be 1 or 2");
  if (points < 4 || (points & (points - 1)) != 0) throw ValidationError("grid points per axis must be a power of two >= 4");
  if (!(box_length > 0.0) || !std::isfinite(box_length)) throw ValidationError("grid box length must be positive");
  if (dim == 2 && points > (std::size_t{1} << 14)) throw ValidationError("2-d grids are limited to 2^14 points per axis");
}

namespace {

std::size_t fold(long k, std::size_t N) {
  const long n = static_cast<long>(N);
  return static_cast<std::size_t>(((k % n) + n) % n);
}

}  // namespace

std::vector<double> lattice_spectrum(const SpectralDensity& sd, const GridSpec& grid) {
  grid.validate();
  if (sd.dim() != grid.dim) throw ValidationError("lattice_spectrum: grid and density dimensions differ");
  const std::size_t N = grid.points;
  const double step = grid.frequency_step();
  const long n = static_cast<long>(N);
  std::vector<double> mass(grid.total(), 0.0);

  if (grid.dim == 1) {
    const long reach = std::min(static_cast<long>(std::ceil(sd.cutoff() / step)) + 1, 64 * n);
    const long K = std::max(reach, n / 2);
    for (long k = 0; k <= K; ++k) {
      const double lam = static_cast<double>(k) * step;
      const double m = sd.singular() ? sd.interval_mass(lam - 0.5 * step, lam + 0.5 * step) : sd.eval_radial(lam) * step;
      mass[fold(k, N)] += m;
      if (k > 0) mass[fold(-k, N)] += m;
    }
    return mass;
  }

  const long reach = std::min(static_cast<long>(std::ceil(sd.cutoff() / step)) + 1, 4 * n);
  const long K = std::max(reach, n / 2);
  const double cut = sd.cutoff() + 2.0 * step;
  for (long k1 = -K; k1 <= K; ++k1) {
    const double x = static_cast<double>(k1) * step;
    for (long k2 = -K; k2 <= K; ++k2) {
      const double y = static_cast<double>(k2) * step;
      const double r = std::hypot(x, y);
      if (r > cut) continue;
      const double m = sd.singular() ? sd.rect_mass(x - 0.5 * step, x + 0.5 * step, y - 0.5 * step, y + 0.5 * step)
                                     : sd.eval_radial(r) * step * step;
      mass[fold(k1, N) * N + fold(k2, N)] += m;
    }
  }
  return mass;
}

FieldGrid sample_gaussian_field(const std::vector<double>& spectrum, const GridSpec& grid, const SeedSpec& seed) {
  grid.validate();
  if (spectrum.size() != grid.total()) throw ValidationError("lattice spectrum size does not match the grid");
  const std::size_t N = grid.points;
  const std::size_t half = N / 2 + 1;
  const RealFFT fft(grid.dim == 1 ? std::vector<int>{static_cast<int>(N)}
                                  : std::vector<int>{static_cast<int>(N), static_cast<int>(N)});
  ComplexBuffer Z(fft.complex_size());
  constexpr double inv_sqrt2 = 0.70710678118654752440;

  // Canonical member c of {k, -k} draws; the other member takes the conjugate.
  auto noise = [&](std::size_t self, std::size_t partner) -> std::complex<double> {
    const std::size_t c = std::min(self, partner);
    const auto [g1, g2] = normal_pair(seed, c);
    if (self == partner) return {g1, 0.0};
    const std::complex<double> w(g1 * inv_sqrt2, g2 * inv_sqrt2);
    return self == c ? w : std::conj(w);
  };

  if (grid.dim == 1) {
    for (std::size_t k = 0; k < half; ++k) {
      const std::size_t p = (N - k) % N;
      Z[k] = std::sqrt(spectrum[k]) * noise(k, p);
    }
  } else {
    for (std::size_t k1 = 0; k1 < N; ++k1) {
      const std::size_t p1 = (N - k1) % N;
      for (std::size_t k2 = 0; k2 < half; ++k2) {
        const std::size_t p2 = (N - k2) % N;
        const std::size_t self = k1 * N + k2, partner = p1 * N + p2;
        Z[k1 * half + k2] = std::sqrt(spectrum[self]) * noise(self, partner);
      }
    }
  }

  FieldGrid out;
  out.grid = grid;
  out.seed = seed.master;
  RealBuffer real;
  fft.backward(Z, real);
  out.values.assign(real.begin(), real.end());
  return out;
}

FieldGrid sample_gaussian_field(const SpectralDensity& sd, const GridSpec& grid, const SeedSpec& seed) {
  const double mass = sd.total_mass();
  if (std::abs(mass - 1.0) > 1e-6) throw ValidationError("sample_gaussian_field: spectral density is not normalized");
  return sample_gaussian_field(lattice_spectrum(sd, grid), grid, seed);
}

FieldGrid make_initial_data(const FieldGrid& field, const Subordinator& sub, int n0) {
  FieldGrid out;
  out.grid = field.grid;
  out.seed = field.seed;
  out.values = subordinate_truncated(sub.coeffs(), sub.rank(), n0, field.values);
  return out;
}

CovarianceEstimate estimate_covariance(const std::vector<FieldGrid>& replicates,
                                       const std::vector<std::array<long, 2>>& lags, std::optional<double> known_mean) {
  const std::size_t R = replicates.size();
  if (R < 30) throw ValidationError("estimate_covariance needs at least 30 replicates");
  const GridSpec& g = replicates.front().grid;
  for (const auto& f : replicates) {
    if (f.grid.dim != g.dim || f.grid.points != g.points || f.values.size() != g.total()) {
      throw ValidationError("estimate_covariance: replicates live on different grids");
    }
  }
  const std::size_t N = g.points;
  const double M = static_cast<double>(g.total());

  std::vector<double> means(R);
  for (std::size_t r = 0; r < R; ++r) {
    double s = 0.0;
    for (double v : replicates[r].values) s += v;
    means[r] = s / M;
  }
  double mean_sum = 0.0;
  for (double m : means) mean_sum += m;

  CovarianceEstimate out;
  out.lags = lags;
  std::vector<double> prod(R);
  for (const auto& lag : lags) {
    const std::size_t s1 = fold(lag[0], N);
    const std::size_t s2 = g.dim == 2 ? fold(lag[1], N) : 0;
    for (std::size_t r = 0; r < R; ++r) {
      const auto& v = replicates[r].values;
      double acc = 0.0;
      if (g.dim == 1) {
        for (std::size_t i = 0; i < N; ++i) acc += v[i] * v[(i + s1) % N];
      } else {
        for (std::size_t i = 0; i < N; ++i) {
          const std::size_t i2 = (i + s1) % N;
          for (std::size_t j = 0; j < N; ++j) acc += v[i * N + j] * v[i2 * N + (j + s2) % N];
        }
      }
      prod[r] = acc / M;
    }
    double prod_sum = 0.0;
    for (double p : prod) prod_sum += p;
    const double Rd = static_cast<double>(R);
    auto theta = [&](double ps, double ms, double count) {
      if (known_mean) return ps / count - 2.0 * *known_mean * ms / count + *known_mean * *known_mean;
      const double mm = ms / count;
      return ps / count - mm * mm;
    };
    const double full = theta(prod_sum, mean_sum, Rd);
    std::vector<double> loo(R);
    double loo_mean = 0.0;
    for (std::size_t r = 0; r < R; ++r) {
      loo[r] = theta(prod_sum - prod[r], mean_sum - means[r], Rd - 1.0);
      loo_mean += loo[r];
    }
    loo_mean /= Rd;
    double ss = 0.0;
    for (double t : loo) ss += (t - loo_mean) * (t - loo_mean);
    out.value.push_back(full);
    out.standard_error.push_back(std::sqrt((Rd - 1.0) / Rd * ss));
  }
  return out;
}

namespace {

template <class T>
void put(std::ostream& os, T v) {
  if constexpr (std::endian::native == std::endian::big) {
    auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
    std::reverse(bytes.begin(), bytes.end());
    os.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
  } else {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
  }
}

template <class T>
T get(std::istream& is) {
  std::array<unsigned char, sizeof(T)> bytes;
  if (!is.read(reinterpret_cast<char*>(bytes.data()), sizeof(T))) throw ValidationError("truncated field file");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  return std::bit_cast<T>(bytes);
}

}  // namespace

void write_field_binary(std::ostream& os, const FieldGrid& field) {
  put<std::uint32_t>(os, static_cast<std::uint32_t>(field.grid.dim));
  put<std::uint64_t>(os, field.grid.points);
  put<double>(os, field.grid.box_length);
  put<std::uint64_t>(os, field.seed);
  for (double v : field.values) put<double>(os, v);
}

FieldGrid read_field_binary(std::istream& is) {
  FieldGrid f;
  f.grid.dim = static_cast<int>(get<std::uint32_t>(is));
  f.grid.points = get<std::uint64_t>(is);
  f.grid.box_length = get<double>(is);
  f.seed = get<std::uint64_t>(is);
  f.grid.validate();
  f.values.resize(f.grid.total());
  for (double& v : f.values) v = get<double>(is);
  return f;
}

void write_field_csv(std::ostream& os, const FieldGrid& field) {
  if (field.grid.dim != 1) throw ValidationError("CSV field export is for n = 1");
  os.precision(17);
  os << "x,value\n";
  const double dx = field.grid.spacing();
  for (std::size_t i = 0; i < field.values.size(); ++i) os << static_cast<double>(i) * dx << ',' << field.values[i] << '\n';
}

}  // namespace reldiff
