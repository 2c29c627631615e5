#include "reldiff/scaling.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>
#include <json.hpp>
#include <sstream>
#include <thread>

#include "reldiff/error.hpp"
#include "reldiff/fft.hpp"

namespace reldiff {

std::string to_string(Regime regime) {
  switch (regime) {
    case Regime::large_B:
      return "large_B";
    case Regime::small_B:
      return "small_B";
    case Regime::large_C:
      return "large_C";
    case Regime::small_C:
      return "small_C";
  }
  return "?";
}

Regime regime_from_string(const std::string& name) {
  for (Regime r : {Regime::large_B, Regime::small_B, Regime::large_C, Regime::small_C}) {
    if (to_string(r) == name) return r;
  }
  throw ValidationError("unknown regime '" + name + "' (expected large_B, small_B, large_C or small_C)");
}

bool is_large(Regime regime) { return regime == Regime::large_B || regime == Regime::large_C; }

ConditionTag required_condition(Regime regime) {
  return regime == Regime::large_B || regime == Regime::small_B ? ConditionTag::B : ConditionTag::C;
}

LimitKind limit_kind(Regime regime) {
  switch (regime) {
    case Regime::large_B:
      return LimitKind::gaussian_large;
    case Regime::small_B:
      return LimitKind::gaussian_small;
    case Regime::large_C:
      return LimitKind::hermite_large;
    case Regime::small_C:
      return LimitKind::hermite_small;
  }
  return LimitKind::gaussian_large;
}

double scaling_exponent(Regime regime, int n, int m, double kappa, double chi) {
  switch (regime) {
    case Regime::large_B:
      return 0.25 * n;
    case Regime::small_B:
      return 0.5 * n * chi;
    case Regime::large_C:
      return 0.25 * m * kappa;
    case Regime::small_C:
      return 0.5 * m * kappa * chi;
  }
  return 0.0;
}

double minimal_admissible_eps(double rescaled_spacing, double chi) {
  if (!(rescaled_spacing > 0.0) || !(chi > 0.0)) throw ValidationError("minimal_admissible_eps needs dx' > 0 and chi > 0");
  return std::pow(2.0 * rescaled_spacing, 1.0 / chi);
}

namespace {

std::size_t next_pow2(double x) {
  std::size_t n = 4;
  while (static_cast<double>(n) < x) n <<= 1;
  return n;
}

double max_probe_time(const ProbeSet& probes) {
  double t = 0.0;
  for (const auto& p : probes) t = std::max(t, p.t);
  return t;
}

double min_probe_time(const ProbeSet& probes) {
  double t = probes.front().t;
  for (const auto& p : probes) t = std::min(t, p.t);
  return t;
}

double probe_spread(const ProbeSet& probes) {
  double d = 0.0;
  for (const auto& p : probes) {
    for (const auto& q : probes) d = std::max(d, std::hypot(p.x[0] - q.x[0], p.x[1] - q.x[1]));
  }
  return d;
}

// Time and space factors of the rescaling at one rung: (Tt, sqrt(T) x) or (eps t, eps^{1/alpha} x).
struct RungMap {
  double time = 1.0;
  double space = 1.0;
  double factor = 1.0;  // T^theta or eps^{-theta}
};

RungMap rung_map(Regime regime, double scale, double alpha, double theta) {
  if (is_large(regime)) return {scale, std::sqrt(scale), std::pow(scale, theta)};
  return {scale, std::pow(scale, 1.0 / alpha), std::pow(scale, -theta)};
}

std::vector<int> fft_dims(const GridSpec& g) {
  const int N = static_cast<int>(g.points);
  return g.dim == 1 ? std::vector<int>{N} : std::vector<int>{N, N};
}

double wrap_into(double x, double L) {
  double r = std::fmod(x, L);
  if (r < 0.0) r += L;
  return r >= L ? 0.0 : r;
}

// Fixed-order pairwise summation: the reduction never depends on scheduling.
double pairwise_sum(const double* x, std::size_t n, std::size_t stride) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i * stride];
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_sum(x, h, stride) + pairwise_sum(x + h * stride, n - h, stride);
}

double frobenius(const std::vector<std::vector<double>>& a) {
  double s = 0.0;
  for (const auto& row : a) {
    for (double v : row) s += v * v;
  }
  return std::sqrt(s);
}

double frobenius_diff(const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < a[i].size(); ++j) s += (a[i][j] - b[i][j]) * (a[i][j] - b[i][j]);
  }
  return std::sqrt(s);
}

double min_eigenvalue(const std::vector<std::vector<double>>& a) {
  const auto M = static_cast<Eigen::Index>(a.size());
  Eigen::MatrixXd A(M, M);
  for (Eigen::Index i = 0; i < M; ++i) {
    for (Eigen::Index j = 0; j < M; ++j) A(i, j) = 0.5 * (a[i][j] + a[j][i]);
  }
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(A, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
}

// Jackknife over replicates for a statistic of the per-replicate component means.
// rows: R x D row-major.
template <class F>
Estimate jackknife(const std::vector<double>& rows, std::size_t R, std::size_t D, const std::vector<double>& totals,
                   F stat) {
  const double Rd = static_cast<double>(R);
  std::vector<double> means(D);
  for (std::size_t d = 0; d < D; ++d) means[d] = totals[d] / Rd;
  Estimate e;
  e.value = stat(means);
  std::vector<double> loo(R);
  for (std::size_t r = 0; r < R; ++r) {
    for (std::size_t d = 0; d < D; ++d) means[d] = (totals[d] - rows[r * D + d]) / (Rd - 1.0);
    loo[r] = stat(means);
  }
  const double mean_loo = pairwise_sum(loo.data(), R, 1) / Rd;
  for (double& v : loo) v = (v - mean_loo) * (v - mean_loo);
  e.se = std::sqrt((Rd - 1.0) / Rd * pairwise_sum(loo.data(), R, 1));
  return e;
}

// Multiplier G^(t, lambda) e^{i <lambda, X>} / N^n on the half-complex layout.
ComplexBuffer probe_multiplier(const ModelParams& params, const GridSpec& g, double t, const std::array<double, 2>& X) {
  const std::size_t N = g.points, half = N / 2 + 1;
  const double step = g.frequency_step();
  const double norm = 1.0 / static_cast<double>(g.total());
  ComplexBuffer out(g.dim == 1 ? half : N * half);
  if (g.dim == 1) {
    for (std::size_t k = 0; k < half; ++k) {
      const double lam = static_cast<double>(k) * step;
      out[k] = std::polar(green_hat(params, t, lam) * norm, lam * X[0]);
    }
  } else {
    for (std::size_t k1 = 0; k1 < N; ++k1) {
      const double l1 = static_cast<double>(signed_index(k1, N)) * step;
      for (std::size_t k2 = 0; k2 < half; ++k2) {
        const double l2 = static_cast<double>(k2) * step;
        out[k1 * half + k2] = std::polar(green_hat(params, t, std::hypot(l1, l2)) * norm, l1 * X[0] + l2 * X[1]);
      }
    }
  }
  return out;
}

// Exact E[Y_j Y_k] on the torus for the truncated chaos, before the rung factor.
std::vector<std::vector<double>> torus_covariance(const std::vector<double>& masses, const GridSpec& g,
                                                  const Subordinator& sub, int n0, const ModelParams& params,
                                                  const std::vector<double>& times,
                                                  const std::vector<std::array<double, 2>>& X) {
  const std::size_t N = g.points, half = N / 2 + 1;
  const RealFFT fft(fft_dims(g));
  ComplexBuffer H(fft.complex_size());
  for (std::size_t k1 = 0; k1 < (g.dim == 1 ? 1 : N); ++k1) {
    for (std::size_t k2 = 0; k2 < half; ++k2) H[k1 * half + k2] = masses[k1 * N + k2];
  }
  RealBuffer Rlat;
  fft.backward(H, Rlat);

  const auto& c = sub.coeffs();
  RealBuffer cov(Rlat.size());
  for (std::size_t i = 0; i < Rlat.size(); ++i) {
    double acc = 0.0, pw = 1.0;
    for (int l = 1; l <= n0; ++l) {
      pw *= Rlat[i];
      if (l >= sub.rank()) acc += c[l] * c[l] * pw;
    }
    cov[i] = acc;
  }
  ComplexBuffer S;
  fft.forward(cov, S);
  const double norm = 1.0 / static_cast<double>(g.total());
  const double step = g.frequency_step();

  const std::size_t M = times.size();
  std::vector<std::vector<double>> out(M, std::vector<double>(M, 0.0));
  for (std::size_t a = 0; a < M; ++a) {
    for (std::size_t b = a; b < M; ++b) {
      double acc = 0.0;
      for (std::size_t k1 = 0; k1 < (g.dim == 1 ? 1 : N); ++k1) {
        const double l1 = g.dim == 1 ? 0.0 : static_cast<double>(signed_index(k1, N)) * step;
        for (std::size_t k2 = 0; k2 < half; ++k2) {
          const double l2 = static_cast<double>(k2) * step;
          const double w = (k2 == 0 || 2 * k2 == N) ? 1.0 : 2.0;
          const double lam = g.dim == 1 ? l2 : std::hypot(l1, l2);
          const double phase = g.dim == 1 ? l2 * (X[a][0] - X[b][0])
                                          : l1 * (X[a][0] - X[b][0]) + l2 * (X[a][1] - X[b][1]);
          acc += w * S[k1 * half + k2].real() * green_hat(params, times[a], lam) * green_hat(params, times[b], lam) *
                 std::cos(phase);
        }
      }
      out[a][b] = out[b][a] = acc * norm;
    }
  }
  return out;
}

// Covariance of the truncated initial data at distance d.
double initial_covariance(const SpectralDensity& sd, const Subordinator& sub, int n0, double d) {
  const double R = covariance_R(sd, d);
  const auto& c = sub.coeffs();
  double acc = 0.0, pw = 1.0;
  for (int l = 1; l <= n0; ++l) {
    pw *= R;
    if (l >= sub.rank()) acc += c[l] * c[l] * pw;
  }
  return acc;
}

double wrap_estimate(const SpectralDensity& sd, const Subordinator& sub, int n0, const GridSpec& g,
                     const std::vector<std::array<double, 2>>& X) {
  double worst = 0.0;
  const double L = g.box_length;
  for (std::size_t a = 0; a < X.size(); ++a) {
    for (std::size_t b = a; b < X.size(); ++b) {
      const double d0 = X[a][0] - X[b][0], d1 = X[a][1] - X[b][1];
      double acc = 0.0;
      if (g.dim == 1) {
        for (int k = -3; k <= 3; ++k) {
          if (k != 0) acc += std::abs(initial_covariance(sd, sub, n0, d0 + k * L));
        }
      } else {
        for (int k1 = -3; k1 <= 3; ++k1) {
          for (int k2 = -3; k2 <= 3; ++k2) {
            if (k1 == 0 && k2 == 0) continue;
            acc += std::abs(initial_covariance(sd, sub, n0, std::hypot(d0 + k1 * L, d1 + k2 * L)));
          }
        }
      }
      worst = std::max(worst, acc);
    }
  }
  return worst;
}

LimitSpec make_limit(Regime regime, const ModelParams& params, const SpectralDensity& sd, const Subordinator& sub,
                     double sigma) {
  LimitSpec spec;
  spec.kind = limit_kind(regime);
  spec.dim = params.dim();
  spec.alpha = params.alpha();
  spec.mass = params.mass();
  spec.sigma = sigma;
  spec.m = sub.rank();
  spec.kappa = sd.kappa();
  if (is_hermite(spec.kind)) {
    spec.cm = sub.coeffs()[sub.rank()];
    spec.b0 = sd.B0();
  }
  return spec;
}

}  // namespace

void validate_ladder(const LadderConfig& config, const ProbeSet& probes, const SpectralDensity& sd,
                     const Subordinator& sub, const ModelParams& params) {
  validate_probes(probes);
  const int n = params.dim();
  if (sd.dim() != n) throw ValidationError("spectral density and model dimensions differ");
  if (n == 1) {
    for (const auto& p : probes) {
      if (p.x[1] != 0.0) throw ValidationError("n = 1 probes must have x[1] = 0");
    }
  }
  const ConditionClass cls = classify(sd.kappa(), n, sub.rank());
  if (cls.tag == ConditionTag::boundary) {
    throw ValidationError("kappa = n/m is the boundary between Conditions B and C; no theorem covers it");
  }
  if (cls.tag != required_condition(config.regime)) {
    throw ValidationError("regime " + to_string(config.regime) + " needs Condition " +
                          to_string(required_condition(config.regime)) + " but kappa = " +
                          std::to_string(sd.kappa()) + ", m = " + std::to_string(sub.rank()) + " gives Condition " +
                          to_string(cls.tag));
  }
  if (is_large(config.regime) && !(params.mass() > 0.0)) throw ValidationError("large-scale ladders need mass > 0");
  if (!is_large(config.regime) && !(config.chi > 0.0)) throw ValidationError("chi must be > 0");
  if (config.replicates < 30) throw ValidationError("a ladder needs at least 30 replicates per rung");
  if (config.n0 < sub.rank()) throw ValidationError("N0 must be >= the Hermite rank");
  if (config.n0 > sub.lmax()) throw ValidationError("N0 exceeds the number of computed Hermite coefficients");
  if (config.threads < 1) throw ValidationError("threads must be >= 1");
  if (!(config.spacing > 0.0) || !(config.box_factor > 0.0) || !(config.min_box > 0.0) || !(config.small_box > 0.0)) {
    throw ValidationError("grid spacing and box parameters must be positive");
  }
  if (config.scales.empty()) throw ValidationError("the ladder needs at least one scale");
  for (std::size_t i = 0; i < config.scales.size(); ++i) {
    const double s = config.scales[i];
    if (is_large(config.regime)) {
      if (!(s >= 1.0) || !std::isfinite(s)) throw ValidationError("large-scale rungs need T >= 1");
      if (i > 0 && !(s > config.scales[i - 1])) throw ValidationError("T values must increase along the ladder");
    } else {
      if (!(s > 0.0 && s <= 1.0)) throw ValidationError("small-scale rungs need 0 < eps <= 1");
      if (i > 0 && !(s < config.scales[i - 1])) throw ValidationError("eps values must decrease along the ladder");
      const double eps_min = minimal_admissible_eps(config.spacing, config.chi);
      if (s < eps_min) {
        char buf[200];
        std::snprintf(buf, sizeof buf,
                      "eps = %.6g is below the minimal admissible eps = %.6g for rescaled spacing %.6g and chi = %.6g",
                      s, eps_min, config.spacing, config.chi);
        throw ValidationError(buf);
      }
    }
  }
  if (!is_large(config.regime) && 4.0 * probe_spread(probes) > config.small_box) {
    throw ValidationError("probe spread exceeds a quarter of the rescaled box");
  }
  if (config.oracle_nodes < 64) throw ValidationError("oracle_nodes must be >= 64");
  if (!(config.oracle_threshold_fraction > 0.0 && config.oracle_threshold_fraction <= 1.0)) {
    throw ValidationError("oracle_threshold_fraction must lie in (0, 1]");
  }
  config.sigma_grid.validate();
}

GridSpec ladder_grid(const LadderConfig& config, const ProbeSet& probes, const ModelParams& params, double scale) {
  GridSpec g;
  g.dim = params.dim();
  if (is_large(config.regime)) {
    const double root = std::sqrt(scale * std::max(1.0, max_probe_time(probes)));
    const double L = std::max({config.min_box, config.box_factor * root, 4.0 * std::sqrt(scale) * probe_spread(probes)});
    g.points = next_pow2(L / config.spacing);
    g.box_length = static_cast<double>(g.points) * config.spacing;
  } else {
    const double unit = std::pow(scale, 1.0 / params.alpha());
    g.points = next_pow2(config.small_box / config.spacing);
    g.box_length = static_cast<double>(g.points) * config.spacing * unit;
  }
  g.validate();
  return g;
}

double rescale_large(const FieldGrid& u0, const ModelParams& params, Regime regime, int m, double kappa, double T,
                     const Probe& probe, double c0) {
  if (!is_large(regime)) throw ValidationError("rescale_large needs a large-scale regime");
  if (!(T >= 1.0)) throw ValidationError("rescale_large needs T >= 1");
  const double theta = scaling_exponent(regime, params.dim(), m, kappa, 0.0);
  const double L = u0.grid.box_length;
  const double s = std::sqrt(T);
  const std::array<double, 2> x{wrap_into(s * probe.x[0], L), params.dim() == 2 ? wrap_into(s * probe.x[1], L) : 0.0};
  const double u = solve_at_points(u0, params, T * probe.t, {x}).front();
  return std::pow(T, theta) * (u - c0);
}

double rescale_small(const SpectralDensity& sd, const Subordinator& sub, double eps, double chi, const Probe& probe,
                     const ModelParams& params, Regime regime, int n0, const GridSpec& grid, const SeedSpec& seed) {
  if (is_large(regime)) throw ValidationError("rescale_small needs a small-scale regime");
  if (!(eps > 0.0 && eps <= 1.0)) throw ValidationError("rescale_small needs 0 < eps <= 1");
  if (!(chi > 0.0)) throw ValidationError("chi must be > 0");
  const double alpha = params.alpha();
  const double unit = std::pow(eps, 1.0 / alpha);
  const double rescaled_dx = grid.spacing() / unit;
  const double eps_min = minimal_admissible_eps(rescaled_dx, chi);
  if (eps < eps_min) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "dilation too large for the grid: eps = %.6g < minimal admissible eps = %.6g", eps,
                  eps_min);
    throw ValidationError(buf);
  }
  const double theta = scaling_exponent(regime, params.dim(), sub.rank(), sd.kappa(), chi);
  const SpectralDensity dil = dilate_spectrum(sd, std::pow(eps, -1.0 / alpha - chi));
  const FieldGrid u0 = make_initial_data(sample_gaussian_field(dil, grid, seed), sub, n0);
  const double L = grid.box_length;
  const std::array<double, 2> x{wrap_into(unit * probe.x[0], L), params.dim() == 2 ? wrap_into(unit * probe.x[1], L) : 0.0};
  const double u = solve_at_points(u0, params, eps * probe.t, {x}).front();
  return std::pow(eps, -theta) * (u - sub.c0());
}

double truncation_tail(const SpectralDensity& sd, const Subordinator& sub, int n0, Regime regime,
                       const ModelParams& params, const ProbeSet& probes, const FrequencyGrid& grid) {
  if (required_condition(regime) != ConditionTag::B) throw ValidationError("truncation_tail needs Condition B");
  validate_probes(probes);
  const double tail = sub.tail_energy(n0);
  if (tail == 0.0) return 0.0;
  const ConvolutionPower fm = convolve_k(sd, sub.rank(), grid);
  const double sup = *std::max_element(fm.values.begin(), fm.values.end());
  LimitSpec spec = make_limit(regime, params, sd, sub, 1.0);
  double acc = 0.0;
  for (const auto& p : probes) {
    for (const auto& q : probes) acc += std::abs(p.weight * q.weight) * spectral_integral(spec, 0.0, p.t + q.t, 0.0);
  }
  return acc * tail * sup;
}

namespace {

// Per-replicate row: xi^1..xi^4 at the probe points, then M x M shift means of Y_j Y_k.
void run_replicate(const std::vector<double>& masses, const GridSpec& g, const Subordinator& sub, int n0,
                   const SeedSpec& seed, const std::vector<ComplexBuffer>& mult, const ProbeSet& probes,
                   double factor, const RealFFT& fft, double* row) {
  FieldGrid u0 = sample_gaussian_field(masses, g, seed);
  RealBuffer in(u0.values.size());
  subordinate_truncated(sub.coeffs(), sub.rank(), n0, u0.values, std::span<double>(in.data(), in.size()));
  ComplexBuffer U, W;
  fft.forward(in, U);

  const std::size_t M = probes.size(), P = in.size();
  const double c0 = sub.c0();
  std::vector<RealBuffer> Y(M);
  for (std::size_t j = 0; j < M; ++j) {
    W.resize(U.size());
    for (std::size_t k = 0; k < U.size(); ++k) W[k] = U[k] * mult[j][k];
    fft.backward(W, Y[j]);
    for (double& v : Y[j]) v = factor * (v - c0);
  }
  // Moments use one xi per replicate (shift 0, the probe points themselves); the
  // covariance uses every shift.
  double xi = 0.0;
  for (std::size_t j = 0; j < M; ++j) xi += probes[j].weight * Y[j][0];
  row[0] = xi;
  row[1] = xi * xi;
  row[2] = row[1] * xi;
  row[3] = row[1] * row[1];
  const double inv = 1.0 / static_cast<double>(P);
  for (std::size_t a = 0; a < M; ++a) {
    for (std::size_t b = 0; b < M; ++b) {
      if (b < a) {
        row[4 + a * M + b] = row[4 + b * M + a];
        continue;
      }
      double acc = 0.0;
      for (std::size_t s = 0; s < P; ++s) acc += Y[a][s] * Y[b][s];
      row[4 + a * M + b] = acc * inv;
    }
  }
}

}  // namespace

LadderReport run_ladder(const LadderConfig& config, const ProbeSet& probes, const SpectralDensity& sd,
                        const Subordinator& sub, const ModelParams& params) {
  validate_ladder(config, probes, sd, sub, params);
  const Regime regime = config.regime;
  const int n = params.dim();
  const int m = sub.rank();
  const double theta = scaling_exponent(regime, n, m, sd.kappa(), config.chi);

  LadderReport rep;
  rep.regime = regime;
  rep.config = config;
  rep.probes = probes;
  rep.c0 = sub.c0();
  rep.rank = m;

  double sigma = 1.0;
  if (required_condition(regime) == ConditionTag::B) {
    rep.sigma = sigma_m(sd, sub.coeffs(), m, config.n0, config.sigma_grid, sub.tail_energy(config.n0));
    if (rep.sigma->degenerate || !(rep.sigma->sigma > 0.0)) {
      throw ValidationError("sigma_m vanishes for this density and subordinator; the Gaussian limit is degenerate");
    }
    sigma = rep.sigma->sigma;
    rep.truncation_tail = truncation_tail(sd, sub, config.n0, regime, params, probes, config.sigma_grid);
  }
  rep.limit = make_limit(regime, params, sd, sub, sigma);
  rep.limit.validate();
  const auto limit = limit_covariance_matrix(rep.limit, probes);

  if (is_hermite(rep.limit.kind)) {
    const bool small_ok = is_large(regime) || params.alpha() == 1.0;
    if (m == 2 && n == 1 && small_ok) {
      rep.oracle = hermite2_fourth_moment(rep.limit, probes, config.oracle_nodes);
      rep.r4_threshold = config.oracle_threshold_fraction * rep.oracle->excess;
    } else {
      rep.notes.push_back("fourth-moment oracle covers m = 2, n = 1 (alpha = 1 for small scales); no r4 threshold");
    }
  }

  const std::size_t M = probes.size();
  const std::size_t D = 4 + M * M;
  const double L2 = frobenius(limit);

  for (std::size_t si = 0; si < config.scales.size(); ++si) {
    const double scale = config.scales[si];
    const RungMap map = rung_map(regime, scale, params.alpha(), theta);
    const GridSpec g = ladder_grid(config, probes, params, scale);
    const SpectralDensity sd_rung =
        is_large(regime) ? sd : dilate_spectrum(sd, std::pow(scale, -1.0 / params.alpha() - config.chi));
    const std::vector<double> masses = lattice_spectrum(sd_rung, g);

    ScaleReport sr;
    sr.scale = scale;
    sr.grid = g;
    sr.theta = theta;
    sr.replicates = config.replicates;
    sr.limit = limit;
    sr.alias = aliasing_check(params, map.time * min_probe_time(probes), g);
    if (sr.alias.status == AliasStatus::fail) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "aliasing at scale %.6g: multiplier %.3g left at the Nyquist frequency", scale,
                    sr.alias.nyquist_multiplier);
      throw NumericalError(buf);
    }
    if (sr.alias.status == AliasStatus::warn) {
      rep.notes.push_back("aliasing warning at scale " + std::to_string(scale));
    }

    std::vector<double> times;
    std::vector<std::array<double, 2>> X;
    std::vector<ComplexBuffer> mult;
    for (const auto& p : probes) {
      times.push_back(map.time * p.t);
      X.push_back({map.space * p.x[0], map.space * p.x[1]});
      mult.push_back(probe_multiplier(params, g, times.back(), X.back()));
    }

    sr.expected = torus_covariance(masses, g, sub, config.n0, params, times, X);
    for (auto& row : sr.expected) {
      for (double& v : row) v *= map.factor * map.factor;
    }
    sr.bias_frobenius = frobenius_diff(sr.expected, limit) / L2;
    sr.wrap_estimate = wrap_estimate(sd_rung, sub, config.n0, g, X);

    const std::size_t R = static_cast<std::size_t>(config.replicates);
    std::vector<double> rows(R * D);
    const RealFFT fft(fft_dims(g));
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
      for (std::size_t r = next++; r < R; r = next++) {
        const SeedSpec seed{config.master_seed, static_cast<std::uint32_t>(r), static_cast<std::uint32_t>(si)};
        run_replicate(masses, g, sub, config.n0, seed, mult, probes, map.factor, fft, rows.data() + r * D);
      }
    };
    const int nthreads = std::min<int>(config.threads, static_cast<int>(R));
    if (nthreads <= 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
      for (auto& th : pool) th.join();
    }

    std::vector<double> totals(D);
    for (std::size_t d = 0; d < D; ++d) totals[d] = pairwise_sum(rows.data() + d, R, D);

    sr.mean = jackknife(rows, R, D, totals, [](const std::vector<double>& mu) { return mu[0]; });
    sr.variance = jackknife(rows, R, D, totals, [](const std::vector<double>& mu) { return mu[1]; });
    sr.r2 = jackknife(rows, R, D, totals, [](const std::vector<double>& mu) { return mu[1] / mu[1]; });
    sr.r3 = jackknife(rows, R, D, totals,
                      [](const std::vector<double>& mu) { return mu[2] / (2.0 * std::pow(mu[1], 1.5)); });
    sr.r4 = jackknife(rows, R, D, totals, [](const std::vector<double>& mu) { return mu[3] / (3.0 * mu[1] * mu[1]); });
    sr.covariance.assign(M, std::vector<double>(M));
    sr.covariance_se.assign(M, std::vector<double>(M));
    for (std::size_t a = 0; a < M; ++a) {
      for (std::size_t b = 0; b < M; ++b) {
        const std::size_t idx = 4 + a * M + b;
        const Estimate e = jackknife(rows, R, D, totals, [idx](const std::vector<double>& mu) { return mu[idx]; });
        sr.covariance[a][b] = e.value;
        sr.covariance_se[a][b] = e.se;
      }
    }
    sr.frobenius_rel_err = jackknife(rows, R, D, totals, [&](const std::vector<double>& mu) {
      double s = 0.0;
      for (std::size_t a = 0; a < M; ++a) {
        for (std::size_t b = 0; b < M; ++b) {
          const double d = mu[4 + a * M + b] - limit[a][b];
          s += d * d;
        }
      }
      return std::sqrt(s) / L2;
    });
    sr.min_eig_empirical = min_eigenvalue(sr.covariance);
    sr.min_eig_limit = min_eigenvalue(limit);
    rep.scales.push_back(std::move(sr));
  }

  rep.error_decreasing = true;
  rep.bias_decreasing = true;
  for (std::size_t i = 1; i < rep.scales.size(); ++i) {
    const auto& a = rep.scales[i - 1].frobenius_rel_err;
    const auto& b = rep.scales[i].frobenius_rel_err;
    if (b.value > a.value + 3.0 * std::hypot(a.se, b.se)) rep.error_decreasing = false;
    // 1e-4 absolute: the limit quadrature floor.
    if (rep.scales[i].bias_frobenius > rep.scales[i - 1].bias_frobenius + 1e-4) rep.bias_decreasing = false;
  }
  return rep;
}

namespace {

using ojson = nlohmann::ordered_json;

ojson estimate_json(const Estimate& e) { return ojson{{"value", e.value}, {"se", e.se}}; }

}  // namespace

std::string ladder_report_json(const LadderReport& report) {
  ojson j;
  j["regime"] = to_string(report.regime);
  const auto& c = report.config;
  j["config"] = {{"scales", c.scales},
                 {"chi", c.chi},
                 {"replicates", c.replicates},
                 {"n0", c.n0},
                 {"master_seed", c.master_seed},
                 {"spacing", c.spacing},
                 {"box_factor", c.box_factor},
                 {"min_box", c.min_box},
                 {"small_box", c.small_box},
                 {"sigma_grid", {{"points", c.sigma_grid.points}, {"half_width", c.sigma_grid.half_width}}},
                 {"oracle_nodes", c.oracle_nodes},
                 {"oracle_threshold_fraction", c.oracle_threshold_fraction}};
  ojson probes = ojson::array();
  for (const auto& p : report.probes) probes.push_back({{"weight", p.weight}, {"t", p.t}, {"x", p.x}});
  j["probes"] = probes;
  const auto& L = report.limit;
  j["limit"] = {{"kind", to_string(L.kind)}, {"dim", L.dim},     {"alpha", L.alpha}, {"mass", L.mass},
                {"sigma", L.sigma},          {"cm", L.cm},       {"b0", L.b0},       {"kappa", L.kappa},
                {"m", L.m}};
  j["c0"] = report.c0;
  j["rank"] = report.rank;
  if (report.sigma) {
    ojson terms = ojson::array();
    for (const auto& t : report.sigma->terms) {
      terms.push_back({{"r", t.r}, {"f_star_r_at_origin", t.f_star_r_at_origin}, {"coeff_sq", t.coeff_sq}});
    }
    j["sigma"] = {{"sigma", report.sigma->sigma},
                  {"sigma_sq", report.sigma->sigma_sq},
                  {"terms", terms},
                  {"excluded", report.sigma->excluded},
                  {"tail_bound", report.sigma->tail_bound}};
  }
  if (report.oracle) {
    j["oracle"] = {{"excess", report.oracle->excess},
                   {"variance", report.oracle->variance},
                   {"nodes", report.oracle->nodes},
                   {"excess_by_nodes", report.oracle->excess_by_nodes},
                   {"resolution_error", report.oracle->resolution_error},
                   {"r4_threshold", report.r4_threshold}};
  }
  j["truncation_tail"] = report.truncation_tail;
  ojson scales = ojson::array();
  for (const auto& s : report.scales) {
    scales.push_back({{"scale", s.scale},
                      {"grid", {{"points", s.grid.points}, {"box_length", s.grid.box_length}}},
                      {"theta", s.theta},
                      {"replicates", s.replicates},
                      {"covariance_matrix", s.covariance},
                      {"covariance_se", s.covariance_se},
                      {"limit_matrix", s.limit},
                      {"frobenius_rel_err", estimate_json(s.frobenius_rel_err)},
                      {"bias_report",
                       {{"expected_matrix", s.expected},
                        {"bias_frobenius", s.bias_frobenius},
                        {"wrap_estimate", s.wrap_estimate}}},
                      {"mean", estimate_json(s.mean)},
                      {"variance", estimate_json(s.variance)},
                      {"r2", estimate_json(s.r2)},
                      {"r3", estimate_json(s.r3)},
                      {"r4", estimate_json(s.r4)},
                      {"alias", {{"status", to_string(s.alias.status)}, {"nyquist_multiplier", s.alias.nyquist_multiplier}}},
                      {"min_eig_empirical", s.min_eig_empirical},
                      {"min_eig_limit", s.min_eig_limit}});
  }
  j["scales"] = scales;
  j["error_decreasing"] = report.error_decreasing;
  j["bias_decreasing"] = report.bias_decreasing;
  j["notes"] = report.notes;
  return j.dump(2) + "\n";
}

std::string ladder_report_csv(const LadderReport& report) {
  std::ostringstream os;
  os.precision(17);
  os << "scale,theta,points,box_length,frobenius_rel_err,frobenius_se,bias_frobenius,wrap_estimate,"
        "r2,r2_se,r3,r3_se,r4,r4_se,alias_status,nyquist_multiplier\n";
  for (const auto& s : report.scales) {
    os << s.scale << ',' << s.theta << ',' << s.grid.points << ',' << s.grid.box_length << ','
       << s.frobenius_rel_err.value << ',' << s.frobenius_rel_err.se << ',' << s.bias_frobenius << ','
       << s.wrap_estimate << ',' << s.r2.value << ',' << s.r2.se << ',' << s.r3.value << ',' << s.r3.se << ','
       << s.r4.value << ',' << s.r4.se << ',' << to_string(s.alias.status) << ',' << s.alias.nyquist_multiplier << '\n';
  }
  return os.str();
}

}  // namespace reldiff
