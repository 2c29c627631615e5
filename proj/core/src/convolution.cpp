#include "reldiff/convolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "reldiff/error.hpp"
#include "reldiff/fft.hpp"
#include "reldiff/hermite.hpp"

namespace reldiff {

void FrequencyGrid::validate() const {
  if (dim != 1 && dim != 2) throw ValidationError("frequency grid dimension must be 1 or 2");
  if (points < 8 || (points & (points - 1)) != 0) throw ValidationError("frequency grid points must be a power of two >= 8");
  if (!(half_width > 0.0) || !std::isfinite(half_width)) throw ValidationError("frequency grid half width must be positive");
}

FrequencyGrid default_frequency_grid(int dim) {
  if (dim == 1) return {1, std::size_t{1} << 20, 64.0};
  if (dim == 2) return {2, std::size_t{1} << 10, 16.0};
  throw ValidationError("default_frequency_grid: dimension must be 1 or 2");
}

std::vector<double> sample_density(const SpectralDensity& sd, const FrequencyGrid& grid) {
  grid.validate();
  if (sd.dim() != grid.dim) throw ValidationError("sample_density: grid and density dimensions differ");
  const std::size_t N = grid.points;
  const double h = grid.spacing();
  std::vector<double> out(grid.total());
  if (grid.dim == 1) {
    const std::size_t c = N / 2;
    auto value = [&](double lam) {
      return sd.singular() ? sd.interval_mass(lam - 0.5 * h, lam + 0.5 * h) / h : sd.eval_radial(lam);
    };
    for (std::size_t j = 0; j < c; ++j) {
      const double v = value(static_cast<double>(j) * h);
      out[c + j] = v;
      if (j > 0) out[c - j] = v;
    }
    out[0] = value(grid.coord(0));
    return out;
  }
  for (std::size_t i = 0; i < N; ++i) {
    const double x = grid.coord(i);
    for (std::size_t j = 0; j < N; ++j) {
      const double y = grid.coord(j);
      out[i * N + j] = sd.singular()
                           ? sd.rect_mass(x - 0.5 * h, x + 0.5 * h, y - 0.5 * h, y + 0.5 * h) / (h * h)
                           : sd.eval_radial(std::hypot(x, y));
    }
  }
  return out;
}

namespace {

// Centered grid <-> origin-first periodic layout of M points per axis (M >= N).
struct Layout {
  int dim;
  std::size_t N;
  std::size_t M;

  std::size_t axis(std::size_t i) const {
    const long d = static_cast<long>(i) - static_cast<long>(N / 2);
    return static_cast<std::size_t>((d + static_cast<long>(M)) % static_cast<long>(M));
  }
  std::size_t size() const { return dim == 1 ? M : M * M; }
  std::size_t pos(std::size_t flat) const {
    if (dim == 1) return axis(flat);
    return axis(flat / N) * M + axis(flat % N);
  }
  RealBuffer scatter(const std::vector<double>& centered) const {
    RealBuffer buf(size(), 0.0);
    for (std::size_t f = 0; f < centered.size(); ++f) buf[pos(f)] = centered[f];
    return buf;
  }
  void gather(const RealBuffer& buf, double scale, std::vector<double>& centered) const {
    for (std::size_t f = 0; f < centered.size(); ++f) centered[f] = buf[pos(f)] * scale;
  }
};

std::vector<int> dims_of(int dim, std::size_t M) {
  return dim == 1 ? std::vector<int>{static_cast<int>(M)} : std::vector<int>{static_cast<int>(M), static_cast<int>(M)};
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

std::vector<ConvolutionPower> convolution_powers(const SpectralDensity& sd, int kmax, const FrequencyGrid& grid,
                                                 double tol) {
  if (kmax < 1) throw ValidationError("convolution power k must be >= 1");
  const std::vector<double> f = sample_density(sd, grid);
  const std::size_t N = grid.points;
  const double vol = grid.cell_volume();
  const Layout small{grid.dim, N, N}, big{grid.dim, N, 2 * N};
  const RealFFT fft_small(dims_of(grid.dim, N)), fft_big(dims_of(grid.dim, 2 * N));
  const double norm_small = 1.0 / static_cast<double>(small.size());
  const double norm_big = 1.0 / static_cast<double>(big.size());

  ComplexBuffer F, Fbig;
  fft_small.forward(small.scatter(f), F);
  fft_big.forward(big.scatter(f), Fbig);

  std::vector<ConvolutionPower> out;
  ConvolutionPower first;
  first.k = 1;
  first.grid = grid;
  first.values = f;
  first.mass = std::accumulate(f.begin(), f.end(), 0.0) * vol;
  out.push_back(first);

  ComplexBuffer Fk = F;
  std::vector<double> direct = f;
  RealBuffer real_tmp;
  ComplexBuffer spec_tmp;
  for (int k = 2; k <= kmax; ++k) {
    // Fourier route: transform of R^k on the periodic box.
    for (std::size_t j = 0; j < Fk.size(); ++j) Fk[j] *= F[j] * vol;
    spec_tmp = Fk;
    fft_small.backward(spec_tmp, real_tmp);
    ConvolutionPower p;
    p.k = k;
    p.grid = grid;
    p.values.resize(f.size());
    small.gather(real_tmp, norm_small, p.values);

    // Direct route: linear convolution with the previous power, truncated to the grid.
    fft_big.forward(big.scatter(direct), spec_tmp);
    for (std::size_t j = 0; j < spec_tmp.size(); ++j) spec_tmp[j] *= Fbig[j] * vol;
    fft_big.backward(spec_tmp, real_tmp);
    big.gather(real_tmp, norm_big, direct);

    double diff = 0.0;
    for (std::size_t j = 0; j < direct.size(); ++j) diff = std::max(diff, std::abs(direct[j] - p.values[j]));
    const double scale = max_abs(p.values);
    p.max_discrepancy = scale > 0.0 ? diff / scale : diff;
    p.mass = std::accumulate(p.values.begin(), p.values.end(), 0.0) * vol;
    if (p.max_discrepancy > tol) {
      throw NumericalError("f^{*" + std::to_string(k) + "} routes disagree by " + std::to_string(p.max_discrepancy) +
                           "; grid unresolved, retry with half_width " + std::to_string(2.0 * grid.half_width) +
                           " and " + std::to_string(2 * N) + " points per axis");
    }
    out.push_back(std::move(p));
  }
  return out;
}

ConvolutionPower convolve_k(const SpectralDensity& sd, int k, const FrequencyGrid& grid, double tol) {
  auto all = convolution_powers(sd, k, grid, tol);
  return std::move(all.back());
}

void write_convolution_csv(std::ostream& os, const ConvolutionPower& power) {
  const auto& g = power.grid;
  os.precision(17);
  if (g.dim == 1) {
    os << "lambda,f_star_k\n";
    for (std::size_t i = 0; i < g.points; ++i) os << g.coord(i) << ',' << power.values[i] << '\n';
    return;
  }
  os << "lambda1,lambda2,f_star_k\n";
  for (std::size_t i = 0; i < g.points; ++i) {
    for (std::size_t j = 0; j < g.points; ++j) {
      os << g.coord(i) << ',' << g.coord(j) << ',' << power.values[i * g.points + j] << '\n';
    }
  }
}

std::string to_string(Lemma1Regime regime) {
  switch (regime) {
    case Lemma1Regime::power:
      return "power";
    case Lemma1Regime::log:
      return "log";
    case Lemma1Regime::continuous:
      return "continuous";
    case Lemma1Regime::inconclusive:
      return "inconclusive";
  }
  return "?";
}

Lemma1Regime predicted_regime(double kappa, int n, int k) {
  const double d = k * kappa - n;
  if (std::abs(d) <= 1e-12 * n) return Lemma1Regime::log;
  return d < 0.0 ? Lemma1Regime::power : Lemma1Regime::continuous;
}

namespace {

struct WeightedLinearFit {
  double intercept = 0.0;
  double slope = 0.0;
  double rss = 0.0;
  double r2 = 0.0;
};

// Weighted least squares y ~ intercept + slope * x.
WeightedLinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& w) {
  double sw = 0, sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sw += w[i];
    sx += w[i] * x[i];
    sy += w[i] * y[i];
  }
  const double mx = sx / sw, my = sy / sw;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += w[i] * (x[i] - mx) * (x[i] - mx);
    sxy += w[i] * (x[i] - mx) * (y[i] - my);
    syy += w[i] * (y[i] - my) * (y[i] - my);
  }
  WeightedLinearFit fit;
  fit.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  fit.intercept = my - fit.slope * mx;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - fit.intercept - fit.slope * x[i];
    fit.rss += w[i] * r * r;
  }
  fit.r2 = syy > 0.0 ? 1.0 - fit.rss / syy : 1.0;
  return fit;
}

// Golden-section minimum of a unimodal function on [a, b].
template <class F>
double golden_min(F&& f, double a, double b) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 120 && b - a > 1e-10; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

Lemma1Report lemma1_regime(const ConvolutionPower& power, double kappa, double lo, double hi) {
  const FrequencyGrid& g = power.grid;
  const double h = g.spacing();
  if (!(lo > 0.0) || !(hi > lo)) throw ValidationError("lemma1 window must satisfy 0 < lo < hi");
  if (lo < 4.0 * h || hi > 0.5 * g.half_width) {
    throw ValidationError("lemma1 window [" + std::to_string(lo) + ", " + std::to_string(hi) +
                          "] is not resolved by the grid spacing " + std::to_string(h));
  }
  Lemma1Report rep;
  rep.k = power.k;
  rep.kappa = kappa;
  rep.n = g.dim;
  rep.window_lo = lo;
  rep.window_hi = hi;
  rep.predicted = predicted_regime(kappa, g.dim, power.k);
  rep.value_at_origin = power.at_origin();

  // Log-spaced samples along the last axis, averaged with their mirror images.
  const std::size_t origin = g.origin_index();
  std::vector<double> lam, val;
  const int samples = 60;
  std::size_t last = 0;
  for (int s = 0; s < samples; ++s) {
    const double target = lo * std::pow(hi / lo, s / (samples - 1.0));
    const auto j = static_cast<std::size_t>(std::llround(target / h));
    if (j == last) continue;
    last = j;
    lam.push_back(static_cast<double>(j) * h);
    val.push_back(0.5 * (power.values[origin + j] + power.values[origin - j]));
  }
  for (double v : val) {
    if (!(v > 0.0)) throw NumericalError("lemma1: non-positive f^{*k} inside the fit window");
  }

  std::vector<double> ones(lam.size(), 1.0), rel_w(lam.size()), loglam(lam.size()), logval(lam.size()),
      loglog_arg(lam.size());
  for (std::size_t i = 0; i < lam.size(); ++i) {
    rel_w[i] = 1.0 / (val[i] * val[i]);
    loglam[i] = std::log(lam[i]);
    logval[i] = std::log(val[i]);
    loglog_arg[i] = std::log(2.0 + 1.0 / lam[i]);
  }
  const auto ll = linear_fit(loglam, logval, ones);
  rep.loglog_slope = ll.slope;
  rep.loglog_r2 = ll.r2;
  const auto lf = linear_fit(loglog_arg, val, rel_w);
  rep.log_fit_slope = lf.slope;
  rep.log_fit_r2 = lf.r2;
  rep.log_ratio_min = std::numeric_limits<double>::infinity();
  rep.log_ratio_max = 0.0;
  for (std::size_t i = 0; i < lam.size(); ++i) {
    const double r = val[i] / loglog_arg[i];
    rep.log_ratio_min = std::min(rep.log_ratio_min, r);
    rep.log_ratio_max = std::max(rep.log_ratio_max, r);
  }

  // f ~ A lambda^s + D: profile out (A, D) by weighted least squares, search s.
  std::vector<double> xs(lam.size());
  auto fit_at = [&](double s) {
    for (std::size_t i = 0; i < lam.size(); ++i) xs[i] = std::pow(lam[i], s);
    return linear_fit(xs, val, rel_w);
  };
  const double s_neg = golden_min([&](double s) { return fit_at(s).rss; }, -1.5, -0.005);
  const double s_pos = golden_min([&](double s) { return fit_at(s).rss; }, 0.005, 3.0);
  const auto f_neg = fit_at(s_neg), f_pos = fit_at(s_pos);
  const bool neg = f_neg.rss <= f_pos.rss;
  rep.exponent_estimate = neg ? s_neg : s_pos;
  rep.fit_r2 = neg ? f_neg.r2 : f_pos.r2;

  if (rep.fit_r2 < 0.99) {
    rep.regime = Lemma1Regime::inconclusive;
  } else if (rep.exponent_estimate < -0.05) {
    rep.regime = Lemma1Regime::power;
  } else if (rep.exponent_estimate > 0.05) {
    rep.regime = Lemma1Regime::continuous;
  } else {
    rep.regime = rep.log_fit_r2 >= 0.99 ? Lemma1Regime::log : Lemma1Regime::inconclusive;
  }

  switch (rep.regime) {
    case Lemma1Regime::power: {
      const double e = power.k * kappa - g.dim;
      for (std::size_t i = 0; i < lam.size(); ++i) {
        rep.sup_Bk_estimate = std::max(rep.sup_Bk_estimate, val[i] * std::pow(lam[i], -e));
      }
      break;
    }
    case Lemma1Regime::log:
      rep.sup_Bk_estimate = rep.log_ratio_max;
      break;
    default:
      rep.sup_Bk_estimate = *std::max_element(power.values.begin(), power.values.end());
  }
  return rep;
}

Lemma1Report lemma1_regime(const SpectralDensity& sd, int k, const FrequencyGrid& grid) {
  return lemma1_regime(convolve_k(sd, k, grid), sd.kappa());
}

SupMonotonicity sup_monotonicity_check(const std::vector<ConvolutionPower>& powers, double kappa, int k1, int k2) {
  if (powers.empty()) throw ValidationError("sup_monotonicity_check: no convolution powers");
  const int n = powers.front().grid.dim;
  if (!(k1 > k2)) throw ValidationError("sup_monotonicity_check requires k1 > k2");
  if (!(k2 * kappa > n * (1.0 + 1e-12))) throw ValidationError("sup_monotonicity_check requires k2 > n / kappa");
  if (static_cast<int>(powers.size()) < k1) throw ValidationError("sup_monotonicity_check: powers up to k1 needed");
  auto sup_of = [&](int k) {
    const auto& v = powers[k - 1].values;
    return *std::max_element(v.begin(), v.end());
  };
  const double slack = 1.0 + 1e-9;
  SupMonotonicity out;
  out.sup_k1 = sup_of(k1);
  out.sup_k2 = sup_of(k2);
  out.ok = out.sup_k1 <= out.sup_k2 * slack;
  for (int l = k2 + 1; l <= k1; ++l) {
    if (sup_of(l) > out.sup_k2 * slack) {
      out.chain_ok = false;
      if (!out.offending_k) out.offending_k = l;
    }
  }
  const int bad = !out.ok ? k1 : (out.offending_k ? *out.offending_k : 0);
  if (bad > 0) {
    const auto& p = powers[bad - 1];
    const auto it = std::max_element(p.values.begin(), p.values.end());
    const auto idx = static_cast<std::size_t>(it - p.values.begin());
    out.offending_lambda = p.grid.coord(p.grid.dim == 1 ? idx : idx % p.grid.points);
  }
  out.ok = out.ok && out.chain_ok;
  return out;
}

SupMonotonicity sup_monotonicity_check(const SpectralDensity& sd, int k1, int k2, const FrequencyGrid& grid) {
  if (!(k1 > k2)) throw ValidationError("sup_monotonicity_check requires k1 > k2");
  return sup_monotonicity_check(convolution_powers(sd, k1, grid), sd.kappa(), k1, k2);
}

SigmaReport sigma_m(const SpectralDensity& sd, std::span<const double> coeffs, int m, int n0,
                    const FrequencyGrid& grid, std::optional<double> tail_energy) {
  const auto cls = classify(sd.kappa(), sd.dim(), m);
  if (cls.tag != ConditionTag::B) {
    throw ValidationError("sigma_m requires Condition B (m kappa > n); got condition " + to_string(cls.tag));
  }
  const int lmax = static_cast<int>(coeffs.size()) - 1;
  if (n0 < m) throw ValidationError("sigma_m requires N0 >= m");
  if (n0 > lmax) throw ValidationError("sigma_m: N0 exceeds the available Hermite coefficients");

  int top = m;
  for (int r = m; r <= n0; ++r) {
    if (coeffs[r] != 0.0) top = r;
  }
  const auto powers = convolution_powers(sd, top, grid);
  SigmaReport rep;
  for (int r = m; r <= n0; ++r) {
    const double c2 = coeffs[r] * coeffs[r];
    if (r >= 2 && predicted_regime(sd.kappa(), sd.dim(), r) == Lemma1Regime::log) {
      rep.excluded.push_back(r);
      continue;
    }
    double f0 = 0.0;
    if (c2 != 0.0) f0 = r == 1 ? sd.eval_radial(0.0) : powers[r - 1].at_origin();
    rep.terms.push_back({r, f0, c2});
    rep.sigma_sq += f0 * c2;
  }
  rep.sigma = std::sqrt(std::max(rep.sigma_sq, 0.0));
  rep.degenerate = !(rep.sigma_sq > 0.0);

  double tail = 0.0;
  if (tail_energy) {
    tail = *tail_energy;
  } else {
    for (int r = n0 + 1; r <= lmax; ++r) tail += coeffs[r] * coeffs[r];
  }
  const auto& vm = powers[m - 1].values;
  rep.tail_bound = *std::max_element(vm.begin(), vm.end()) * tail;
  return rep;
}

SigmaReport sigma_m(const SpectralDensity& sd, const Subordinator& sub, int n0, const FrequencyGrid& grid) {
  return sigma_m(sd, sub.coeffs(), sub.rank(), n0, grid, sub.tail_energy(n0));
}

}  // namespace reldiff
