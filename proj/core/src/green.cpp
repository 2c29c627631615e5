#include "reldiff/green.hpp"

#include <cmath>
#include <string>

#include "reldiff/error.hpp"

namespace reldiff {
namespace {

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw ValidationError(std::string(what) + " must be finite");
}

void require_time(double t) {
  require_finite(t, "time");
  if (t < 0.0) throw ValidationError("time must be nonnegative");
}

void require_positive_mass(const ModelParams& p, const char* op) {
  if (!(p.mass() > 0.0)) {
    throw ValidationError(std::string(op) + " requires mass > 0 (large-scale limit is undefined at mass 0)");
  }
}

double checked_norm(std::span<const double> lambda) {
  for (double v : lambda) require_finite(v, "frequency component");
  return norm(lambda);
}

// expm1(a log1p(u)) - a u, accurate for small u.
double binomial_remainder(double a, double u) {
  if (std::abs(u) < 1e-3) {
    double term = a * (a - 1.0) / 2.0 * u * u;
    double sum = term;
    for (int k = 3; k <= 10; ++k) {
      term *= (a - k + 1.0) / k * u;
      sum += term;
    }
    return sum;
  }
  return std::expm1(a * std::log1p(u)) - a * u;
}

}  // namespace

ModelParams::ModelParams(int dim, double alpha, double mass) : dim_(dim), alpha_(alpha), mass_(mass) {
  if (dim < 1) throw ValidationError("dimension must be a positive integer");
  if (!std::isfinite(alpha) || !(alpha > 0.0 && alpha < 2.0)) {
    throw ValidationError("alpha must lie in the open interval (0, 2)");
  }
  if (!std::isfinite(mass) || mass < 0.0) throw ValidationError("mass must be a nonnegative finite number");
  mass_pow_ = std::pow(mass, 2.0 / alpha);
}

double ModelParams::heat_coefficient() const {
  return 0.5 * alpha_ * std::pow(mass_, 1.0 - 2.0 / alpha_);
}

double ModelParams::symbol(double lambda_norm) const {
  const double l2 = lambda_norm * lambda_norm;
  if (mass_ == 0.0) return std::pow(lambda_norm, alpha_);
  // (m^{2/a} + l^2)^{a/2} - m = m * expm1((a/2) log1p(l^2 / m^{2/a}))
  return mass_ * std::expm1(0.5 * alpha_ * std::log1p(l2 / mass_pow_));
}

double norm(std::span<const double> lambda) {
  double s = 0.0;
  for (double v : lambda) s += v * v;
  return std::sqrt(s);
}

double green_hat(const ModelParams& p, double t, double lambda_norm) {
  require_time(t);
  require_finite(lambda_norm, "frequency");
  return std::exp(-t * p.symbol(lambda_norm));
}

double green_hat(const ModelParams& p, double t, std::span<const double> lambda) {
  return green_hat(p, t, checked_norm(lambda));
}

double green_hat_large(const ModelParams& p, double T, double t, double lambda_norm) {
  require_positive_mass(p, "green_hat_large");
  require_finite(T, "scale T");
  if (T < 1.0) throw ValidationError("large-scale parameter T must be >= 1");
  require_time(t);
  require_finite(lambda_norm, "frequency");
  // exponent T t (m - (m^{2/a} + l^2/T)^{a/2}) accumulated in log space
  const double u = lambda_norm * lambda_norm / (T * p.mass_pow());
  const double exponent = -T * t * p.mass() * std::expm1(0.5 * p.alpha() * std::log1p(u));
  return std::exp(exponent);
}

double green_hat_large(const ModelParams& p, double T, double t, std::span<const double> lambda) {
  return green_hat_large(p, T, t, checked_norm(lambda));
}

double limit_kernel_large(const ModelParams& p, double t, double lambda_norm) {
  require_positive_mass(p, "limit_kernel_large");
  require_time(t);
  require_finite(lambda_norm, "frequency");
  return std::exp(-t * p.heat_coefficient() * lambda_norm * lambda_norm);
}

double limit_kernel_large(const ModelParams& p, double t, std::span<const double> lambda) {
  return limit_kernel_large(p, t, checked_norm(lambda));
}

double green_hat_small(const ModelParams& p, double eps, double t, double lambda_norm) {
  require_finite(eps, "scale eps");
  if (!(eps > 0.0) || eps > 1.0) throw ValidationError("small-scale parameter eps must lie in (0, 1]");
  require_time(t);
  require_finite(lambda_norm, "frequency");
  // eps t psi(eps^{-1/a} l); for mass 0 this is exactly t |l|^a
  const double scaled = lambda_norm * std::pow(eps, -1.0 / p.alpha());
  if (p.mass() == 0.0) return std::exp(-t * std::pow(lambda_norm, p.alpha()));
  return std::exp(-eps * t * p.symbol(scaled));
}

double green_hat_small(const ModelParams& p, double eps, double t, std::span<const double> lambda) {
  return green_hat_small(p, eps, t, checked_norm(lambda));
}

double limit_kernel_small(double alpha, double t, double lambda_norm) {
  if (!std::isfinite(alpha) || !(alpha > 0.0 && alpha < 2.0)) {
    throw ValidationError("alpha must lie in the open interval (0, 2)");
  }
  require_time(t);
  require_finite(lambda_norm, "frequency");
  return std::exp(-t * std::pow(lambda_norm, alpha));
}

double limit_kernel_small(double alpha, double t, std::span<const double> lambda) {
  return limit_kernel_small(alpha, t, checked_norm(lambda));
}

double taylor_gap(const ModelParams& p, double T, double t, double lambda_norm) {
  require_positive_mass(p, "taylor_gap");
  if (!std::isfinite(T) || T < 1.0) throw ValidationError("large-scale parameter T must be >= 1");
  require_time(t);
  require_finite(lambda_norm, "frequency");
  const double u = lambda_norm * lambda_norm / (T * p.mass_pow());
  return std::abs(T * t * p.mass() * binomial_remainder(0.5 * p.alpha(), u));
}

double taylor_gap_bound(const ModelParams& p, double T, double t, double lambda_norm) {
  require_positive_mass(p, "taylor_gap_bound");
  const double a = p.alpha();
  const double l4 = std::pow(lambda_norm, 4);
  return t * (a / 4.0) * std::abs(1.0 - a / 2.0) * std::pow(p.mass(), (2.0 / a) * (a / 2.0 - 2.0)) * l4 / T;
}

namespace {

void check_panel(double lambda_max, int points) {
  if (!(lambda_max > 0.0) || !std::isfinite(lambda_max)) throw ValidationError("panel lambda_max must be positive");
  if (points < 1) throw ValidationError("panel needs at least one point");
}

template <class F>
MultiplierConvergence panel_sup(double scale, double lambda_max, int points, F err) {
  MultiplierConvergence row{scale, 0.0, 0.0};
  for (int i = 1; i <= points; ++i) {
    const double lam = lambda_max * i / points;
    const double e = err(lam);
    if (e > row.sup_error) {
      row.sup_error = e;
      row.argmax_lambda = lam;
    }
  }
  return row;
}

}  // namespace

std::vector<MultiplierConvergence> large_scale_convergence(const ModelParams& p, double t, std::span<const double> Ts,
                                                           double lambda_max, int points) {
  check_panel(lambda_max, points);
  std::vector<MultiplierConvergence> out;
  for (double T : Ts) {
    out.push_back(panel_sup(T, lambda_max, points, [&](double lam) {
      return std::abs(green_hat_large(p, T, t, lam) - limit_kernel_large(p, t, lam));
    }));
  }
  return out;
}

std::vector<MultiplierConvergence> small_scale_convergence(const ModelParams& p, double t, std::span<const double> eps,
                                                           double lambda_max, int points) {
  check_panel(lambda_max, points);
  std::vector<MultiplierConvergence> out;
  for (double e : eps) {
    out.push_back(panel_sup(e, lambda_max, points, [&](double lam) {
      return std::abs(green_hat_small(p, e, t, lam) - limit_kernel_small(p.alpha(), t, lam));
    }));
  }
  return out;
}

double small_scale_mass_gap(int dim, double alpha, double mass1, double mass2, double eps, double t,
                            double lambda_max, int points) {
  check_panel(lambda_max, points);
  const ModelParams a(dim, alpha, mass1), b(dim, alpha, mass2);
  return panel_sup(eps, lambda_max, points, [&](double lam) {
           return std::abs(green_hat_small(a, eps, t, lam) - green_hat_small(b, eps, t, lam));
         }).sup_error;
}

}  // namespace reldiff
