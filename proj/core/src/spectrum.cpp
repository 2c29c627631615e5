#include "reldiff/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "reldiff/error.hpp"
#include "reldiff/green.hpp"
#include "reldiff/quadrature.hpp"

namespace reldiff {

namespace {

constexpr double kTailLog = 41.5;  // exp(-41.5) < 1e-18

double sphere_area(int n) { return n == 1 ? 2.0 : 2.0 * std::numbers::pi; }

// Unit-dilation profile b(s).
double base_profile(BFamily family, double a, double s) {
  switch (family) {
    case BFamily::exponential:
      return std::exp(-a * s);
    case BFamily::gaussian:
      return std::exp(-a * s * s);
    case BFamily::bump: {
      const double q = s / a;
      return q < 1.0 ? std::exp(-1.0 / (1.0 - q * q)) : 0.0;
    }
  }
  return 0.0;
}

double base_cutoff(BFamily family, double a) {
  switch (family) {
    case BFamily::exponential:
      return kTailLog / a;
    case BFamily::gaussian:
      return std::sqrt(kTailLog / a);
    case BFamily::bump:
      return a;
  }
  return 0.0;
}

// int_{s0}^{s1} b(s) s^{kappa-1} ds at unit dilation.
double base_profile_integral(BFamily family, double a, double kappa, double s0, double s1) {
  s1 = std::min(s1, base_cutoff(family, a));
  if (!(s1 > s0)) return 0.0;
  auto b = [&](double s) { return base_profile(family, a, s); };
  double total = 0.0;
  double s = s0;
  if (s <= 0.0) {
    const double head = std::min({s1, 1.0, 1.0 / a});
    // u = s^kappa
    total += adaptive_integral([&](double u) { return b(std::pow(u, 1.0 / kappa)) / kappa; }, 0.0,
                               std::pow(head, kappa), 1e-13, 1e-300);
    s = head;
  }
  // Geometric panels: each no wider than its left end, so s^{kappa-1} stays analytic nearby.
  const QuadratureRule& gl = cached_gauss_legendre(12);
  const double max_width = base_cutoff(family, a) / 64.0;
  while (s < s1) {
    const double next = std::min(s1, s + std::min(s, max_width));
    const double mid = 0.5 * (s + next), half = 0.5 * (next - s);
    double acc = 0.0;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
      const double r = mid + half * gl.nodes[i];
      acc += gl.weights[i] * b(r) * std::pow(r, kappa - 1.0);
    }
    total += half * acc;
    s = next;
  }
  return total;
}

}  // namespace

std::string to_string(BFamily family) {
  switch (family) {
    case BFamily::exponential:
      return "exponential";
    case BFamily::gaussian:
      return "gaussian";
    case BFamily::bump:
      return "bump";
  }
  return "?";
}

BFamily bfamily_from_string(const std::string& name) {
  if (name == "exponential") return BFamily::exponential;
  if (name == "gaussian") return BFamily::gaussian;
  if (name == "bump") return BFamily::bump;
  throw ValidationError("unknown B family '" + name + "' (expected exponential, gaussian or bump)");
}

SpectralDensity SpectralDensity::normalized(int dim, double kappa, BFamily family, double decay) {
  if (dim != 1 && dim != 2) throw ValidationError("spectral density dimension must be 1 or 2");
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw ValidationError("kappa must be positive");
  if (!(decay > 0.0) || !std::isfinite(decay)) throw ValidationError("B decay parameter must be positive");
  SpectralDensity sd;
  sd.dim_ = dim;
  sd.kappa_ = kappa;
  sd.family_ = family;
  sd.decay_ = decay;
  double radial = 0.0;
  switch (family) {
    case BFamily::exponential:
      radial = std::tgamma(kappa) / std::pow(decay, kappa);
      break;
    case BFamily::gaussian:
      radial = std::tgamma(0.5 * kappa) / (2.0 * std::pow(decay, 0.5 * kappa));
      break;
    case BFamily::bump:
      radial = base_profile_integral(family, decay, kappa, 0.0, decay);
      break;
  }
  sd.norm_const_ = 1.0 / (sphere_area(dim) * radial);
  return sd;
}

double SpectralDensity::profile(double r) const { return base_profile(family_, decay_, r / dilation_); }

double SpectralDensity::B(double r) const {
  return norm_const_ * profile(std::abs(r)) * std::pow(dilation_, -kappa_);
}

double SpectralDensity::eval_radial(double r) const {
  r = std::abs(r);
  if (r == 0.0) {
    if (kappa_ < dim_) throw SingularityError("spectral density evaluated at its singular point lambda = 0");
    return kappa_ == dim_ ? B0() : 0.0;
  }
  return B(r) * std::pow(r, kappa_ - dim_);
}

double SpectralDensity::cutoff() const { return base_cutoff(family_, decay_) * dilation_; }

double SpectralDensity::radial_profile_integral(double r0, double r1) const {
  if (r0 < 0.0 || r1 < r0) throw ValidationError("radial_profile_integral needs 0 <= r0 <= r1");
  return norm_const_ * base_profile_integral(family_, decay_, kappa_, r0 / dilation_, r1 / dilation_);
}

double SpectralDensity::interval_mass(double lo, double hi) const {
  if (dim_ != 1) throw ValidationError("interval_mass is for dimension 1");
  if (hi < lo) std::swap(lo, hi);
  if (lo >= 0.0) return radial_profile_integral(lo, hi);
  if (hi <= 0.0) return radial_profile_integral(-hi, -lo);
  return radial_profile_integral(0.0, -lo) + radial_profile_integral(0.0, hi);
}

namespace {

// Mass of f on [0, X] x [0, Y] for X, Y >= 0, in polar coordinates around the corner.
double corner_mass(const SpectralDensity& sd, double X, double Y) {
  if (X <= 0.0 || Y <= 0.0) return 0.0;
  const double split = std::atan2(Y, X);
  const QuadratureRule& gl = cached_gauss_legendre(16);
  auto sector = [&](double th0, double th1, auto&& rmax) {
    const double mid = 0.5 * (th0 + th1), half = 0.5 * (th1 - th0);
    double acc = 0.0;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
      const double th = mid + half * gl.nodes[i];
      acc += gl.weights[i] * sd.radial_profile_integral(0.0, rmax(th));
    }
    return half * acc;
  };
  return sector(0.0, split, [&](double th) { return X / std::cos(th); }) +
         sector(split, 0.5 * std::numbers::pi, [&](double th) { return Y / std::sin(th); });
}

double signed_corner_mass(const SpectralDensity& sd, double X, double Y) {
  const double s = (X < 0.0 ? -1.0 : 1.0) * (Y < 0.0 ? -1.0 : 1.0);
  return s * corner_mass(sd, std::abs(X), std::abs(Y));
}

}  // namespace

double SpectralDensity::rect_mass(double x0, double x1, double y0, double y1) const {
  if (dim_ != 2) throw ValidationError("rect_mass is for dimension 2");
  if (x1 < x0) std::swap(x0, x1);
  if (y1 < y0) std::swap(y0, y1);
  const double dx = x1 - x0, dy = y1 - y0;
  const double gap_x = std::max({0.0, x0, -x1});
  const double gap_y = std::max({0.0, y0, -y1});
  const double dist = std::hypot(gap_x, gap_y);
  const double diag = std::hypot(dx, dy);
  if (dist < 2.0 * diag) {
    return signed_corner_mass(*this, x1, y1) - signed_corner_mass(*this, x0, y1) -
           signed_corner_mass(*this, x1, y0) + signed_corner_mass(*this, x0, y0);
  }
  const QuadratureRule& gl = cached_gauss_legendre(6);
  double acc = 0.0;
  for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
    const double x = 0.5 * (x0 + x1) + 0.5 * dx * gl.nodes[i];
    for (std::size_t j = 0; j < gl.nodes.size(); ++j) {
      const double y = 0.5 * (y0 + y1) + 0.5 * dy * gl.nodes[j];
      acc += gl.weights[i] * gl.weights[j] * eval_radial(std::hypot(x, y));
    }
  }
  return 0.25 * dx * dy * acc;
}

double SpectralDensity::total_mass() const {
  return sphere_area(dim_) * radial_profile_integral(0.0, std::numeric_limits<double>::infinity());
}

SpectralDensity SpectralDensity::dilated(double c) const {
  if (!(c > 0.0) || !std::isfinite(c)) throw ValidationError("dilation factor must be positive and finite");
  SpectralDensity out = *this;
  out.dilation_ = dilation_ * c;
  return out;
}

std::string SpectralDensity::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << "f(lambda) = B(|lambda|) |lambda|^(" << kappa_ << " - " << dim_ << "), B = " << norm_const_ << " * "
     << to_string(family_) << "(a=" << decay_ << ")";
  if (dilation_ != 1.0) os << ", dilation " << dilation_;
  return os.str();
}

double eval_f(const SpectralDensity& sd, std::span<const double> lambda) {
  if (static_cast<int>(lambda.size()) != sd.dim()) throw ValidationError("eval_f: lambda has wrong dimension");
  return sd.eval_radial(norm(lambda));
}

double covariance_R(const SpectralDensity& sd, double x_norm) {
  const double x = std::abs(x_norm) * sd.dilation();
  const double kappa = sd.kappa();
  if (sd.dim() == 1 && sd.family() == BFamily::exponential) {
    const double a = sd.decay();
    return 2.0 * sd.norm_const() * std::tgamma(kappa) * std::pow(a * a + x * x, -0.5 * kappa) *
           std::cos(kappa * std::atan2(x, a));
  }
  const BFamily family = sd.family();
  const double a = sd.decay();
  return sd.norm_const() * radial_fourier_integral(
                               sd.dim(), x, [&](double s) { return base_profile(family, a, s); },
                               kappa - sd.dim(), base_cutoff(family, a));
}

SpectralDensity dilate_spectrum(const SpectralDensity& sd, double c) { return sd.dilated(c); }

std::string to_string(ConditionTag tag) {
  switch (tag) {
    case ConditionTag::B:
      return "B";
    case ConditionTag::C:
      return "C";
    case ConditionTag::boundary:
      return "boundary";
  }
  return "?";
}

ConditionClass classify(double kappa, int n, int m) {
  if (!(kappa > 0.0)) throw ValidationError("kappa must be positive");
  if (n < 1) throw ValidationError("dimension must be >= 1");
  if (m < 1) throw ValidationError("Hermite rank must be >= 1");
  const double d = kappa * m - n;
  ConditionTag tag = ConditionTag::boundary;
  if (d > 1e-12 * n) tag = ConditionTag::B;
  if (d < -1e-12 * n) tag = ConditionTag::C;
  return {tag, kappa, n, m};
}

std::optional<int> k_star(double kappa, int n, int m) {
  const auto cls = classify(kappa, n, m);
  if (cls.tag != ConditionTag::C) {
    throw ValidationError("k_star requires Condition C (m kappa < n); got condition " + to_string(cls.tag));
  }
  const int k = static_cast<int>(std::floor(n / kappa + 1e-12));
  if (k >= m + 1) return k;
  return std::nullopt;
}

}  // namespace reldiff
