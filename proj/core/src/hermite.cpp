#include "reldiff/hermite.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "reldiff/error.hpp"
#include "reldiff/quadrature.hpp"

namespace reldiff {
namespace {

constexpr double kNonSmoothPanel = 0.25;
constexpr int kNonSmoothOrder = 16;

void check_degree(int l) {
  if (l < 0) throw ValidationError("Hermite degree must be nonnegative");
  if (l > kMaxHermiteDegree) {
    throw ValidationError("Hermite degree " + std::to_string(l) + " exceeds the supported maximum " +
                          std::to_string(kMaxHermiteDegree));
  }
}

// He_l(r)/sqrt(l!) for l = 0..lmax, by the normalized recurrence.
void normalized_hermite_all(int lmax, double r, std::vector<double>& out) {
  out.resize(lmax + 1);
  out[0] = 1.0;
  if (lmax >= 1) out[1] = r;
  for (int l = 1; l < lmax; ++l) {
    out[l + 1] = (r * out[l] - std::sqrt(static_cast<double>(l)) * out[l - 1]) / std::sqrt(l + 1.0);
  }
}

double integration_radius(const SubordinatorFamily& h) {
  double radius = 13.0;
  if (h.kind() == SubordinatorFamily::Kind::exp_clipped) radius += 2.0 * std::abs(h.params()[0]);
  return radius;
}

// int g(r) p(r) dr for the family's natural quadrature at the given resolution level (0 or 1).
std::vector<double> integrate_moments(const SubordinatorFamily& h, int lmax, int quad_order, int level,
                                      bool squared) {
  std::vector<double> basis;
  std::vector<double> acc(lmax + 1, 0.0);
  double sq = 0.0;
  auto accumulate = [&](double r, double weight) {
    const double v = h(r);
    normalized_hermite_all(lmax, r, basis);
    for (int l = 0; l <= lmax; ++l) acc[l] += weight * v * basis[l];
    sq += weight * v * v;
  };

  if (h.smooth()) {
    const int deg = std::max(h.polynomial_degree(), 0);
    int order = quad_order > 0 ? quad_order : std::max(64, lmax + deg + 2);
    if (level == 1) order *= 2;
    const QuadratureRule rule = gauss_hermite_probabilists(order);
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) accumulate(rule.nodes[i], rule.weights[i]);
  } else {
    const int order = quad_order > 0 ? quad_order : kNonSmoothOrder;
    const double panel = level == 1 ? kNonSmoothPanel / 2 : kNonSmoothPanel;
    const double radius = integration_radius(h);
    std::vector<double> cuts = h.kinks();
    cuts.push_back(0.0);
    const QuadratureRule gl = gauss_legendre(order);
    std::vector<double> edges{-radius};
    for (double c : cuts)
      if (c > -radius && c < radius) edges.push_back(c);
    edges.push_back(radius);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * M_PI);
    for (std::size_t s = 0; s + 1 < edges.size(); ++s) {
      const double lo = edges[s], hi = edges[s + 1];
      const int panels = std::max(1, static_cast<int>(std::ceil((hi - lo) / panel)));
      const double w = (hi - lo) / panels;
      for (int p = 0; p < panels; ++p) {
        const double mid = lo + (p + 0.5) * w;
        for (int i = 0; i < order; ++i) {
          const double r = mid + 0.5 * w * gl.nodes[i];
          accumulate(r, 0.5 * w * gl.weights[i] * inv_sqrt_2pi * std::exp(-0.5 * r * r));
        }
      }
    }
  }
  if (squared) return {sq};
  return acc;
}

}  // namespace

double hermite_eval(int l, double r) {
  check_degree(l);
  if (l == 0) return 1.0;
  double prev = 1.0, cur = r;
  for (int k = 1; k < l; ++k) {
    const double next = r * cur - k * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

void hermite_eval_all(int lmax, double r, std::span<double> out) {
  check_degree(lmax);
  if (out.size() < static_cast<std::size_t>(lmax + 1)) throw ValidationError("output span too small");
  out[0] = 1.0;
  if (lmax >= 1) out[1] = r;
  for (int k = 1; k < lmax; ++k) out[k + 1] = r * out[k] - k * out[k - 1];
}

SubordinatorFamily SubordinatorFamily::hermite_series(std::vector<double> a) {
  if (a.empty()) throw ValidationError("hermite_series needs at least one coefficient");
  if (static_cast<int>(a.size()) - 1 > kMaxHermiteDegree) throw ValidationError("hermite_series degree too large");
  SubordinatorFamily h(Kind::hermite_series);
  h.a_ = std::move(a);
  return h;
}

SubordinatorFamily SubordinatorFamily::power(int k) {
  if (k < 0 || k > kMaxHermiteDegree) throw ValidationError("power exponent out of range");
  SubordinatorFamily h(Kind::power);
  h.a_ = {static_cast<double>(k)};
  return h;
}

SubordinatorFamily SubordinatorFamily::absolute() { return SubordinatorFamily(Kind::absolute); }
SubordinatorFamily SubordinatorFamily::sign() { return SubordinatorFamily(Kind::sign); }

SubordinatorFamily SubordinatorFamily::exp_clipped(double rate, double clip) {
  if (!std::isfinite(rate) || !std::isfinite(clip)) throw ValidationError("exp_clipped parameters must be finite");
  SubordinatorFamily h(Kind::exp_clipped);
  h.a_ = {rate, clip};
  return h;
}

SubordinatorFamily SubordinatorFamily::table(std::vector<double> x, std::vector<double> y) {
  if (x.size() < 2 || x.size() != y.size()) throw ValidationError("table needs >= 2 matching (x, y) points");
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (!(x[i] > x[i - 1])) throw ValidationError("table abscissae must be strictly increasing");
  }
  SubordinatorFamily h(Kind::table);
  h.x_ = std::move(x);
  h.y_ = std::move(y);
  return h;
}

double SubordinatorFamily::operator()(double r) const {
  switch (kind_) {
    case Kind::hermite_series: {
      double prev = 1.0, cur = r, sum = a_[0];
      if (a_.size() > 1) sum += a_[1] * r;
      for (std::size_t k = 1; k + 1 < a_.size(); ++k) {
        const double next = r * cur - static_cast<double>(k) * prev;
        prev = cur;
        cur = next;
        sum += a_[k + 1] * cur;
      }
      return sum;
    }
    case Kind::power:
      return std::pow(r, static_cast<int>(a_[0]));
    case Kind::absolute:
      return std::abs(r);
    case Kind::sign:
      return r > 0.0 ? 1.0 : (r < 0.0 ? -1.0 : 0.0);
    case Kind::exp_clipped:
      return std::exp(a_[0] * std::min(r, a_[1]));
    case Kind::table: {
      if (r <= x_.front()) return y_.front();
      if (r >= x_.back()) return y_.back();
      const auto it = std::upper_bound(x_.begin(), x_.end(), r);
      const std::size_t i = static_cast<std::size_t>(it - x_.begin());
      const double s = (r - x_[i - 1]) / (x_[i] - x_[i - 1]);
      return y_[i - 1] + s * (y_[i] - y_[i - 1]);
    }
  }
  return 0.0;
}

bool SubordinatorFamily::smooth() const { return kind_ == Kind::hermite_series || kind_ == Kind::power; }

std::vector<double> SubordinatorFamily::kinks() const {
  switch (kind_) {
    case Kind::absolute:
    case Kind::sign:
      return {0.0};
    case Kind::exp_clipped:
      return {a_[1]};
    case Kind::table:
      return x_;
    default:
      return {};
  }
}

int SubordinatorFamily::polynomial_degree() const {
  if (kind_ == Kind::hermite_series) return static_cast<int>(a_.size()) - 1;
  if (kind_ == Kind::power) return static_cast<int>(a_[0]);
  return -1;
}

std::string SubordinatorFamily::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::hermite_series:
      os << "hermite_series[";
      for (std::size_t i = 0; i < a_.size(); ++i) os << (i ? "," : "") << a_[i];
      os << "]";
      break;
    case Kind::power:
      os << "power(" << a_[0] << ")";
      break;
    case Kind::absolute:
      os << "abs";
      break;
    case Kind::sign:
      os << "sign";
      break;
    case Kind::exp_clipped:
      os << "exp_clipped(" << a_[0] << "," << a_[1] << ")";
      break;
    case Kind::table:
      os << "table(" << x_.size() << " points)";
      break;
  }
  return os.str();
}

std::vector<double> hermite_coefficients(const SubordinatorFamily& h, int lmax, int quad_order, double tol) {
  check_degree(lmax);
  std::vector<double> coarse = integrate_moments(h, lmax, quad_order, 0, false);
  std::vector<double> fine = integrate_moments(h, lmax, quad_order, 1, false);
  double scale = 1.0, diff = 0.0;
  for (int l = 0; l <= lmax; ++l) {
    scale = std::max(scale, std::abs(fine[l]));
    diff = std::max(diff, std::abs(fine[l] - coarse[l]));
  }
  if (!(diff <= tol * scale)) {
    std::ostringstream os;
    os << "Hermite coefficient quadrature for " << h.describe() << " did not converge: successive orders differ by "
       << diff << " (tolerance " << tol * scale << ")";
    throw NumericalError(os.str());
  }
  for (double& c : fine) {
    if (std::abs(c) < 1e-14 * scale) c = 0.0;
  }
  return fine;
}

double second_moment(const SubordinatorFamily& h, int quad_order) {
  const double coarse = integrate_moments(h, 0, quad_order, 0, true)[0];
  const double fine = integrate_moments(h, 0, quad_order, 1, true)[0];
  if (!std::isfinite(fine)) throw NumericalError("E h^2 is not finite");
  if (std::abs(fine - coarse) > 1e-9 * std::max(1.0, std::abs(fine))) {
    throw NumericalError("quadrature of E h^2 did not converge for " + h.describe());
  }
  return fine;
}

int hermite_rank(std::span<const double> coeffs, double rank_tolerance) {
  double scale = 0.0;
  for (double c : coeffs) scale = std::max(scale, std::abs(c));
  for (std::size_t l = 1; l < coeffs.size(); ++l) {
    if (std::abs(coeffs[l]) > rank_tolerance * scale && coeffs[l] != 0.0) return static_cast<int>(l);
  }
  throw ValidationError("constant function has no Hermite rank");
}

Subordinator Subordinator::build(SubordinatorFamily h, int lmax, int quad_order, double rank_tolerance) {
  Subordinator s;
  s.coeffs_ = hermite_coefficients(h, lmax, quad_order);
  s.rank_ = hermite_rank(s.coeffs_, rank_tolerance);
  s.l2_norm_sq_ = second_moment(h, quad_order);
  s.family_ = std::move(h);
  return s;
}

Subordinator Subordinator::from_coefficients(std::vector<double> coeffs, double rank_tolerance) {
  if (coeffs.empty()) throw ValidationError("empty coefficient list");
  Subordinator s;
  s.coeffs_ = std::move(coeffs);
  s.rank_ = hermite_rank(s.coeffs_, rank_tolerance);
  for (double c : s.coeffs_) s.l2_norm_sq_ += c * c;
  return s;
}

double Subordinator::tail_energy(int n0) const {
  double head = 0.0;
  for (int l = 0; l <= std::min(n0, lmax()); ++l) head += coeffs_[l] * coeffs_[l];
  const double deficit = l2_norm_sq_ - head;
  return deficit > 1e-12 * std::max(1.0, l2_norm_sq_) ? deficit : 0.0;
}

void subordinate_truncated(std::span<const double> coeffs, int rank, int n0, std::span<const double> zeta,
                           std::span<double> out) {
  if (n0 < rank) {
    throw ValidationError("truncation order N0 = " + std::to_string(n0) + " is below the Hermite rank " +
                          std::to_string(rank));
  }
  if (n0 >= static_cast<int>(coeffs.size())) throw ValidationError("truncation order exceeds available coefficients");
  if (out.size() != zeta.size()) throw ValidationError("output size mismatch");
  std::vector<double> basis;
  for (std::size_t i = 0; i < zeta.size(); ++i) {
    normalized_hermite_all(n0, zeta[i], basis);
    double v = coeffs[0];
    for (int l = rank; l <= n0; ++l) v += coeffs[l] * basis[l];
    out[i] = v;
  }
}

std::vector<double> subordinate_truncated(std::span<const double> coeffs, int rank, int n0,
                                          std::span<const double> zeta) {
  std::vector<double> out(zeta.size());
  subordinate_truncated(coeffs, rank, n0, zeta, out);
  return out;
}

}  // namespace reldiff
