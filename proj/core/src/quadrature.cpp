#include "reldiff/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <mutex>
#include <queue>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "reldiff/error.hpp"

namespace reldiff {
namespace {

QuadratureRule golub_welsch(int order, const std::function<double(int)>& offdiag, double mass) {
  if (order < 1) throw ValidationError("quadrature order must be positive");
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(order, order);
  for (int k = 1; k < order; ++k) {
    jacobi(k, k - 1) = jacobi(k - 1, k) = offdiag(k);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  if (solver.info() != Eigen::Success) throw NumericalError("Golub-Welsch eigen solve failed");
  QuadratureRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  for (int i = 0; i < order; ++i) {
    rule.nodes[i] = solver.eigenvalues()(i);
    const double v0 = solver.eigenvectors()(0, i);
    rule.weights[i] = mass * v0 * v0;
  }
  return rule;
}

}  // namespace

const QuadratureRule& cached_gauss_legendre(int order) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<QuadratureRule>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[order];
  if (!slot) slot = std::make_unique<QuadratureRule>(gauss_legendre(order));
  return *slot;
}

QuadratureRule gauss_hermite_probabilists(int order) {
  return golub_welsch(order, [](int k) { return std::sqrt(static_cast<double>(k)); }, 1.0);
}

QuadratureRule gauss_legendre(int order) {
  return golub_welsch(
      order, [](int k) { return k / std::sqrt(4.0 * k * k - 1.0); }, 2.0);
}

double composite_integral(const std::function<double(double)>& f, double a, double b,
                          const std::vector<double>& breakpoints, double max_panel, int order) {
  std::vector<double> cuts{a};
  for (double x : breakpoints) {
    if (x > a && x < b) cuts.push_back(x);
  }
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  const QuadratureRule& gl = cached_gauss_legendre(order);
  double total = 0.0;
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    const double lo = cuts[s], hi = cuts[s + 1];
    if (hi <= lo) continue;
    const int panels = std::max(1, static_cast<int>(std::ceil((hi - lo) / max_panel)));
    const double w = (hi - lo) / panels;
    for (int p = 0; p < panels; ++p) {
      const double mid = lo + (p + 0.5) * w;
      double acc = 0.0;
      for (int i = 0; i < order; ++i) acc += gl.weights[i] * f(mid + 0.5 * w * gl.nodes[i]);
      total += 0.5 * w * acc;
    }
  }
  return total;
}

namespace {

struct Panel {
  double value;
  double error;
};

Panel gk_panel(const std::function<double(double)>& f, double a, double b) {
  double err = 0.0, l1 = 0.0;
  const double v = boost::math::quadrature::gauss_kronrod<double, 21>::integrate(f, a, b, 0, 0.0, &err, &l1);
  // Boost reports the error relative to the L1 norm; the heap needs absolute errors.
  return {v, err * l1};
}

struct Piece {
  double a, b;
  Panel p;
  bool operator<(const Piece& o) const { return p.error < o.p.error; }
};

}  // namespace

double adaptive_integral(const std::function<double(double)>& f, double a, double b, double rel_tol,
                         double abs_tol) {
  // Global adaptive bisection: always split the panel with the largest error.
  std::priority_queue<Piece> heap;
  heap.push({a, b, gk_panel(f, a, b)});
  double value = heap.top().p.value, err = heap.top().p.error;
  for (int splits = 0; splits < 2000; ++splits) {
    if (!std::isfinite(value) || err <= std::max(abs_tol, rel_tol * std::abs(value))) break;
    const Piece worst = heap.top();
    heap.pop();
    const double m = 0.5 * (worst.a + worst.b);
    if (!(m > worst.a && m < worst.b)) {
      heap.push(worst);
      break;
    }
    const Piece left{worst.a, m, gk_panel(f, worst.a, m)}, right{m, worst.b, gk_panel(f, m, worst.b)};
    value += left.p.value + right.p.value - worst.p.value;
    err += left.p.error + right.p.error - worst.p.error;
    heap.push(left);
    heap.push(right);
  }
  if (!std::isfinite(value) || err > std::max(abs_tol, 1e3 * rel_tol * std::abs(value))) {
    char msg[160];
    std::snprintf(msg, sizeof msg, "adaptive quadrature did not converge on [%.6g, %.6g]: estimate %.3e, error %.3e", a,
                  b, value, err);
    throw NumericalError(msg);
  }
  return value;
}

namespace {

// Angular integral of exp(i r z <e, omega>) over the unit sphere of R^n.
double angular_kernel(int n, double rz) {
  if (n == 1) return 2.0 * std::cos(rz);
  const double sphere = 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
  if (rz < 1e-8) return sphere;
  const double nu = 0.5 * n - 1.0;
  return std::pow(2.0 * std::numbers::pi, 0.5 * n) * std::pow(rz, -nu) * std::cyl_bessel_j(nu, rz);
}

}  // namespace

double radial_fourier_integral(int n, double z_norm, const std::function<double(double)>& g, double gamma,
                               double cutoff) {
  if (n < 1 || n > 3) throw ValidationError("radial_fourier_integral supports dimensions 1..3");
  const double p = gamma + n;
  if (!(p > 0.0)) throw ValidationError("radial_fourier_integral needs gamma > -n");
  if (!(cutoff > 0.0)) throw ValidationError("radial_fourier_integral needs a positive cutoff");
  const double z = std::abs(z_norm);
  const double h = z > 0.0 ? std::min(1.0, std::numbers::pi / z) : 1.0;
  const double r1 = std::min(cutoff, h);

  auto integrand = [&](double r) { return angular_kernel(n, r * z) * g(r) * std::pow(r, p - 1.0); };
  // u = r^p removes the origin singularity.
  const double u1 = std::pow(r1, p);
  double head = adaptive_integral(
      [&](double u) {
        const double r = std::pow(u, 1.0 / p);
        return angular_kernel(n, r * z) * g(r) / p;
      },
      0.0, u1, 1e-12, 1e-16);

  if (r1 >= cutoff) return head;
  const double coarse = composite_integral(integrand, r1, cutoff, {}, h, 20);
  const double fine = composite_integral(integrand, r1, cutoff, {}, h, 30);
  const double scale = composite_integral([&](double r) { return std::abs(integrand(r)); }, r1, cutoff, {}, h, 20) +
                       std::abs(head);
  if (std::abs(fine - coarse) > 1e-10 * std::max(scale, 1e-300) + 1e-300) {
    throw NumericalError("radial Fourier integral not converged at |z| = " + std::to_string(z));
  }
  return head + fine;
}

}  // namespace reldiff
