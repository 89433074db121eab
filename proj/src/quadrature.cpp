#include "shearguide/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "shearguide/linalg.hpp"

namespace shearguide {

namespace {

QuadratureRule build_rule(int n) {
  QuadratureRule r;
  r.nodes.resize(static_cast<std::size_t>(n));
  r.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    r.nodes[static_cast<std::size_t>(i)] = x;
    r.weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

}  // namespace

const QuadratureRule& gauss_legendre(int n) {
  if (n < 1) throw ValidationError("gauss_legendre: need at least one point");
  static std::mutex mu;
  static std::map<int, QuadratureRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build_rule(n)).first;
  return it->second;
}

double composite_gauss_legendre(const std::function<double(double)>& f, double lo, double hi, int panels,
                                int order) {
  if (panels < 1) throw ValidationError("composite_gauss_legendre: need at least one panel");
  const QuadratureRule& q = gauss_legendre(order);
  const double h = (hi - lo) / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = lo + (p + 0.5) * h;
    double s = 0.0;
    for (std::size_t k = 0; k < q.nodes.size(); ++k) s += q.weights[k] * f(mid + 0.5 * h * q.nodes[k]);
    sum += 0.5 * h * s;
  }
  return sum;
}

}  // namespace shearguide
