#include "shearguide/certificates.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "shearguide/assembly.hpp"
#include "shearguide/cross_section.hpp"
#include "shearguide/eigcore.hpp"
#include "shearguide/linalg.hpp"
#include "shearguide/preconditioner.hpp"
#include "shearguide/quadrature.hpp"
#include "shearguide/thresholds.hpp"
#include "shearguide/waveguide.hpp"

namespace shearguide {

namespace {

constexpr double pi = std::numbers::pi;

using Fn = std::function<double(double)>;

QuadValue integrate(const Fn& f, double lo, double hi, const CutoffProfile& p) {
  const int panels = std::max(1, static_cast<int>(std::ceil((hi - lo) * p.panels)));
  const double coarse = composite_gauss_legendre(f, lo, hi, panels, p.order);
  const double fine = composite_gauss_legendre(f, lo, hi, 2 * panels, p.order);
  return {fine, std::abs(fine - coarse)};
}

QuadValue integrate2(const std::function<double(double, double)>& f, const Rect& r, const CutoffProfile& p) {
  const auto run = [&](int scale) {
    const int p1 = std::max(1, static_cast<int>(std::ceil(r.width() * p.panels))) * scale;
    const int p2 = std::max(1, static_cast<int>(std::ceil(r.height() * p.panels))) * scale;
    return composite_gauss_legendre(
        [&](double y1) { return composite_gauss_legendre([&](double y2) { return f(y1, y2); }, r.c, r.d, p2, p.order); },
        r.a, r.b, p1, p.order);
  };
  const double coarse = run(1), fine = run(2);
  return {fine, std::abs(fine - coarse)};
}

QuadValue times(const QuadValue& a, const QuadValue& b) {
  return {a.value * b.value, std::abs(a.value) * b.error + std::abs(b.value) * a.error + a.error * b.error};
}

QuadValue combine(std::initializer_list<std::pair<double, QuadValue>> terms) {
  QuadValue out;
  for (const auto& [c, q] : terms) {
    out.value += c * q.value;
    out.error += std::abs(c) * q.error;
  }
  return out;
}

// x factor a(x) with derivative; y factor f(y) with gradient.
struct XFactor {
  Fn v, d;
  double lo, hi;
};
struct YFactor {
  std::function<double(double, double)> v, d1, d2;
};

// q_beta(a f, b g) on the half tube, assembled from separable 1D and 2D integrals.
QuadValue bilinear(double beta, double e1, const XFactor& a, const XFactor& b, const YFactor& f, const YFactor& g,
                   const Rect& r, const CutoffProfile& p) {
  const double lo = std::max(a.lo, b.lo), hi = std::min(a.hi, b.hi);
  if (!(hi > lo)) return {};
  const auto ix = [&](const Fn& u, const Fn& v) { return integrate([&](double x) { return u(x) * v(x); }, lo, hi, p); };
  const auto iy = [&](const std::function<double(double, double)>& u, const std::function<double(double, double)>& v) {
    return integrate2([&](double y1, double y2) { return u(y1, y2) * v(y1, y2); }, r, p);
  };
  const QuadValue dd = ix(a.d, b.d), dv = ix(a.d, b.v), vd = ix(a.v, b.d), vv = ix(a.v, b.v);
  const QuadValue fg = iy(f.v, g.v), f_dg = iy(f.v, g.d2), df_g = iy(f.d2, g.v), df_dg = iy(f.d2, g.d2),
                  grad = combine({{1.0, iy(f.d1, g.d1)}, {1.0, df_dg}});
  return combine({{1.0, times(dd, fg)},
                  {-beta, times(dv, f_dg)},
                  {-beta, times(vd, df_g)},
                  {beta * beta, times(vv, df_dg)},
                  {1.0, times(vv, grad)},
                  {-e1, times(vv, fg)}});
}

}  // namespace

CutoffProfile CutoffProfile::standard() {
  CutoffProfile p;
  p.w = [](double x) { return x <= 1.0 ? 1.0 : x >= 2.0 ? 0.0 : std::cos(pi * (x - 1.0) / 2.0); };
  p.dw = [](double x) { return x <= 1.0 || x >= 2.0 ? 0.0 : -pi / 2.0 * std::sin(pi * (x - 1.0) / 2.0); };
  p.eta = [](double x) { return x >= 1.0 ? 0.0 : std::pow(1.0 - x, 3) * (1.0 + 3.0 * x); };
  // d/dx (1-x)^3 (1+3x) = -12 x (1-x)^2
  p.deta = [](double x) { return x >= 1.0 ? 0.0 : -12.0 * x * (1.0 - x) * (1.0 - x); };
  p.w_energy = pi * pi / 8.0;
  p.eta0 = 1.0;
  return p;
}

CertificateResult existence_certificate(const ShearParam& beta, const Rect& rect, const CutoffProfile& profile,
                                        int max_n) {
  if (beta.straight() || !(beta.beta() > 0.0)) throw ValidationError("existence_certificate: beta must be positive");
  const double b = beta.beta();
  const SectionMode chi = rectangle_modes(beta, rect, 1).front();
  CertificateResult res;
  res.beta = b;
  res.threshold = chi.eigenvalue;

  const double k1 = pi / rect.width(), k2 = pi / rect.height(), amp = chi.amplitude;
  const YFactor fy{
      [&](double y1, double y2) { return amp * std::sin(k1 * (y1 - rect.a)) * std::sin(k2 * (y2 - rect.c)); },
      [&](double y1, double y2) { return amp * k1 * std::cos(k1 * (y1 - rect.a)) * std::sin(k2 * (y2 - rect.c)); },
      [&](double y1, double y2) { return amp * k2 * std::sin(k1 * (y1 - rect.a)) * std::cos(k2 * (y2 - rect.c)); }};
  // h = y2 chi
  const YFactor hy{[&](double y1, double y2) { return y2 * fy.v(y1, y2); },
                   [&](double y1, double y2) { return y2 * fy.d1(y1, y2); },
                   [&](double y1, double y2) { return fy.v(y1, y2) + y2 * fy.d2(y1, y2); }};
  const XFactor eta{profile.eta, profile.deta, 0.0, 1.0};
  const auto wn = [&](int n) {
    const double s = n;
    return XFactor{[&profile, s](double x) { return profile.w(x / s); },
                   [&profile, s](double x) { return profile.dw(x / s) / s; }, 0.0, 2.0 * s};
  };

  // Supports of w_1' and eta are disjoint, so the cross term is the same for every n >= 1.
  res.cross = bilinear(b, res.threshold, wn(1), eta, fy, hy, rect, profile);
  res.q_phi = bilinear(b, res.threshold, eta, eta, hy, hy, rect, profile);

  if (res.q_phi.value > res.q_phi.error) {
    res.eps = b * profile.eta0 / (2.0 * res.q_phi.value);
  } else {
    // phi alone already has nonpositive energy; any eps past w_energy / |cross| wins at n = 1.
    res.eps = 2.0 * profile.w_energy / std::abs(res.cross.value);
  }
  const auto evaluate = [&](int n) {
    res.n = n;
    res.q_psi_n = profile.w_energy / n;
    res.total = res.q_psi_n + 2.0 * res.eps * res.cross.value + res.eps * res.eps * res.q_phi.value;
    res.error = 2.0 * res.eps * res.cross.error + res.eps * res.eps * res.q_phi.error;
    res.certified = res.total + res.error < 0.0;
  };
  const double gain = -2.0 * res.eps * res.cross.value - res.eps * res.eps * res.q_phi.value -
                      (2.0 * res.eps * res.cross.error + res.eps * res.eps * res.q_phi.error);
  int n = gain > 0.0 ? static_cast<int>(std::min<double>(max_n, std::floor(profile.w_energy / gain) + 1.0)) : max_n;
  n = std::max(n, 1);
  evaluate(n);
  while (!res.certified && res.n < max_n) evaluate(res.n + 1);
  while (res.n > 1) {
    const CertificateResult keep = res;
    evaluate(res.n - 1);
    if (!res.certified) {
      res = keep;
      break;
    }
  }

  const XFactor w = wn(res.n);
  res.q_psi_n_quad = integrate([&](double x) { return w.d(x) * w.d(x); }, 0.0, w.hi, profile);
  const auto ix = [&](const XFactor& u, const XFactor& v) {
    return integrate([&](double x) { return u.v(x) * v.v(x); }, 0.0, std::min(u.hi, v.hi), profile).value;
  };
  const auto iy = [&](const YFactor& u, const YFactor& v) {
    return integrate2([&](double y1, double y2) { return u.v(y1, y2) * v.v(y1, y2); }, rect, profile).value;
  };
  res.norm2 = ix(w, w) * iy(fy, fy) + 2.0 * res.eps * ix(w, eta) * iy(fy, hy) + res.eps * res.eps * ix(eta, eta) * iy(hy, hy);
  res.rayleigh = res.total / res.norm2;
  return res;
}

BForm make_bform(double beta, double eps, double kappa, double nu, double e1, double e2) {
  if (!(beta > 0.0)) throw ValidationError("bform: beta must be positive");
  if (!(nu > 0.0)) throw ValidationError("bform: nu must be positive");
  if (!(eps >= beta)) throw ValidationError("bform: eps must be at least beta");
  if (!(kappa >= 0.0)) throw ValidationError("bform: kappa must be nonnegative");
  BForm f{beta, eps, kappa, nu, e1, e2};
  f.c0 = 1.0 - 2.0 * kappa * beta / eps;
  if (!(f.c0 > 0.0)) {
    throw ValidationError("bform: c0 = 1 - 2 kappa beta / eps = " + std::to_string(f.c0) +
                          " is not positive (needs eps > 2 kappa beta)");
  }
  f.width = std::sqrt(nu);
  f.zeta = (beta * beta - eps * beta + 1.0) / (1.0 + beta * beta) * e2 - 2.0 * eps * beta - 1.0;
  f.zeta_covers_threshold = f.zeta >= e1;
  return f;
}

int well_count(double c0, double width) {
  if (!(c0 > 0.0) || !(width > 0.0)) throw ValidationError("well_count: c0 and width must be positive");
  // Inside the well f = sin(k x); outside f is linear and crosses zero once more iff f f' < 0 at
  // the edge. Sturm oscillation: the number of zeros in (0, inf) is the bound-state count.
  const double phase = width / std::sqrt(c0);
  const int inside = static_cast<int>(std::floor(phase / pi));
  const double s = std::sin(phase), c = std::cos(phase);
  return inside + (s * c < 0.0 ? 1 : 0);
}

int bform_count(double beta, double eps, double kappa, double nu, double e1, double e2) {
  const BForm f = make_bform(beta, eps, kappa, nu, e1, e2);
  return well_count(f.c0, f.width);
}

int well_count_fd(double c0, double width, std::size_t points) {
  if (!(c0 > 0.0) || !(width > 0.0)) throw ValidationError("well_count_fd: c0 and width must be positive");
  const double length = 51.0 * width, h = length / static_cast<double>(points + 1);
  Eigen::VectorXd diag(static_cast<Eigen::Index>(points)), off(static_cast<Eigen::Index>(points - 1));
  for (std::size_t i = 0; i < points; ++i) {
    const double x = h * static_cast<double>(i + 1);
    diag(static_cast<Eigen::Index>(i)) = 2.0 * c0 / (h * h) - (x <= width ? 1.0 : 0.0);
    if (i + 1 < points) off(static_cast<Eigen::Index>(i)) = -c0 / (h * h);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, off, Eigen::EigenvaluesOnly);
  return static_cast<int>((es.eigenvalues().array() < 0.0).count());
}

PrismCheck prism_eigen_check(const ShearParam& beta, const Rect& rect, std::size_t n_triangle, std::size_t n_depth,
                             double tol) {
  if (beta.straight() || !(beta.beta() > 0.0)) throw ValidationError("prism_eigen_check: beta must be positive");
  PrismCheck c;
  c.beta = beta.beta();
  c.section = describe(rect);
  c.n_triangle = n_triangle;
  c.n_depth = n_depth;
  const ShearForm f = assemble_prism(beta, rect, n_triangle, n_depth);
  const auto pre = make_preconditioner(f, PreconditionerKind::fastdiag_shifted);
  EigOptions o;
  o.k = 2;
  o.tol = tol;
  const EigResult e = smallest_eigenpairs(f.a_op(), f.m_op(), o, pre.get());
  c.converged = e.all_converged();
  c.mu1 = e.eigenvalues[0];
  c.mu2 = e.eigenvalues[1];
  c.mu1_closed = prism_mu1_closed(rect);
  c.mu2_closed = prism_mu2_closed(rect);
  c.mu1_rel_error = std::abs(c.mu1 - c.mu1_closed) / c.mu1_closed;
  c.mu2_rel_error = std::abs(c.mu2 - c.mu2_closed) / c.mu2_closed;
  c.bound_factor = bound_factor(c.beta);
  c.bound_holds = c.mu2 >= c.bound_factor * c.mu2_closed;
  const double w = rect.width(), h = rect.height();
  c.threshold_rhs = pi * pi * (1.0 / (w * w) + (1.0 + c.beta * c.beta) / (h * h));
  c.threshold_inequality = c.mu2 >= c.threshold_rhs;
  return c;
}

}  // namespace shearguide
