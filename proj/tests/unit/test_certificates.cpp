#include <cmath>
#include <numbers>

#include "doctest.h"
#include "shearguide/certificates.hpp"
#include "shearguide/cross_section.hpp"
#include "shearguide/linalg.hpp"
#include "shearguide/quadrature.hpp"
#include "shearguide/thresholds.hpp"

using namespace shearguide;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST_CASE("cutoff profiles") {
  const auto p = CutoffProfile::standard();
  CHECK(p.eta(0.0) == 1.0);
  CHECK(p.eta(1.0) == 0.0);
  CHECK(p.w(0.5) == 1.0);
  CHECK(p.w(2.5) == 0.0);
  CHECK(p.w_energy == doctest::Approx(1.2337005501361697));
  // Energy by quadrature, and the integral of eta' equals -eta(0).
  CHECK(composite_gauss_legendre([&](double x) { return p.dw(x) * p.dw(x); }, 1.0, 2.0, 4, 16) ==
        doctest::Approx(p.w_energy).epsilon(1e-13));
  CHECK(composite_gauss_legendre(p.deta, 0.0, 1.0, 1, 16) == doctest::Approx(-1.0).epsilon(1e-14));
  // Derivatives match central differences.
  for (double x : {0.1, 0.4, 0.9}) CHECK(p.deta(x) == doctest::Approx((p.eta(x + 1e-6) - p.eta(x - 1e-6)) / 2e-6).epsilon(1e-7));
  for (double x : {1.1, 1.5, 1.9}) CHECK(p.dw(x) == doctest::Approx((p.w(x + 1e-6) - p.w(x - 1e-6)) / 2e-6).epsilon(1e-7));
  for (double x = 0.0; x <= 3.0; x += 0.05) {
    CHECK(p.w(x) >= 0.0);
    CHECK(p.w(x) <= 1.0);
  }
}

TEST_CASE("existence certificate on rectangles") {
  for (const Rect& r : {Rect(0, 1, 0, 1), Rect(0, 1, 0, 2), Rect(-0.5, 0.7, 1, 1.5)}) {
    for (double beta : {0.25, 0.5, 1.0, 2.0, 4.0}) {
      CAPTURE(beta);
      const auto c = existence_certificate(ShearParam(beta), r);
      CHECK(c.cross.value == doctest::Approx(-beta / 2.0).epsilon(1e-10));
      CHECK(std::abs(c.cross.value + beta / 2.0) <= 1e-8);
      CHECK(c.certified);
      CHECK(c.total < 0.0);
      CHECK(c.total == doctest::Approx(c.q_psi_n + 2 * c.eps * c.cross.value + c.eps * c.eps * c.q_phi.value));
      CHECK(c.q_psi_n * c.n == doctest::Approx(pi * pi / 8.0));
      CHECK(c.q_psi_n_quad.value == doctest::Approx(c.q_psi_n).epsilon(1e-12));
      CHECK(c.eps == doctest::Approx(beta / (2.0 * c.q_phi.value)));
      CHECK(c.threshold == doctest::Approx(ess_threshold(ShearParam(beta), r)));
      CHECK(c.rayleigh < 0.0);
      CHECK(c.norm2 > 1.5 * c.n);
      // Minimal n: one step smaller fails.
      if (c.n > 1) CHECK(pi * pi / (8.0 * (c.n - 1)) + 2 * c.eps * c.cross.value + c.eps * c.eps * c.q_phi.value + c.error >= 0.0);
    }
  }
  CHECK_THROWS_AS(existence_certificate(ShearParam(0.0, true), Rect(0, 1, 0, 1)), ValidationError);
}

TEST_CASE("q(phi) by quadrature matches the separable closed form") {
  // For the unit square and chi = 2 sin(pi y1) sin(pi y2), the y integrals of h = y2 chi are
  // elementary: int h^2 = 1/3 - 1/(2 pi^2), int (d2 h)^2 = pi^2/3 + 1/2, int (d1 h)^2 = pi^2 (1/3 - 1/(2 pi^2)).
  const double beta = 1.3;
  const auto p = CutoffProfile::standard();
  const auto c = existence_certificate(ShearParam(beta), Rect(0, 1, 0, 1));
  const double hh = 1.0 / 3.0 - 1.0 / (2 * pi * pi);
  const double h2 = pi * pi / 3.0 + 0.5;
  const double h1 = pi * pi * hh;
  const double e1 = pi * pi * (2.0 + beta * beta);
  const auto gl = [](const std::function<double(double)>& f) { return composite_gauss_legendre(f, 0.0, 1.0, 8, 16); };
  const double ee = gl([&](double x) { return p.eta(x) * p.eta(x); });
  const double dd = gl([&](double x) { return p.deta(x) * p.deta(x); });
  // int eta eta' = -eta(0)^2/2 and int h d2h = 0 kill the mixed term.
  const double expected = dd * hh + ee * (beta * beta * h2 + h1 + h2 - e1 * hh);
  CHECK(c.q_phi.value == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("b-form well counts") {
  CHECK(well_count(1.0, 1.0) == 0);
  CHECK(well_count(1.0, 3.0) == 1);
  CHECK(well_count(0.25, 3.0) == 2);
  CHECK(well_count_fd(1.0, 1.0) == 0);
  CHECK(well_count_fd(1.0, 3.0) == 1);
  CHECK(well_count_fd(0.25, 3.0) == 2);
  for (double c0 : {0.05, 0.3, 0.8}) {
    for (double w : {0.7, 2.2, 5.1}) {
      CAPTURE(c0);
      CAPTURE(w);
      CHECK(well_count(c0, w) == well_count_fd(c0, w));
    }
  }
}

TEST_CASE("b-form parameters") {
  // c0 = 1 - 2 kappa beta / eps; nu = 9 gives width 3.
  const BForm f = make_bform(1.0, 4.0, 1.5, 9.0, 20.0, 50.0);
  CHECK(f.c0 == doctest::Approx(0.25));
  CHECK(f.width == doctest::Approx(3.0));
  CHECK(f.zeta == doctest::Approx((1.0 - 4.0 + 1.0) / 2.0 * 50.0 - 8.0 - 1.0));
  CHECK_FALSE(f.zeta_covers_threshold);
  CHECK(bform_count(1.0, 4.0, 1.5, 9.0, 20.0, 50.0) == 2);
  CHECK_THROWS_AS(make_bform(1.0, 2.0, 1.0, 1.0, 1.0, 2.0), ValidationError);  // c0 = 0
  CHECK_THROWS_AS(make_bform(1.0, 0.5, 0.1, 1.0, 1.0, 2.0), ValidationError);  // eps < beta
  CHECK_THROWS_AS(make_bform(1.0, 2.0, 0.1, 0.0, 1.0, 2.0), ValidationError);  // nu = 0
}

TEST_CASE("prism check at beta = 1") {
  const auto c = prism_eigen_check(ShearParam(1.0), Rect(0, 1, 0, 1), 16, 16);
  CHECK(c.converged);
  CHECK(c.mu1_closed == doctest::Approx(2 * pi * pi));
  CHECK(c.mu2_closed == doctest::Approx(5 * pi * pi));
  CHECK(c.mu1_rel_error < 0.02);
  CHECK(c.mu2_rel_error < 0.02);
  CHECK(c.bound_factor == 1.0);
  CHECK(c.bound_holds);
  CHECK(c.mu1 >= c.mu1_closed);  // conforming discretization bounds from above
}
