#include <cmath>
#include <numbers>

#include "doctest.h"
#include "shearguide/cross_section.hpp"
#include "shearguide/linalg.hpp"

using namespace shearguide;

namespace {
constexpr double pi = std::numbers::pi;

// Closed-form eigenvalues of the anisotropic 5-point stencil on an N x N cell rectangle.
double fd_rect_eigenvalue(double beta, const Rect& r, std::size_t cells, int m, int n) {
  const double h1 = r.width() / static_cast<double>(cells), h2 = r.height() / static_cast<double>(cells);
  const double s1 = std::sin(m * pi * h1 / (2.0 * r.width())), s2 = std::sin(n * pi * h2 / (2.0 * r.height()));
  return 4.0 * s1 * s1 / (h1 * h1) + (1.0 + beta * beta) * 4.0 * s2 * s2 / (h2 * h2);
}
}  // namespace

TEST_CASE("rectangle_modes examples") {
  CHECK(rectangle_modes(ShearParam(1.0), Rect(0, 1, 0, 1), 1)[0].eigenvalue == doctest::Approx(3 * pi * pi));
  CHECK(rectangle_modes(ShearParam(0.0, true), Rect(0, 1, 0, 1), 1)[0].eigenvalue == doctest::Approx(2 * pi * pi));
  const auto modes = rectangle_modes(ShearParam(1.0), Rect(0, 1, 0, 1), 3);
  CHECK(modes[1].eigenvalue == doctest::Approx(6 * pi * pi));
  CHECK(modes[1].m == 2);
  CHECK(modes[1].n == 1);
  CHECK(modes[2].eigenvalue == doctest::Approx(9 * pi * pi));
  CHECK_THROWS_AS(rectangle_modes(ShearParam(1.0), Rect(0, 1, 0, 1), 0), ValidationError);
}

TEST_CASE("degenerate rectangle modes are ordered lexicographically") {
  // beta = 0 on the unit square: (1,2) and (2,1) tie.
  const auto modes = rectangle_modes(ShearParam(0.0, true), Rect(0, 1, 0, 1), 3);
  CHECK(modes[1].m == 1);
  CHECK(modes[1].n == 2);
  CHECK(modes[2].m == 2);
  CHECK(modes[2].n == 1);
}

TEST_CASE("numeric modes reproduce the discrete closed form") {
  for (const double beta : {0.5, 1.0, 2.0}) {
    const Rect r(0, 1, 0, 1.5);
    const auto modes = numeric_modes(ShearParam(beta), r, 32, 3);
    const auto exact = rectangle_modes(ShearParam(beta), r, 3);
    for (int k = 0; k < 3; ++k) {
      const auto& e = exact[static_cast<std::size_t>(k)];
      CHECK(modes[static_cast<std::size_t>(k)].eigenvalue ==
            doctest::Approx(fd_rect_eigenvalue(beta, r, 32, e.m, e.n)).epsilon(1e-9));
    }
  }
}

TEST_CASE("numeric E1 examples at 128 cells") {
  const Rect unit(0, 1, 0, 1);
  CHECK(numeric_modes(ShearParam(0.0, true), unit, 128, 1)[0].eigenvalue == doctest::Approx(2 * pi * pi).epsilon(5e-3));
  CHECK(numeric_modes(ShearParam(1.0), unit, 128, 1)[0].eigenvalue == doctest::Approx(3 * pi * pi).epsilon(5e-3));
}

TEST_CASE("numeric E1 converges at second order on rectangles") {
  for (const double beta : {0.5, 1.0, 3.0}) {
    const Rect r(0, 2, 0, 1);
    const double exact = rectangle_modes(ShearParam(beta), r, 1)[0].eigenvalue;
    const double e32 = numeric_modes(ShearParam(beta), r, 32, 1)[0].eigenvalue - exact;
    const double e64 = numeric_modes(ShearParam(beta), r, 64, 1)[0].eigenvalue - exact;
    const double e128 = numeric_modes(ShearParam(beta), r, 128, 1)[0].eigenvalue - exact;
    CHECK(e64 / e128 >= 3.5);
    CHECK(e64 / e128 <= 4.5);
    CHECK(e32 / e64 >= 3.5);
    CHECK(std::abs(e128) / exact < 1e-3);
  }
}

TEST_CASE("L-shaped mask self-convergence") {
  const CellMask l = CellMask::l_shape(4);
  const double e128 = numeric_modes(ShearParam(1.0), l, 128, 1)[0].eigenvalue;
  const double e256 = numeric_modes(ShearParam(1.0), l, 256, 1)[0].eigenvalue;
  CHECK(std::abs(e128 - e256) / e256 < 0.01);
  CHECK_THROWS_AS(numeric_modes(ShearParam(1.0), l, 130, 1), ValidationError);
}

TEST_CASE("E1 is strictly increasing in beta") {
  const CellMask l = CellMask::l_shape(4);
  double prev = 0.0, prev_rect = 0.0;
  for (const double beta : {0.1, 0.3, 0.7, 1.0, 1.5, 3.0}) {
    const double e = numeric_modes(ShearParam(beta), l, 32, 1)[0].eigenvalue;
    const double er = rectangle_modes(ShearParam(beta), Rect(0, 1, 0, 2), 1)[0].eigenvalue;
    CHECK(e > prev);
    CHECK(er > prev_rect);
    prev = e;
    prev_rect = er;
  }
}

TEST_CASE("E1 is simple on rectangles") {
  for (const double beta : {0.2, 1.0, 4.0})
    for (const double h : {0.5, 1.0, 3.0}) {
      const auto m = rectangle_modes(ShearParam(beta), Rect(0, 1, 0, h), 2);
      CHECK(m[1].eigenvalue - m[0].eigenvalue > 0.0);
    }
}

TEST_CASE("section constants on rectangles") {
  auto c = section_constants(rectangle_modes(ShearParam(1.0), Rect(0, 1, 0, 1), 1)[0]);
  CHECK(c.kappa == doctest::Approx(pi * pi));
  CHECK(std::abs(c.moment + 0.5) < 1e-8);
  c = section_constants(rectangle_modes(ShearParam(2.0), Rect(0, 1, 0, 2), 1)[0]);
  CHECK(c.kappa == doctest::Approx(pi * pi / 4.0));
  CHECK(std::abs(c.moment + 0.5) < 1e-8);
  c = section_constants(rectangle_modes(ShearParam(0.3), Rect(-1, 2, 3, 4.5), 4)[3]);
  CHECK(std::abs(c.moment + 0.5) < 1e-8);
  auto bad = rectangle_modes(ShearParam(1.0), Rect(0, 1, 0, 1), 1)[0];
  bad.amplitude *= 1.1;
  CHECK_THROWS_AS(section_constants(bad), ValidationError);
}

TEST_CASE("section constants on masks") {
  const auto m = numeric_modes(ShearParam(1.0), CellMask::l_shape(4), 64, 1)[0];
  const auto c = section_constants(m);
  CHECK(c.kappa > 0.0);
  CHECK(std::abs(c.moment + 0.5) < 1e-4);
  // On a filled rectangle the quadrature kappa approaches pi^2/(d-c)^2.
  const auto r = numeric_modes(ShearParam(1.0), Rect(0, 1, 0, 1), 128, 1)[0];
  CHECK(section_constants(r).kappa == doctest::Approx(pi * pi).epsilon(1e-3));
  auto bad = m;
  bad.nodal *= 2.0;
  CHECK_THROWS_AS(section_constants(bad), ValidationError);
}

TEST_CASE("coarse grids are rejected") {
  CHECK_THROWS_AS(numeric_modes(ShearParam(1.0), Rect(0, 1, 0, 1), 8, 1), ValidationError);
  CHECK_NOTHROW(numeric_modes(ShearParam(1.0), Rect(0, 1, 0, 1), 9, 1));
}
