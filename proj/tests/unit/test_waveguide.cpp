#include <cmath>
#include <numbers>

#include "doctest.h"
#include "shearguide/linalg.hpp"
#include "shearguide/thresholds.hpp"
#include "shearguide/waveguide.hpp"

using namespace shearguide;

namespace {
constexpr double pi = std::numbers::pi;

DiscretizationSpec small(FormMode mode, double length) {
  DiscretizationSpec d;
  d.mode = mode;
  d.grid = GridSpec{12, 8, 8, {}};
  d.length = length;
  d.ladder.mesh_rungs = 2;
  d.ladder.length_halvings = 1;
  d.ladder.max_length_growth = 0;
  return d;
}
}  // namespace

TEST_CASE("straight tube has no discrete spectrum") {
  const WaveguideSpec spec{ShearParam(0.0, true), Rect(0, 1, 0, 1)};
  const auto rep = compute_spectrum(spec, small(FormMode::straight, 6.0), EigOptions{});
  CHECK(rep.status == "ok");
  CHECK(rep.count == 0);
  CHECK(rep.threshold == doctest::Approx(2 * pi * pi));
  for (double e : rep.extrapolated) CHECK(e > rep.threshold);
  CHECK(rep.monotone_refinement);
  CHECK(rep.monotone_length);
}

TEST_CASE("broken strip in reduced mode has one bound state near 0.93 below threshold") {
  const WaveguideSpec spec{ShearParam(1.0), Rect(0, 1, 0, pi * std::sqrt(2.0))};
  DiscretizationSpec d;
  d.mode = FormMode::reduced2d;
  d.grid = GridSpec{16, 8, 16, XGrading{9.0}};
  d.length = 60.0;
  const auto rep = compute_spectrum(spec, d, EigOptions{});
  CHECK(rep.status == "ok");
  CHECK(rep.count == 1);
  CHECK(rep.count_stable);
  CHECK(rep.reduced_shift == doctest::Approx(pi * pi));
  CHECK(rep.threshold - rep.reduced_shift == doctest::Approx(1.0));
  CHECK(std::abs(rep.extrapolated[0] - rep.reduced_shift - 0.93) < 0.01);
  CHECK(rep.monotone_refinement);
  CHECK(rep.monotone_length);
  REQUIRE(rep.mesh_counts.size() == 3);
  CHECK(rep.mesh_counts[1] == rep.mesh_counts[2]);
  REQUIRE(rep.length_levels.size() == 3);
  CHECK(rep.length_levels.front().length < rep.length_levels.back().length);
  CHECK(rep.margin > 10 * rep.extrapolation_error[0]);
  // Coarse-to-fine Ritz values decrease.
  CHECK(rep.rungs[1].eigenvalues[0] <= rep.rungs[0].eigenvalues[0]);
}

TEST_CASE("reduced and 3D counts agree on a rectangle") {
  const WaveguideSpec spec{ShearParam(2.0), Rect(0, 1, 0, 1)};
  const auto red = compute_spectrum(spec, small(FormMode::reduced2d, 5.0), EigOptions{});
  const auto full = compute_spectrum(spec, small(FormMode::half_dn, 5.0), EigOptions{});
  CHECK(red.count == full.count);
  CHECK(red.threshold == doctest::Approx(full.threshold));
}

TEST_CASE("full and half-DN spectra agree on the even sector") {
  const WaveguideSpec spec{ShearParam(1.0), Rect(0, 1, 0, 1)};
  DiscretizationSpec d = small(FormMode::half_dn, 5.0);
  EigOptions o;
  o.tol = 1e-9;
  const auto rep = symmetry_check(spec, d, o, 3);
  CHECK(rep.converged);
  REQUIRE(rep.relative_gap.size() == 3);
  CHECK(rep.max_relative_gap <= 1e-6);
  CHECK(rep.ground_odd_fraction <= 1e-6);
  bool saw_odd = false;
  for (double f : rep.odd_fraction) saw_odd = saw_odd || f > 0.99;
  CHECK(saw_odd);
}

TEST_CASE("3D rectangle spectrum separates exactly") {
  const WaveguideSpec spec{ShearParam(1.5), Rect(0, 1.3, 0, 1)};
  const auto rep = separation_check(spec, small(FormMode::half_dn, 4.0), EigOptions{}, 4);
  CHECK(rep.converged);
  CHECK(rep.ground_residual <= 1e-10);
  CHECK(rep.excited_residual <= 1e-10);
  CHECK(rep.max_residual <= 1e-10);
}

TEST_CASE("mask sections carry a threshold error into the band") {
  const WaveguideSpec spec{ShearParam(1.0), CellMask::l_shape(4)};
  DiscretizationSpec d = small(FormMode::half_dn, 4.0);
  d.grid = GridSpec{8, 16, 16, {}};
  d.ladder.mesh_rungs = 1;
  const auto rep = compute_spectrum(spec, d, EigOptions{});
  CHECK(rep.threshold_error > 0.0);
  CHECK(rep.threshold_error < 1e-2 * rep.threshold);
  for (double b : rep.band) CHECK(b >= rep.threshold_error);
  CHECK(rep.extrapolation_order == 0);
  CHECK(rep.section.rfind("mask", 0) == 0);
}

TEST_CASE("sweep rows are sorted by beta") {
  const auto rows =
      sweep_beta(Rect(0, 1, 0, 1), {2.0, 0.5, 1.0}, small(FormMode::reduced2d, 4.0), EigOptions{});
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].beta == 0.5);
  CHECK(rows[1].beta == 1.0);
  CHECK(rows[2].beta == 2.0);
  for (const auto& r : rows) CHECK(r.threshold == doctest::Approx(ess_threshold(ShearParam(r.beta), Rect(0, 1, 0, 1))));
}

TEST_CASE("waveguide validation") {
  const WaveguideSpec spec{ShearParam(1.0), Rect(0, 1, 0, 1)};
  DiscretizationSpec d = small(FormMode::half_dn, 4.0);
  d.grid.nx = 4;
  CHECK_THROWS_AS(compute_spectrum(spec, d, EigOptions{}), ValidationError);
  CHECK_THROWS_AS(compute_spectrum(spec, small(FormMode::prism, 4.0), EigOptions{}), ValidationError);
  CHECK_THROWS_AS(compute_spectrum(spec, small(FormMode::straight, 4.0), EigOptions{}), ValidationError);
  CHECK_THROWS_AS(sweep_beta(Rect(0, 1, 0, 1), {1.0, -1.0}, small(FormMode::reduced2d, 4.0), EigOptions{}),
                  ValidationError);
  CHECK_THROWS_AS(separation_check({ShearParam(1.0), CellMask::l_shape(4)}, small(FormMode::half_dn, 4.0),
                                   EigOptions{}),
                  ValidationError);
  CHECK_THROWS_AS(symmetry_check(spec, small(FormMode::half_dn, 0.0), EigOptions{}), ValidationError);
  CHECK(describe(Rect(0, 1, 0, 2.5)) == "rect 0,1,0,2.5");
}
