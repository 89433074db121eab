#include <cmath>
#include <random>

#include "doctest.h"
#include "shearguide/geometry.hpp"
#include "shearguide/linalg.hpp"

using namespace shearguide;

TEST_CASE("map_point examples") {
  auto p = map_point(ShearParam(1.0), {2.0, 0.5, 0.3});
  CHECK(p[0] == 2.0);
  CHECK(p[1] == 0.5);
  CHECK(p[2] == doctest::Approx(2.3));
  p = map_point(ShearParam(2.0), {-1.0, 0.0, 0.1});
  CHECK(p[2] == doctest::Approx(2.1));
  p = map_point(ShearParam(0.5), {0.0, 0.2, 0.2});
  CHECK(p == Point3{0.0, 0.2, 0.2});
}

TEST_CASE("metric examples and determinant") {
  const auto g = metric(ShearParam(1.0)).g;
  Eigen::Matrix3d expected;
  expected << 2, 0, 1, 0, 1, 0, 1, 0, 1;
  CHECK(g == expected);
  CHECK(metric(ShearParam(0.5)).g(0, 0) == 1.25);
  CHECK(metric(ShearParam(3.0)).g(0, 2) == 3.0);
  for (double e = -3.0; e <= 3.0; e += 0.25) {
    const double b = std::pow(10.0, e);
    const MetricTensor m = metric(ShearParam(b));
    CHECK(std::abs(m.determinant() - 1.0) <= 8.0 * std::numeric_limits<double>::epsilon() * (1.0 + b * b));
    CHECK(m.g(0, 0) > 0.0);
    CHECK(m.g.topLeftCorner<2, 2>().determinant() > 0.0);
    CHECK(m.g == m.g.transpose());
  }
  CHECK_THROWS_AS(metric(ShearParam(0.0, true)), ValidationError);
}

TEST_CASE("shear parameter validation") {
  CHECK_THROWS_AS(ShearParam(0.0), ValidationError);
  CHECK_THROWS_AS(ShearParam(-1.0), ValidationError);
  CHECK_THROWS_AS(ShearParam(1.0, true), ValidationError);
  CHECK_THROWS_AS(ShearParam(std::nan("")), ValidationError);
  CHECK(ShearParam(0.0, true).straight());
}

TEST_CASE("contains examples and evenness") {
  const WaveguideSpec spec{ShearParam(1.0), Rect(0, 1, 0, 1)};
  CHECK(contains(spec, {1.0, 0.5, 1.5}));
  CHECK_FALSE(contains(spec, {1.0, 0.5, 2.5}));
  CHECK(contains(spec, {-1.0, 0.5, 1.5}));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 1000; ++i) {
    const Point3 q{u(rng), u(rng), u(rng)};
    CHECK(contains(spec, q) == contains(spec, {-q[0], q[1], q[2]}));
  }
  const WaveguideSpec masked{ShearParam(1.0), CellMask::l_shape(4)};
  CHECK_THROWS_AS(contains(masked, {0.0, 0.5, 0.5}), ValidationError);
}

TEST_CASE("map_point is injective for x > 0") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const ShearParam b(1.7);
  for (int i = 0; i < 1000; ++i) {
    const Point3 p{u(rng) * 5.0 + 1e-3, u(rng), u(rng)}, q{u(rng) * 5.0 + 1e-3, u(rng), u(rng)};
    CHECK(map_point(b, p) != map_point(b, q));
  }
}

TEST_CASE("prism region examples") {
  auto p = prism_region(Rect(0, 1, 0, std::sqrt(2.0)));
  CHECK(p.half_width == doctest::Approx(1.0));
  CHECK(p.contains({-0.5, 0.5, 0.25}));
  CHECK_FALSE(p.contains({-0.5, 0.5, 0.75}));
  CHECK(prism_region(Rect(0, 1, 0, 1)).half_width == doctest::Approx(0.70711).epsilon(1e-5));
  CHECK(prism_region(Rect(0, 2, 0, 2)).half_width == doctest::Approx(1.41421).epsilon(1e-5));
  CHECK(p.faces.size() == 5);
  CHECK_THROWS_AS(prism_region(Rect{0, 0, 0, 1}), ValidationError);
}

TEST_CASE("rectangle and mask validation") {
  CHECK_THROWS_AS(Rect(1, 0, 0, 1), ValidationError);
  CHECK_THROWS_AS(Rect(0, 1, 2, 2), ValidationError);
  CHECK_THROWS_AS(CellMask(2, 2, 1.0, 1.0, 0, 0, std::vector<std::uint8_t>(4, 1)), ValidationError);
  CHECK_THROWS_AS(CellMask(3, 3, 1.0, 1.0, 0, 0, std::vector<std::uint8_t>(9, 0)), ValidationError);
  const CellMask l = CellMask::l_shape(4);
  CHECK(l.inside_count() == 12);
  CHECK(l.area() == doctest::Approx(0.75));
  CHECK(l.refined(2).inside_count() == 48);
  CHECK(l.dof_vertex_count() == 5);
}

TEST_CASE("mask text format") {
  const CellMask m = CellMask::parse("% comment\ncell 0.5 0.25 1 2\n##..\n####\n####\n");
  CHECK(m.n1() == 4);
  CHECK(m.n2() == 3);
  CHECK(m.h1() == 0.5);
  CHECK(m.y2_0() == 2.0);
  CHECK(m.inside(0, 2));
  CHECK_FALSE(m.inside(3, 2));
  CHECK(m.inside(3, 0));
  CHECK_THROWS_AS(CellMask::parse("###\n##\n###\n"), ValidationError);
  CHECK_THROWS_AS(CellMask::parse("#x#\n###\n###\n"), ValidationError);
}
