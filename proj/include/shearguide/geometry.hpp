#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace shearguide {

using Point3 = std::array<double, 3>;

/// Slope of the broken reference curve. beta == 0 is accepted only with `straight` set.
class ShearParam {
 public:
  explicit ShearParam(double beta, bool straight = false);

  double beta() const { return beta_; }
  bool straight() const { return straight_; }

 private:
  double beta_;
  bool straight_;
};

/// Axis-aligned rectangle (a,b) x (c,d); y1 in (a,b), y2 in (c,d).
struct Rect {
  double a = 0, b = 1, c = 0, d = 1;

  Rect() = default;
  Rect(double a_, double b_, double c_, double d_);

  double width() const { return b - a; }    // along y1
  double height() const { return d - c; }   // along y2
  double aspect_ratio() const { return height() / width(); }  // R
  double diameter() const;
};

/// Cell-centred indicator grid: cell (i, j) covers [y1_0 + i h1, y1_0 + (i+1) h1] x [y2_0 + j h2, ...].
/// Storage is i-major (j fastest).
class CellMask {
 public:
  CellMask(std::size_t n1, std::size_t n2, double h1, double h2, double y1_0, double y2_0,
           std::vector<std::uint8_t> inside);

  /// Cells whose centre satisfies `pred` over the box [lo1,hi1] x [lo2,hi2].
  static CellMask from_predicate(std::size_t n1, std::size_t n2, double lo1, double hi1, double lo2, double hi2,
                                 const std::function<bool(double, double)>& pred);
  /// Every cell of a rectangle.
  static CellMask filled(const Rect& r, std::size_t n1, std::size_t n2);
  /// Unit square minus its upper-right quadrant, on an n x n grid (n even).
  static CellMask l_shape(std::size_t n);
  /// Text grid: rows are y2 from top to bottom, '#' or '1' inside, '.' or '0' outside.
  /// Optional first line "cell h1 h2 y1_0 y2_0"; defaults to unit cells at the origin. '%' starts a comment.
  static CellMask parse(const std::string& text);

  std::size_t n1() const { return n1_; }
  std::size_t n2() const { return n2_; }
  double h1() const { return h1_; }
  double h2() const { return h2_; }
  double y1_0() const { return y1_0_; }
  double y2_0() const { return y2_0_; }
  bool inside(std::size_t i, std::size_t j) const { return inside_[i * n2_ + j] != 0; }
  /// Inside status with out-of-range cells reported as outside.
  bool inside_or_false(std::ptrdiff_t i, std::ptrdiff_t j) const;
  std::size_t inside_count() const;

  /// A vertex carries a degree of freedom iff its four neighbouring cells are inside.
  bool vertex_is_dof(std::size_t i, std::size_t j) const;
  std::size_t dof_vertex_count() const;

  /// Each cell split into factor x factor children.
  CellMask refined(std::size_t factor) const;
  double diameter() const;
  double area() const;

 private:
  std::size_t n1_, n2_;
  double h1_, h2_, y1_0_, y2_0_;
  std::vector<std::uint8_t> inside_;
};

using CrossSectionSpec = std::variant<Rect, CellMask>;

struct WaveguideSpec {
  ShearParam beta;
  CrossSectionSpec section;
};

bool is_rect(const CrossSectionSpec& s);
double section_diameter(const CrossSectionSpec& s);

struct MetricTensor {
  Eigen::Matrix3d g;
  double determinant() const;
};

Point3 map_point(const ShearParam& beta, const Point3& p);
MetricTensor metric(const ShearParam& beta);
/// Membership of q = (s, t, z) in the sheared tube over a rectangle.
bool contains(const WaveguideSpec& spec, const Point3& q);

enum class FaceCondition { dirichlet, neumann };

struct PrismFace {
  std::string name;
  std::string description;
  FaceCondition condition;
};

/// Triangular prism (x, y1, y2): x in (-A, 0), y1 in (0, depth), 0 < y2 < x + A.
struct PrismRegion {
  double half_width;  // A = (d - c) / sqrt(2)
  double depth;       // b - a
  std::vector<PrismFace> faces;

  bool contains(const Point3& p) const;
};

PrismRegion prism_region(const Rect& rect);

}  // namespace shearguide
