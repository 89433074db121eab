#include "shearguide/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "shearguide/linalg.hpp"

namespace shearguide {

ShearParam::ShearParam(double beta, bool straight) : beta_(beta), straight_(straight) {
  if (!std::isfinite(beta)) throw ValidationError("beta must be finite");
  if (straight) {
    if (beta != 0.0) throw ValidationError("straight reference computations require beta = 0");
  } else if (!(beta > 0.0)) {
    throw ValidationError("beta must be positive (use the straight flag for beta = 0)");
  }
}

Rect::Rect(double a_, double b_, double c_, double d_) : a(a_), b(b_), c(c_), d(d_) {
  if (!(std::isfinite(a) && std::isfinite(b) && std::isfinite(c) && std::isfinite(d))) {
    throw ValidationError("rectangle bounds must be finite");
  }
  if (!(a < b) || !(c < d)) throw ValidationError("degenerate rectangle: need a < b and c < d");
}

double Rect::diameter() const { return std::hypot(width(), height()); }

CellMask::CellMask(std::size_t n1, std::size_t n2, double h1, double h2, double y1_0, double y2_0,
                   std::vector<std::uint8_t> inside)
    : n1_(n1), n2_(n2), h1_(h1), h2_(h2), y1_0_(y1_0), y2_0_(y2_0), inside_(std::move(inside)) {
  if (n1 < 3 || n2 < 3) throw ValidationError("mask needs at least 3x3 cells");
  if (!(h1 > 0.0) || !(h2 > 0.0)) throw ValidationError("mask cell size must be positive");
  if (inside_.size() != n1 * n2) throw ValidationError("mask indicator size does not match grid");
  if (dof_vertex_count() == 0) throw ValidationError("mask has no interior nodes");
}

CellMask CellMask::from_predicate(std::size_t n1, std::size_t n2, double lo1, double hi1, double lo2, double hi2,
                                  const std::function<bool(double, double)>& pred) {
  if (!(hi1 > lo1) || !(hi2 > lo2)) throw ValidationError("mask box is degenerate");
  const double h1 = (hi1 - lo1) / static_cast<double>(n1), h2 = (hi2 - lo2) / static_cast<double>(n2);
  std::vector<std::uint8_t> in(n1 * n2);
  for (std::size_t i = 0; i < n1; ++i)
    for (std::size_t j = 0; j < n2; ++j)
      in[i * n2 + j] = pred(lo1 + (static_cast<double>(i) + 0.5) * h1, lo2 + (static_cast<double>(j) + 0.5) * h2);
  return CellMask(n1, n2, h1, h2, lo1, lo2, std::move(in));
}

CellMask CellMask::filled(const Rect& r, std::size_t n1, std::size_t n2) {
  return from_predicate(n1, n2, r.a, r.b, r.c, r.d, [](double, double) { return true; });
}

CellMask CellMask::l_shape(std::size_t n) {
  if (n % 2 != 0) throw ValidationError("l_shape needs an even cell count");
  return from_predicate(n, n, 0.0, 1.0, 0.0, 1.0, [](double y1, double y2) { return !(y1 > 0.5 && y2 > 0.5); });
}

CellMask CellMask::parse(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> rows;
  double h1 = 1.0, h2 = 1.0, o1 = 0.0, o2 = 0.0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '%') continue;
    if (line.compare(first, 4, "cell") == 0) {
      if (header_seen || !rows.empty()) throw ValidationError("mask: header must come first");
      std::istringstream hs(line.substr(first + 4));
      if (!(hs >> h1 >> h2 >> o1 >> o2)) throw ValidationError("mask header must read: cell h1 h2 y1_0 y2_0");
      header_seen = true;
      continue;
    }
    std::string row;
    for (char ch : line) {
      if (ch == ' ' || ch == '\t') continue;
      if (ch == '#' || ch == '1') row.push_back('1');
      else if (ch == '.' || ch == '0') row.push_back('0');
      else throw ValidationError(std::string("mask: unexpected character '") + ch + "'");
    }
    rows.push_back(row);
  }
  if (rows.empty()) throw ValidationError("mask file has no rows");
  const std::size_t n2 = rows.size(), n1 = rows.front().size();
  for (const auto& r : rows)
    if (r.size() != n1) throw ValidationError("mask rows have unequal lengths");
  std::vector<std::uint8_t> cells(n1 * n2);
  for (std::size_t r = 0; r < n2; ++r) {
    const std::size_t j = n2 - 1 - r;  // first text row is the top of the section
    for (std::size_t i = 0; i < n1; ++i) cells[i * n2 + j] = rows[r][i] == '1';
  }
  return CellMask(n1, n2, h1, h2, o1, o2, std::move(cells));
}

bool CellMask::inside_or_false(std::ptrdiff_t i, std::ptrdiff_t j) const {
  if (i < 0 || j < 0 || i >= static_cast<std::ptrdiff_t>(n1_) || j >= static_cast<std::ptrdiff_t>(n2_)) return false;
  return inside(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
}

std::size_t CellMask::inside_count() const {
  return static_cast<std::size_t>(std::count(inside_.begin(), inside_.end(), std::uint8_t{1}));
}

bool CellMask::vertex_is_dof(std::size_t i, std::size_t j) const {
  const auto pi = static_cast<std::ptrdiff_t>(i), pj = static_cast<std::ptrdiff_t>(j);
  return inside_or_false(pi - 1, pj - 1) && inside_or_false(pi, pj - 1) && inside_or_false(pi - 1, pj) &&
         inside_or_false(pi, pj);
}

std::size_t CellMask::dof_vertex_count() const {
  std::size_t count = 0;
  for (std::size_t i = 1; i < n1_; ++i)
    for (std::size_t j = 1; j < n2_; ++j) count += vertex_is_dof(i, j);
  return count;
}

CellMask CellMask::refined(std::size_t factor) const {
  if (factor == 0) throw ValidationError("refinement factor must be positive");
  const std::size_t m1 = n1_ * factor, m2 = n2_ * factor;
  std::vector<std::uint8_t> cells(m1 * m2);
  for (std::size_t i = 0; i < m1; ++i)
    for (std::size_t j = 0; j < m2; ++j) cells[i * m2 + j] = inside(i / factor, j / factor);
  const auto f = static_cast<double>(factor);
  return CellMask(m1, m2, h1_ / f, h2_ / f, y1_0_, y2_0_, std::move(cells));
}

double CellMask::diameter() const {
  std::size_t i_lo = n1_, i_hi = 0, j_lo = n2_, j_hi = 0;
  for (std::size_t i = 0; i < n1_; ++i)
    for (std::size_t j = 0; j < n2_; ++j)
      if (inside(i, j)) {
        i_lo = std::min(i_lo, i);
        i_hi = std::max(i_hi, i + 1);
        j_lo = std::min(j_lo, j);
        j_hi = std::max(j_hi, j + 1);
      }
  return std::hypot(static_cast<double>(i_hi - i_lo) * h1_, static_cast<double>(j_hi - j_lo) * h2_);
}

double CellMask::area() const { return static_cast<double>(inside_count()) * h1_ * h2_; }

bool is_rect(const CrossSectionSpec& s) { return std::holds_alternative<Rect>(s); }

double section_diameter(const CrossSectionSpec& s) {
  return std::visit([](const auto& v) { return v.diameter(); }, s);
}

double MetricTensor::determinant() const { return g.determinant(); }

Point3 map_point(const ShearParam& beta, const Point3& p) {
  return {p[0], p[1], beta.beta() * std::abs(p[0]) + p[2]};
}

MetricTensor metric(const ShearParam& beta) {
  const double b = beta.beta();
  if (!(b > 0.0)) throw ValidationError("metric: beta must be positive");
  MetricTensor m;
  m.g << 1.0 + b * b, 0.0, b, 0.0, 1.0, 0.0, b, 0.0, 1.0;
  return m;
}

bool contains(const WaveguideSpec& spec, const Point3& q) {
  const auto* r = std::get_if<Rect>(&spec.section);
  if (!r) throw ValidationError("contains: mask membership is grid-level, not available here");
  const double shift = spec.beta.beta() * std::abs(q[0]);
  return q[1] > r->a && q[1] < r->b && q[2] > shift + r->c && q[2] < shift + r->d;
}

bool PrismRegion::contains(const Point3& p) const {
  return p[0] > -half_width && p[0] < 0.0 && p[1] > 0.0 && p[1] < depth && p[2] > 0.0 && p[2] < p[0] + half_width;
}

PrismRegion prism_region(const Rect& rect) {
  const Rect r(rect.a, rect.b, rect.c, rect.d);
  PrismRegion p;
  p.half_width = r.height() / std::sqrt(2.0);
  p.depth = r.width();
  p.faces = {
      {"T1", "y1 = b - a", FaceCondition::dirichlet},
      {"T2", "y1 = 0", FaceCondition::dirichlet},
      {"T3", "y2 = 0", FaceCondition::dirichlet},
      {"T4", "x = 0", FaceCondition::neumann},
      {"slanted", "y2 = x + A", FaceCondition::neumann},
  };
  return p;
}

}  // namespace shearguide
