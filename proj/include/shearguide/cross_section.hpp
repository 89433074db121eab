#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "shearguide/geometry.hpp"
#include "shearguide/linalg.hpp"

namespace shearguide {

/// Vertex numbering of a mask with Dirichlet-by-exclusion. Vertex (i, j) sits at
/// (y1_0 + i h1, y2_0 + j h2), 0 <= i <= n1, 0 <= j <= n2; dofs are numbered i-major.
class SectionGrid {
 public:
  explicit SectionGrid(CellMask mask);

  const CellMask& mask() const { return mask_; }
  std::size_t dofs() const { return vertex_of_dof_.size(); }
  /// -1 for excluded vertices.
  std::ptrdiff_t dof(std::size_t i, std::size_t j) const { return dof_of_vertex_[i * (mask_.n2() + 1) + j]; }
  std::pair<std::size_t, std::size_t> vertex(std::size_t dof) const { return vertex_of_dof_[dof]; }
  double y1(std::size_t i) const { return mask_.y1_0() + static_cast<double>(i) * mask_.h1(); }
  double y2(std::size_t j) const { return mask_.y2_0() + static_cast<double>(j) * mask_.h2(); }

 private:
  CellMask mask_;
  std::vector<std::ptrdiff_t> dof_of_vertex_;
  std::vector<std::pair<std::size_t, std::size_t>> vertex_of_dof_;
};

/// Eigenpair of T(beta) = -d^2/dy1^2 - (1+beta^2) d^2/dy2^2 with Dirichlet conditions.
/// Rectangles carry the closed form amplitude * sin(m pi (y1-a)/(b-a)) sin(n pi (y2-c)/(d-c));
/// masks carry nodal values on the section grid.
struct SectionMode {
  double eigenvalue = 0;
  int m = 0, n = 0;
  int ordinal = 0;
  std::optional<Rect> rect;
  double amplitude = 0;
  std::shared_ptr<const SectionGrid> grid;
  Vector nodal;

  double value(double y1, double y2) const;  // rectangles only
  double dy2(double y1, double y2) const;    // rectangles only
};

struct SectionConstants {
  double kappa = 0;   // ||d chi / dy2||^2
  double moment = 0;  // integral of y2 chi d chi/dy2; -1/2 for normalized chi
};

std::vector<SectionMode> rectangle_modes(const ShearParam& beta, const Rect& rect, int count);

/// 5-point stencil on `resolution` cells per direction (masks are refined by an integer factor
/// to reach it along their longer side).
std::vector<SectionMode> numeric_modes(const ShearParam& beta, const CrossSectionSpec& section,
                                       std::size_t resolution, int count);

/// The anisotropic 5-point matrix with Dirichlet by exclusion.
Csr section_fd_matrix(const ShearParam& beta, const SectionGrid& grid);

/// Grid used by numeric_modes for a given section and resolution.
CellMask section_mask_at(const CrossSectionSpec& section, std::size_t resolution);

SectionConstants section_constants(const SectionMode& chi);

}  // namespace shearguide
