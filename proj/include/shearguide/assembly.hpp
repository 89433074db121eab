#pragma once

#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "shearguide/cross_section.hpp"
#include "shearguide/eigcore.hpp"
#include "shearguide/geometry.hpp"
#include "shearguide/kron.hpp"

namespace shearguide {

enum class Boundary { dirichlet, neumann };

/// Piecewise-linear factors on a 1D mesh. Dirichlet ends drop their node.
/// d(p, q) = integral of phi_p' phi_q.
struct Fem1D {
  std::vector<double> nodes;
  Boundary left = Boundary::dirichlet, right = Boundary::dirichlet;
  std::vector<std::size_t> dof_nodes;
  Csr k, m, d;

  std::size_t dofs() const { return dof_nodes.size(); }
  double min_spacing() const;
  double max_spacing() const;
};

Fem1D fem1d(std::size_t n, double length, Boundary left, Boundary right);
Fem1D fem1d_nodes(std::vector<double> nodes, Boundary left, Boundary right);
/// Skew factor with each element's contribution multiplied by sign(element midpoint).
Csr signed_skew(const Fem1D& f);

/// Geometric x-grading: the requested cell count covers (0, near_length) uniformly, then spacing
/// grows by `ratio` per cell up to `max_factor` times the near spacing. near_length = 0 means uniform.
struct XGrading {
  double near_length = 0;
  double ratio = 1.1;
  double max_factor = 16;
};

/// Nodes 0 = x_0 < ... on (0, L). Uniform: exactly `cells` cells ending at L. Graded: the base
/// grid is truncated at its first node >= L, so truncations at L/2 and L are nested. Every cell is
/// then bisected `bisections` times.
std::vector<double> x_nodes(double length, std::size_t cells, const XGrading& grading, int bisections = 0);

enum class FormMode { half_dn, full_sign, reduced2d, prism, straight };
std::string to_string(FormMode m);
FormMode form_mode_from_string(const std::string& s);

struct GridSpec {
  std::size_t nx = 16, n1 = 16, n2 = 16;
  XGrading grading;
};

/// Separable part A_sep = K0 (x) M_T + M0 (x) K_T, with M_T, K_T given as a Kronecker family over
/// the transverse axes: M_T = (x)_a tm[a], K_T = sum_a (tm[0] (x) .. tk[a] .. (x) tm[last]).
struct TriangleFem;

struct SeparableSplit {
  Csr k0, m0;
  std::vector<Csr> tk, tm;
  bool exact = false;  // A == A_sep
};

struct ShearForm {
  FormMode mode = FormMode::half_dn;
  double beta = 0;
  double length = 0;  // truncation length actually used (last x node)
  GridSpec grid;
  std::vector<std::size_t> dims;
  std::shared_ptr<const KronOperator> a, m;
  SeparableSplit split;
  std::vector<double> axis0_coords;  // dof coordinates along axis 0
  std::shared_ptr<const SectionGrid> section_grid;  // mask sections only
  std::shared_ptr<const TriangleFem> triangle;  // prism only
  std::vector<std::string> warnings;

  std::size_t size() const { return a->size(); }
  LinearOperator a_op() const;
  LinearOperator m_op() const;
};

/// Q1 section matrices on a mask grid: mass, the two stiffness parts and d(p, q) = int d2(psi_p) psi_q.
struct MaskFem {
  std::shared_ptr<const SectionGrid> grid;
  Csr m, k1, k2, d2;
};
MaskFem mask_fem(const CellMask& mask);

/// x nodes for the requested mode; full_sign mirrors the half grid.
ShearForm assemble_waveguide(const ShearParam& beta, const CrossSectionSpec& section, double length,
                             const GridSpec& grid, FormMode mode, int bisections = 0);
ShearForm assemble_waveguide_nodes(const ShearParam& beta, const CrossSectionSpec& section,
                                   const std::vector<double>& half_nodes, const GridSpec& grid, FormMode mode);
ShearForm assemble_reduced2d(const ShearParam& beta, const Rect& rect, double length, const GridSpec& grid,
                             int bisections = 0);
ShearForm assemble_reduced2d_nodes(const ShearParam& beta, const Rect& rect, const std::vector<double>& half_nodes,
                                   const GridSpec& grid);

/// Triangle 0 < y2 < u < A (u = x + A) on an n x n cut grid; cells above the diagonal are removed
/// and diagonal cells keep their lower half. Vertices of kept cells are dofs except on y2 = 0.
struct TriangleFem {
  std::size_t n = 0;
  double half_width = 0;
  std::vector<std::pair<std::size_t, std::size_t>> vertex_of_dof;  // (i along u, j along y2)
  Csr m, kuu, kyy;
};
TriangleFem triangle_fem(double half_width, std::size_t n);

/// Axes (y1, triangle). Coefficients (1+b^2)/(2b^2), 1, (1+b^2)/2 on d/dx, d/dy1, d/dy2.
ShearForm assemble_prism(const ShearParam& beta, const Rect& rect, std::size_t n_triangle, std::size_t n_depth);

/// Plain-text triplets, one "row col value" per line.
void write_triplets(std::ostream& out, const Csr& a);

}  // namespace shearguide
