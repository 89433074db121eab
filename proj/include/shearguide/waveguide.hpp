#pragma once

#include <string>
#include <vector>

#include "shearguide/assembly.hpp"
#include "shearguide/eigcore.hpp"
#include "shearguide/geometry.hpp"
#include "shearguide/preconditioner.hpp"

namespace shearguide {

/// Mesh rungs refine every axis by 2 (x by bisection). Length rungs truncate the finest x grid
/// at L/2, L/4, ... and are solved on the last two mesh rungs.
struct Ladder {
  int mesh_rungs = 3;
  int length_halvings = 2;
  /// Extra doublings of L allowed when the count differs between L/2 and L.
  int max_length_growth = 1;
};

/// `grid` is the coarsest rung. length = 0 selects L adaptively.
struct DiscretizationSpec {
  GridSpec grid;
  double length = 0;
  FormMode mode = FormMode::half_dn;
  Ladder ladder;
  PreconditionerKind preconditioner = PreconditionerKind::fastdiag_shifted;

  void validate() const;
};

struct RungResult {
  std::string kind;  // "mesh" or "length"
  int rung = 0;      // mesh level
  double length = 0;
  std::size_t nx = 0, n1 = 0, n2 = 0;  // cells along x (half grid), y1, y2
  std::size_t dofs = 0;
  std::vector<double> eigenvalues;  // threshold units (reduced mode adds the ground y1 mode)
  std::vector<double> residuals;
  bool converged = true;
  int iterations = 0;
  double seconds = 0;
};

struct LengthLevel {
  double length = 0;
  std::vector<double> extrapolated;
  int count = 0;
  bool in_band = false;
};

struct SpectrumReport {
  double beta = 0;
  std::string section;
  FormMode mode = FormMode::half_dn;
  double threshold = 0;        // E1(beta)
  double threshold_error = 0;  // nonzero for numerically resolved masks
  double reduced_shift = 0;    // pi^2/(b-a)^2 in reduced mode, added to the 2D eigenvalues
  double length = 0;

  std::vector<RungResult> rungs;
  std::vector<double> extrapolated;  // at the final length
  std::vector<double> extrapolation_error;
  std::vector<double> band;
  int extrapolation_order = 2;  // 0 without a ladder

  int count = 0;
  std::vector<int> mesh_counts;  // per mesh rung: raw at rung 0, extrapolated from (r-1, r) after
  std::vector<LengthLevel> length_levels;  // ascending length, final length last
  bool count_stable = false;
  bool boundary = false;
  bool monotone_refinement = true;
  bool monotone_length = true;
  double margin = 0;  // E1 - extrapolated lambda_1
  double margin_change = 0;  // relative change of the margin between L/2 and L

  std::string status = "ok";  // ok | inconclusive | not_converged
  std::vector<std::string> flags;
  std::vector<std::string> warnings;
  double seconds = 0;
};

std::string describe(const CrossSectionSpec& section);

SpectrumReport compute_spectrum(const WaveguideSpec& spec, const DiscretizationSpec& disc, const EigOptions& opts);

struct CountCertificate {
  int count = 0;
  bool stable = false;
  std::string status;
  SpectrumReport report;
};
CountCertificate count_discrete(const WaveguideSpec& spec, const DiscretizationSpec& disc, const EigOptions& opts);

struct SymmetryReport {
  double beta = 0;
  std::vector<double> half;       // half_dn eigenvalues
  std::vector<double> full;       // all computed full_sign eigenvalues
  std::vector<double> odd_fraction;  // per full eigenvector, M-weighted
  std::vector<double> full_even;  // full eigenvalues whose vectors are mostly even
  std::vector<double> relative_gap;
  double max_relative_gap = 0;
  double ground_odd_fraction = 0;
  bool converged = true;
};
/// Solves full_sign and half_dn on the same (mirrored) grid at disc.grid and disc.length.
SymmetryReport symmetry_check(const WaveguideSpec& spec, const DiscretizationSpec& disc, const EigOptions& opts,
                              int count = 3);

struct SeparationReport {
  double beta = 0;
  std::vector<double> lambda3d, lambda2d, mu_y1;
  std::vector<double> match_residual;  // per 3D eigenvalue, relative distance to the nearest sum
  double ground_residual = 0;   // |lambda3d_1 - (mu_1 + lambda2d_1)| / lambda3d_1
  double excited_residual = 0;  // relative eigen-residual of phi_2 (x) psi_1 in the 3D pencil
  double max_residual = 0;
  bool converged = true;
};
SeparationReport separation_check(const WaveguideSpec& spec, const DiscretizationSpec& disc, const EigOptions& opts,
                                  int count = 4);

/// Rows sorted by beta.
std::vector<SpectrumReport> sweep_beta(const CrossSectionSpec& section, std::vector<double> betas,
                                       const DiscretizationSpec& disc, const EigOptions& opts);

}  // namespace shearguide
