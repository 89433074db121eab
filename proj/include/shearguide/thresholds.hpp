#pragma once

#include <optional>

#include "shearguide/geometry.hpp"

namespace shearguide {

struct ThresholdReport {
  double ess_bottom = 0;  // E1(beta)
  double e2 = 0;          // E2(beta)
  std::optional<double> beta_star;
  std::optional<double> aspect_ratio;
  double bound_factor = 0;
};

/// Mask sections are resolved by finite differences with `mask_resolution` cells per direction.
double ess_threshold(const ShearParam& beta, const CrossSectionSpec& section, std::size_t mask_resolution = 128);
ThresholdReport threshold_report(const ShearParam& beta, const CrossSectionSpec& section,
                                 std::size_t mask_resolution = 128);

/// Piecewise sufficient bound for a single bound state; branch chosen by R <= 2/sqrt(3).
double beta_star(double aspect_ratio);
/// min{(1+b^2)/(2b^2), 1, (1+b^2)/2}.
double bound_factor(double beta);

/// Closed-form prism eigenvalues at beta = 1.
double prism_mu1_closed(const Rect& rect);
double prism_mu2_closed(const Rect& rect);

struct UniquenessDiagnostic {
  bool holds = false;  // beta < beta*(R)
  double beta = 0;
  double beta_star = 0;
  double aspect_ratio = 0;
  int branch = 1;
  double mu2_closed = 0;  // prism mu_2 at beta = 1
  double bound_factor = 0;
  double lhs = 0;  // bound_factor * mu2_closed
  double rhs = 0;  // pi^2 (1/(b-a)^2 + (1+beta^2)/(d-c)^2)
  bool bound_chain_holds = false;  // lhs >= rhs
  /// The two branches of beta* disagree at R = 2/sqrt(3); this is the size of the jump.
  double branch_jump = 0;
};

UniquenessDiagnostic uniqueness_condition(double beta, const Rect& rect);

}  // namespace shearguide
