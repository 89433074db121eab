#include "shearguide/thresholds.hpp"

#include <cmath>
#include <numbers>

#include "shearguide/cross_section.hpp"
#include "shearguide/linalg.hpp"

namespace shearguide {

namespace {
constexpr double pi = std::numbers::pi;
const double branch_point = 2.0 / std::sqrt(3.0);

double second_branch(double r) {
  // -R^2 + 3 + sqrt(49 + 2R^2 + R^4) = 4 + 48 / (sqrt((R^2+1)^2 + 48) + R^2 + 1), free of cancellation.
  const double s = r * r + 1.0;
  return 0.5 * std::sqrt(4.0 + 48.0 / (std::hypot(s, std::sqrt(48.0)) + s));
}
}  // namespace

double ess_threshold(const ShearParam& beta, const CrossSectionSpec& section, std::size_t mask_resolution) {
  if (const auto* r = std::get_if<Rect>(&section)) return rectangle_modes(beta, *r, 1).front().eigenvalue;
  return numeric_modes(beta, section, mask_resolution, 1).front().eigenvalue;
}

ThresholdReport threshold_report(const ShearParam& beta, const CrossSectionSpec& section,
                                 std::size_t mask_resolution) {
  ThresholdReport t;
  const auto modes = std::holds_alternative<Rect>(section) ? rectangle_modes(beta, std::get<Rect>(section), 2)
                                                           : numeric_modes(beta, section, mask_resolution, 2);
  t.ess_bottom = modes[0].eigenvalue;
  t.e2 = modes[1].eigenvalue;
  if (const auto* r = std::get_if<Rect>(&section)) {
    t.aspect_ratio = r->aspect_ratio();
    t.beta_star = beta_star(*t.aspect_ratio);
  }
  t.bound_factor = beta.beta() > 0.0 ? bound_factor(beta.beta()) : 0.0;
  return t;
}

double beta_star(double r) {
  if (!(r > 0.0) || !std::isfinite(r)) throw ValidationError("beta_star: R must be positive");
  if (r <= branch_point) return std::sqrt(3.0) * r;
  return second_branch(r);
}

double bound_factor(double beta) {
  if (!(beta > 0.0)) throw ValidationError("bound_factor: beta must be positive");
  const double b2 = beta * beta;
  return std::min({(1.0 + b2) / (2.0 * b2), 1.0, (1.0 + b2) / 2.0});
}

double prism_mu1_closed(const Rect& rect) {
  return pi * pi * (1.0 / (rect.height() * rect.height()) + 1.0 / (rect.width() * rect.width()));
}

double prism_mu2_closed(const Rect& rect) {
  const double h2 = rect.height() * rect.height(), w2 = rect.width() * rect.width();
  if (rect.aspect_ratio() <= branch_point) return pi * pi * (1.0 / h2 + 4.0 / w2);
  return pi * pi * (5.0 / h2 + 1.0 / w2);
}

UniquenessDiagnostic uniqueness_condition(double beta, const Rect& rect) {
  if (!(beta > 0.0)) throw ValidationError("uniqueness_condition: beta must be positive");
  UniquenessDiagnostic u;
  u.beta = beta;
  u.aspect_ratio = rect.aspect_ratio();
  u.beta_star = beta_star(u.aspect_ratio);
  u.branch = u.aspect_ratio <= branch_point ? 1 : 2;
  u.holds = beta < u.beta_star;
  u.mu2_closed = prism_mu2_closed(rect);
  u.bound_factor = bound_factor(beta);
  u.lhs = u.bound_factor * u.mu2_closed;
  u.rhs = pi * pi * (1.0 / (rect.width() * rect.width()) + (1.0 + beta * beta) / (rect.height() * rect.height()));
  u.bound_chain_holds = u.lhs >= u.rhs;
  u.branch_jump = std::sqrt(3.0) * branch_point - second_branch(branch_point);
  return u;
}

}  // namespace shearguide
