#pragma once

#include <functional>
#include <string>

#include "shearguide/geometry.hpp"

namespace shearguide {

/// w = 1 on (-inf, 1], cos(pi (x-1)/2) on [1, 2], 0 beyond (C^1).
/// eta = (1-x)^3 (1+3x) on [0, 1], 0 beyond (eta(0) = 1, C^1 at both ends).
struct CutoffProfile {
  std::function<double(double)> w, dw, eta, deta;
  double w_energy = 0;  // integral of w'^2
  double eta0 = 0;
  int panels = 4;       // composite Gauss panels per unit interval
  int order = 16;

  static CutoffProfile standard();
};

struct QuadValue {
  double value = 0;
  double error = 0;  // |I(2P) - I(P)|
};

/// Trial function psi = w(x/n) chi(y) + eps eta(x) y2 chi(y) on the half tube x > 0.
struct CertificateResult {
  double beta = 0;
  double threshold = 0;  // E1(beta)
  int n = 0;
  double eps = 0;
  double q_psi_n = 0;  // (1/n) integral of w'^2
  QuadValue q_psi_n_quad;  // same piece by quadrature
  QuadValue cross;     // q(psi_n, phi); -beta eta(0)/2 exactly
  QuadValue q_phi;
  double total = 0;    // q_psi_n + 2 eps cross + eps^2 q_phi
  double error = 0;    // quadrature error bound on total
  double norm2 = 0;    // ||psi_{n,eps}||^2
  double rayleigh = 0;  // total / norm2, an upper bound for lambda_1 - E1
  bool certified = false;  // total + error < 0
};

/// Throws ValidationError for beta <= 0 or the straight flag.
CertificateResult existence_certificate(const ShearParam& beta, const Rect& rect,
                                        const CutoffProfile& profile = CutoffProfile::standard(),
                                        int max_n = 1000000);

/// Comparison form b on (sqrt(nu), inf), shifted to the well -c0 f'' - 1_{[0, width]} f with
/// Dirichlet at 0, counted at energy 0.
struct BForm {
  double beta = 0, eps = 0, kappa = 0, nu = 0, e1 = 0, e2 = 0;
  double c0 = 0;     // 1 - 2 kappa beta / eps
  double width = 0;  // sqrt(nu)
  double zeta = 0;   // ((beta^2 - eps beta + 1)/(1+beta^2)) E2 - 2 eps beta - 1, diagnostic only
  bool zeta_covers_threshold = false;  // zeta >= E1
};

/// Validates eps >= beta, nu > 0 and c0 > 0 (ValidationError otherwise).
BForm make_bform(double beta, double eps, double kappa, double nu, double e1, double e2);

/// Oscillation count of the zero-energy solution of -c0 f'' - 1_{[0, w]} f, f(0) = 0.
int well_count(double c0, double width);
int bform_count(double beta, double eps, double kappa, double nu, double e1, double e2);
/// Negative eigenvalues of the finite-difference well on (0, 51 w) with Dirichlet ends.
int well_count_fd(double c0, double width, std::size_t points = 4000);

struct PrismCheck {
  double beta = 0;
  std::string section;
  std::size_t n_triangle = 0, n_depth = 0;
  double mu1 = 0, mu2 = 0;
  bool converged = true;
  double mu1_closed = 0, mu2_closed = 0;  // beta = 1 closed forms
  double mu1_rel_error = 0, mu2_rel_error = 0;  // only meaningful at beta = 1
  double bound_factor = 0;
  bool bound_holds = false;  // mu2 >= bound_factor * mu2_closed
  double threshold_rhs = 0;  // pi^2 (1/(b-a)^2 + (1+beta^2)/(d-c)^2)
  bool threshold_inequality = false;  // mu2 >= threshold_rhs
};

PrismCheck prism_eigen_check(const ShearParam& beta, const Rect& rect, std::size_t n_triangle = 24,
                             std::size_t n_depth = 32, double tol = 1e-9);

}  // namespace shearguide
