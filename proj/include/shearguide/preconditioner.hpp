#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "shearguide/assembly.hpp"
#include "shearguide/eigcore.hpp"

namespace shearguide {

/// Exact inverse of the shifted separable part (A_sep - sigma M)^{-1} by fast diagonalization:
/// dense generalized eigenvectors on every transverse axis, batched tridiagonal solves on axis 0.
/// The shift is clamped below the bottom of A_sep so the operator stays symmetric positive definite.
class FastDiagPreconditioner {
 public:
  FastDiagPreconditioner(const SeparableSplit& split, bool shifted);

  std::size_t size() const { return n0_ * t_; }
  /// Smallest eigenvalue of (A_sep, M).
  double separable_bottom() const { return bottom_; }
  double shift() const { return sigma_; }
  bool shifted() const { return shifted_; }
  /// Move the shift towards `ritz` (no-op when unshifted).
  void set_shift(double ritz);

  void apply(std::span<const double> r, std::span<double> z) const;
  void apply_serial(std::span<const double> r, std::span<double> z) const;

 private:
  void apply_impl(std::span<const double> r, std::span<double> z, bool parallel) const;
  void transform(std::vector<double>& u, bool forward, bool parallel) const;
  void tridiagonal_solve(std::vector<double>& u, bool parallel) const;

  std::size_t n0_ = 0, t_ = 1;
  std::vector<double> kd_, ko_, md_, mo_;  // axis-0 diagonals and superdiagonals
  std::vector<std::size_t> tdims_;
  std::vector<Eigen::MatrixXd> v_;
  Eigen::VectorXd lambda_;  // transverse eigenvalues as a Kronecker sum, last axis fastest
  double bottom_ = 0;
  double sigma_ = 0;
  bool shifted_ = true;
};

/// Number of eigenvalues of the tridiagonal pencil (K, M) below s (Sylvester inertia).
std::size_t tridiagonal_pencil_count(const std::vector<double>& kd, const std::vector<double>& ko,
                                     const std::vector<double>& md, const std::vector<double>& mo, double s);

enum class PreconditionerKind { fastdiag_shifted, fastdiag, jacobi, none };
PreconditionerKind preconditioner_kind_from_string(const std::string& s);

/// Transverse problems above `dense_limit` dofs fall back to Jacobi.
std::unique_ptr<LinearOperator> make_preconditioner(const ShearForm& form, PreconditionerKind kind,
                                                    std::size_t dense_limit = 3000);

}  // namespace shearguide
