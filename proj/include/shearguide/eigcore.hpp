#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "shearguide/linalg.hpp"

namespace shearguide {

/// Matrix-free linear map on R^n. `diagonal` is optional (used for Jacobi preconditioning).
struct LinearOperator {
  std::size_t n = 0;
  std::function<void(std::span<const double>, std::span<double>)> apply;
  std::function<Vector()> diagonal;
  /// Preconditioners only: receives the smallest current Ritz value before each application round.
  std::function<void(double)> update_shift;

  void apply_block(const Block& x, Block& y) const;
  Vector operator()(const Vector& x) const;
};

LinearOperator csr_operator(std::shared_ptr<const Csr> a);
LinearOperator identity_operator(std::size_t n);
LinearOperator dense_operator(Eigen::MatrixXd a);
LinearOperator jacobi_preconditioner(const Vector& diag);

struct EigOptions {
  int k = 1;
  double tol = 1e-8;  // relative residual: ||Ax - lambda Mx|| / ||Mx|| <= tol * |lambda|
  int max_iterations = 5000;
  int block_size = 0;  // 0 selects k + 3
  std::uint64_t seed = 42;
  Block initial;  // optional leading columns of the starting block
};

struct EigResult {
  std::vector<double> eigenvalues;  // ascending
  Block vectors;                    // M-orthonormal columns
  std::vector<double> residuals;    // ||Ax - lambda Mx|| / ||Mx||
  std::vector<bool> converged;
  int iterations = 0;

  bool all_converged() const;
};

/// k smallest eigenpairs of A x = lambda M x by preconditioned block LOBPCG.
/// `precond` must be symmetric positive definite; nullptr means no preconditioning.
EigResult smallest_eigenpairs(const LinearOperator& a, const LinearOperator& m, const EigOptions& opts,
                              const LinearOperator* precond = nullptr);

struct CountResult {
  int count = 0;
  bool boundary = false;  // some eigenvalue within +-safety of the threshold
  bool converged = true;
  EigResult eig;
};

/// Number of eigenvalues below threshold - safety. Grows the requested block until an
/// eigenvalue at or above threshold + safety is seen (or the dimension is exhausted).
CountResult count_below(const LinearOperator& a, const LinearOperator& m, double threshold, double safety,
                        EigOptions opts, const LinearOperator* precond = nullptr);

/// Random-probe diagnostics. Return the worst relative defect over `probes` trials.
double linearity_defect(const LinearOperator& op, int probes = 4, std::uint64_t seed = 7);
double symmetry_defect(const LinearOperator& op, int probes = 4, std::uint64_t seed = 11);
/// Smallest <Mx, x> / <x, x> seen on random probes.
double min_probe_energy(const LinearOperator& op, int probes = 8, std::uint64_t seed = 13);

}  // namespace shearguide
