#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "shearguide/linalg.hpp"

namespace shearguide {

/// Sum of Kronecker products  sum_t c_t (F_{t,0} (x) F_{t,1} (x) ... ),  applied
/// matrix-free on a tensor whose axis 0 varies slowest.
///
/// Factors are stored once and referenced by terms; `identity_factor` marks an
/// axis on which a term acts as the identity.
class KronOperator {
 public:
  static constexpr std::size_t identity_factor = std::numeric_limits<std::size_t>::max();

  struct Term {
    double coef;
    std::vector<std::size_t> factors;  // one entry per axis
  };

  KronOperator() = default;
  explicit KronOperator(std::vector<std::size_t> dims);

  std::size_t add_factor(Csr factor);
  void add_term(double coef, std::vector<std::size_t> factors);

  const std::vector<std::size_t>& dims() const { return dims_; }
  std::size_t size() const { return size_; }
  const std::vector<Csr>& factors() const { return factors_; }
  const std::vector<Term>& terms() const { return terms_; }

  /// y = Op x, data-parallel over tensor slabs (OpenMP).
  void apply(std::span<const double> x, std::span<double> y) const;
  /// Same sweep without threading; kept as the reference for tests and benchmarks.
  void apply_serial(std::span<const double> x, std::span<double> y) const;

  Eigen::VectorXd diagonal() const;

  /// Explicit sparse matrix of the operator. Intended for small problems only.
  Csr assemble() const;

 private:
  void apply_impl(std::span<const double> x, std::span<double> y, bool parallel) const;

  std::vector<std::size_t> dims_;
  std::size_t size_ = 0;
  std::vector<Csr> factors_;
  std::vector<Term> terms_;
};

namespace kernels {

/// out[o,i,r] (+)= scale * sum_j F[i,j] in[o,j,r] for a tensor viewed as (outer, n, inner).
void apply_axis(const Csr& f, std::size_t outer, std::size_t inner, std::span<const double> in,
                std::span<double> out, double scale, bool accumulate, bool parallel);

}  // namespace kernels

}  // namespace shearguide
