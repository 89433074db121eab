#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace shearguide {

/// Raised when user-supplied input violates a documented precondition.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical procedure fails (e.g. the eigensolver cannot proceed).
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Vector = Eigen::VectorXd;
using Block = Eigen::MatrixXd;  // column-major, one vector per column

struct Triplet {
  std::size_t row;
  std::size_t col;
  double value;
};

/// Compressed sparse row matrix. Column indices are sorted within each row.
struct Csr {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::size_t> ptr{0};
  std::vector<std::size_t> idx;
  std::vector<double> val;

  static Csr from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet> entries);
  static Csr identity(std::size_t n);

  std::size_t nnz() const { return val.size(); }
  double at(std::size_t i, std::size_t j) const;

  void multiply(std::span<const double> x, std::span<double> y) const;
  void multiply_serial(std::span<const double> x, std::span<double> y) const;

  Csr transposed() const;
  Csr scaled(double s) const;
  Eigen::MatrixXd to_dense() const;
  /// Largest |A - A^T| entry.
  double asymmetry() const;
};

Csr add(const Csr& a, const Csr& b, double alpha = 1.0, double beta = 1.0);
Csr kron(const Csr& a, const Csr& b);

}  // namespace shearguide
