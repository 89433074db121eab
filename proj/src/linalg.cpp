#include "shearguide/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace shearguide {

Csr Csr::from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet> entries) {
  for (const auto& t : entries) {
    if (t.row >= rows || t.col >= cols) {
      throw std::out_of_range("Csr::from_triplets: entry outside matrix bounds");
    }
  }
  std::sort(entries.begin(), entries.end(), [](const Triplet& l, const Triplet& r) {
    return l.row != r.row ? l.row < r.row : l.col < r.col;
  });
  Csr m;
  m.rows = rows;
  m.cols = cols;
  m.ptr.assign(rows + 1, 0);
  for (std::size_t k = 0; k < entries.size();) {
    std::size_t j = k;
    double sum = 0.0;
    while (j < entries.size() && entries[j].row == entries[k].row &&
           entries[j].col == entries[k].col) {
      sum += entries[j].value;
      ++j;
    }
    m.idx.push_back(entries[k].col);
    m.val.push_back(sum);
    ++m.ptr[entries[k].row + 1];
    k = j;
  }
  for (std::size_t i = 0; i < rows; ++i) m.ptr[i + 1] += m.ptr[i];
  return m;
}

Csr Csr::identity(std::size_t n) {
  Csr m;
  m.rows = m.cols = n;
  m.ptr.resize(n + 1);
  m.idx.resize(n);
  m.val.assign(n, 1.0);
  for (std::size_t i = 0; i <= n; ++i) m.ptr[i] = i;
  for (std::size_t i = 0; i < n; ++i) m.idx[i] = i;
  return m;
}

double Csr::at(std::size_t i, std::size_t j) const {
  auto first = idx.begin() + static_cast<std::ptrdiff_t>(ptr[i]);
  auto last = idx.begin() + static_cast<std::ptrdiff_t>(ptr[i + 1]);
  auto it = std::lower_bound(first, last, j);
  if (it == last || *it != j) return 0.0;
  return val[static_cast<std::size_t>(it - idx.begin())];
}

void Csr::multiply(std::span<const double> x, std::span<double> y) const {
  const auto n = static_cast<std::ptrdiff_t>(rows);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t k = ptr[i]; k < ptr[i + 1]; ++k) s += val[k] * x[idx[k]];
    y[i] = s;
  }
}

void Csr::multiply_serial(std::span<const double> x, std::span<double> y) const {
  for (std::size_t i = 0; i < rows; ++i) {
    double s = 0.0;
    for (std::size_t k = ptr[i]; k < ptr[i + 1]; ++k) s += val[k] * x[idx[k]];
    y[i] = s;
  }
}

Csr Csr::transposed() const {
  std::vector<Triplet> t;
  t.reserve(nnz());
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t k = ptr[i]; k < ptr[i + 1]; ++k) t.push_back({idx[k], i, val[k]});
  return from_triplets(cols, rows, std::move(t));
}

Csr Csr::scaled(double s) const {
  Csr m = *this;
  for (auto& v : m.val) v *= s;
  return m;
}

Eigen::MatrixXd Csr::to_dense() const {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows),
                                            static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t k = ptr[i]; k < ptr[i + 1]; ++k)
      d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(idx[k])) += val[k];
  return d;
}

double Csr::asymmetry() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t k = ptr[i]; k < ptr[i + 1]; ++k)
      worst = std::max(worst, std::abs(val[k] - at(idx[k], i)));
  return worst;
}

Csr add(const Csr& a, const Csr& b, double alpha, double beta) {
  if (a.rows != b.rows || a.cols != b.cols) throw std::invalid_argument("add: shape mismatch");
  std::vector<Triplet> t;
  t.reserve(a.nnz() + b.nnz());
  for (std::size_t i = 0; i < a.rows; ++i) {
    for (std::size_t k = a.ptr[i]; k < a.ptr[i + 1]; ++k) t.push_back({i, a.idx[k], alpha * a.val[k]});
    for (std::size_t k = b.ptr[i]; k < b.ptr[i + 1]; ++k) t.push_back({i, b.idx[k], beta * b.val[k]});
  }
  return Csr::from_triplets(a.rows, a.cols, std::move(t));
}

Csr kron(const Csr& a, const Csr& b) {
  std::vector<Triplet> t;
  t.reserve(a.nnz() * b.nnz());
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t ka = a.ptr[i]; ka < a.ptr[i + 1]; ++ka)
      for (std::size_t r = 0; r < b.rows; ++r)
        for (std::size_t kb = b.ptr[r]; kb < b.ptr[r + 1]; ++kb)
          t.push_back({i * b.rows + r, a.idx[ka] * b.cols + b.idx[kb], a.val[ka] * b.val[kb]});
  return Csr::from_triplets(a.rows * b.rows, a.cols * b.cols, std::move(t));
}

}  // namespace shearguide
