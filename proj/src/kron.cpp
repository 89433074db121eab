#include "shearguide/kron.hpp"

#include <algorithm>
#include <numeric>

namespace shearguide {

namespace kernels {

void apply_axis(const Csr& f, std::size_t outer, std::size_t inner, std::span<const double> in,
                std::span<double> out, double scale, bool accumulate, bool parallel) {
  const std::size_t n = f.rows;
  const auto total = static_cast<std::ptrdiff_t>(outer * n);
#pragma omp parallel for schedule(static) if (parallel)
  for (std::ptrdiff_t oi = 0; oi < total; ++oi) {
    const std::size_t o = static_cast<std::size_t>(oi) / n;
    const std::size_t i = static_cast<std::size_t>(oi) % n;
    double* dst = out.data() + (o * n + i) * inner;
    if (!accumulate) std::fill(dst, dst + inner, 0.0);
    for (std::size_t k = f.ptr[i]; k < f.ptr[i + 1]; ++k) {
      const double a = scale * f.val[k];
      const double* src = in.data() + (o * f.cols + f.idx[k]) * inner;
      for (std::size_t r = 0; r < inner; ++r) dst[r] += a * src[r];
    }
  }
}

}  // namespace kernels

KronOperator::KronOperator(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
  size_ = std::accumulate(dims_.begin(), dims_.end(), std::size_t{1}, std::multiplies<>());
}

std::size_t KronOperator::add_factor(Csr factor) {
  if (factor.rows != factor.cols) throw std::invalid_argument("KronOperator: factors must be square");
  factors_.push_back(std::move(factor));
  return factors_.size() - 1;
}

void KronOperator::add_term(double coef, std::vector<std::size_t> factors) {
  if (factors.size() != dims_.size()) throw std::invalid_argument("KronOperator: one factor per axis");
  for (std::size_t a = 0; a < dims_.size(); ++a) {
    if (factors[a] == identity_factor) continue;
    if (factors[a] >= factors_.size() || factors_[factors[a]].rows != dims_[a]) {
      throw std::invalid_argument("KronOperator: factor does not match axis dimension");
    }
  }
  terms_.push_back({coef, std::move(factors)});
}

void KronOperator::apply(std::span<const double> x, std::span<double> y) const {
  apply_impl(x, y, true);
}

void KronOperator::apply_serial(std::span<const double> x, std::span<double> y) const {
  apply_impl(x, y, false);
}

void KronOperator::apply_impl(std::span<const double> x, std::span<double> y, bool parallel) const {
  if (x.size() != size_ || y.size() != size_) throw std::invalid_argument("KronOperator: size mismatch");
  std::fill(y.begin(), y.end(), 0.0);
  std::vector<double> buf_a(size_), buf_b(size_);
  const std::size_t axes = dims_.size();

  for (const auto& term : terms_) {
    std::vector<std::size_t> active;
    for (std::size_t a = 0; a < axes; ++a)
      if (term.factors[a] != identity_factor) active.push_back(a);

    if (active.empty()) {
      for (std::size_t i = 0; i < size_; ++i) y[i] += term.coef * x[i];
      continue;
    }
    // Sweep from the fastest axis to the slowest; the last sweep accumulates into y.
    std::span<const double> src = x;
    for (std::size_t s = 0; s < active.size(); ++s) {
      const std::size_t a = active[active.size() - 1 - s];
      std::size_t outer = 1, inner = 1;
      for (std::size_t b = 0; b < a; ++b) outer *= dims_[b];
      for (std::size_t b = a + 1; b < axes; ++b) inner *= dims_[b];
      const bool last = (s + 1 == active.size());
      std::span<double> dst = last ? y : (s % 2 == 0 ? std::span<double>(buf_a) : std::span<double>(buf_b));
      kernels::apply_axis(factors_[term.factors[a]], outer, inner, src, dst, last ? term.coef : 1.0,
                          last, parallel);
      src = dst;
    }
  }
}

Eigen::VectorXd KronOperator::diagonal() const {
  Eigen::VectorXd total = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(size_));
  for (const auto& term : terms_) {
    Eigen::VectorXd acc = Eigen::VectorXd::Constant(1, term.coef);
    for (std::size_t a = 0; a < dims_.size(); ++a) {
      Eigen::VectorXd d = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(dims_[a]));
      if (term.factors[a] != identity_factor) {
        const Csr& f = factors_[term.factors[a]];
        for (std::size_t i = 0; i < f.rows; ++i) d(static_cast<Eigen::Index>(i)) = f.at(i, i);
      }
      Eigen::VectorXd next(acc.size() * d.size());
      for (Eigen::Index i = 0; i < acc.size(); ++i) next.segment(i * d.size(), d.size()) = acc(i) * d;
      acc = std::move(next);
    }
    total += acc;
  }
  return total;
}

Csr KronOperator::assemble() const {
  Csr total;
  bool first = true;
  for (const auto& term : terms_) {
    Csr acc = Csr::identity(1);
    for (std::size_t a = 0; a < dims_.size(); ++a) {
      const Csr f = term.factors[a] == identity_factor ? Csr::identity(dims_[a]) : factors_[term.factors[a]];
      acc = kron(acc, f);
    }
    acc = acc.scaled(term.coef);
    total = first ? acc : add(total, acc);
    first = false;
  }
  if (first) {
    total = Csr::from_triplets(size_, size_, {});
  }
  return total;
}

}  // namespace shearguide
