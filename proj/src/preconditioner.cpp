#include "shearguide/preconditioner.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace shearguide {

namespace {

// Keeps the shifted separable operator safely positive definite.
constexpr double shift_margin = 1e-3;

void split_tridiagonal(const Csr& a, std::vector<double>& diag, std::vector<double>& upper) {
  diag.assign(a.rows, 0.0);
  upper.assign(a.rows > 0 ? a.rows - 1 : 0, 0.0);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t k = a.ptr[i]; k < a.ptr[i + 1]; ++k) {
      const std::size_t j = a.idx[k];
      if (j == i) diag[i] = a.val[k];
      else if (j == i + 1) upper[i] = a.val[k];
      else if (j + 1 != i) throw ValidationError("fast diagonalization: axis-0 factor is not tridiagonal");
    }
}

}  // namespace

std::size_t tridiagonal_pencil_count(const std::vector<double>& kd, const std::vector<double>& ko,
                                     const std::vector<double>& md, const std::vector<double>& mo, double s) {
  std::size_t neg = 0;
  double d = 0.0;
  for (std::size_t i = 0; i < kd.size(); ++i) {
    double a = kd[i] - s * md[i];
    if (i > 0) {
      const double b = ko[i - 1] - s * mo[i - 1];
      a -= b * b / d;
    }
    if (a == 0.0) a = -1e-300;
    if (a < 0.0) ++neg;
    d = a;
  }
  return neg;
}

FastDiagPreconditioner::FastDiagPreconditioner(const SeparableSplit& split, bool shifted) : shifted_(shifted) {
  if (split.tk.size() != split.tm.size() || split.tk.empty()) {
    throw ValidationError("fast diagonalization: transverse pencils are inconsistent");
  }
  split_tridiagonal(split.k0, kd_, ko_);
  split_tridiagonal(split.m0, md_, mo_);
  n0_ = kd_.size();

  lambda_ = Eigen::VectorXd::Zero(1);
  for (std::size_t a = 0; a < split.tk.size(); ++a) {
    const Eigen::MatrixXd k = split.tk[a].to_dense(), m = split.tm[a].to_dense();
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(k, m);
    if (es.info() != Eigen::Success) throw SolverError("fast diagonalization: transverse eigensolve failed");
    v_.push_back(es.eigenvectors());
    tdims_.push_back(static_cast<std::size_t>(k.rows()));
    const Eigen::VectorXd& ev = es.eigenvalues();
    Eigen::VectorXd next(lambda_.size() * ev.size());
    for (Eigen::Index i = 0; i < lambda_.size(); ++i)
      next.segment(i * ev.size(), ev.size()) = Eigen::VectorXd::Constant(ev.size(), lambda_(i)) + ev;
    lambda_ = std::move(next);
  }
  t_ = static_cast<std::size_t>(lambda_.size());

  // Bottom of the axis-0 pencil by bisection on the inertia count.
  double lo = 0.0, hi = 1.0;
  while (tridiagonal_pencil_count(kd_, ko_, md_, mo_, hi) == 0 && hi < 1e300) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (tridiagonal_pencil_count(kd_, ko_, md_, mo_, mid) == 0) lo = mid;
    else hi = mid;
  }
  bottom_ = 0.5 * (lo + hi) + lambda_.minCoeff();
  sigma_ = 0.0;
}

void FastDiagPreconditioner::set_shift(double ritz) {
  if (!shifted_) return;
  sigma_ = std::max(0.0, std::min(ritz, bottom_ * (1.0 - shift_margin)));
}

void FastDiagPreconditioner::apply(std::span<const double> r, std::span<double> z) const { apply_impl(r, z, true); }

void FastDiagPreconditioner::apply_serial(std::span<const double> r, std::span<double> z) const {
  apply_impl(r, z, false);
}

void FastDiagPreconditioner::apply_impl(std::span<const double> r, std::span<double> z, bool parallel) const {
  if (r.size() != size() || z.size() != size()) throw ValidationError("preconditioner: size mismatch");
  std::vector<double> u(r.begin(), r.end());
  transform(u, true, parallel);
  tridiagonal_solve(u, parallel);
  transform(u, false, parallel);
  std::copy(u.begin(), u.end(), z.begin());
}

void FastDiagPreconditioner::transform(std::vector<double>& u, bool forward, bool parallel) const {
  std::vector<double> out(u.size());
  for (std::size_t a = 0; a < tdims_.size(); ++a) {
    const std::size_t ta = tdims_[a];
    std::size_t outer = n0_, inner = 1;
    for (std::size_t b = 0; b < a; ++b) outer *= tdims_[b];
    for (std::size_t b = a + 1; b < tdims_.size(); ++b) inner *= tdims_[b];
    const auto sta = static_cast<Eigen::Index>(ta);
    if (inner == 1) {
      // Contiguous axis: slabs are the columns of a (ta x outer) matrix; split columns over threads.
      const auto cols = static_cast<std::ptrdiff_t>(outer);
      const std::ptrdiff_t chunk = 64;
#pragma omp parallel for schedule(static) if (parallel)
      for (std::ptrdiff_t c0 = 0; c0 < cols; c0 += chunk) {
        const Eigen::Index nc = std::min<std::ptrdiff_t>(chunk, cols - c0);
        Eigen::Map<const Eigen::MatrixXd> x(u.data() + c0 * sta, sta, nc);
        Eigen::Map<Eigen::MatrixXd> y(out.data() + c0 * sta, sta, nc);
        if (forward) y.noalias() = v_[a].transpose() * x;
        else y.noalias() = v_[a] * x;
      }
    } else {
      const auto sin = static_cast<Eigen::Index>(inner);
      const auto slabs = static_cast<std::ptrdiff_t>(outer);
#pragma omp parallel for schedule(static) if (parallel)
      for (std::ptrdiff_t o = 0; o < slabs; ++o) {
        Eigen::Map<const Eigen::MatrixXd> x(u.data() + o * sta * sin, sin, sta);
        Eigen::Map<Eigen::MatrixXd> y(out.data() + o * sta * sin, sin, sta);
        if (forward) y.noalias() = x * v_[a];
        else y.noalias() = x * v_[a].transpose();
      }
    }
    u.swap(out);
  }
}

void FastDiagPreconditioner::tridiagonal_solve(std::vector<double>& u, bool parallel) const {
  const std::size_t t = t_, n = n0_;
  const auto blocks = static_cast<std::ptrdiff_t>((t + 255) / 256);
#pragma omp parallel for schedule(static) if (parallel)
  for (std::ptrdiff_t blk = 0; blk < blocks; ++blk) {
    const std::size_t j0 = static_cast<std::size_t>(blk) * 256, j1 = std::min(t, j0 + 256), w = j1 - j0;
    std::vector<double> dinv(n * w), c(w);
    for (std::size_t jj = 0; jj < w; ++jj) c[jj] = lambda_(static_cast<Eigen::Index>(j0 + jj)) - sigma_;
    for (std::size_t i = 0; i < n; ++i) {
      double* row = u.data() + i * t + j0;
      double* dr = dinv.data() + i * w;
      if (i == 0) {
        for (std::size_t jj = 0; jj < w; ++jj) dr[jj] = 1.0 / (kd_[0] + c[jj] * md_[0]);
        continue;
      }
      const double* prev = u.data() + (i - 1) * t + j0;
      const double* dp = dinv.data() + (i - 1) * w;
      for (std::size_t jj = 0; jj < w; ++jj) {
        const double b = ko_[i - 1] + c[jj] * mo_[i - 1];
        const double l = b * dp[jj];
        dr[jj] = 1.0 / (kd_[i] + c[jj] * md_[i] - l * b);
        row[jj] -= l * prev[jj];
      }
    }
    for (std::size_t ii = n; ii-- > 0;) {
      double* row = u.data() + ii * t + j0;
      const double* dr = dinv.data() + ii * w;
      if (ii + 1 == n) {
        for (std::size_t jj = 0; jj < w; ++jj) row[jj] *= dr[jj];
        continue;
      }
      const double* next = u.data() + (ii + 1) * t + j0;
      for (std::size_t jj = 0; jj < w; ++jj) {
        const double b = ko_[ii] + c[jj] * mo_[ii];
        row[jj] = (row[jj] - b * next[jj]) * dr[jj];
      }
    }
  }
}

PreconditionerKind preconditioner_kind_from_string(const std::string& s) {
  if (s == "fastdiag_shifted" || s == "shifted") return PreconditionerKind::fastdiag_shifted;
  if (s == "fastdiag") return PreconditionerKind::fastdiag;
  if (s == "jacobi") return PreconditionerKind::jacobi;
  if (s == "none") return PreconditionerKind::none;
  throw ValidationError("unknown preconditioner '" + s + "'");
}

std::unique_ptr<LinearOperator> make_preconditioner(const ShearForm& form, PreconditionerKind kind,
                                                    std::size_t dense_limit) {
  if (kind == PreconditionerKind::none) return nullptr;
  bool dense_ok = !form.split.tk.empty();
  for (const auto& k : form.split.tk) dense_ok = dense_ok && k.rows <= dense_limit;
  auto op = std::make_unique<LinearOperator>();
  op->n = form.size();
  if (kind == PreconditionerKind::jacobi || !dense_ok) {
    *op = jacobi_preconditioner(form.a->diagonal());
    return op;
  }
  auto fd = std::make_shared<FastDiagPreconditioner>(form.split, kind == PreconditionerKind::fastdiag_shifted);
  op->apply = [fd](std::span<const double> r, std::span<double> z) { fd->apply(r, z); };
  op->update_shift = [fd](double ritz) { fd->set_shift(ritz); };
  return op;
}

}  // namespace shearguide
