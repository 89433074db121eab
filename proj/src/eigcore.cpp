#include "shearguide/eigcore.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

namespace shearguide {

void LinearOperator::apply_block(const Block& x, Block& y) const {
  y.resize(x.rows(), x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    apply(std::span<const double>(x.col(j).data(), static_cast<std::size_t>(x.rows())),
          std::span<double>(y.col(j).data(), static_cast<std::size_t>(y.rows())));
  }
}

Vector LinearOperator::operator()(const Vector& x) const {
  Vector y(x.size());
  apply(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())),
        std::span<double>(y.data(), static_cast<std::size_t>(y.size())));
  return y;
}

LinearOperator csr_operator(std::shared_ptr<const Csr> a) {
  if (a->rows != a->cols) throw ValidationError("csr_operator: matrix must be square");
  LinearOperator op;
  op.n = a->rows;
  op.apply = [a](std::span<const double> x, std::span<double> y) { a->multiply(x, y); };
  op.diagonal = [a]() {
    Vector d(static_cast<Eigen::Index>(a->rows));
    for (std::size_t i = 0; i < a->rows; ++i) d(static_cast<Eigen::Index>(i)) = a->at(i, i);
    return d;
  };
  return op;
}

LinearOperator identity_operator(std::size_t n) {
  LinearOperator op;
  op.n = n;
  op.apply = [](std::span<const double> x, std::span<double> y) { std::copy(x.begin(), x.end(), y.begin()); };
  op.diagonal = [n]() { return Vector::Ones(static_cast<Eigen::Index>(n)); };
  return op;
}

LinearOperator dense_operator(Eigen::MatrixXd a) {
  if (a.rows() != a.cols()) throw ValidationError("dense_operator: matrix must be square");
  auto shared = std::make_shared<const Eigen::MatrixXd>(std::move(a));
  LinearOperator op;
  op.n = static_cast<std::size_t>(shared->rows());
  op.apply = [shared](std::span<const double> x, std::span<double> y) {
    Eigen::Map<const Vector> xv(x.data(), static_cast<Eigen::Index>(x.size()));
    Eigen::Map<Vector> yv(y.data(), static_cast<Eigen::Index>(y.size()));
    yv.noalias() = (*shared) * xv;
  };
  op.diagonal = [shared]() { return Vector(shared->diagonal()); };
  return op;
}

LinearOperator jacobi_preconditioner(const Vector& diag) {
  Vector inv(diag.size());
  for (Eigen::Index i = 0; i < diag.size(); ++i) {
    if (!(diag(i) > 0.0)) throw ValidationError("jacobi_preconditioner: diagonal must be positive");
    inv(i) = 1.0 / diag(i);
  }
  LinearOperator op;
  op.n = static_cast<std::size_t>(diag.size());
  op.apply = [inv](std::span<const double> x, std::span<double> y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = inv(static_cast<Eigen::Index>(i)) * x[i];
  };
  return op;
}

bool EigResult::all_converged() const {
  return std::all_of(converged.begin(), converged.end(), [](bool c) { return c; });
}

namespace {

Block random_block(Eigen::Index n, Eigen::Index m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist;
  Block b(n, m);
  for (Eigen::Index j = 0; j < m; ++j)
    for (Eigen::Index i = 0; i < n; ++i) b(i, j) = dist(rng);
  return b;
}

// Block U with companions C_i (= Op_i U) transformed in lockstep.
struct Tracked {
  Block u, mu;
};

// M-orthonormalize U by SVQB, dropping directions below `drop` relative to the largest.
// Returns the transformation T with U <- U T.
Eigen::MatrixXd svqb_transform(const Block& u, const Block& mu, double drop) {
  Eigen::MatrixXd g = u.transpose() * mu;
  g = 0.5 * (g + g.transpose()).eval();
  const Eigen::Index m = g.rows();
  const double scale = g.diagonal().cwiseAbs().maxCoeff();
  Vector dinv = Vector::Zero(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    if (g(j, j) < -1e-10 * scale) throw SolverError("mass operator is not positive definite");
    if (g(j, j) > 1e-300 && g(j, j) > 1e-28 * scale) dinv(j) = 1.0 / std::sqrt(g(j, j));
  }
  const Eigen::MatrixXd h = dinv.asDiagonal() * g * dinv.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  const Vector& ev = es.eigenvalues();
  const double top = ev.size() > 0 ? ev.maxCoeff() : 0.0;
  if (ev.size() > 0 && ev.minCoeff() < -1e-8 * std::max(top, 1.0)) {
    throw SolverError("mass operator is not positive definite");
  }
  std::vector<Eigen::Index> keep;
  for (Eigen::Index j = 0; j < m; ++j)
    if (ev(j) > drop * top) keep.push_back(j);
  Eigen::MatrixXd t(m, static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) {
    const Eigen::Index j = keep[c];
    t.col(static_cast<Eigen::Index>(c)) = dinv.asDiagonal() * es.eigenvectors().col(j) / std::sqrt(ev(j));
  }
  return t;
}

void orthonormalize(Tracked& b, double drop) {
  for (int pass = 0; pass < 2 && b.u.cols() > 0; ++pass) {
    const Eigen::MatrixXd t = svqb_transform(b.u, b.mu, drop);
    b.u = b.u * t;
    b.mu = b.mu * t;
  }
}

// U <- U - X (MX)^T U twice, then M-orthonormalize.
void project_out(Tracked& b, const Block& x, const Block& mx) {
  for (int pass = 0; pass < 2; ++pass) {
    const Eigen::MatrixXd c = mx.transpose() * b.u;
    b.u.noalias() -= x * c;
    b.mu.noalias() -= mx * c;
  }
}

EigResult dense_solve(const LinearOperator& a, const LinearOperator& m, int k) {
  const auto n = static_cast<Eigen::Index>(a.n);
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
  Block ad, md;
  a.apply_block(id, ad);
  m.apply_block(id, md);
  ad = 0.5 * (ad + ad.transpose()).eval();
  md = 0.5 * (md + md.transpose()).eval();
  Eigen::LLT<Eigen::MatrixXd> llt(md);
  if (llt.info() != Eigen::Success) throw SolverError("mass operator is not positive definite");
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(ad, md);
  if (es.info() != Eigen::Success) throw SolverError("dense generalized eigensolver failed");
  EigResult r;
  r.vectors = es.eigenvectors().leftCols(k);
  for (int j = 0; j < k; ++j) r.eigenvalues.push_back(es.eigenvalues()(j));
  return r;
}

void fill_residuals(const LinearOperator& a, const LinearOperator& m, double tol, EigResult& r) {
  Block ax, mx;
  a.apply_block(r.vectors, ax);
  m.apply_block(r.vectors, mx);
  r.residuals.clear();
  r.converged.clear();
  for (std::size_t j = 0; j < r.eigenvalues.size(); ++j) {
    const auto c = static_cast<Eigen::Index>(j);
    const double lam = r.eigenvalues[j];
    const double res = (ax.col(c) - lam * mx.col(c)).norm() / mx.col(c).norm();
    r.residuals.push_back(res);
    r.converged.push_back(res <= tol * std::max(std::abs(lam), 1e-300));
  }
}

}  // namespace

EigResult smallest_eigenpairs(const LinearOperator& a, const LinearOperator& m, const EigOptions& opts,
                              const LinearOperator* precond) {
  if (a.n != m.n) throw ValidationError("eigensolver: operator dimensions differ");
  if (precond && precond->n != a.n) throw ValidationError("eigensolver: preconditioner dimension differs");
  if (opts.k < 1) throw ValidationError("eigensolver: k must be positive");
  if (static_cast<std::size_t>(opts.k) > a.n) throw ValidationError("eigensolver: k exceeds dimension");
  if (!(opts.tol > 0.0)) throw ValidationError("eigensolver: tol must be positive");

  const auto n = static_cast<Eigen::Index>(a.n);
  const int k = opts.k;
  const int bs = std::min<int>(opts.block_size > 0 ? std::max(opts.block_size, k) : k + 3, static_cast<int>(n));

  if (3 * bs >= n || n <= 64) {
    EigResult r = dense_solve(a, m, k);
    fill_residuals(a, m, opts.tol, r);
    return r;
  }

  // Starting block: supplied columns first, random fill after.
  Block x0 = random_block(n, bs, opts.seed);
  if (opts.initial.size() > 0) {
    if (opts.initial.rows() != n) throw ValidationError("eigensolver: initial block has wrong row count");
    const Eigen::Index c = std::min<Eigen::Index>(opts.initial.cols(), bs);
    x0.leftCols(c) = opts.initial.leftCols(c);
  }
  Tracked xs;
  xs.u = x0;
  m.apply_block(xs.u, xs.mu);
  orthonormalize(xs, 1e-14);
  if (xs.u.cols() < bs) {
    // Dependent warm start: refill from the random stream.
    Block extra = random_block(n, bs - xs.u.cols(), opts.seed + 1);
    Tracked e;
    e.u = extra;
    m.apply_block(e.u, e.mu);
    project_out(e, xs.u, xs.mu);
    orthonormalize(e, 1e-14);
    Block u(n, xs.u.cols() + e.u.cols()), mu(n, u.cols());
    u << xs.u, e.u;
    mu << xs.mu, e.mu;
    xs.u = u;
    xs.mu = mu;
  }
  Block x = xs.u, mx = xs.mu, ax;
  a.apply_block(x, ax);

  // Initial Rayleigh-Ritz.
  {
    Eigen::MatrixXd h = x.transpose() * ax;
    h = 0.5 * (h + h.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    const Eigen::MatrixXd c = es.eigenvectors();
    x = x * c;
    ax = ax * c;
    mx = mx * c;
  }
  const Eigen::Index cols = x.cols();
  Vector theta(cols);
  for (Eigen::Index j = 0; j < cols; ++j) theta(j) = x.col(j).dot(ax.col(j));

  Block p, ap, mp;
  EigResult result;
  int it = 0;
  std::vector<bool> locked(static_cast<std::size_t>(cols), false);

  for (; it < opts.max_iterations; ++it) {
    // Residuals and soft locking.
    Block r = ax - mx * theta.asDiagonal();
    std::vector<Eigen::Index> active;
    bool leading_done = true;
    for (Eigen::Index j = 0; j < cols; ++j) {
      const double res = r.col(j).norm() / mx.col(j).norm();
      const bool ok = res <= opts.tol * std::max(std::abs(theta(j)), 1e-300);
      locked[static_cast<std::size_t>(j)] = ok;
      if (!ok) active.push_back(j);
      if (j < k && !ok) leading_done = false;
    }
    if (leading_done) break;

    // Preconditioned residuals of the active columns.
    Tracked w;
    {
      Block ra(n, static_cast<Eigen::Index>(active.size()));
      for (std::size_t c = 0; c < active.size(); ++c) ra.col(static_cast<Eigen::Index>(c)) = r.col(active[c]);
      if (precond) {
        if (precond->update_shift) precond->update_shift(theta(0));
        precond->apply_block(ra, w.u);
      } else {
        w.u = ra;
      }
      for (Eigen::Index c = 0; c < w.u.cols(); ++c) {
        const double nrm = w.u.col(c).norm();
        if (nrm > 0.0) w.u.col(c) /= nrm;
      }
      m.apply_block(w.u, w.mu);
    }
    const Vector w_energy = w.mu.cwiseProduct(w.u).colwise().sum().transpose();
    project_out(w, x, mx);
    // Same cancellation guard as for P below.
    if (w.u.cols() > 0 &&
        (w.mu.cwiseProduct(w.u).colwise().sum().transpose().array() < 1e-4 * w_energy.array()).any()) {
      m.apply_block(w.u, w.mu);
    }
    orthonormalize(w, 1e-12);
    Block aw;
    a.apply_block(w.u, aw);

    Tracked pt;
    Block apt;
    if (p.cols() > 0) {
      pt.u = p;
      pt.mu = mp;
      apt = ap;
      // Linear bookkeeping of A P and M P through the same projections. Normalizing a small P
      // amplifies the accumulated error of the tracked products, so they are recomputed then.
      for (int pass = 0; pass < 2; ++pass) {
        const Eigen::MatrixXd cx = mx.transpose() * pt.u;
        pt.u.noalias() -= x * cx;
        pt.mu.noalias() -= mx * cx;
        apt.noalias() -= ax * cx;
        if (w.u.cols() > 0) {
          const Eigen::MatrixXd cw = w.mu.transpose() * pt.u;
          pt.u.noalias() -= w.u * cw;
          pt.mu.noalias() -= w.mu * cw;
          apt.noalias() -= aw * cw;
        }
      }
      if (pt.u.cols() > 0 && pt.mu.cwiseProduct(pt.u).colwise().sum().minCoeff() < 1e-4) {
        m.apply_block(pt.u, pt.mu);
        a.apply_block(pt.u, apt);
      }
      for (int pass = 0; pass < 2 && pt.u.cols() > 0; ++pass) {
        const Eigen::MatrixXd t = svqb_transform(pt.u, pt.mu, 1e-12);
        pt.u = pt.u * t;
        pt.mu = pt.mu * t;
        apt = apt * t;
      }
    }

    const Eigen::Index nw = w.u.cols(), np = pt.u.cols();
    const Eigen::Index ns = cols + nw + np;
    Block s(n, ns), as(n, ns), ms(n, ns);
    s << x, w.u, pt.u;
    as << ax, aw, apt;
    ms << mx, w.mu, pt.mu;

    Eigen::MatrixXd h = s.transpose() * as;
    h = 0.5 * (h + h.transpose()).eval();
    Eigen::MatrixXd g = s.transpose() * ms;
    g = 0.5 * (g + g.transpose()).eval();
    Eigen::MatrixXd c;
    Vector ev;
    if ((g - Eigen::MatrixXd::Identity(ns, ns)).cwiseAbs().maxCoeff() < 1e-10) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
      c = es.eigenvectors().leftCols(cols);
      ev = es.eigenvalues().head(cols);
    } else {
      Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(h, g);
      if (es.info() != Eigen::Success) throw SolverError("Rayleigh-Ritz Gram matrix is not positive definite");
      c = es.eigenvectors().leftCols(cols);
      ev = es.eigenvalues().head(cols);
    }

    // New search direction: the W and P components of the Ritz vectors.
    const Eigen::MatrixXd cwp = c.bottomRows(nw + np);
    p = s.rightCols(nw + np) * cwp;
    ap = as.rightCols(nw + np) * cwp;
    mp = ms.rightCols(nw + np) * cwp;

    x = s * c;
    ax = as * c;
    mx = ms * c;
    theta = ev;

    // Periodic refresh of the tracked products.
    if ((it + 1) % 25 == 0) {
      Tracked refresh{x, Block()};
      m.apply_block(refresh.u, refresh.mu);
      orthonormalize(refresh, 1e-14);
      if (refresh.u.cols() == cols) {
        x = refresh.u;
        mx = refresh.mu;
        a.apply_block(x, ax);
        Eigen::MatrixXd hh = x.transpose() * ax;
        hh = 0.5 * (hh + hh.transpose()).eval();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hh);
        x = x * es.eigenvectors();
        ax = ax * es.eigenvectors();
        mx = mx * es.eigenvectors();
        theta = es.eigenvalues();
      }
    }
  }

  result.iterations = it;
  result.vectors = x.leftCols(k);
  for (int j = 0; j < k; ++j) result.eigenvalues.push_back(theta(j));
  fill_residuals(a, m, opts.tol, result);
  return result;
}

CountResult count_below(const LinearOperator& a, const LinearOperator& m, double threshold, double safety,
                        EigOptions opts, const LinearOperator* precond) {
  if (safety < 0.0) throw ValidationError("count_below: safety must be non-negative");
  CountResult out;
  const int n = static_cast<int>(a.n);
  opts.k = std::clamp(opts.k, 1, n);
  for (;;) {
    out.eig = smallest_eigenpairs(a, m, opts, precond);
    out.converged = out.eig.all_converged();
    const double top = out.eig.eigenvalues.back();
    if (top >= threshold + safety || opts.k == n || !out.converged) break;
    opts.initial = out.eig.vectors;
    opts.k = std::min(2 * opts.k, n);
  }
  out.count = 0;
  out.boundary = false;
  for (double lam : out.eig.eigenvalues) {
    if (lam < threshold - safety) ++out.count;
    if (std::abs(lam - threshold) <= safety) out.boundary = true;
  }
  return out;
}

double linearity_defect(const LinearOperator& op, int probes, std::uint64_t seed) {
  const auto n = static_cast<Eigen::Index>(op.n);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  double worst = 0.0;
  for (int t = 0; t < probes; ++t) {
    const Block xy = random_block(n, 2, seed + static_cast<std::uint64_t>(t));
    const double al = coef(rng), be = coef(rng);
    const Vector lhs = op(al * xy.col(0) + be * xy.col(1));
    const Vector rhs = al * op(Vector(xy.col(0))) + be * op(Vector(xy.col(1)));
    worst = std::max(worst, (lhs - rhs).norm() / std::max(rhs.norm(), 1e-300));
  }
  return worst;
}

double symmetry_defect(const LinearOperator& op, int probes, std::uint64_t seed) {
  const auto n = static_cast<Eigen::Index>(op.n);
  double worst = 0.0;
  for (int t = 0; t < probes; ++t) {
    const Block xy = random_block(n, 2, seed + static_cast<std::uint64_t>(t));
    const Vector ax = op(Vector(xy.col(0))), ay = op(Vector(xy.col(1)));
    const double l = xy.col(1).dot(ax), r = xy.col(0).dot(ay);
    const double scale = std::max(ax.norm() * xy.col(1).norm(), 1e-300);
    worst = std::max(worst, std::abs(l - r) / scale);
  }
  return worst;
}

double min_probe_energy(const LinearOperator& op, int probes, std::uint64_t seed) {
  const auto n = static_cast<Eigen::Index>(op.n);
  double lowest = std::numeric_limits<double>::infinity();
  for (int t = 0; t < probes; ++t) {
    const Block x = random_block(n, 1, seed + static_cast<std::uint64_t>(t));
    const Vector mx = op(Vector(x.col(0)));
    lowest = std::min(lowest, x.col(0).dot(mx) / x.col(0).squaredNorm());
  }
  return lowest;
}

}  // namespace shearguide
