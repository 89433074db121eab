#include "shearguide/cross_section.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/SparseCholesky>

#include "shearguide/eigcore.hpp"
#include "shearguide/quadrature.hpp"

namespace shearguide {

namespace {
constexpr double pi = std::numbers::pi;
}

SectionGrid::SectionGrid(CellMask mask) : mask_(std::move(mask)) {
  const std::size_t v1 = mask_.n1() + 1, v2 = mask_.n2() + 1;
  dof_of_vertex_.assign(v1 * v2, -1);
  for (std::size_t i = 0; i < v1; ++i)
    for (std::size_t j = 0; j < v2; ++j)
      if (mask_.vertex_is_dof(i, j)) {
        dof_of_vertex_[i * v2 + j] = static_cast<std::ptrdiff_t>(vertex_of_dof_.size());
        vertex_of_dof_.emplace_back(i, j);
      }
}

double SectionMode::value(double y1, double y2) const {
  if (!rect) throw ValidationError("SectionMode::value: closed form available for rectangles only");
  return amplitude * std::sin(m * pi * (y1 - rect->a) / rect->width()) *
         std::sin(n * pi * (y2 - rect->c) / rect->height());
}

double SectionMode::dy2(double y1, double y2) const {
  if (!rect) throw ValidationError("SectionMode::dy2: closed form available for rectangles only");
  const double k = n * pi / rect->height();
  return amplitude * std::sin(m * pi * (y1 - rect->a) / rect->width()) * k * std::cos(k * (y2 - rect->c));
}

std::vector<SectionMode> rectangle_modes(const ShearParam& beta, const Rect& rect, int count) {
  if (count < 1) throw ValidationError("rectangle_modes: count must be positive");
  const Rect r(rect.a, rect.b, rect.c, rect.d);
  const double s = 1.0 + beta.beta() * beta.beta();
  std::vector<SectionMode> all;
  for (int m = 1; m <= count; ++m)
    for (int n = 1; n <= count; ++n) {
      SectionMode mode;
      mode.m = m;
      mode.n = n;
      mode.eigenvalue = pi * pi * (m * m / (r.width() * r.width()) + s * n * n / (r.height() * r.height()));
      mode.rect = r;
      mode.amplitude = 2.0 / std::sqrt(r.width() * r.height());
      all.push_back(mode);
    }
  std::stable_sort(all.begin(), all.end(), [](const SectionMode& x, const SectionMode& y) {
    if (x.eigenvalue != y.eigenvalue) return x.eigenvalue < y.eigenvalue;
    return x.m != y.m ? x.m < y.m : x.n < y.n;
  });
  all.resize(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) all[static_cast<std::size_t>(k)].ordinal = k + 1;
  return all;
}

CellMask section_mask_at(const CrossSectionSpec& section, std::size_t resolution) {
  if (const auto* r = std::get_if<Rect>(&section)) {
    if (resolution < 9) throw ValidationError("section grid needs at least 8x8 interior nodes");
    return CellMask::filled(*r, resolution, resolution);
  }
  const auto& mask = std::get<CellMask>(section);
  const std::size_t longest = std::max(mask.n1(), mask.n2());
  if (resolution < longest || resolution % longest != 0) {
    throw ValidationError("mask resolution must be a positive multiple of the mask's cell count");
  }
  CellMask fine = mask.refined(resolution / longest);
  if (fine.n1() < 9 || fine.n2() < 9) throw ValidationError("section grid needs at least 8x8 interior nodes");
  return fine;
}

Csr section_fd_matrix(const ShearParam& beta, const SectionGrid& grid) {
  const CellMask& mk = grid.mask();
  const double w1 = 1.0 / (mk.h1() * mk.h1());
  const double w2 = (1.0 + beta.beta() * beta.beta()) / (mk.h2() * mk.h2());
  std::vector<Triplet> t;
  t.reserve(grid.dofs() * 5);
  for (std::size_t p = 0; p < grid.dofs(); ++p) {
    const auto [i, j] = grid.vertex(p);
    t.push_back({p, p, 2.0 * w1 + 2.0 * w2});
    const std::ptrdiff_t nb[4] = {grid.dof(i - 1, j), grid.dof(i + 1, j), grid.dof(i, j - 1), grid.dof(i, j + 1)};
    const double wt[4] = {w1, w1, w2, w2};
    for (int q = 0; q < 4; ++q)
      if (nb[q] >= 0) t.push_back({p, static_cast<std::size_t>(nb[q]), -wt[q]});
  }
  return Csr::from_triplets(grid.dofs(), grid.dofs(), std::move(t));
}

std::vector<SectionMode> numeric_modes(const ShearParam& beta, const CrossSectionSpec& section,
                                       std::size_t resolution, int count) {
  if (count < 1) throw ValidationError("numeric_modes: count must be positive");
  auto grid = std::make_shared<const SectionGrid>(section_mask_at(section, resolution));
  if (grid->dofs() < static_cast<std::size_t>(count)) throw ValidationError("numeric_modes: too few interior nodes");
  auto a = std::make_shared<const Csr>(section_fd_matrix(beta, *grid));

  Eigen::SparseMatrix<double> sa(static_cast<Eigen::Index>(a->rows), static_cast<Eigen::Index>(a->cols));
  {
    std::vector<Eigen::Triplet<double>> tr;
    for (std::size_t i = 0; i < a->rows; ++i)
      for (std::size_t k = a->ptr[i]; k < a->ptr[i + 1]; ++k)
        tr.emplace_back(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(a->idx[k]), a->val[k]);
    sa.setFromTriplets(tr.begin(), tr.end());
  }
  auto chol = std::make_shared<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>>(sa);
  if (chol->info() != Eigen::Success) throw SolverError("numeric_modes: factorization failed");
  LinearOperator pre;
  pre.n = a->rows;
  pre.apply = [chol](std::span<const double> x, std::span<double> y) {
    Eigen::Map<const Vector> xv(x.data(), static_cast<Eigen::Index>(x.size()));
    Eigen::Map<Vector>(y.data(), static_cast<Eigen::Index>(y.size())) = chol->solve(Vector(xv));
  };

  EigOptions opts;
  opts.k = count;
  opts.tol = 1e-10;
  const EigResult res = smallest_eigenpairs(csr_operator(a), identity_operator(a->rows), opts, &pre);
  if (!res.all_converged()) throw SolverError("numeric_modes: eigensolver did not converge");

  const double cell = grid->mask().h1() * grid->mask().h2();
  std::vector<SectionMode> out;
  for (int k = 0; k < count; ++k) {
    SectionMode mode;
    mode.eigenvalue = res.eigenvalues[static_cast<std::size_t>(k)];
    mode.ordinal = k + 1;
    mode.grid = grid;
    Vector v = res.vectors.col(k);
    v /= std::sqrt(v.squaredNorm() * cell);
    if (v.sum() < 0.0) v = -v;
    mode.nodal = v;
    out.push_back(std::move(mode));
  }
  return out;
}

SectionConstants section_constants(const SectionMode& chi) {
  SectionConstants c;
  if (chi.rect) {
    const Rect& r = *chi.rect;
    if (std::abs(chi.amplitude - 2.0 / std::sqrt(r.width() * r.height())) > 1e-12 * chi.amplitude) {
      throw ValidationError("section_constants: mode is not normalized");
    }
    const double k = chi.n * pi / r.height();
    c.kappa = k * k;
    // The y1 factor integrates sin^2 to (b-a)/2; the y2 factor is integrated numerically.
    const double y1_factor = chi.amplitude * chi.amplitude * r.width() / 2.0;
    const auto g = [&](double y2) {
      const double t = k * (y2 - r.c);
      return y2 * std::sin(t) * k * std::cos(t);
    };
    c.moment = y1_factor * composite_gauss_legendre(g, r.c, r.d, 8 * chi.n, 16);
    return c;
  }
  if (!chi.grid) throw ValidationError("section_constants: mode has neither closed form nor grid");
  const SectionGrid& grid = *chi.grid;
  const CellMask& mk = grid.mask();
  const double cell = mk.h1() * mk.h2();
  if (std::abs(chi.nodal.squaredNorm() * cell - 1.0) > 1e-10) {
    throw ValidationError("section_constants: mode is not normalized");
  }
  // Staggered differences along y2 over every edge touching a dof; excluded vertices are zero.
  const auto val = [&](std::size_t i, std::ptrdiff_t j) {
    if (j < 0 || j > static_cast<std::ptrdiff_t>(mk.n2())) return 0.0;
    const std::ptrdiff_t p = grid.dof(i, static_cast<std::size_t>(j));
    return p >= 0 ? chi.nodal(p) : 0.0;
  };
  for (std::size_t i = 0; i <= mk.n1(); ++i)
    for (std::size_t j = 0; j < mk.n2(); ++j) {
      const double lo = val(i, static_cast<std::ptrdiff_t>(j)), hi = val(i, static_cast<std::ptrdiff_t>(j) + 1);
      if (lo == 0.0 && hi == 0.0) continue;
      const double d = (hi - lo) / mk.h2();
      const double ymid = grid.y2(j) + 0.5 * mk.h2();
      c.kappa += d * d * cell;
      c.moment += ymid * 0.5 * (hi + lo) * d * cell;
    }
  return c;
}

}  // namespace shearguide
