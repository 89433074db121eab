#include "shearguide/assembly.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "shearguide/quadrature.hpp"

namespace shearguide {

double Fem1D::min_spacing() const {
  double h = std::numeric_limits<double>::infinity();
  for (std::size_t e = 0; e + 1 < nodes.size(); ++e) h = std::min(h, nodes[e + 1] - nodes[e]);
  return h;
}

double Fem1D::max_spacing() const {
  double h = 0.0;
  for (std::size_t e = 0; e + 1 < nodes.size(); ++e) h = std::max(h, nodes[e + 1] - nodes[e]);
  return h;
}

namespace {

// Element matrices on [x_e, x_e + h].
struct Element1D {
  std::array<std::array<double, 2>, 2> k, m, d;
};

Element1D element1d(double h) {
  Element1D e;
  e.k = {{{1.0 / h, -1.0 / h}, {-1.0 / h, 1.0 / h}}};
  e.m = {{{h / 3.0, h / 6.0}, {h / 6.0, h / 3.0}}};
  e.d = {{{-0.5, -0.5}, {0.5, 0.5}}};
  return e;
}

std::vector<std::ptrdiff_t> dof_map(const Fem1D& f) {
  std::vector<std::ptrdiff_t> map(f.nodes.size(), -1);
  for (std::size_t p = 0; p < f.dof_nodes.size(); ++p) map[f.dof_nodes[p]] = static_cast<std::ptrdiff_t>(p);
  return map;
}

Csr skew_with_signs(const Fem1D& f, bool signed_elements) {
  const auto map = dof_map(f);
  std::vector<Triplet> t;
  for (std::size_t e = 0; e + 1 < f.nodes.size(); ++e) {
    const Element1D el = element1d(f.nodes[e + 1] - f.nodes[e]);
    const double mid = 0.5 * (f.nodes[e] + f.nodes[e + 1]);
    const double s = signed_elements ? (mid > 0.0 ? 1.0 : -1.0) : 1.0;
    for (int p = 0; p < 2; ++p)
      for (int q = 0; q < 2; ++q) {
        const auto gp = map[e + static_cast<std::size_t>(p)], gq = map[e + static_cast<std::size_t>(q)];
        if (gp >= 0 && gq >= 0) t.push_back({static_cast<std::size_t>(gp), static_cast<std::size_t>(gq), s * el.d[p][q]});
      }
  }
  return Csr::from_triplets(f.dofs(), f.dofs(), std::move(t));
}

}  // namespace

Fem1D fem1d_nodes(std::vector<double> nodes, Boundary left, Boundary right) {
  if (nodes.size() < 3) throw ValidationError("fem1d: need at least 2 intervals");
  for (std::size_t e = 0; e + 1 < nodes.size(); ++e)
    if (!(nodes[e + 1] > nodes[e])) throw ValidationError("fem1d: nodes must be strictly increasing");
  Fem1D f;
  f.nodes = std::move(nodes);
  f.left = left;
  f.right = right;
  const std::size_t last = f.nodes.size() - 1;
  for (std::size_t i = 0; i <= last; ++i) {
    if (i == 0 && left == Boundary::dirichlet) continue;
    if (i == last && right == Boundary::dirichlet) continue;
    f.dof_nodes.push_back(i);
  }
  const auto map = dof_map(f);
  std::vector<Triplet> tk, tm;
  for (std::size_t e = 0; e < last; ++e) {
    const Element1D el = element1d(f.nodes[e + 1] - f.nodes[e]);
    for (int p = 0; p < 2; ++p)
      for (int q = 0; q < 2; ++q) {
        const auto gp = map[e + static_cast<std::size_t>(p)], gq = map[e + static_cast<std::size_t>(q)];
        if (gp < 0 || gq < 0) continue;
        tk.push_back({static_cast<std::size_t>(gp), static_cast<std::size_t>(gq), el.k[p][q]});
        tm.push_back({static_cast<std::size_t>(gp), static_cast<std::size_t>(gq), el.m[p][q]});
      }
  }
  f.k = Csr::from_triplets(f.dofs(), f.dofs(), std::move(tk));
  f.m = Csr::from_triplets(f.dofs(), f.dofs(), std::move(tm));
  f.d = skew_with_signs(f, false);
  return f;
}

Fem1D fem1d(std::size_t n, double length, Boundary left, Boundary right) {
  if (n < 2) throw ValidationError("fem1d: need at least 2 intervals");
  if (!(length > 0.0)) throw ValidationError("fem1d: length must be positive");
  std::vector<double> nodes(n + 1);
  for (std::size_t i = 0; i <= n; ++i) nodes[i] = length * static_cast<double>(i) / static_cast<double>(n);
  return fem1d_nodes(std::move(nodes), left, right);
}

Csr signed_skew(const Fem1D& f) { return skew_with_signs(f, true); }

std::vector<double> x_nodes(double length, std::size_t cells, const XGrading& grading, int bisections) {
  if (!(length > 0.0)) throw ValidationError("x_nodes: length must be positive");
  if (cells < 2) throw ValidationError("x_nodes: need at least 2 cells");
  if (bisections < 0) throw ValidationError("x_nodes: bisections must be non-negative");
  std::vector<double> base;
  if (grading.near_length <= 0.0) {
    for (std::size_t i = 0; i <= cells; ++i) base.push_back(length * static_cast<double>(i) / static_cast<double>(cells));
  } else {
    if (!(grading.ratio >= 1.0) || !(grading.max_factor >= 1.0)) throw ValidationError("x_nodes: invalid grading");
    const double h0 = grading.near_length / static_cast<double>(cells);
    base.push_back(0.0);
    for (std::size_t i = 1; i <= cells && base.back() < length; ++i) base.push_back(h0 * static_cast<double>(i));
    double h = h0;
    while (base.back() < length * (1.0 - 1e-12)) {
      h = std::min(h * grading.ratio, grading.max_factor * h0);
      base.push_back(base.back() + h);
    }
  }
  std::vector<double> nodes = base;
  for (int b = 0; b < bisections; ++b) {
    std::vector<double> finer;
    finer.reserve(2 * nodes.size());
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
      finer.push_back(nodes[i]);
      finer.push_back(0.5 * (nodes[i] + nodes[i + 1]));
    }
    finer.push_back(nodes.back());
    nodes = std::move(finer);
  }
  return nodes;
}

std::string to_string(FormMode m) {
  switch (m) {
    case FormMode::half_dn: return "half";
    case FormMode::full_sign: return "full";
    case FormMode::reduced2d: return "reduced";
    case FormMode::prism: return "prism";
    case FormMode::straight: return "straight";
  }
  return "unknown";
}

FormMode form_mode_from_string(const std::string& s) {
  if (s == "half" || s == "half_dn") return FormMode::half_dn;
  if (s == "full" || s == "full_sign") return FormMode::full_sign;
  if (s == "reduced" || s == "reduced2d") return FormMode::reduced2d;
  if (s == "prism") return FormMode::prism;
  if (s == "straight") return FormMode::straight;
  throw ValidationError("unknown mode '" + s + "' (expected half, full, reduced)");
}

LinearOperator ShearForm::a_op() const {
  LinearOperator op;
  op.n = a->size();
  auto k = a;
  op.apply = [k](std::span<const double> x, std::span<double> y) { k->apply(x, y); };
  op.diagonal = [k]() { return k->diagonal(); };
  return op;
}

LinearOperator ShearForm::m_op() const {
  LinearOperator op;
  op.n = m->size();
  auto k = m;
  op.apply = [k](std::span<const double> x, std::span<double> y) { k->apply(x, y); };
  op.diagonal = [k]() { return k->diagonal(); };
  return op;
}

MaskFem mask_fem(const CellMask& mask) {
  MaskFem f;
  f.grid = std::make_shared<const SectionGrid>(mask);
  const SectionGrid& g = *f.grid;
  const Element1D e1 = element1d(mask.h1()), e2 = element1d(mask.h2());
  std::vector<Triplet> tm, tk1, tk2, td;
  for (std::size_t i = 0; i < mask.n1(); ++i)
    for (std::size_t j = 0; j < mask.n2(); ++j) {
      if (!mask.inside(i, j)) continue;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
          const auto p = g.dof(i + static_cast<std::size_t>(a), j + static_cast<std::size_t>(b));
          if (p < 0) continue;
          for (int a2 = 0; a2 < 2; ++a2)
            for (int b2 = 0; b2 < 2; ++b2) {
              const auto q = g.dof(i + static_cast<std::size_t>(a2), j + static_cast<std::size_t>(b2));
              if (q < 0) continue;
              const auto r = static_cast<std::size_t>(p), c = static_cast<std::size_t>(q);
              tm.push_back({r, c, e1.m[a][a2] * e2.m[b][b2]});
              tk1.push_back({r, c, e1.k[a][a2] * e2.m[b][b2]});
              tk2.push_back({r, c, e1.m[a][a2] * e2.k[b][b2]});
              td.push_back({r, c, e1.m[a][a2] * e2.d[b][b2]});
            }
        }
    }
  const std::size_t n = g.dofs();
  f.m = Csr::from_triplets(n, n, std::move(tm));
  f.k1 = Csr::from_triplets(n, n, std::move(tk1));
  f.k2 = Csr::from_triplets(n, n, std::move(tk2));
  f.d2 = Csr::from_triplets(n, n, std::move(td));
  return f;
}

namespace {

void check_grid(const GridSpec& grid, bool uses_n1) {
  if (grid.nx < 8 || grid.n2 < 8 || (uses_n1 && grid.n1 < 8)) {
    throw ValidationError("grid too coarse: every size must be at least 8");
  }
}

std::vector<double> mirrored(const std::vector<double>& half) {
  std::vector<double> full;
  full.reserve(2 * half.size() - 1);
  for (std::size_t i = half.size() - 1; i > 0; --i) full.push_back(-half[i]);
  for (double x : half) full.push_back(x);
  return full;
}

struct XFactors {
  Fem1D fem;
  Csr skew;
};

XFactors x_factors(const std::vector<double>& half_nodes, FormMode mode) {
  if (half_nodes.front() != 0.0) throw ValidationError("x grid must start at 0");
  XFactors x;
  if (mode == FormMode::full_sign) {
    x.fem = fem1d_nodes(mirrored(half_nodes), Boundary::dirichlet, Boundary::dirichlet);
    x.skew = signed_skew(x.fem);
  } else {
    x.fem = fem1d_nodes(half_nodes, Boundary::neumann, Boundary::dirichlet);
    x.skew = x.fem.d;
  }
  return x;
}

std::vector<double> dof_coords(const Fem1D& f) {
  std::vector<double> c;
  for (std::size_t n : f.dof_nodes) c.push_back(f.nodes[n]);
  return c;
}

}  // namespace

ShearForm assemble_waveguide_nodes(const ShearParam& beta, const CrossSectionSpec& section,
                                   const std::vector<double>& half_nodes, const GridSpec& grid, FormMode mode) {
  if (mode == FormMode::reduced2d || mode == FormMode::prism) {
    throw ValidationError("assemble_waveguide: mode must be half, full or straight");
  }
  const bool rect = is_rect(section);
  check_grid(grid, rect);
  const double b = mode == FormMode::straight ? 0.0 : beta.beta();
  const double s = 1.0 + b * b;

  ShearForm form;
  form.mode = mode;
  form.beta = b;
  form.grid = grid;
  form.length = half_nodes.back();
  if (!(form.length > section_diameter(section))) {
    form.warnings.push_back("truncation length does not exceed the section diameter");
  }
  const XFactors xf = x_factors(half_nodes, mode);
  form.axis0_coords = dof_coords(xf.fem);
  const Csr skew_t = xf.skew.transposed();

  if (rect) {
    const Rect& r = std::get<Rect>(section);
    const Fem1D f1 = fem1d(grid.n1, r.width(), Boundary::dirichlet, Boundary::dirichlet);
    const Fem1D f2 = fem1d(grid.n2, r.height(), Boundary::dirichlet, Boundary::dirichlet);
    form.dims = {xf.fem.dofs(), f1.dofs(), f2.dofs()};
    auto a = std::make_shared<KronOperator>(form.dims);
    auto m = std::make_shared<KronOperator>(form.dims);
    const auto kx = a->add_factor(xf.fem.k), mx = a->add_factor(xf.fem.m), dx = a->add_factor(xf.skew),
               dxt = a->add_factor(skew_t);
    const auto k1 = a->add_factor(f1.k), m1 = a->add_factor(f1.m);
    const auto k2 = a->add_factor(f2.k), m2 = a->add_factor(f2.m), d2 = a->add_factor(f2.d),
               d2t = a->add_factor(f2.d.transposed());
    a->add_term(1.0, {kx, m1, m2});
    a->add_term(1.0, {mx, k1, m2});
    a->add_term(s, {mx, m1, k2});
    if (b != 0.0) {
      a->add_term(-b, {dx, m1, d2t});
      a->add_term(-b, {dxt, m1, d2});
    }
    const auto mmx = m->add_factor(xf.fem.m), mm1 = m->add_factor(f1.m), mm2 = m->add_factor(f2.m);
    m->add_term(1.0, {mmx, mm1, mm2});
    form.a = a;
    form.m = m;
    form.split.k0 = xf.fem.k;
    form.split.m0 = xf.fem.m;
    form.split.tk = {f1.k, f2.k.scaled(s)};
    form.split.tm = {f1.m, f2.m};
    form.split.exact = b == 0.0;
    return form;
  }

  const CellMask fine = section_mask_at(section, std::max(grid.n1, grid.n2));
  const MaskFem sf = mask_fem(fine);
  form.section_grid = sf.grid;
  form.dims = {xf.fem.dofs(), sf.grid->dofs()};
  auto a = std::make_shared<KronOperator>(form.dims);
  auto m = std::make_shared<KronOperator>(form.dims);
  const Csr ks = add(sf.k1, sf.k2, 1.0, s);
  const auto kx = a->add_factor(xf.fem.k), mx = a->add_factor(xf.fem.m), dx = a->add_factor(xf.skew),
             dxt = a->add_factor(skew_t);
  const auto ms = a->add_factor(sf.m), kss = a->add_factor(ks), ds = a->add_factor(sf.d2),
             dst = a->add_factor(sf.d2.transposed());
  a->add_term(1.0, {kx, ms});
  a->add_term(1.0, {mx, kss});
  if (b != 0.0) {
    a->add_term(-b, {dx, dst});
    a->add_term(-b, {dxt, ds});
  }
  const auto mmx = m->add_factor(xf.fem.m), mms = m->add_factor(sf.m);
  m->add_term(1.0, {mmx, mms});
  form.a = a;
  form.m = m;
  form.split.k0 = xf.fem.k;
  form.split.m0 = xf.fem.m;
  form.split.tk = {ks};
  form.split.tm = {sf.m};
  form.split.exact = b == 0.0;
  return form;
}

ShearForm assemble_waveguide(const ShearParam& beta, const CrossSectionSpec& section, double length,
                             const GridSpec& grid, FormMode mode, int bisections) {
  if (grid.nx < 8) throw ValidationError("grid too coarse: every size must be at least 8");
  return assemble_waveguide_nodes(beta, section, x_nodes(length, grid.nx, grid.grading, bisections), grid, mode);
}

ShearForm assemble_reduced2d_nodes(const ShearParam& beta, const Rect& rect, const std::vector<double>& half_nodes,
                                   const GridSpec& grid) {
  check_grid(grid, false);
  const double b = beta.beta();
  const double s = 1.0 + b * b;
  ShearForm form;
  form.mode = FormMode::reduced2d;
  form.beta = b;
  form.grid = grid;
  form.length = half_nodes.back();
  if (!(form.length > rect.height())) form.warnings.push_back("truncation length does not exceed the strip width");
  const XFactors xf = x_factors(half_nodes, FormMode::half_dn);
  form.axis0_coords = dof_coords(xf.fem);
  const Fem1D f2 = fem1d(grid.n2, rect.height(), Boundary::dirichlet, Boundary::dirichlet);
  form.dims = {xf.fem.dofs(), f2.dofs()};
  auto a = std::make_shared<KronOperator>(form.dims);
  auto m = std::make_shared<KronOperator>(form.dims);
  const auto kx = a->add_factor(xf.fem.k), mx = a->add_factor(xf.fem.m), dx = a->add_factor(xf.skew),
             dxt = a->add_factor(xf.skew.transposed());
  const auto k2 = a->add_factor(f2.k), m2 = a->add_factor(f2.m), d2 = a->add_factor(f2.d),
             d2t = a->add_factor(f2.d.transposed());
  a->add_term(1.0, {kx, m2});
  a->add_term(s, {mx, k2});
  if (b != 0.0) {
    a->add_term(-b, {dx, d2t});
    a->add_term(-b, {dxt, d2});
  }
  const auto mmx = m->add_factor(xf.fem.m), mm2 = m->add_factor(f2.m);
  m->add_term(1.0, {mmx, mm2});
  form.a = a;
  form.m = m;
  form.split.k0 = xf.fem.k;
  form.split.m0 = xf.fem.m;
  form.split.tk = {f2.k.scaled(s)};
  form.split.tm = {f2.m};
  form.split.exact = b == 0.0;
  return form;
}

ShearForm assemble_reduced2d(const ShearParam& beta, const Rect& rect, double length, const GridSpec& grid,
                             int bisections) {
  if (grid.nx < 8) throw ValidationError("grid too coarse: every size must be at least 8");
  return assemble_reduced2d_nodes(beta, rect, x_nodes(length, grid.nx, grid.grading, bisections), grid);
}

namespace {

struct RefIntegrals {
  // Local vertex l = 2a + b sits at (s, t) = (a, b) of the unit cell.
  std::array<std::array<double, 4>, 4> m{}, kss{}, ktt{};
};

RefIntegrals reference_integrals(bool lower_triangle) {
  RefIntegrals r;
  const QuadratureRule& q = gauss_legendre(4);
  for (std::size_t p = 0; p < q.nodes.size(); ++p)
    for (std::size_t o = 0; o < q.nodes.size(); ++o) {
      const double xi = 0.5 * (q.nodes[p] + 1.0), eta = 0.5 * (q.nodes[o] + 1.0);
      double s, t, w = 0.25 * q.weights[p] * q.weights[o];
      if (lower_triangle) {
        // Collapsed map of {0 < t < s < 1}; exact for the biquadratic integrands here.
        s = xi;
        t = xi * eta;
        w *= xi;
      } else {
        s = xi;
        t = eta;
      }
      std::array<double, 4> phi{}, ds{}, dt{};
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
          const double fs = a ? s : 1.0 - s, ft = b ? t : 1.0 - t;
          const double gs = a ? 1.0 : -1.0, gt = b ? 1.0 : -1.0;
          phi[static_cast<std::size_t>(2 * a + b)] = fs * ft;
          ds[static_cast<std::size_t>(2 * a + b)] = gs * ft;
          dt[static_cast<std::size_t>(2 * a + b)] = fs * gt;
        }
      for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) {
          r.m[i][j] += w * phi[i] * phi[j];
          r.kss[i][j] += w * ds[i] * ds[j];
          r.ktt[i][j] += w * dt[i] * dt[j];
        }
    }
  return r;
}

}  // namespace

TriangleFem triangle_fem(double half_width, std::size_t n) {
  if (n < 4) throw ValidationError("prism grid too coarse to represent the diagonal");
  if (!(half_width > 0.0)) throw ValidationError("prism half-width must be positive");
  TriangleFem t;
  t.n = n;
  t.half_width = half_width;
  const double h = half_width / static_cast<double>(n);
  const std::size_t v = n + 1;
  std::vector<std::ptrdiff_t> dof(v * v, -1);
  // Kept cells (i, j): j < i full, j == i lower half.
  for (std::size_t i = 0; i <= n; ++i)
    for (std::size_t j = 1; j <= std::min(i + 1, n); ++j) {
      dof[i * v + j] = static_cast<std::ptrdiff_t>(t.vertex_of_dof.size());
      t.vertex_of_dof.emplace_back(i, j);
    }
  const RefIntegrals full = reference_integrals(false), cut = reference_integrals(true);
  std::vector<Triplet> tm, tu, ty;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      const RefIntegrals& ref = j == i ? cut : full;
      for (std::size_t l = 0; l < 4; ++l) {
        const auto p = dof[(i + l / 2) * v + j + l % 2];
        if (p < 0) continue;
        for (std::size_t l2 = 0; l2 < 4; ++l2) {
          const auto q = dof[(i + l2 / 2) * v + j + l2 % 2];
          if (q < 0) continue;
          const auto r = static_cast<std::size_t>(p), c = static_cast<std::size_t>(q);
          tm.push_back({r, c, h * h * ref.m[l][l2]});
          tu.push_back({r, c, ref.kss[l][l2]});
          ty.push_back({r, c, ref.ktt[l][l2]});
        }
      }
    }
  const std::size_t nd = t.vertex_of_dof.size();
  t.m = Csr::from_triplets(nd, nd, std::move(tm));
  t.kuu = Csr::from_triplets(nd, nd, std::move(tu));
  t.kyy = Csr::from_triplets(nd, nd, std::move(ty));
  return t;
}

ShearForm assemble_prism(const ShearParam& beta, const Rect& rect, std::size_t n_triangle, std::size_t n_depth) {
  const double b = beta.beta();
  if (!(b > 0.0)) throw ValidationError("assemble_prism: beta must be positive");
  if (n_depth < 2) throw ValidationError("assemble_prism: depth grid needs at least 2 intervals");
  const PrismRegion region = prism_region(rect);
  auto tri = std::make_shared<const TriangleFem>(triangle_fem(region.half_width, n_triangle));
  const Fem1D f1 = fem1d(n_depth, region.depth, Boundary::dirichlet, Boundary::dirichlet);
  const double cx = (1.0 + b * b) / (2.0 * b * b), cy = (1.0 + b * b) / 2.0;
  const Csr kt = add(tri->kuu, tri->kyy, cx, cy);

  ShearForm form;
  form.mode = FormMode::prism;
  form.beta = b;
  form.length = region.depth;
  form.grid = GridSpec{n_triangle, n_depth, n_triangle, {}};
  form.triangle = tri;
  form.axis0_coords.clear();
  for (std::size_t nidx : f1.dof_nodes) form.axis0_coords.push_back(f1.nodes[nidx]);
  form.dims = {f1.dofs(), tri->vertex_of_dof.size()};
  auto a = std::make_shared<KronOperator>(form.dims);
  auto m = std::make_shared<KronOperator>(form.dims);
  const auto k1 = a->add_factor(f1.k), m1 = a->add_factor(f1.m), mt = a->add_factor(tri->m), ktf = a->add_factor(kt);
  a->add_term(1.0, {k1, mt});
  a->add_term(1.0, {m1, ktf});
  const auto mm1 = m->add_factor(f1.m), mmt = m->add_factor(tri->m);
  m->add_term(1.0, {mm1, mmt});
  form.a = a;
  form.m = m;
  form.split.k0 = f1.k;
  form.split.m0 = f1.m;
  form.split.tk = {kt};
  form.split.tm = {tri->m};
  form.split.exact = true;
  return form;
}

void write_triplets(std::ostream& out, const Csr& a) {
  char buf[96];
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t k = a.ptr[i]; k < a.ptr[i + 1]; ++k) {
      std::snprintf(buf, sizeof buf, "%zu %zu %.17g\n", i, a.idx[k], a.val[k]);
      out << buf;
    }
}

}  // namespace shearguide
