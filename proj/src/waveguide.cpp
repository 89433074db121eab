#include "shearguide/waveguide.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "shearguide/cross_section.hpp"
#include "shearguide/thresholds.hpp"

namespace shearguide {

namespace {

constexpr double pi = std::numbers::pi;
// Relative slack for monotonicity assertions; covers the eigensolver tolerance.
constexpr double monotone_slack = 1e-9;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Threshold {
  double value = 0, error = 0;
};

Threshold section_threshold(const ShearParam& beta, const CrossSectionSpec& section) {
  if (is_rect(section)) return {ess_threshold(beta, section), 0.0};
  // Corner singularities spoil h^2 extrapolation, so the finer value is kept with the full
  // difference as its error.
  const double coarse = ess_threshold(beta, section, 128), fine = ess_threshold(beta, section, 256);
  return {fine, std::abs(coarse - fine)};
}

GridSpec level_grid(const GridSpec& g, int level) {
  GridSpec out = g;
  out.n1 = g.n1 << level;
  out.n2 = g.n2 << level;
  return out;
}

std::vector<double> truncate_nodes(const std::vector<double>& nodes, double length) {
  std::size_t i = 0;
  while (i + 1 < nodes.size() && nodes[i] < length * (1.0 - 1e-12)) ++i;
  if (i < 2) throw ValidationError("truncated x grid has fewer than 2 cells");
  return {nodes.begin(), nodes.begin() + static_cast<std::ptrdiff_t>(i + 1)};
}

ShearForm build_form(const WaveguideSpec& spec, const DiscretizationSpec& disc, const std::vector<double>& nodes,
                     int level) {
  const GridSpec g = level_grid(disc.grid, level);
  if (disc.mode == FormMode::reduced2d) {
    const auto* r = std::get_if<Rect>(&spec.section);
    if (!r) throw ValidationError("reduced mode requires a rectangular section");
    return assemble_reduced2d_nodes(spec.beta, *r, nodes, g);
  }
  return assemble_waveguide_nodes(spec.beta, spec.section, nodes, g, disc.mode);
}

struct RungJob {
  std::string kind;
  int level = 0;
  std::vector<double> nodes;
};

RungResult solve_rung(const WaveguideSpec& spec, const DiscretizationSpec& disc, const RungJob& job, int k,
                      const double* count_threshold, double shift, const EigOptions& opts,
                      std::vector<std::string>& warnings) {
  const auto t0 = Clock::now();
  const ShearForm form = build_form(spec, disc, job.nodes, job.level);
  for (const auto& w : form.warnings)
    if (std::find(warnings.begin(), warnings.end(), w) == warnings.end()) warnings.push_back(w);
  const auto pre = make_preconditioner(form, disc.preconditioner);
  EigOptions o = opts;
  o.k = std::clamp(k, 1, static_cast<int>(form.size()));
  EigResult eig;
  if (count_threshold) {
    eig = count_below(form.a_op(), form.m_op(), *count_threshold - shift, 0.0, o, pre.get()).eig;
  } else {
    eig = smallest_eigenpairs(form.a_op(), form.m_op(), o, pre.get());
  }
  RungResult r;
  r.kind = job.kind;
  r.rung = job.level;
  r.length = job.nodes.back();
  r.nx = job.nodes.size() - 1;
  r.n1 = disc.mode == FormMode::reduced2d ? 0 : form.grid.n1;
  r.n2 = form.grid.n2;
  r.dofs = form.size();
  for (double lam : eig.eigenvalues) r.eigenvalues.push_back(lam + shift);
  r.residuals = eig.residuals;
  r.converged = eig.all_converged();
  r.iterations = eig.iterations;
  r.seconds = seconds_since(t0);
  return r;
}

std::vector<double> richardson(const RungResult& coarse, const RungResult& fine) {
  const std::size_t n = std::min(coarse.eigenvalues.size(), fine.eigenvalues.size());
  std::vector<double> e(n);
  for (std::size_t j = 0; j < n; ++j) e[j] = (4.0 * fine.eigenvalues[j] - coarse.eigenvalues[j]) / 3.0;
  return e;
}

// Eigenvalues of the 3D problem represented by value (ground y1 mode) plus higher y1 modes in reduced mode.
struct Counter {
  double threshold = 0;
  double reduced_shift = 0;  // 0 outside reduced mode

  std::vector<double> offsets() const {
    std::vector<double> o{0.0};
    if (reduced_shift > 0.0)
      for (int k = 2; k <= 64; ++k) o.push_back(reduced_shift * (k * k - 1.0));
    return o;
  }
  int count(const std::vector<double>& values, const std::vector<double>& band) const {
    int c = 0;
    for (std::size_t j = 0; j < values.size(); ++j)
      for (double off : offsets()) c += values[j] + off < threshold - band[j];
    return c;
  }
  bool in_band(const std::vector<double>& values, const std::vector<double>& band) const {
    for (std::size_t j = 0; j < values.size(); ++j)
      for (double off : offsets())
        if (std::abs(values[j] + off - threshold) <= band[j]) return true;
    return false;
  }
};

void check_monotone(const RungResult& upper, const RungResult& lower, bool& ok) {
  const std::size_t n = std::min(upper.eigenvalues.size(), lower.eigenvalues.size());
  for (std::size_t j = 0; j < n; ++j)
    if (lower.eigenvalues[j] > upper.eigenvalues[j] + monotone_slack * std::abs(upper.eigenvalues[j])) ok = false;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

SpectrumReport run_ladder(const WaveguideSpec& spec, const DiscretizationSpec& disc, const EigOptions& opts,
                          double length, const Threshold& thr, double shift) {
  SpectrumReport rep;
  rep.beta = spec.beta.beta();
  rep.section = describe(spec.section);
  rep.mode = disc.mode;
  rep.threshold = thr.value;
  rep.threshold_error = thr.error;
  rep.reduced_shift = shift;
  rep.length = length;
  const Counter counter{thr.value, disc.mode == FormMode::reduced2d ? shift : 0.0};

  const int levels = disc.ladder.mesh_rungs;
  std::vector<std::vector<double>> nodes(static_cast<std::size_t>(levels));
  for (int r = 0; r < levels; ++r)
    nodes[static_cast<std::size_t>(r)] = x_nodes(length, disc.grid.nx, disc.grid.grading, r);
  rep.length = nodes.back().back();

  // The finest rung fixes how many eigenvalues every other solve tracks.
  std::vector<RungResult> mesh(static_cast<std::size_t>(levels));
  mesh.back() = solve_rung(spec, disc, {"mesh", levels - 1, nodes.back()}, opts.k, &thr.value, shift, opts,
                           rep.warnings);
  const int k = std::max(opts.k, static_cast<int>(mesh.back().eigenvalues.size()));
  for (int r = 0; r + 1 < levels; ++r)
    mesh[static_cast<std::size_t>(r)] =
        solve_rung(spec, disc, {"mesh", r, nodes[static_cast<std::size_t>(r)]}, k, nullptr, shift, opts, rep.warnings);
  rep.rungs = mesh;

  // Extrapolation at the final length.
  const std::size_t nk = mesh.back().eigenvalues.size();
  if (levels >= 2) {
    rep.extrapolated = richardson(mesh[mesh.size() - 2], mesh.back());
    rep.extrapolation_order = 2;
    const std::vector<double> earlier = levels >= 3 ? richardson(mesh[mesh.size() - 3], mesh[mesh.size() - 2])
                                                    : std::vector<double>{};
    for (std::size_t j = 0; j < rep.extrapolated.size(); ++j) {
      const double err = j < earlier.size()
                             ? std::abs(rep.extrapolated[j] - earlier[j])
                             : std::abs(mesh.back().eigenvalues[j] - mesh[mesh.size() - 2].eigenvalues[j]) / 3.0;
      rep.extrapolation_error.push_back(err);
    }
  } else {
    rep.extrapolated = mesh.back().eigenvalues;
    rep.extrapolation_order = 0;
    rep.extrapolation_error.assign(nk, 0.0);
  }
  for (double err : rep.extrapolation_error)
    rep.band.push_back(std::max({1e-6 * thr.value, err, thr.error}));

  // Per-rung counts: raw on the coarsest, extrapolated from consecutive pairs above it.
  for (int r = 0; r < levels; ++r) {
    if (r == 0) {
      const std::vector<double> zero(mesh[0].eigenvalues.size(), 0.0);
      rep.mesh_counts.push_back(counter.count(mesh[0].eigenvalues, zero));
    } else {
      const auto e = richardson(mesh[static_cast<std::size_t>(r) - 1], mesh[static_cast<std::size_t>(r)]);
      std::vector<double> band(e.size());
      for (std::size_t j = 0; j < e.size(); ++j) band[j] = j < rep.band.size() ? rep.band[j] : rep.band.back();
      rep.mesh_counts.push_back(counter.count(e, band));
    }
  }
  for (int r = 0; r + 1 < levels; ++r)
    check_monotone(mesh[static_cast<std::size_t>(r)], mesh[static_cast<std::size_t>(r) + 1], rep.monotone_refinement);

  // Length ladder on the last two mesh rungs.
  std::vector<RungResult> prev_fine;
  for (int d = disc.ladder.length_halvings; d >= 1; --d) {
    const double ld = length / std::pow(2.0, d);
    LengthLevel lvl;
    RungResult fine, coarse;
    fine = solve_rung(spec, disc, {"length", levels - 1, truncate_nodes(nodes.back(), ld)}, k, nullptr, shift, opts,
                      rep.warnings);
    lvl.length = fine.length;
    if (levels >= 2) {
      coarse = solve_rung(spec, disc, {"length", levels - 2, truncate_nodes(nodes[nodes.size() - 2], ld)}, k,
                          nullptr, shift, opts, rep.warnings);
      lvl.extrapolated = richardson(coarse, fine);
      rep.rungs.push_back(coarse);
    } else {
      lvl.extrapolated = fine.eigenvalues;
    }
    rep.rungs.push_back(fine);
    std::vector<double> band(lvl.extrapolated.size());
    for (std::size_t j = 0; j < band.size(); ++j) band[j] = j < rep.band.size() ? rep.band[j] : rep.band.back();
    lvl.count = counter.count(lvl.extrapolated, band);
    lvl.in_band = counter.in_band(lvl.extrapolated, band);
    if (!prev_fine.empty()) check_monotone(prev_fine.back(), fine, rep.monotone_length);
    prev_fine = {fine};
    rep.length_levels.push_back(lvl);
  }
  if (!prev_fine.empty()) check_monotone(prev_fine.back(), mesh.back(), rep.monotone_length);
  LengthLevel final_level;
  final_level.length = rep.length;
  final_level.extrapolated = rep.extrapolated;
  final_level.count = counter.count(rep.extrapolated, rep.band);
  final_level.in_band = counter.in_band(rep.extrapolated, rep.band);
  rep.length_levels.push_back(final_level);

  rep.count = final_level.count;
  rep.boundary = final_level.in_band;
  const bool mesh_stable = levels < 2 || rep.mesh_counts[rep.mesh_counts.size() - 1] == rep.mesh_counts[rep.mesh_counts.size() - 2];
  const auto& ll = rep.length_levels;
  const bool length_stable = ll.size() < 2 || ll[ll.size() - 1].count == ll[ll.size() - 2].count;
  rep.count_stable = mesh_stable && length_stable;

  if (!rep.extrapolated.empty()) {
    rep.margin = thr.value - rep.extrapolated[0];
    if (ll.size() >= 2 && !ll[ll.size() - 2].extrapolated.empty()) {
      const double m_half = thr.value - ll[ll.size() - 2].extrapolated[0];
      rep.margin_change = std::abs(rep.margin - m_half) / std::max(std::abs(rep.margin), 1e-300);
    }
  }

  if (!mesh_stable) rep.flags.push_back("count_unstable_mesh");
  if (!length_stable) rep.flags.push_back("count_unstable_length");
  for (std::size_t i = 0; i + 1 < ll.size(); ++i)
    if (ll[i].in_band) rep.flags.push_back("band_entry_at_L=" + fmt(ll[i].length));
  if (rep.boundary) rep.flags.push_back("eigenvalue_in_band");
  if (!rep.monotone_refinement) rep.flags.push_back("refinement_monotonicity_violated");
  if (!rep.monotone_length) rep.flags.push_back("length_monotonicity_violated");
  bool converged = true;
  for (const auto& r : rep.rungs) converged = converged && r.converged;
  if (!converged) rep.flags.push_back("solver_not_converged");

  if (!converged) rep.status = "not_converged";
  else if (rep.boundary || !rep.count_stable) rep.status = "inconclusive";
  else rep.status = "ok";
  return rep;
}

double adaptive_length(const WaveguideSpec& spec, const DiscretizationSpec& disc, const EigOptions& opts,
                       const Threshold& thr, double shift, double diam, std::vector<std::string>& warnings) {
  const double l0 = 20.0 * diam;
  EigOptions o = opts;
  o.k = 1;
  const RungResult probe =
      solve_rung(spec, disc, {"probe", 0, x_nodes(l0, disc.grid.nx, disc.grid.grading, 0)}, 1, nullptr, shift, o, warnings);
  double length = l0;
  const double gap = thr.value - probe.eigenvalues.front();
  if (gap > 0.0) length = std::max(l0, 10.0 / std::sqrt(gap));
  const double cap = 400.0 * diam;
  if (length > cap) {
    warnings.push_back("adaptive length capped at " + fmt(cap));
    length = cap;
  }
  return length;
}

}  // namespace

void DiscretizationSpec::validate() const {
  if (grid.nx < 8 || grid.n2 < 8 || (mode != FormMode::reduced2d && grid.n1 < 8)) {
    throw ValidationError("grid too coarse: every size must be at least 8");
  }
  if (ladder.mesh_rungs < 1) throw ValidationError("ladder needs at least one mesh rung");
  if (ladder.length_halvings < 0 || ladder.max_length_growth < 0) throw ValidationError("ladder counts must be >= 0");
  if (length < 0.0 || !std::isfinite(length)) throw ValidationError("truncation length must be positive (0 = adaptive)");
  if (mode == FormMode::prism) throw ValidationError("prism mode is not a waveguide discretization");
}

std::string describe(const CrossSectionSpec& section) {
  if (const auto* r = std::get_if<Rect>(&section)) {
    return "rect " + fmt(r->a) + "," + fmt(r->b) + "," + fmt(r->c) + "," + fmt(r->d);
  }
  const auto& m = std::get<CellMask>(section);
  return "mask " + std::to_string(m.n1()) + "x" + std::to_string(m.n2()) + " h=" + fmt(m.h1()) + "," + fmt(m.h2());
}

SpectrumReport compute_spectrum(const WaveguideSpec& spec, const DiscretizationSpec& disc, const EigOptions& opts) {
  disc.validate();
  const auto t0 = Clock::now();
  const bool straight = disc.mode == FormMode::straight;
  if (straight != spec.beta.straight()) {
    throw ValidationError("straight mode and the straight beta flag must be used together");
  }
  const Threshold thr = section_threshold(spec.beta, spec.section);
  double shift = 0.0, diam = section_diameter(spec.section);
  if (disc.mode == FormMode::reduced2d) {
    const auto* r = std::get_if<Rect>(&spec.section);
    if (!r) throw ValidationError("reduced mode requires a rectangular section");
    shift = pi * pi / (r->width() * r->width());
    diam = r->height();
  }

  DiscretizationSpec d = disc;
  std::vector<std::string> warnings;
  double length = disc.length;
  if (length == 0.0) {
    if (d.grid.grading.near_length <= 0.0) d.grid.grading.near_length = 2.0 * diam;
    length = adaptive_length(spec, d, opts, thr, shift, diam, warnings);
  }

  SpectrumReport rep;
  bool resized = disc.length != 0.0;
  for (int growth = 0;; ++growth) {
    rep = run_ladder(spec, d, opts, length, thr, shift);
    // The coarse probe overstates the gap; redo once if the extrapolated margin asks for more length.
    if (!resized && rep.margin > 0.0) {
      resized = true;
      const double wanted = std::min(10.0 / std::sqrt(rep.margin), 400.0 * diam);
      if (wanted > 1.05 * length) {
        warnings.push_back("adaptive length raised to " + fmt(wanted) + " from the extrapolated margin");
        length = wanted;
        --growth;
        continue;
      }
    }
    const auto& ll = rep.length_levels;
    const bool length_stable = ll.size() < 2 || ll[ll.size() - 1].count == ll[ll.size() - 2].count;
    if (length_stable || growth >= d.ladder.max_length_growth || rep.status == "not_converged") break;
    warnings.push_back("count changed between L/2 and L; doubling L to " + fmt(2.0 * length));
    length *= 2.0;
  }
  rep.warnings.insert(rep.warnings.begin(), warnings.begin(), warnings.end());
  rep.seconds = seconds_since(t0);
  return rep;
}

CountCertificate count_discrete(const WaveguideSpec& spec, const DiscretizationSpec& disc, const EigOptions& opts) {
  CountCertificate c;
  c.report = compute_spectrum(spec, disc, opts);
  c.count = c.report.count;
  c.stable = c.report.count_stable && !c.report.boundary;
  c.status = c.report.status;
  return c;
}

namespace {

Eigen::VectorXd apply_op(const KronOperator& op, const Eigen::VectorXd& x) {
  Eigen::VectorXd y(x.size());
  op.apply({x.data(), static_cast<std::size_t>(x.size())}, {y.data(), static_cast<std::size_t>(y.size())});
  return y;
}

EigResult solve_form(const ShearForm& form, const DiscretizationSpec& disc, const EigOptions& opts, int k) {
  const auto pre = make_preconditioner(form, disc.preconditioner);
  EigOptions o = opts;
  o.k = std::clamp(k, 1, static_cast<int>(form.size()));
  return smallest_eigenpairs(form.a_op(), form.m_op(), o, pre.get());
}

}  // namespace

SymmetryReport symmetry_check(const WaveguideSpec& spec, const DiscretizationSpec& disc, const EigOptions& opts,
                              int count) {
  disc.validate();
  if (!(disc.length > 0.0)) throw ValidationError("symmetry_check needs an explicit truncation length");
  if (count < 1) throw ValidationError("symmetry_check: count must be positive");
  SymmetryReport rep;
  rep.beta = spec.beta.beta();
  const auto nodes = x_nodes(disc.length, disc.grid.nx, disc.grid.grading, 0);
  const ShearForm half = assemble_waveguide_nodes(spec.beta, spec.section, nodes, disc.grid, FormMode::half_dn);
  const ShearForm full = assemble_waveguide_nodes(spec.beta, spec.section, nodes, disc.grid, FormMode::full_sign);
  const EigResult rh = solve_form(half, disc, opts, count);
  rep.half = rh.eigenvalues;
  rep.converged = rh.all_converged();

  const std::size_t nfx = full.dims[0], t = full.size() / nfx;
  int k = 2 * count + 2;
  EigResult rf;
  for (int attempt = 0; attempt < 4; ++attempt) {
    rf = solve_form(full, disc, opts, k);
    rep.odd_fraction.clear();
    rep.full_even.clear();
    for (Eigen::Index c = 0; c < rf.vectors.cols(); ++c) {
      const Eigen::VectorXd v = rf.vectors.col(c);
      Eigen::VectorXd mirrored(v.size());
      for (std::size_t ix = 0; ix < nfx; ++ix)
        mirrored.segment(static_cast<Eigen::Index>(ix * t), static_cast<Eigen::Index>(t)) =
            v.segment(static_cast<Eigen::Index>((nfx - 1 - ix) * t), static_cast<Eigen::Index>(t));
      const Eigen::VectorXd odd = 0.5 * (v - mirrored);
      const double frac = odd.dot(apply_op(*full.m, odd)) / v.dot(apply_op(*full.m, v));
      rep.odd_fraction.push_back(frac);
      if (frac < 0.5) rep.full_even.push_back(rf.eigenvalues[static_cast<std::size_t>(c)]);
    }
    if (static_cast<int>(rep.full_even.size()) >= count || k >= static_cast<int>(full.size())) break;
    k *= 2;
  }
  rep.full = rf.eigenvalues;
  rep.converged = rep.converged && rf.all_converged();
  rep.ground_odd_fraction = rep.odd_fraction.empty() ? 1.0 : rep.odd_fraction.front();
  const std::size_t n = std::min(rep.half.size(), rep.full_even.size());
  for (std::size_t j = 0; j < n; ++j) {
    const double gap = std::abs(rep.full_even[j] - rep.half[j]) / std::abs(rep.half[j]);
    rep.relative_gap.push_back(gap);
    rep.max_relative_gap = std::max(rep.max_relative_gap, gap);
  }
  if (static_cast<int>(n) < count) rep.max_relative_gap = std::numeric_limits<double>::infinity();
  return rep;
}

SeparationReport separation_check(const WaveguideSpec& spec, const DiscretizationSpec& disc, const EigOptions& opts,
                                  int count) {
  disc.validate();
  const auto* rect = std::get_if<Rect>(&spec.section);
  if (!rect) throw ValidationError("separation_check requires a rectangular section");
  if (!(disc.length > 0.0)) throw ValidationError("separation_check needs an explicit truncation length");
  SeparationReport rep;
  rep.beta = spec.beta.beta();
  const auto nodes = x_nodes(disc.length, disc.grid.nx, disc.grid.grading, 0);
  const ShearForm f3 = assemble_waveguide_nodes(spec.beta, spec.section, nodes, disc.grid, FormMode::half_dn);
  const ShearForm f2 = assemble_reduced2d_nodes(spec.beta, *rect, nodes, disc.grid);
  const Fem1D f1 = fem1d(disc.grid.n1, rect->width(), Boundary::dirichlet, Boundary::dirichlet);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es1(f1.k.to_dense(), f1.m.to_dense());
  for (Eigen::Index i = 0; i < es1.eigenvalues().size(); ++i) rep.mu_y1.push_back(es1.eigenvalues()(i));

  EigOptions o = opts;
  o.tol = std::min(opts.tol, 1e-10);
  const EigResult r3 = solve_form(f3, disc, o, count);
  const EigResult r2 = solve_form(f2, disc, o, count);
  rep.lambda3d = r3.eigenvalues;
  rep.lambda2d = r2.eigenvalues;
  rep.converged = r3.all_converged() && r2.all_converged();

  for (double l3 : rep.lambda3d) {
    double best = std::numeric_limits<double>::infinity();
    for (double mu : rep.mu_y1)
      for (double l2 : rep.lambda2d) best = std::min(best, std::abs(l3 - mu - l2) / std::abs(l3));
    rep.match_residual.push_back(best);
    rep.max_residual = std::max(rep.max_residual, best);
  }
  rep.ground_residual =
      std::abs(rep.lambda3d[0] - rep.mu_y1[0] - rep.lambda2d[0]) / std::abs(rep.lambda3d[0]);

  // phi_2 (x) psi_1 on axes (x, y1, y2): psi is (x, y2) with y2 fastest.
  const std::size_t nx = f2.dims[0], n2 = f2.dims[1], n1 = f1.dofs();
  const Eigen::VectorXd phi = es1.eigenvectors().col(1), psi = r2.vectors.col(0);
  Eigen::VectorXd u(static_cast<Eigen::Index>(nx * n1 * n2));
  for (std::size_t ix = 0; ix < nx; ++ix)
    for (std::size_t i1 = 0; i1 < n1; ++i1)
      for (std::size_t i2 = 0; i2 < n2; ++i2)
        u(static_cast<Eigen::Index>((ix * n1 + i1) * n2 + i2)) =
            phi(static_cast<Eigen::Index>(i1)) * psi(static_cast<Eigen::Index>(ix * n2 + i2));
  const double lam = rep.mu_y1[1] + rep.lambda2d[0];
  const Eigen::VectorXd mu = apply_op(*f3.m, u);
  rep.excited_residual = (apply_op(*f3.a, u) - lam * mu).norm() / (lam * mu.norm());
  rep.max_residual = std::max({rep.max_residual, rep.ground_residual, rep.excited_residual});
  return rep;
}

std::vector<SpectrumReport> sweep_beta(const CrossSectionSpec& section, std::vector<double> betas,
                                       const DiscretizationSpec& disc, const EigOptions& opts) {
  if (betas.empty()) throw ValidationError("sweep needs at least one beta");
  for (double b : betas)
    if (!(b > 0.0)) throw ValidationError("sweep: beta values must be positive");
  std::sort(betas.begin(), betas.end());
  std::vector<SpectrumReport> rows;
  for (double b : betas) rows.push_back(compute_spectrum(WaveguideSpec{ShearParam(b), section}, disc, opts));
  return rows;
}

}  // namespace shearguide
