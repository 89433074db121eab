#include "shearguide/report_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include <Eigen/Core>

namespace shearguide {

namespace {

constexpr const char* version = "0.1.0";

Json arr(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(round12(x));
  return a;
}

Json num(double v) {
  if (!std::isfinite(v)) return nullptr;
  return round12(v);
}

std::string join_flags(const std::vector<std::string>& flags, const std::string& extra = {}) {
  std::string s;
  for (const auto& f : flags) s += (s.empty() ? "" : ";") + f;
  if (!extra.empty()) s += (s.empty() ? "" : ";") + extra;
  return s;
}

void csv_row(std::ostream& out, const SpectrumReport& r, const std::string& rung, double length, std::size_t nx,
             std::size_t n1, std::size_t n2, std::size_t j, double lambda, const std::string& residual, bool below,
             const std::string& flags) {
  out << fmt12(r.beta) << ',' << to_string(r.mode) << ',' << rung << ',' << fmt12(length) << ',' << nx << ',' << n1
      << ',' << n2 << ',' << j << ',' << fmt12(lambda) << ',' << residual << ',' << (below ? 1 : 0) << ','
      << flags << '\n';
}

}  // namespace

std::string fmt12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

double round12(double v) {
  if (!std::isfinite(v)) return v;
  return std::strtod(fmt12(v).c_str(), nullptr);
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

Json to_json(const ThresholdReport& t) {
  Json j;
  j["E1"] = num(t.ess_bottom);
  j["E2"] = num(t.e2);
  j["ess_threshold"] = num(t.ess_bottom);
  if (t.beta_star) j["beta_star"] = num(*t.beta_star);
  if (t.aspect_ratio) j["R"] = num(*t.aspect_ratio);
  j["bound_factor"] = num(t.bound_factor);
  return j;
}

Json to_json(const RungResult& r) {
  return Json{{"kind", r.kind},           {"rung", r.rung},        {"L", num(r.length)},
              {"nx", r.nx},               {"n1", r.n1},            {"n2", r.n2},
              {"dofs", r.dofs},           {"eigenvalues", arr(r.eigenvalues)},
              {"residuals", arr(r.residuals)}, {"converged", r.converged}, {"iterations", r.iterations},
              {"seconds", num(r.seconds)}};
}

Json to_json(const SpectrumReport& r) {
  Json j;
  j["beta"] = num(r.beta);
  j["section"] = r.section;
  j["mode"] = to_string(r.mode);
  j["threshold"] = num(r.threshold);
  j["threshold_error"] = num(r.threshold_error);
  j["reduced_shift"] = num(r.reduced_shift);
  j["L"] = num(r.length);
  j["status"] = r.status;
  j["count"] = r.count;
  j["count_stable"] = r.count_stable;
  j["boundary"] = r.boundary;
  j["mesh_counts"] = r.mesh_counts;
  j["extrapolated"] = arr(r.extrapolated);
  j["extrapolation_error"] = arr(r.extrapolation_error);
  j["extrapolation_order"] = r.extrapolation_order;
  j["band"] = arr(r.band);
  j["margin"] = num(r.margin);
  j["margin_change"] = num(r.margin_change);
  j["monotone_refinement"] = r.monotone_refinement;
  j["monotone_length"] = r.monotone_length;
  Json levels = Json::array();
  for (const auto& l : r.length_levels)
    levels.push_back({{"L", num(l.length)}, {"extrapolated", arr(l.extrapolated)}, {"count", l.count},
                      {"in_band", l.in_band}});
  j["length_levels"] = levels;
  Json rungs = Json::array();
  for (const auto& g : r.rungs) rungs.push_back(to_json(g));
  j["rungs"] = rungs;
  j["flags"] = r.flags;
  j["warnings"] = r.warnings;
  j["seconds"] = num(r.seconds);
  return j;
}

Json to_json(const SymmetryReport& r) {
  return Json{{"beta", num(r.beta)},
              {"half", arr(r.half)},
              {"full", arr(r.full)},
              {"odd_fraction", arr(r.odd_fraction)},
              {"full_even", arr(r.full_even)},
              {"relative_gap", arr(r.relative_gap)},
              {"max_relative_gap", num(r.max_relative_gap)},
              {"ground_odd_fraction", num(r.ground_odd_fraction)},
              {"converged", r.converged}};
}

Json to_json(const SeparationReport& r) {
  return Json{{"beta", num(r.beta)},
              {"lambda3d", arr(r.lambda3d)},
              {"lambda2d", arr(r.lambda2d)},
              {"mu_y1", arr(std::vector<double>(r.mu_y1.begin(), r.mu_y1.begin() + std::min<std::ptrdiff_t>(4, static_cast<std::ptrdiff_t>(r.mu_y1.size()))))},
              {"match_residual", arr(r.match_residual)},
              {"ground_residual", num(r.ground_residual)},
              {"excited_residual", num(r.excited_residual)},
              {"max_residual", num(r.max_residual)},
              {"converged", r.converged}};
}

Json to_json(const CertificateResult& c) {
  return Json{{"beta", num(c.beta)},
              {"E1", num(c.threshold)},
              {"n", c.n},
              {"eps", num(c.eps)},
              {"q_psi_n", num(c.q_psi_n)},
              {"q_psi_n_quadrature", num(c.q_psi_n_quad.value)},
              {"cross_term", num(c.cross.value)},
              {"cross_term_error", num(c.cross.error)},
              {"q_phi", num(c.q_phi.value)},
              {"q_phi_error", num(c.q_phi.error)},
              {"total", num(c.total)},
              {"error_bound", num(c.error)},
              {"norm2", num(c.norm2)},
              {"rayleigh", num(c.rayleigh)},
              {"verdict", c.certified ? "negative" : "not_certified"}};
}

Json to_json(const BForm& f) {
  return Json{{"beta", num(f.beta)},   {"eps", num(f.eps)},     {"kappa", num(f.kappa)},
              {"nu", num(f.nu)},       {"E1", num(f.e1)},       {"E2", num(f.e2)},
              {"c0", num(f.c0)},       {"well_width", num(f.width)}, {"zeta", num(f.zeta)},
              {"zeta_covers_threshold", f.zeta_covers_threshold}};
}

Json to_json(const PrismCheck& c) {
  return Json{{"beta", num(c.beta)},
              {"section", c.section},
              {"n_triangle", c.n_triangle},
              {"n_depth", c.n_depth},
              {"mu1", num(c.mu1)},
              {"mu2", num(c.mu2)},
              {"converged", c.converged},
              {"mu1_closed_beta1", num(c.mu1_closed)},
              {"mu2_closed_beta1", num(c.mu2_closed)},
              {"mu1_rel_error", num(c.mu1_rel_error)},
              {"mu2_rel_error", num(c.mu2_rel_error)},
              {"bound_factor", num(c.bound_factor)},
              {"bound_holds", c.bound_holds},
              {"threshold_rhs", num(c.threshold_rhs)},
              {"threshold_inequality", c.threshold_inequality}};
}

void write_csv_header(std::ostream& out) {
  out << "beta,mode,rung,L,nx,n1,n2,j,lambda,residual,below_threshold,flags\n";
}

void write_extrapolated_csv(std::ostream& out, const SpectrumReport& r) {
  const RungResult* finest = nullptr;
  for (const auto& g : r.rungs)
    if (g.kind == "mesh" && (!finest || g.rung > finest->rung)) finest = &g;
  const std::size_t nx = finest ? finest->nx : 0, n1 = finest ? finest->n1 : 0, n2 = finest ? finest->n2 : 0;
  for (std::size_t j = 0; j < r.extrapolated.size(); ++j) {
    const std::string res = finest && j < finest->residuals.size() ? fmt12(finest->residuals[j]) : "";
    const double band = r.band[j];
    const double lam = r.extrapolated[j];
    csv_row(out, r, "extrapolated", r.length, nx, n1, n2, j, lam, res, lam < r.threshold - band,
            join_flags(r.flags, std::abs(lam - r.threshold) <= band ? "in_band" : ""));
    if (r.mode != FormMode::reduced2d) continue;
    for (int k = 2;; ++k) {
      const double lk = lam + r.reduced_shift * (k * k - 1.0);
      if (!(lk < r.threshold + band)) break;
      csv_row(out, r, "extrapolated", r.length, nx, n1, n2, j, lk, res, lk < r.threshold - band,
              join_flags(r.flags, "y1_mode=" + std::to_string(k) +
                                      (std::abs(lk - r.threshold) <= band ? ";in_band" : "")));
    }
  }
}

void write_rungs_csv(std::ostream& out, const SpectrumReport& r) {
  for (const auto& g : r.rungs)
    for (std::size_t j = 0; j < g.eigenvalues.size(); ++j)
      csv_row(out, r, g.kind + std::to_string(g.rung), g.length, g.nx, g.n1, g.n2, j, g.eigenvalues[j],
              j < g.residuals.size() ? fmt12(g.residuals[j]) : "", g.eigenvalues[j] < r.threshold,
              g.converged ? "" : "not_converged");
}

Json make_manifest(const std::string& command, const Json& config, std::uint64_t seed, const Json& outputs) {
  Json m;
  m["command"] = command;
  m["config"] = config;
  m["config_hash"] = "fnv1a64:" + hex64(fnv1a(config.dump()));
  m["seed"] = seed;
  m["versions"] = Json{{"shearguide", version},
                       {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                                     "." + std::to_string(EIGEN_MINOR_VERSION)},
                       {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                             std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                             std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
#ifdef _OPENMP
                       {"openmp", _OPENMP},
#endif
                       {"compiler", __VERSION__}};
  m["outputs"] = outputs;
  return m;
}

}  // namespace shearguide
