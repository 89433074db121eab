#include "shearguide/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "shearguide/certificates.hpp"
#include "shearguide/linalg.hpp"
#include "shearguide/thresholds.hpp"
#include "shearguide/waveguide.hpp"

namespace shearguide {

namespace {

namespace fs = std::filesystem;

const std::set<std::string> top_keys = {"beta", "straight", "rect", "mask", "mode", "L", "grid", "grading",
                                        "ladder", "k", "tol", "max_iterations", "seed", "preconditioner", "betas",
                                        "out", "eps", "kappa", "nu", "E1", "E2", "prism_grid", "count"};
const std::set<std::string> grading_keys = {"near_length", "ratio", "max_factor"};
const std::set<std::string> ladder_keys = {"mesh_rungs", "length_halvings", "max_length_growth"};

std::vector<double> parse_list(const std::string& s, const std::string& what) {
  std::vector<double> v;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ValidationError(what + ": cannot parse '" + item + "'");
    }
  }
  return v;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <class T>
T get(const Json& c, const char* key, T fallback) {
  if (!c.contains(key)) return fallback;
  try {
    return c.at(key).get<T>();
  } catch (const Json::exception&) {
    throw ValidationError(std::string("config key '") + key + "' has the wrong type");
  }
}

double require_number(const Json& c, const char* key) {
  if (!c.contains(key)) throw ValidationError(std::string("missing --") + key);
  return get<double>(c, key, 0.0);
}

ShearParam beta_of(const Json& c) {
  const bool straight = get<bool>(c, "straight", false) || get<std::string>(c, "mode", "half") == "straight";
  if (straight) {
    if (get<double>(c, "beta", 0.0) != 0.0) throw ValidationError("straight runs take beta = 0");
    return ShearParam(0.0, true);
  }
  const double b = require_number(c, "beta");
  if (!(b > 0.0)) throw ValidationError("--beta must be positive");
  return ShearParam(b);
}

CrossSectionSpec section_of(const Json& c) {
  if (c.contains("rect") && c.contains("mask")) throw ValidationError("give either --rect or --mask, not both");
  if (c.contains("rect")) {
    const auto r = get<std::vector<double>>(c, "rect", {});
    if (r.size() != 4) throw ValidationError("--rect needs a,b,c,d");
    return Rect(r[0], r[1], r[2], r[3]);
  }
  if (c.contains("mask")) return CellMask::parse(read_file(get<std::string>(c, "mask", "")));
  throw ValidationError("a section is required (--rect or --mask)");
}

Rect rect_of(const Json& c) {
  const auto s = section_of(c);
  if (!std::holds_alternative<Rect>(s)) throw ValidationError("this command needs a rectangular section");
  return std::get<Rect>(s);
}

DiscretizationSpec disc_of(const Json& c) {
  DiscretizationSpec d;
  d.mode = form_mode_from_string(get<std::string>(c, "mode", "half"));
  if (get<bool>(c, "straight", false)) d.mode = FormMode::straight;
  d.length = get<double>(c, "L", 0.0);
  if (c.contains("grid")) {
    const auto g = get<std::vector<double>>(c, "grid", {});
    if (g.size() != 3) throw ValidationError("--grid needs nx,n1,n2");
    for (double x : g)
      if (!(x >= 1.0) || x != std::floor(x)) throw ValidationError("--grid entries must be positive integers");
    d.grid.nx = static_cast<std::size_t>(g[0]);
    d.grid.n1 = static_cast<std::size_t>(g[1]);
    d.grid.n2 = static_cast<std::size_t>(g[2]);
  }
  if (c.contains("grading")) {
    const Json& g = c.at("grading");
    d.grid.grading.near_length = get<double>(g, "near_length", d.grid.grading.near_length);
    d.grid.grading.ratio = get<double>(g, "ratio", d.grid.grading.ratio);
    d.grid.grading.max_factor = get<double>(g, "max_factor", d.grid.grading.max_factor);
  }
  if (c.contains("ladder")) {
    const Json& l = c.at("ladder");
    d.ladder.mesh_rungs = get<int>(l, "mesh_rungs", d.ladder.mesh_rungs);
    d.ladder.length_halvings = get<int>(l, "length_halvings", d.ladder.length_halvings);
    d.ladder.max_length_growth = get<int>(l, "max_length_growth", d.ladder.max_length_growth);
  }
  if (c.contains("preconditioner"))
    d.preconditioner = preconditioner_kind_from_string(get<std::string>(c, "preconditioner", ""));
  d.validate();
  return d;
}

EigOptions eig_of(const Json& c) {
  EigOptions o;
  o.k = get<int>(c, "k", 1);
  o.tol = get<double>(c, "tol", o.tol);
  o.max_iterations = get<int>(c, "max_iterations", o.max_iterations);
  o.seed = get<std::uint64_t>(c, "seed", o.seed);
  if (o.k < 1) throw ValidationError("--k must be positive");
  if (!(o.tol > 0.0) || o.tol >= 1.0) throw ValidationError("--tol must lie in (0, 1)");
  if (o.max_iterations < 1) throw ValidationError("--max-iterations must be positive");
  return o;
}

int status_code(const std::string& status) {
  if (status == "not_converged") return exit_solver;
  if (status == "inconclusive") return exit_inconclusive;
  return exit_ok;
}

struct Writer {
  fs::path dir;
  Json outputs = Json::array();

  void text(const std::string& name, const std::string& body) {
    fs::create_directories(dir);
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw ValidationError("cannot write " + (dir / name).string());
    f << body;
    outputs.push_back(name);
  }
  void json(const std::string& name, const Json& j) { text(name, j.dump(2) + "\n"); }
  void manifest(const std::string& command, const Json& config) {
    const auto m = make_manifest(command, config, get<std::uint64_t>(config, "seed", 42), outputs);
    fs::create_directories(dir);
    std::ofstream f(dir / "manifest.json", std::ios::binary);
    f << m.dump(2) << "\n";
  }
};

std::string spectrum_csv(const std::vector<SpectrumReport>& reports) {
  std::ostringstream s;
  write_csv_header(s);
  for (const auto& r : reports) write_extrapolated_csv(s, r);
  return s.str();
}

std::string rungs_csv(const std::vector<SpectrumReport>& reports) {
  std::ostringstream s;
  write_csv_header(s);
  for (const auto& r : reports) write_rungs_csv(s, r);
  return s.str();
}

Json summary(const SpectrumReport& r) {
  Json j{{"beta", round12(r.beta)}, {"status", r.status}, {"count", r.count},
         {"threshold", round12(r.threshold)}, {"L", round12(r.length)}};
  if (!r.extrapolated.empty()) {
    j["lambda1"] = round12(r.extrapolated[0]);
    j["extrapolation_error"] = round12(r.extrapolation_error[0]);
    j["margin"] = round12(r.margin);
  }
  j["flags"] = r.flags;
  return j;
}

int cmd_thresholds(const Json& c, std::ostream& out) {
  const ShearParam beta = beta_of(c);
  const auto section = section_of(c);
  Json j{{"beta", round12(beta.beta())}, {"section", describe(section)}};
  j.update(to_json(threshold_report(beta, section)));
  out << j.dump(2) << "\n";
  if (c.contains("out")) {
    Writer w{get<std::string>(c, "out", "")};
    w.json("thresholds.json", j);
    w.manifest("thresholds", c);
  }
  return exit_ok;
}

int cmd_spectrum(const Json& c, std::ostream& out) {
  const WaveguideSpec spec{beta_of(c), section_of(c)};
  const auto disc = disc_of(c);
  const auto rep = compute_spectrum(spec, disc, eig_of(c));
  Writer w{get<std::string>(c, "out", "out")};
  w.json("spectrum.json", to_json(rep));
  w.text("eigenvalues.csv", spectrum_csv({rep}));
  w.text("rungs.csv", rungs_csv({rep}));
  w.manifest("spectrum", c);
  out << summary(rep).dump(2) << "\n";
  return status_code(rep.status);
}

int cmd_sweep(const Json& c, std::ostream& out) {
  const auto betas = get<std::vector<double>>(c, "betas", {});
  if (betas.empty()) throw ValidationError("sweep needs --betas");
  const auto rows = sweep_beta(section_of(c), betas, disc_of(c), eig_of(c));
  std::ostringstream table;
  table << "beta,count,lambda1,threshold,margin,extrapolation_error,status\n";
  Json all = Json::array();
  bool failed = false, inconclusive = false;
  for (const auto& r : rows) {
    const double l1 = r.extrapolated.empty() ? NAN : r.extrapolated[0];
    const double e = r.extrapolation_error.empty() ? NAN : r.extrapolation_error[0];
    table << fmt12(r.beta) << ',' << r.count << ',' << fmt12(l1) << ',' << fmt12(r.threshold) << ','
          << fmt12(r.margin) << ',' << fmt12(e) << ',' << r.status << '\n';
    all.push_back(to_json(r));
    failed = failed || r.status == "not_converged";
    inconclusive = inconclusive || r.status == "inconclusive";
  }
  Writer w{get<std::string>(c, "out", "out")};
  w.text("sweep.csv", table.str());
  w.text("eigenvalues.csv", spectrum_csv(rows));
  w.json("sweep.json", all);
  w.manifest("sweep", c);
  Json s = Json::array();
  for (const auto& r : rows) s.push_back(summary(r));
  out << s.dump(2) << "\n";
  return failed ? exit_solver : inconclusive ? exit_inconclusive : exit_ok;
}

int cmd_certify(const Json& c, std::ostream& out) {
  const auto cert = existence_certificate(beta_of(c), rect_of(c));
  const Json j = to_json(cert);
  out << j.dump(2) << "\n";
  if (c.contains("out")) {
    Writer w{get<std::string>(c, "out", "")};
    w.json("certificate.json", j);
    w.manifest("certify", c);
  }
  return cert.certified ? exit_ok : exit_inconclusive;
}

int cmd_convergence(const Json& c, std::ostream& out) {
  const WaveguideSpec spec{beta_of(c), section_of(c)};
  const auto rep = compute_spectrum(spec, disc_of(c), eig_of(c));
  std::vector<const RungResult*> mesh;
  for (const auto& g : rep.rungs)
    if (g.kind == "mesh") mesh.push_back(&g);
  std::ostringstream t;
  t << "j";
  for (const auto* g : mesh) t << ",lambda_r" << g->rung;
  t << ",extrapolated,extrapolation_error,observed_ratio\n";
  Json ratios = Json::array();
  for (std::size_t j = 0; j < rep.extrapolated.size(); ++j) {
    t << j;
    for (const auto* g : mesh) t << ',' << (j < g->eigenvalues.size() ? fmt12(g->eigenvalues[j]) : "");
    // (l0 - l1) / (l1 - l2) tends to 4 for an h^2 method.
    double ratio = NAN;
    if (mesh.size() >= 3) {
      const auto& a = mesh[mesh.size() - 3]->eigenvalues;
      const auto& b = mesh[mesh.size() - 2]->eigenvalues;
      const auto& d = mesh[mesh.size() - 1]->eigenvalues;
      if (j < d.size() && j < a.size() && j < b.size()) ratio = (a[j] - b[j]) / (b[j] - d[j]);
    }
    t << ',' << fmt12(rep.extrapolated[j]) << ',' << fmt12(rep.extrapolation_error[j]) << ',' << fmt12(ratio)
      << '\n';
    ratios.push_back(std::isfinite(ratio) ? Json(round12(ratio)) : Json(nullptr));
  }
  Writer w{get<std::string>(c, "out", "out")};
  w.text("convergence.csv", t.str());
  w.text("rungs.csv", rungs_csv({rep}));
  w.json("spectrum.json", to_json(rep));
  w.manifest("convergence", c);
  Json s = summary(rep);
  s["observed_ratio"] = ratios;
  out << s.dump(2) << "\n";
  return status_code(rep.status);
}

int cmd_oracle_compare(const Json& c, std::ostream& out) {
  const WaveguideSpec spec{beta_of(c), rect_of(c)};
  DiscretizationSpec d = disc_of(c);
  if (d.length == 0.0) d.length = 4.0 * section_diameter(spec.section);
  EigOptions o = eig_of(c);
  const int count = get<int>(c, "count", 3);
  const auto sep = separation_check(spec, d, o, count + 1);
  const auto sym = symmetry_check(spec, d, o, count);
  const Json j{{"separation", to_json(sep)}, {"symmetry", to_json(sym)},
               {"max_separation_residual", round12(sep.max_residual)},
               {"max_symmetry_gap", std::isfinite(sym.max_relative_gap) ? Json(round12(sym.max_relative_gap)) : Json(nullptr)}};
  out << j.dump(2) << "\n";
  if (c.contains("out")) {
    Writer w{get<std::string>(c, "out", "")};
    w.json("oracle_compare.json", j);
    w.manifest("oracle-compare", c);
  }
  return sep.converged && sym.converged ? exit_ok : exit_solver;
}

int cmd_prism(const Json& c, std::ostream& out) {
  auto g = get<std::vector<double>>(c, "prism_grid", {24, 32});
  if (g.size() != 2 || !(g[0] >= 4) || !(g[1] >= 4)) throw ValidationError("--prism-grid needs n_triangle,n_depth >= 4");
  const auto check = prism_eigen_check(beta_of(c), rect_of(c), static_cast<std::size_t>(g[0]),
                                       static_cast<std::size_t>(g[1]), get<double>(c, "tol", 1e-9));
  const Json j = to_json(check);
  out << j.dump(2) << "\n";
  if (c.contains("out")) {
    Writer w{get<std::string>(c, "out", "")};
    w.json("prism.json", j);
    w.manifest("prism", c);
  }
  return check.converged ? exit_ok : exit_solver;
}

int cmd_bform(const Json& c, std::ostream& out) {
  const BForm f = make_bform(require_number(c, "beta"), require_number(c, "eps"), require_number(c, "kappa"),
                             require_number(c, "nu"), require_number(c, "E1"), require_number(c, "E2"));
  Json j = to_json(f);
  j["count"] = well_count(f.c0, f.width);
  j["count_fd"] = well_count_fd(f.c0, f.width);
  out << j.dump(2) << "\n";
  if (c.contains("out")) {
    Writer w{get<std::string>(c, "out", "")};
    w.json("bform.json", j);
    w.manifest("bform", c);
  }
  return exit_ok;
}

struct Flags {
  std::string config;
  std::optional<double> beta, length, tol, eps, kappa, nu, e1, e2, near_length;
  std::optional<std::string> rect, mask, mode, grid, out, betas, preconditioner, prism_grid;
  std::optional<int> k, rungs, max_iterations, count;
  std::optional<std::uint64_t> seed;
  bool straight = false;

  Json to_json() const {
    Json j = Json::object();
    if (beta) j["beta"] = *beta;
    if (straight) j["straight"] = true;
    if (rect) j["rect"] = parse_list(*rect, "--rect");
    if (mask) j["mask"] = *mask;
    if (mode) j["mode"] = *mode;
    if (length) j["L"] = *length;
    if (grid) j["grid"] = parse_list(*grid, "--grid");
    if (near_length) j["grading"] = Json{{"near_length", *near_length}};
    if (rungs) j["ladder"] = Json{{"mesh_rungs", *rungs}};
    if (k) j["k"] = *k;
    if (tol) j["tol"] = *tol;
    if (max_iterations) j["max_iterations"] = *max_iterations;
    if (seed) j["seed"] = *seed;
    if (preconditioner) j["preconditioner"] = *preconditioner;
    if (betas) j["betas"] = parse_list(*betas, "--betas");
    if (out) j["out"] = *out;
    if (eps) j["eps"] = *eps;
    if (kappa) j["kappa"] = *kappa;
    if (nu) j["nu"] = *nu;
    if (e1) j["E1"] = *e1;
    if (e2) j["E2"] = *e2;
    if (prism_grid) j["prism_grid"] = parse_list(*prism_grid, "--prism-grid");
    if (count) j["count"] = *count;
    return j;
  }
};

void add_flags(CLI::App* app, Flags& f) {
  app->add_option("--config", f.config, "JSON config file; flags override its keys");
  app->add_option("--beta", f.beta, "shear slope beta > 0");
  app->add_flag("--straight", f.straight, "straight tube (beta = 0)");
  app->add_option("--rect", f.rect, "rectangle a,b,c,d");
  app->add_option("--mask", f.mask, "mask file");
  app->add_option("--mode", f.mode, "half | full | reduced | straight");
  app->add_option("--L", f.length, "truncation length (0 = adaptive)");
  app->add_option("--grid", f.grid, "coarsest grid nx,n1,n2");
  app->add_option("--near-length", f.near_length, "x grading: uniform region length");
  app->add_option("--rungs", f.rungs, "mesh rungs");
  app->add_option("--k", f.k, "eigenpairs to track (minimum)");
  app->add_option("--tol", f.tol, "relative residual tolerance");
  app->add_option("--max-iterations", f.max_iterations, "eigensolver iteration cap");
  app->add_option("--seed", f.seed, "eigensolver seed");
  app->add_option("--preconditioner", f.preconditioner, "fastdiag_shifted | fastdiag | jacobi | none");
  app->add_option("--out", f.out, "output directory");
}

}  // namespace

void validate_config_keys(const Json& config) {
  if (!config.is_object()) throw ValidationError("config must be a JSON object");
  for (const auto& [key, value] : config.items()) {
    if (!top_keys.count(key)) throw ValidationError("unknown config key '" + key + "'");
    const std::set<std::string>* nested = key == "grading" ? &grading_keys : key == "ladder" ? &ladder_keys : nullptr;
    if (nested) {
      if (!value.is_object()) throw ValidationError("config key '" + key + "' must be an object");
      for (const auto& [sub, v] : value.items()) {
        (void)v;
        if (!nested->count(sub)) throw ValidationError("unknown config key '" + key + "." + sub + "'");
      }
    }
  }
}

Json merge_config(const Json& file_config, const Json& flag_config) {
  validate_config_keys(file_config);
  validate_config_keys(flag_config);
  Json merged = file_config;
  for (const auto& [key, value] : flag_config.items()) {
    if (value.is_object() && merged.contains(key) && merged[key].is_object()) merged[key].update(value);
    else merged[key] = value;
  }
  if (flag_config.contains("rect")) merged.erase("mask");
  if (flag_config.contains("mask")) merged.erase("rect");
  return merged;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bound states of broken sheared waveguides"};
  app.require_subcommand(1);
  Flags f;
  std::string name;
  const std::vector<std::pair<const char*, const char*>> commands = {
      {"thresholds", "E1, E2, beta* and bound factor of a section"},
      {"spectrum", "ladder solve and bound-state count"},
      {"sweep", "spectrum over a list of beta values"},
      {"certify", "explicit negative-energy trial function"},
      {"convergence", "mesh ladder table with observed order"},
      {"oracle-compare", "separation and symmetry oracles on a rectangle"},
      {"prism", "auxiliary prism eigenvalues against closed forms"},
      {"bform", "count of the one-dimensional comparison form"}};
  for (const auto& [cmd, help] : commands) {
    CLI::App* sub = app.add_subcommand(cmd, help);
    add_flags(sub, f);
    const std::string c = cmd;
    if (c == "sweep") sub->add_option("--betas", f.betas, "comma-separated beta values");
    if (c == "oracle-compare") sub->add_option("--count", f.count, "eigenvalues compared");
    if (c == "prism") sub->add_option("--prism-grid", f.prism_grid, "n_triangle,n_depth");
    if (c == "bform") {
      sub->add_option("--eps", f.eps);
      sub->add_option("--kappa", f.kappa);
      sub->add_option("--nu", f.nu);
      sub->add_option("--E1", f.e1);
      sub->add_option("--E2", f.e2);
    }
    sub->callback([&name, c] { name = c; });
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return exit_invalid;
  }

  try {
    Json file_config = Json::object();
    if (!f.config.empty()) {
      try {
        file_config = Json::parse(read_file(f.config));
      } catch (const Json::parse_error& e) {
        throw ValidationError("config is not valid JSON: " + std::string(e.what()));
      }
    }
    const Json c = merge_config(file_config, f.to_json());
    if (name == "thresholds") return cmd_thresholds(c, out);
    if (name == "spectrum") return cmd_spectrum(c, out);
    if (name == "sweep") return cmd_sweep(c, out);
    if (name == "certify") return cmd_certify(c, out);
    if (name == "convergence") return cmd_convergence(c, out);
    if (name == "oracle-compare") return cmd_oracle_compare(c, out);
    if (name == "prism") return cmd_prism(c, out);
    if (name == "bform") return cmd_bform(c, out);
    err << "error: no command\n";
    return exit_invalid;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return exit_invalid;
  } catch (const std::exception& e) {
    err << "solver failure: " << e.what() << "\n";
    return exit_solver;
  }
}

}  // namespace shearguide
