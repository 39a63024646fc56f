// bdmlab: batch front-end for meshes, single-element interpolation,
// verification suites, estimate sweeps and the Stokes study.
//
// Data (mesh, CSV) goes to --out when given, otherwise to stdout; the JSON
// manifest goes to stdout when --out is given, otherwise to stderr.

#include <CLI11.hpp>
#include <json.hpp>

#include <Eigen/Core>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "bdmlab/bdm.hpp"
#include "bdmlab/estimates.hpp"
#include "bdmlab/kernels.hpp"
#include "bdmlab/shishkin.hpp"
#include "bdmlab/stokes.hpp"
#include "bdmlab/verify.hpp"

#ifndef BDMLAB_VERSION
#define BDMLAB_VERSION "0.0.0"
#endif

namespace {

using namespace bdmlab;
using json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Config {
  int k = 1;
  int m = -1;
  int N = 8;
  std::string eps = "0.01";
  std::optional<double> tau;
  std::optional<double> gamma;
  std::string log = "natural";
  std::string gamma_log = "natural";
  std::string mode = "exact";
  std::string out;
  std::uint64_t seed = 1;
  bool shishkin = false;
  bool uniform = false;
  std::string Ns = "8,16,32,64";
  std::string mesh_kind = "shishkin";
  std::string facet_scale = "length";
  int quad_degree = 8;
  std::string suite;
  std::string simplex;
  std::string field;
  std::string variant = "nedelec";
  int dim = 2;
  std::string estimate = "interpolation_mac";
  std::string family = "t1";
  std::string grid;
  bool random_div_free = false;
  bool random_field = false;
};

json versions() {
  return {{"bdmlab", BDMLAB_VERSION},
          {"gmp", gmp_version},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION)},
          {"simd", kernels::to_string(kernels::active_isa())}};
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(item);
  return parts;
}

std::vector<double> parse_doubles(const std::string& s) {
  std::vector<double> v;
  for (const auto& p : split(s, ',')) v.push_back(std::stod(p));
  if (v.empty()) throw UsageError("empty list: " + s);
  return v;
}

std::vector<int> parse_ints(const std::string& s) {
  std::vector<int> v;
  for (const auto& p : split(s, ',')) v.push_back(std::stoi(p));
  if (v.empty()) throw UsageError("empty list: " + s);
  return v;
}

/// "x,y;x,y;x,y" with rational entries.
Simplex parse_simplex_text(const std::string& s) {
  std::vector<Point> pts;
  for (const auto& row : split(s, ';')) {
    Point p;
    for (const auto& c : split(row, ',')) p.push_back(parse_rational(c));
    pts.push_back(std::move(p));
  }
  return Simplex(std::move(pts));
}

/// ';'-separated tuples of ','-separated rationals.
std::vector<std::vector<Rational>> parse_grid(const std::string& s) {
  std::vector<std::vector<Rational>> g;
  for (const auto& row : split(s, ';')) {
    std::vector<Rational> p;
    for (const auto& c : split(row, ',')) p.push_back(parse_rational(c));
    g.push_back(std::move(p));
  }
  return g;
}

class Output {
 public:
  explicit Output(const std::string& path) : path_(path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw std::runtime_error("cannot open " + path);
    }
  }
  std::ostream& data() { return path_.empty() ? std::cout : static_cast<std::ostream&>(file_); }
  std::ostream& manifest() { return path_.empty() ? std::cerr : std::cout; }

 private:
  std::string path_;
  std::ofstream file_;
};

void emit_manifest(Output& out, const std::string& sub, const json& config, const json& verdicts) {
  json m = {{"subcommand", sub}, {"config", config}, {"versions", versions()}, {"verdicts", verdicts}};
  out.manifest() << m.dump(2) << '\n';
}

// --- mesh ------------------------------------------------------------------------

int run_mesh(const Config& c) {
  if (c.shishkin == c.uniform) throw UsageError("mesh needs exactly one of --shishkin or --uniform");
  Output out(c.out);
  Mesh2D mesh;
  json cfg = {{"N", c.N}};
  if (c.shishkin) {
    ShishkinParams p;
    p.N = c.N;
    p.epsilon = std::stod(c.eps);
    p.tau = c.tau;
    p.log = parse_log_convention(c.log);
    mesh = build_shishkin(p);
    cfg["kind"] = "shishkin";
    cfg["eps"] = p.epsilon;
    cfg["log"] = to_string(p.log);
    cfg["tau"] = p.transition();
  } else {
    mesh = build_uniform(c.N);
    cfg["kind"] = "uniform";
  }
  write_mesh(out.data(), mesh);
  const double sigma = mesh_aspect_ratio(mesh);
  json verdicts = {{"triangles", mesh.num_triangles()},
                   {"area", to_string(total_area(mesh))},
                   {"sigma", sigma}};
  if (c.shishkin) verdicts["sigma_closed_form"] = aspect_ratio(cfg["tau"].get<double>());
  cfg["out"] = c.out;
  emit_manifest(out, "mesh", cfg, verdicts);
  return kExitOk;
}

// --- interpolate -------------------------------------------------------------------

int run_interpolate(const Config& c) {
  if (c.field.empty()) throw UsageError("interpolate needs --field");
  const Simplex s = c.simplex.empty() ? (c.dim == 2 ? reference_triangle() : reference_tetrahedron())
                                      : parse_simplex_text(c.simplex);
  const auto variant = parse_dof_variant(c.variant);
  const auto v = parse_vector_poly(s.dim(), c.field);
  const BDMElement el(s, c.k, variant);
  Output out(c.out);
  json verdicts;
  if (c.mode == "exact") {
    const auto iv = el.interpolate(v);
    json dofs = json::array();
    for (const auto& q : el.dof_values(v)) dofs.push_back(to_string(q));
    out.data() << iv.str() << '\n';
    verdicts = {{"interpolant", iv.str()}, {"dofs", dofs}, {"reproduces_field", iv == v}};
  } else if (c.mode == "float") {
    const auto vd = v.cast<double>();
    const VectorField f = [&](std::span<const double> x) {
      std::vector<double> r;
      for (int i = 0; i < vd.dim(); ++i) r.push_back(vd[i].evaluate<double>(x));
      return r;
    };
    const auto iv = el.interpolate(f, std::max(2 * (c.k + v.degree()), 2));
    out.data() << iv.str() << '\n';
    verdicts = {{"interpolant", iv.str()}};
  } else {
    throw UsageError("--mode must be exact or float");
  }
  json cfg = {{"k", c.k}, {"variant", to_string(variant)}, {"mode", c.mode}, {"field", c.field}, {"ndofs", el.ndofs()}};
  std::ostringstream ss;
  write_simplex(ss, s);
  cfg["simplex"] = ss.str();
  emit_manifest(out, "interpolate", cfg, verdicts);
  return kExitOk;
}

// --- verify ------------------------------------------------------------------------------

int run_verify(const Config& c) {
  if (c.mode != "exact") throw UsageError("verify suites run in exact mode only");
  const auto r = run_suite(c.suite);
  Output out(c.out);
  json checks = json::array();
  for (const auto& line : r.checks) {
    out.data() << (line.ok ? "ok   " : "FAIL ") << line.label << ": expected " << line.expected << ", computed "
               << line.computed << '\n';
    checks.push_back({{"label", line.label}, {"ok", line.ok}});
  }
  for (const auto& line : r.notes) out.data() << "note " << line.label << ": " << line.computed << '\n';
  json sweeps = json::array();
  for (const auto& sw : r.sweeps) {
    sweeps.push_back({{"family", sw.family}, {"ratios", sw.ratios}, {"verdict", to_string(sw.verdict)}});
  }
  out.data() << (r.passed() ? "PASS " : "FAIL ") << r.name << '\n';
  emit_manifest(out, "verify", {{"suite", c.suite}, {"mode", c.mode}},
                {{"passed", r.passed()}, {"checks", checks}, {"sweeps", sweeps}});
  return r.passed() ? kExitOk : kExitFailure;
}

// --- sweep ----------------------------------------------------------------------------------

ElementFamily family_by_name(const std::string& name) {
  if (name == "t1") return element_family_t1();
  if (name == "t2") return element_family_t2();
  if (name == "tstar") return element_family_tstar();
  if (name == "no_rvp") return element_family_no_rvp();
  throw UsageError("unknown family: " + name + " (t1, t2, tstar, no_rvp)");
}

std::vector<std::vector<Rational>> default_grid(const std::string& family) {
  std::vector<std::vector<Rational>> g;
  if (family == "tstar") {
    for (int j = 1; j <= 10; ++j) g.push_back({Rational(1, 1L << j)});
  } else {
    for (int j = 0; j <= 10; ++j) g.push_back({1, 1, Rational(1L << j)});
  }
  return g;
}

int run_sweep(const Config& c) {
  const auto family = family_by_name(c.family);
  const auto grid = c.grid.empty() ? default_grid(c.family) : parse_grid(c.grid);
  const int dim = c.family == "tstar" ? 2 : 3;
  EstimateSpec spec;
  spec.id = parse_estimate_id(c.estimate);
  spec.k = c.k;
  spec.m = c.m < 0 ? c.k - 1 : c.m;
  spec.variant = parse_dof_variant(c.variant);
  FieldGenerator gen;
  std::string field_desc;
  if (!c.field.empty()) {
    const auto v = parse_vector_poly(dim, c.field);
    gen = [v](const auto&, const Simplex&) { return v; };
    field_desc = c.field;
  } else if (c.random_div_free || c.random_field) {
    std::mt19937_64 rng(c.seed);
    const auto v = c.random_div_free ? random_divergence_free_field(rng, dim, c.k + 2, 3)
                                     : random_poly_field(rng, dim, c.k + 1, 5);
    gen = [v](const auto&, const Simplex&) { return v; };
    field_desc = v.str();
  } else {
    throw UsageError("sweep needs --field, --random-div-free or --random-field");
  }
  const auto r = sweep(family, gen, spec, grid);
  Output out(c.out);
  write_sweep_csv(out.data(), r);
  emit_manifest(out, "sweep",
                {{"estimate", to_string(spec.id)}, {"family", c.family}, {"k", spec.k}, {"m", spec.m},
                 {"variant", to_string(spec.variant)}, {"field", field_desc}, {"seed", c.seed}, {"out", c.out}},
                {{"ratios", r.ratios}, {"verdict", to_string(r.verdict)}});
  return kExitOk;
}

// --- stokes ---------------------------------------------------------------------------------

int run_stokes(const Config& c) {
  const auto eps = parse_doubles(c.eps);
  const auto Ns = parse_ints(c.Ns);
  MeshKind kind;
  if (c.mesh_kind == "shishkin") kind = MeshKind::shishkin;
  else if (c.mesh_kind == "uniform") kind = MeshKind::uniform;
  else throw UsageError("--mesh must be shishkin or uniform");
  StudyOptions opts;
  opts.tau_log = parse_log_convention(c.log);
  opts.gamma_log = parse_log_convention(c.gamma_log);
  opts.tau = c.tau;
  opts.gamma = c.gamma;
  opts.facet_scale = parse_facet_scale(c.facet_scale);
  opts.quad_degree = c.quad_degree;
  if (opts.quad_degree < 6) throw UsageError("--quad-degree must be at least 6");
  const auto rows = convergence_study(eps, Ns, kind, opts);
  Output out(c.out);
  write_study_csv(out.data(), rows);
  double max_div = 0.0, max_jump = 0.0, max_res = 0.0;
  for (const auto& r : rows) {
    max_div = std::max(max_div, r.max_divergence);
    max_jump = std::max(max_jump, r.max_normal_jump);
    max_res = std::max(max_res, r.relative_residual);
  }
  json cfg = {{"eps", eps}, {"N", Ns}, {"mesh", c.mesh_kind}, {"log", c.log}, {"gamma_log", c.gamma_log},
              {"facet_scale", c.facet_scale}, {"quad_degree", c.quad_degree}, {"out", c.out}};
  if (c.tau) cfg["tau"] = *c.tau;
  if (c.gamma) cfg["gamma"] = *c.gamma;
  emit_manifest(out, "stokes", cfg,
                {{"max_divergence", max_div}, {"max_normal_jump", max_jump}, {"max_relative_residual", max_res}});
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  Config c;
  CLI::App app{"Verification lab for anisotropic BDM interpolation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", BDMLAB_VERSION);

  auto* mesh = app.add_subcommand("mesh", "Shishkin or uniform triangulation of the unit square");
  mesh->add_flag("--shishkin", c.shishkin, "layer-adapted mesh in x1");
  mesh->add_flag("--uniform", c.uniform, "uniform N x N mesh");
  mesh->add_option("--N", c.N, "cells per direction (even for Shishkin)")->capture_default_str();
  mesh->add_option("--eps", c.eps, "layer parameter")->capture_default_str();
  mesh->add_option("--tau", c.tau, "transition point override");
  mesh->add_option("--log", c.log, "log in tau = min(1/2, 3 eps |log eps|)")
      ->check(CLI::IsMember({"natural", "base10"}))
      ->capture_default_str();
  mesh->add_option("--out", c.out, "mesh file");

  auto* interp = app.add_subcommand("interpolate", "BDM interpolant of a polynomial field on one simplex");
  interp->add_option("--k", c.k, "polynomial order")->capture_default_str();
  interp->add_option("--dim", c.dim, "dimension when --simplex is omitted")->check(CLI::IsMember({2, 3}))->capture_default_str();
  interp->add_option("--simplex", c.simplex, "vertices 'x,y;x,y;x,y' (default: reference simplex)");
  interp->add_option("--field", c.field, "components separated by ';', e.g. '0; x1^3'")->required();
  interp->add_option("--variant", c.variant, "DOF set")->check(CLI::IsMember({"nedelec", "bdm_original"}))->capture_default_str();
  interp->add_option("--mode", c.mode, "exact or float")->check(CLI::IsMember({"exact", "float"}))->capture_default_str();
  interp->add_option("--out", c.out, "output file");

  auto* verify = app.add_subcommand("verify", "run a named check suite");
  verify->add_option("suite", c.suite, "suite name")->required()->check(CLI::IsMember(suite_names()));
  verify->add_option("--mode", c.mode, "exact only")->check(CLI::IsMember({"exact", "float"}))->capture_default_str();
  verify->add_option("--out", c.out, "report file");

  auto* sw = app.add_subcommand("sweep", "estimate ratios over an element family");
  sw->add_option("--estimate", c.estimate, "stability_rvp, stability_mac, interpolation_rvp, interpolation_mac, interpolation_axes")
      ->capture_default_str();
  sw->add_option("--family", c.family, "t1, t2, tstar, no_rvp")->capture_default_str();
  sw->add_option("--k", c.k, "polynomial order")->capture_default_str();
  sw->add_option("--m", c.m, "Sobolev index (default k-1)");
  sw->add_option("--variant", c.variant, "DOF set")->check(CLI::IsMember({"nedelec", "bdm_original"}))->capture_default_str();
  sw->add_option("--field", c.field, "fixed field, components separated by ';'");
  sw->add_flag("--random-div-free", c.random_div_free, "random divergence-free field of degree k+2");
  sw->add_flag("--random-field", c.random_field, "random field of degree k+1");
  sw->add_option("--seed", c.seed, "seed for random fields")->capture_default_str();
  sw->add_option("--grid", c.grid, "parameter tuples 'a,b,c;a,b,c' (default: powers of two)");
  sw->add_option("--out", c.out, "CSV file");

  auto* st = app.add_subcommand("stokes", "SIP-DG Stokes convergence study");
  st->add_option("--eps", c.eps, "comma-separated eps values")->capture_default_str();
  st->add_option("--N", c.Ns, "comma-separated N values")->capture_default_str();
  st->add_option("--mesh", c.mesh_kind, "shishkin or uniform")->capture_default_str();
  st->add_option("--tau", c.tau, "transition point override");
  st->add_option("--gamma", c.gamma, "penalty override");
  st->add_option("--log", c.log, "log in the transition point")->check(CLI::IsMember({"natural", "base10"}))->capture_default_str();
  st->add_option("--gamma-log", c.gamma_log, "log in gamma = 4k^2 ceil(log sigma)")
      ->check(CLI::IsMember({"natural", "base10"}))
      ->capture_default_str();
  st->add_option("--facet-scale", c.facet_scale, "h_e in gamma/h_e: length or height")
      ->check(CLI::IsMember({"length", "height"}))
      ->capture_default_str();
  st->add_option("--quad-degree", c.quad_degree, "quadrature degree for errors")->capture_default_str();
  st->add_option("--out", c.out, "CSV file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*mesh) return run_mesh(c);
    if (*interp) return run_interpolate(c);
    if (*verify) return run_verify(c);
    if (*sw) return run_sweep(c);
    if (*st) return run_stokes(c);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}
