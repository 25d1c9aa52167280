#include "flexoiga/scenario.hpp"

#include "flexoiga/error.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace flexoiga {

using Json = nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const char* kDefaults = R"({
  "name": "custom",
  "analysis": "standard",
  "geometry": {"topology": "SOLID", "a": 1e-6, "b": 1e-6, "rho": 0.2, "nx": 1, "ny": 1,
               "n": null, "aspect": null, "degree": 3, "elements": 1, "elements_y": 0},
  "material": {"preset": "coupled"},
  "dg": {"tau": 4e10, "alpha": null, "beta": 1e10},
  "bc": {"mechanical": "cantilever", "clamp": "full", "tip_force": null, "tip_deflection": null,
         "compression": 0.05, "phi_bottom": 0.0, "phi_top": null},
  "kem": {"mode": "combined", "hprime": 1.0, "slenderness": 10, "patches": 2},
  "output": {"profile_points": 0, "samples": 21},
  "sweep": []
})";

// Built-in scenarios as patches over the defaults.
const std::vector<std::pair<std::string, const char*>>& builtin_table() {
  static const std::vector<std::pair<std::string, const char*>> table = {
      {"two_patch_jump", R"({
        "geometry": {"a": 5e-6, "b": 1e-6, "nx": 2, "ny": 1},
        "bc": {"tip_force": -1.0},
        "sweep": [{"key": "dg.tau", "values": [0, 1e6, 1e8, 1e10, 4e10, 1e12]}]})"},
      {"convergence_2p", R"({
        "geometry": {"a": 5e-6, "b": 1e-6, "nx": 2, "ny": 1},
        "bc": {"tip_force": -1.0},
        "dg": {"tau": 1e8},
        "sweep": [{"key": "geometry.elements", "values": [2, 4, 8, 16]}]})"},
      {"convergence_4p", R"({
        "geometry": {"a": 5e-6, "b": 0.5e-6, "nx": 2, "ny": 2},
        "bc": {"tip_force": -1.0},
        "dg": {"tau": 1e8},
        "sweep": [{"key": "geometry.elements", "values": [2, 4, 8, 16]}]})"},
      {"kem_validation", R"({
        "analysis": "kem_validation",
        "material": {"preset": "one_d"},
        "sweep": [{"key": "kem.mode", "values": ["flexo_only", "combined"]},
                  {"key": "kem.hprime", "values": [1, 2, 5, 10, 20]},
                  {"key": "geometry.elements", "values": [2, 4, 8]}]})"},
      {"closed_circuit_field", R"({
        "geometry": {"a": 5e-6, "b": 1e-6, "nx": 2, "ny": 1, "elements": 4},
        "bc": {"phi_bottom": 20.0, "phi_top": 0.0},
        "output": {"profile_points": 101}})"},
      {"uc_compression", R"({
        "material": {"preset": "flexo_only"},
        "bc": {"mechanical": "compression", "phi_top": "equipotential"},
        "sweep": [{"key": "geometry.topology", "values": ["UC1", "UC2", "UC3", "UC4"]},
                  {"key": "geometry.n", "values": [1, 5]}]})"},
      {"uc_compression_symmetric", R"({
        "material": {"preset": "flexo_only"},
        "bc": {"mechanical": "compression_symmetric", "phi_top": "equipotential"},
        "sweep": [{"key": "geometry.topology", "values": ["SOLID", "UC1"]}]})"},
      {"lattice_bending", R"({
        "material": {"preset": "flexo_only"},
        "geometry": {"ny": 2, "aspect": 5},
        "bc": {"tip_deflection": -5e-8, "phi_top": "equipotential"},
        "sweep": [{"key": "geometry.topology", "values": ["SOLID", "UC1", "UC2", "UC3", "UC4"]}]})"},
      {"converse_actuation", R"({
        "material": {"preset": "flexo_only"},
        "geometry": {"nx": 20, "ny": 2},
        "bc": {"phi_bottom": 20.0, "phi_top": 0.0},
        "sweep": [{"key": "geometry.elements", "values": [1, 2]}]})"},
      {"kem_size_effect", R"({
        "material": {"preset": "flexo_only"},
        "geometry": {"aspect": 5},
        "bc": {"tip_deflection": -5e-8, "phi_top": "equipotential"},
        "sweep": [{"key": "geometry.topology", "values": ["SOLID", "UC1"]},
                  {"key": "geometry.ny", "values": [1, 2, 3, 4]}]})"},
  };
  return table;
}

Json parse_json(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    fail(ErrorKind::ConfigError, what + ": " + e.what());
  }
}

Json builtin_patch(const std::string& name) {
  for (const auto& [n, text] : builtin_table()) {
    if (n == name) {
      Json patch = parse_json(text, "built-in scenario '" + name + "'");
      patch["name"] = name;
      return patch;
    }
  }
  fail(ErrorKind::ConfigError, "unknown scenario '" + name + "'");
}

// Rejects keys absent from the defaults so typos surface as config errors.
void check_keys(const Json& cfg, const Json& defaults, const std::string& prefix) {
  for (auto it = cfg.begin(); it != cfg.end(); ++it) {
    const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (!defaults.contains(it.key())) {
      // Material constants are free-form overrides checked when applied.
      if (prefix == "material") continue;
      fail(ErrorKind::ConfigError, "unknown config key '" + key + "'");
    }
    if (it.value().is_object() && defaults[it.key()].is_object()) check_keys(it.value(), defaults[it.key()], key);
  }
}

Json effective(const Json& user) {
  Json cfg = parse_json(kDefaults, "defaults");
  if (user.contains("base")) {
    require(user["base"].is_string(), ErrorKind::ConfigError, "'base' must name a built-in scenario");
    cfg.merge_patch(builtin_patch(user["base"].get<std::string>()));
  }
  Json rest = user;
  rest.erase("base");
  check_keys(rest, cfg, "");
  cfg.merge_patch(rest);
  return cfg;
}

Json* walk(Json& cfg, const std::string& dotted, bool create) {
  Json* node = &cfg;
  std::stringstream ss(dotted);
  std::string part;
  while (std::getline(ss, part, '.')) {
    require(!part.empty(), ErrorKind::ConfigError, "malformed key '" + dotted + "'");
    require(node->is_object(), ErrorKind::ConfigError, "'" + dotted + "' does not name a config entry");
    if (!node->contains(part)) {
      require(create, ErrorKind::ConfigError, "unknown config key '" + dotted + "'");
      (*node)[part] = nullptr;
    }
    node = &(*node)[part];
  }
  return node;
}

template <class T>
T get(const Json& cfg, const std::string& dotted) {
  Json copy = cfg;
  const Json* node = walk(copy, dotted, false);
  try {
    return node->get<T>();
  } catch (const Json::exception&) {
    fail(ErrorKind::ConfigError, "config key '" + dotted + "' has the wrong type");
  }
}

std::optional<double> get_optional(const Json& cfg, const std::string& dotted) {
  Json copy = cfg;
  const Json* node = walk(copy, dotted, false);
  if (node->is_null()) return std::nullopt;
  require(node->is_number(), ErrorKind::ConfigError, "config key '" + dotted + "' must be a number or null");
  return node->get<double>();
}

int get_int(const Json& cfg, const std::string& dotted) {
  const double v = get<double>(cfg, dotted);
  require(v == std::floor(v) && std::abs(v) < 1e9, ErrorKind::ConfigError, "config key '" + dotted + "' must be an integer");
  return static_cast<int>(v);
}

struct SweepAxis {
  std::string key;
  std::vector<Json> values;
};

std::vector<SweepAxis> sweep_axes(const Json& cfg) {
  const Json& sweep = cfg["sweep"];
  require(sweep.is_array(), ErrorKind::ConfigError, "'sweep' must be a list of {key, values} entries");
  std::vector<SweepAxis> axes;
  for (const Json& axis : sweep) {
    require(axis.is_object() && axis.contains("key") && axis.contains("values") && axis["key"].is_string() &&
                axis["values"].is_array() && !axis["values"].empty(),
            ErrorKind::ConfigError, "each sweep entry needs a key and a non-empty values list");
    SweepAxis a{axis["key"].get<std::string>(), {}};
    require(a.key != "sweep" && a.key.rfind("sweep.", 0) != 0, ErrorKind::ConfigError, "cannot sweep the sweep");
    for (const Json& v : axis["values"]) a.values.push_back(v);
    axes.push_back(std::move(a));
  }
  return axes;
}

struct SweepPoint {
  Json cfg;
  std::vector<Cell> coords;
};

std::vector<SweepPoint> expand(const Json& cfg) {
  const std::vector<SweepAxis> axes = sweep_axes(cfg);
  std::vector<SweepPoint> points{{cfg, {}}};
  for (const SweepAxis& axis : axes) {
    std::vector<SweepPoint> next;
    for (const SweepPoint& p : points) {
      for (const Json& v : axis.values) {
        SweepPoint q = p;
        *walk(q.cfg, axis.key, false) = v;
        if (v.is_number()) {
          q.coords.emplace_back(v.get<double>());
        } else if (v.is_string()) {
          q.coords.emplace_back(v.get<std::string>());
        } else {
          q.coords.emplace_back(v.dump());
        }
        next.push_back(std::move(q));
      }
    }
    points = std::move(next);
  }
  return points;
}

enum class Mechanical { Cantilever, Compression, CompressionSymmetric };

struct Params {
  std::string analysis;
  LatticeSpec lattice;
  MaterialSet material;
  AssemblyOptions dg;
  Mechanical mechanical = Mechanical::Cantilever;
  bool roller_clamp = false;
  std::optional<double> tip_force;
  std::optional<double> tip_deflection;
  double compression = 0.0;
  std::optional<double> phi_bottom;
  std::optional<double> phi_top;
  bool top_equipotential = false;
  KemMode kem_mode = KemMode::Combined;
  double hprime = 1.0;
  double slenderness = 10.0;
  int kem_patches = 2;
  int profile_points = 0;
  int samples = 21;
};

MaterialSet parse_material(const Json& m) {
  require(m.is_object(), ErrorKind::ConfigError, "'material' must be an object");
  MaterialSet mat = material_preset(m.value("preset", std::string("coupled")));
  const std::map<std::string, double MaterialSet::*> fields = {
      {"E", &MaterialSet::E},         {"nu", &MaterialSet::nu},     {"kappa11", &MaterialSet::kappa11},
      {"kappa22", &MaterialSet::kappa22}, {"e11", &MaterialSet::e11}, {"e15", &MaterialSet::e15},
      {"e21", &MaterialSet::e21},     {"e22", &MaterialSet::e22},   {"mu11", &MaterialSet::mu11},
      {"mu12", &MaterialSet::mu12},   {"mu44", &MaterialSet::mu44}, {"length_scale", &MaterialSet::length_scale}};
  for (auto it = m.begin(); it != m.end(); ++it) {
    if (it.key() == "preset") continue;
    const auto f = fields.find(it.key());
    require(f != fields.end(), ErrorKind::ConfigError, "unknown material constant '" + it.key() + "'");
    require(it.value().is_number(), ErrorKind::ConfigError, "material constant '" + it.key() + "' must be a number");
    mat.*(f->second) = it.value().get<double>();
  }
  return mat;
}

Params parse_params(const Json& cfg) {
  Params p;
  try {
    p.analysis = get<std::string>(cfg, "analysis");
    require(p.analysis == "standard" || p.analysis == "kem_validation", ErrorKind::ConfigError,
            "analysis must be 'standard' or 'kem_validation'");

    LatticeSpec& l = p.lattice;
    l.topology = get<std::string>(cfg, "geometry.topology");
    topology_struts(l.topology);
    l.a = get<double>(cfg, "geometry.a");
    l.b = get<double>(cfg, "geometry.b");
    l.rho = get<double>(cfg, "geometry.rho");
    l.nx = get_int(cfg, "geometry.nx");
    l.ny = get_int(cfg, "geometry.ny");
    if (!cfg["geometry"]["n"].is_null()) l.nx = l.ny = get_int(cfg, "geometry.n");
    if (!cfg["geometry"]["aspect"].is_null()) l.nx = get_int(cfg, "geometry.aspect") * l.ny;
    l.degree = get_int(cfg, "geometry.degree");
    l.elements = get_int(cfg, "geometry.elements");
    l.elements_y = get_int(cfg, "geometry.elements_y");
    require(l.rho > 0.0 && l.rho <= 1.0, ErrorKind::ConfigError, "geometry.rho must lie in (0, 1]");
    require(l.degree >= 2, ErrorKind::ConfigError, "geometry.degree must be >= 2");
    l.validate();

    p.material = parse_material(cfg["material"]);
    p.material.validate();

    p.dg.tau = get_optional(cfg, "dg.tau");
    const std::optional<double> alpha = get_optional(cfg, "dg.alpha");
    p.dg.beta = get<double>(cfg, "dg.beta");
    require(!p.dg.tau || *p.dg.tau >= 0.0, ErrorKind::ConfigError, "dg.tau must be >= 0");
    require(p.dg.tau || alpha, ErrorKind::ConfigError, "set dg.tau or dg.alpha");
    require(!alpha || *alpha >= 0.0, ErrorKind::ConfigError, "dg.alpha must be >= 0");
    p.dg.alpha = alpha.value_or(0.0);
    require(p.dg.beta > 0.0, ErrorKind::ConfigError, "dg.beta must be > 0");

    const std::string mech = get<std::string>(cfg, "bc.mechanical");
    if (mech == "cantilever") {
      p.mechanical = Mechanical::Cantilever;
    } else if (mech == "compression") {
      p.mechanical = Mechanical::Compression;
    } else if (mech == "compression_symmetric") {
      p.mechanical = Mechanical::CompressionSymmetric;
    } else {
      fail(ErrorKind::ConfigError, "bc.mechanical must be cantilever, compression or compression_symmetric");
    }
    const std::string clamp = get<std::string>(cfg, "bc.clamp");
    require(clamp == "full" || clamp == "roller", ErrorKind::ConfigError, "bc.clamp must be 'full' or 'roller'");
    p.roller_clamp = clamp == "roller";
    p.tip_force = get_optional(cfg, "bc.tip_force");
    p.tip_deflection = get_optional(cfg, "bc.tip_deflection");
    require(!(p.tip_force && p.tip_deflection), ErrorKind::ConfigError,
            "bc.tip_force and bc.tip_deflection are mutually exclusive");
    p.compression = get<double>(cfg, "bc.compression");
    p.phi_bottom = get_optional(cfg, "bc.phi_bottom");
    const Json& top = cfg["bc"]["phi_top"];
    if (top.is_string()) {
      require(top.get<std::string>() == "equipotential", ErrorKind::ConfigError,
              "bc.phi_top must be a number, null or 'equipotential'");
      p.top_equipotential = true;
    } else {
      p.phi_top = get_optional(cfg, "bc.phi_top");
    }

    p.kem_mode = parse_kem_mode(get<std::string>(cfg, "kem.mode"));
    p.hprime = get<double>(cfg, "kem.hprime");
    p.slenderness = get<double>(cfg, "kem.slenderness");
    p.kem_patches = get_int(cfg, "kem.patches");
    require(p.hprime > 0.0 && p.slenderness > 0.0 && p.kem_patches >= 1, ErrorKind::ConfigError,
            "kem.hprime, kem.slenderness and kem.patches must be positive");
    p.profile_points = get_int(cfg, "output.profile_points");
    p.samples = get_int(cfg, "output.samples");
    require(p.profile_points == 0 || p.profile_points >= 2, ErrorKind::ConfigError,
            "output.profile_points must be 0 or >= 2");
    require(p.samples >= 2, ErrorKind::ConfigError, "output.samples must be >= 2");
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ConfigError) throw;
    fail(ErrorKind::ConfigError, e.what());
  }
  return p;
}

struct Problem {
  MultiPatchMesh mesh;
  BoundarySpec bc;
  double width = 0.0;
  double height = 0.0;
};

Problem build_problem(const Params& p) {
  MultiPatchMesh mesh = tessellate(p.lattice);
  const double W = p.lattice.a * p.lattice.nx, H = p.lattice.b * p.lattice.ny;
  const double tol = 1e-9 * std::hypot(W, H);
  auto nodes_where = [&](auto pred) { return mesh.nodes_on_edges(mesh.select_boundary_edges(pred)); };
  const std::vector<int> left = nodes_where([&](const Vec2& x) { return x.x() < tol; });
  const std::vector<int> right = nodes_where([&](const Vec2& x) { return x.x() > W - tol; });
  const std::vector<int> bottom = nodes_where([&](const Vec2& x) { return x.y() < tol; });
  const std::vector<int> top = nodes_where([&](const Vec2& x) { return x.y() > H - tol; });

  BoundarySpec bc;
  auto corner_node = [&](const std::vector<int>& nodes, const Vec2& at) {
    require(!nodes.empty(), ErrorKind::InvalidArgument, "no boundary nodes for the support");
    int best = nodes.front();
    for (int n : nodes) {
      if ((mesh.node_positions()[n] - at).norm() < (mesh.node_positions()[best] - at).norm()) best = n;
    }
    return std::vector<int>{best};
  };

  switch (p.mechanical) {
    case Mechanical::Cantilever:
      require(!left.empty(), ErrorKind::InvalidArgument, "no material on the clamped edge");
      bc.fix_u(mesh, left, 0, 0.0);
      if (p.roller_clamp) {
        bc.fix_u(mesh, corner_node(left, Vec2(0, 0)), 1, 0.0);
      } else {
        bc.fix_u(mesh, left, 1, 0.0);
      }
      if (p.tip_force) {
        require(!right.empty(), ErrorKind::InvalidArgument, "no material on the loaded edge");
        double loaded = 0.0;
        for (const EdgeRef& e : mesh.select_boundary_edges([&](const Vec2& x) { return x.x() > W - tol; })) {
          const auto [xi0, eta0] = edge_parameter(e.edge, 0.0);
          const auto [xi1, eta1] = edge_parameter(e.edge, 1.0);
          loaded += (mesh.patch(e.patch).map_point(xi1, eta1) - mesh.patch(e.patch).map_point(xi0, eta0)).norm();
        }
        bc.traction(mesh.select_boundary_edges([&](const Vec2& x) { return x.x() > W - tol; }),
                    Vec2(0.0, *p.tip_force / loaded));
      }
      if (p.tip_deflection) bc.fix_u(mesh, right, 1, *p.tip_deflection);
      break;
    case Mechanical::Compression:
      bc.fix_u(mesh, bottom, 0, 0.0);
      bc.fix_u(mesh, bottom, 1, 0.0);
      bc.fix_u(mesh, top, 1, -p.compression * H);
      break;
    case Mechanical::CompressionSymmetric:
      bc.fix_u(mesh, bottom, 1, 0.0);
      bc.fix_u(mesh, corner_node(bottom, Vec2(0, 0)), 0, 0.0);
      bc.fix_u(mesh, top, 1, -p.compression * H);
      break;
  }
  if (p.phi_bottom) bc.fix_phi(mesh, bottom, *p.phi_bottom);
  if (p.phi_top) bc.fix_phi(mesh, top, *p.phi_top);
  if (p.top_equipotential) bc.equipotential(mesh, top);
  return Problem{std::move(mesh), std::move(bc), W, H};
}

// Mean of sampled fields over boundary edges selected by pred.
template <class Pred>
FieldSample edge_mean(const SolutionField& sol, const MultiPatchMesh& mesh, const MaterialMatrices& mm, Pred&& pred) {
  FieldSample mean;
  int count = 0;
  for (const EdgeRef& e : mesh.select_boundary_edges(pred)) {
    for (int k = 0; k < 5; ++k) {
      const auto [xi, eta] = edge_parameter(e.edge, (k + 0.5) / 5.0);
      const FieldSample s = sample_at(sol, mesh, mm, e.patch, xi, eta);
      mean.u += s.u;
      mean.phi += s.phi;
      ++count;
    }
  }
  if (count == 0) {
    mean.u.setConstant(kNaN);
    mean.phi = kNaN;
    return mean;
  }
  mean.u /= count;
  mean.phi /= count;
  return mean;
}

const std::vector<std::string> kStandardColumns = {
    "dofs",       "patches",    "interfaces", "residual", "jump",   "tip_u2", "max_u", "max_abs_phi",
    "phi_top",    "dphi_prime", "phi_norm",   "W_mech",   "W_elec", "W_work", "K_EM"};

const std::vector<std::string> kKemColumns = {"dofs",     "residual",   "thickness", "hprime", "K_EM",
                                              "K_EM_ref", "normalized", "analytic",  "rel_error"};

struct PointOutput {
  std::vector<Cell> values;
  std::vector<std::vector<Cell>> profile;
};

PointOutput run_standard(const Params& p, const std::string& label, const RunObserver& obs) {
  Problem prob = build_problem(p);
  const MultiPatchMesh& mesh = prob.mesh;
  const CoupledSystem sys = assemble(mesh, p.material, prob.bc, p.dg);
  const SolutionField sol = solve(sys);
  if (obs.on_solution) obs.on_solution(label, mesh, sol);

  const MaterialMatrices mm(p.material);
  const double W = prob.width, H = prob.height, tol = 1e-9 * std::hypot(W, H);
  const FieldSample tip = edge_mean(sol, mesh, mm, [&](const Vec2& x) { return x.x() > W - tol; });
  const FieldSample top = edge_mean(sol, mesh, mm, [&](const Vec2& x) { return x.y() > H - tol; });

  double max_phi = 0.0;
  for (int pi = 0; pi < mesh.num_patches(); ++pi) {
    for (int j = 0; j < p.samples; ++j) {
      for (int i = 0; i < p.samples; ++i) {
        const double xi = static_cast<double>(i) / (p.samples - 1), eta = static_cast<double>(j) / (p.samples - 1);
        max_phi = std::max(max_phi, std::abs(sample_at(sol, mesh, mm, pi, xi, eta).phi));
      }
    }
  }
  const bool compressive = p.mechanical != Mechanical::Cantilever;
  const double phi_ref = compressive ? p.material.mu12 * p.compression / p.material.kappa22 : kNaN;
  const double jump = mesh.interfaces().empty() ? kNaN : interface_jump_metric(sol, mesh, p.material);
  const EnergyReport en = energies(sol, mesh, p.material);

  PointOutput out;
  out.values = {static_cast<double>(sol.num_free_dofs),
                static_cast<double>(mesh.num_patches()),
                static_cast<double>(mesh.interfaces().size()),
                sol.residual,
                jump,
                tip.u.y(),
                max_displacement(sol, mesh, p.samples),
                max_phi,
                top.phi,
                top.phi / H,
                max_phi / phi_ref,
                en.W_mech,
                en.W_elec,
                en.W_work,
                en.K_EM};

  if (p.profile_points > 0) {
    std::vector<Vec2> pts;
    for (int k = 0; k < p.profile_points; ++k) {
      pts.emplace_back(0.5 * W, H * k / (p.profile_points - 1.0));
    }
    const std::vector<FieldSample> s = sample_fields(sol, mesh, p.material, pts);
    for (std::size_t k = 0; k < s.size(); ++k) {
      out.profile.push_back({label, pts[k].y(), s[k].phi, s[k].state.E.y()});
    }
  }
  return out;
}

PointOutput run_kem_validation(Params p, const std::string& label, const RunObserver& obs) {
  const MaterialSet base = p.material;
  const double t = p.hprime * base.mu12 / std::abs(base.e21);
  p.lattice.topology = "SOLID";
  p.lattice.nx = p.kem_patches;
  p.lattice.ny = 1;
  p.lattice.b = t;
  p.lattice.a = p.slenderness * t / p.kem_patches;
  const int per_patch = std::max(1, static_cast<int>(std::lround(p.lattice.a / p.lattice.b)));
  p.lattice.elements_y = p.lattice.elements;
  p.lattice.elements *= per_patch;
  p.mechanical = Mechanical::Cantilever;
  if (!p.tip_force && !p.tip_deflection) p.tip_force = -1.0;

  auto coupling = [&](const MaterialSet& mat, const std::string& tag, int* dofs, double* res) {
    Params q = p;
    q.material = mat;
    Problem prob = build_problem(q);
    const SolutionField sol = solve(assemble(prob.mesh, mat, prob.bc, q.dg));
    if (obs.on_solution) obs.on_solution(label + "_" + tag, prob.mesh, sol);
    if (dofs) *dofs = sol.num_free_dofs;
    if (res) *res = sol.residual;
    return energies(sol, prob.mesh, mat).K_EM;
  };

  MaterialSet mode_mat = base;
  if (p.kem_mode == KemMode::FlexoOnly) mode_mat.e11 = mode_mat.e15 = mode_mat.e21 = mode_mat.e22 = 0.0;
  if (p.kem_mode == KemMode::PiezoOnly) mode_mat.mu11 = mode_mat.mu12 = mode_mat.mu44 = 0.0;
  MaterialSet ref_mat = base;
  ref_mat.mu11 = ref_mat.mu12 = ref_mat.mu44 = 0.0;

  int dofs = 0;
  double res = 0.0;
  const double k = coupling(mode_mat, "mode", &dofs, &res);
  const double k_ref = coupling(ref_mat, "ref", nullptr, nullptr);
  const double normalized = k / k_ref;
  const double analytic = analytical_kem(base, t, p.kem_mode).normalized;

  PointOutput out;
  out.values = {static_cast<double>(dofs), res, t, normalized_thickness(base, t), k, k_ref, normalized, analytic,
                std::abs(normalized - analytic) / analytic};
  return out;
}

}  // namespace

ScenarioConfig ScenarioConfig::from_text(const std::string& json_text, const std::string& base) {
  Json user = parse_json(json_text, "config");
  require(user.is_object(), ErrorKind::ConfigError, "config must be a JSON object");
  if (!base.empty() && !user.contains("base")) user["base"] = base;
  return ScenarioConfig(effective(user).dump());
}

ScenarioConfig ScenarioConfig::from_file(const std::string& path, const std::string& base) {
  std::ifstream f(path);
  require(f.good(), ErrorKind::ConfigError, "cannot read config '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return from_text(ss.str(), base);
}

ScenarioConfig ScenarioConfig::builtin(const std::string& name) {
  return from_text(Json{{"base", name}}.dump());
}

void ScenarioConfig::set(const std::string& dotted_key, const std::string& value) {
  Json cfg = Json::parse(text_);
  Json v;
  try {
    v = Json::parse(value);
  } catch (const Json::parse_error&) {
    v = value;
  }
  const bool free_form = dotted_key.rfind("material.", 0) == 0;
  *walk(cfg, dotted_key, free_form) = v;
  // An explicit value replaces a sweep over the same key.
  if (cfg["sweep"].is_array()) {
    Json kept = Json::array();
    for (const Json& axis : cfg["sweep"]) {
      if (!(axis.is_object() && axis.value("key", std::string()) == dotted_key)) kept.push_back(axis);
    }
    cfg["sweep"] = kept;
  }
  text_ = cfg.dump();
}

std::string ScenarioConfig::name() const { return Json::parse(text_)["name"].get<std::string>(); }

std::string ScenarioConfig::text() const { return Json::parse(text_).dump(2); }

void ScenarioConfig::validate() const {
  for (const SweepPoint& pt : expand(Json::parse(text_))) parse_params(pt.cfg);
}

std::vector<std::string> builtin_scenarios() {
  std::vector<std::string> names;
  for (const auto& entry : builtin_table()) names.push_back(entry.first);
  return names;
}

ScenarioResult run_scenario(const ScenarioConfig& config, const RunObserver& observer) {
  const Json cfg = Json::parse(config.text());
  const std::vector<SweepAxis> axes = sweep_axes(cfg);
  const std::vector<SweepPoint> points = expand(cfg);
  std::vector<Params> params;
  for (const SweepPoint& pt : points) params.push_back(parse_params(pt.cfg));

  ScenarioResult result;
  result.name = cfg["name"].get<std::string>();
  for (const SweepAxis& a : axes) result.table.header.push_back(a.key);
  const bool kem = cfg["analysis"] == "kem_validation";
  for (const std::string& c : kem ? kKemColumns : kStandardColumns) result.table.header.push_back(c);
  result.profile.header = {"run", "y", "phi", "E2"};

  for (std::size_t i = 0; i < points.size(); ++i) {
    const std::string label = result.name + "_" + std::to_string(i);
    const auto t0 = std::chrono::steady_clock::now();
    PointOutput out = kem ? run_kem_validation(params[i], label, observer) : run_standard(params[i], label, observer);
    std::vector<Cell> row = points[i].coords;
    row.insert(row.end(), out.values.begin(), out.values.end());
    result.table.add_row(std::move(row));
    for (auto& r : out.profile) result.profile.add_row(std::move(r));
    if (observer.on_point) {
      observer.on_point(label, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
  }
  return result;
}

}  // namespace flexoiga
