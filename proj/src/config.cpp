#include "rarevel/config.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

namespace rarevel {

using nlohmann::json;

SpaceMesh2D MeshSpec::build() const {
  if (!file.empty()) return read_mesh_json(file);
  if (generator == "annulus")
    return annulus_sector_mesh(ni, nj, r_inner, r_outer, theta0_deg, theta1_deg, first_cell);
  if (generator == "rectangle") return rectangle_mesh(ni, nj, x0, x1, y0, y1);
  throw InputError("mesh spec: unknown generator '" + generator + "'");
}

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!allowed.count(key))
      throw InputError("config: unknown key '" + key + "' in " + where);
  }
}

BoundaryCondition parse_bc(const json& j, const std::string& where) {
  check_keys(j, {"type", "T_w", "rho", "u", "T", "axis"}, where);
  const std::string type = j.at("type").get<std::string>();
  if (type == "diffuse_wall") {
    DiffuseWall bc;
    bc.T_w = j.at("T_w").get<double>();
    return bc;
  }
  if (type == "inflow") {
    Inflow bc;
    bc.state.rho = j.at("rho").get<double>();
    const auto& u = j.at("u");
    for (std::size_t a = 0; a < u.size() && a < 3; ++a) bc.state.u[a] = u.at(a).get<double>();
    bc.state.T = j.at("T").get<double>();
    bc.state.validate();
    return bc;
  }
  if (type == "outflow") return Outflow{};
  if (type == "symmetry") {
    SymmetryPlane bc;
    bc.axis = j.value("axis", 1);
    return bc;
  }
  throw InputError("config: unknown boundary type '" + type + "' in " + where);
}

} // namespace

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError(std::string("config ") + path + ": " + e.what(), 0);
  }

  RunConfig cfg;
  try {
    check_keys(j, {"schema", "gas", "grid", "solver", "case", "output"}, "top level");
    if (j.value("schema", 0) != 1) throw InputError("config: schema must be 1");

    const auto& jg = j.at("gas");
    check_keys(jg, {"R", "mu_ref", "T_ref", "omega_visc", "delta", "d_v"}, "gas");
    cfg.gas.R = jg.at("R").get<double>();
    cfg.gas.mu_ref = jg.at("mu_ref").get<double>();
    cfg.gas.T_ref = jg.at("T_ref").get<double>();
    cfg.gas.omega_visc = jg.at("omega_visc").get<double>();
    cfg.gas.delta = jg.value("delta", 0);
    cfg.gas.d_v = jg.value("d_v", 2);
    cfg.gas.validate();

    if (j.contains("grid")) {
      const auto& jr = j.at("grid");
      check_keys(jr,
                 {"c", "a", "mode", "extend_for_p0", "n_omega", "coordinate_system", "wall_T",
                  "symmetrize_axis", "max_depth"},
                 "grid");
      cfg.grid.c = jr.value("c", 4.0);
      cfg.grid.a = jr.value("a", 2.0);
      cfg.grid.mode = jr.value("mode", std::string("q1"));
      cfg.grid.extend_for_p0 = jr.value("extend_for_p0", false);
      cfg.grid.n_omega = jr.value("n_omega", 30);
      cfg.grid.coordinate_system = jr.value("coordinate_system", std::string("cartesian"));
      if (jr.contains("wall_T")) cfg.grid.wall_T = jr.at("wall_T").get<double>();
      if (jr.contains("symmetrize_axis")) cfg.grid.symmetrize_axis = jr.at("symmetrize_axis").get<int>();
      cfg.grid.max_depth = jr.value("max_depth", 12);
      if (!(cfg.grid.c > 0.0) || !(cfg.grid.a > 0.0))
        throw InputError("config: grid c and a must be positive");
    }

    if (j.contains("solver")) {
      const auto& js = j.at("solver");
      check_keys(js,
                 {"dt_init", "dt_growth", "dt_max_factor", "inner_sweeps", "steady_tol",
                  "max_outer", "limiter", "second_order_half_factor", "eq_tol", "eq_max_iter",
                  "sweep_axis"},
                 "solver");
      cfg.solver.dt_init = js.value("dt_init", 0.0);
      cfg.solver.dt_growth = js.value("dt_growth", 1.05);
      cfg.solver.dt_max_factor = js.value("dt_max_factor", 1e6);
      cfg.solver.inner_sweeps = js.value("inner_sweeps", 3);
      cfg.solver.steady_tol = js.value("steady_tol", 1e-8);
      cfg.solver.max_outer = js.value("max_outer", 2000);
      cfg.solver.limiter_enabled = js.value("limiter", true);
      cfg.solver.second_order_half_factor = js.value("second_order_half_factor", false);
      cfg.solver.eq_tol = js.value("eq_tol", 1e-10);
      cfg.solver.eq_max_iter = js.value("eq_max_iter", 60);
      const std::string ax = js.value("sweep_axis", std::string("i"));
      if (ax != "i" && ax != "j") throw InputError("config: sweep_axis must be 'i' or 'j'");
      cfg.solver.sweep_axis = ax == "i" ? 0 : 1;
      cfg.solver.validate();
    }

    const auto& jc = j.at("case");
    check_keys(jc, {"mesh", "bc", "init"}, "case");
    const auto& jm = jc.at("mesh");
    check_keys(jm,
               {"file", "generator", "ni", "nj", "r_inner", "r_outer", "theta0_deg", "theta1_deg",
                "first_cell", "x0", "x1", "y0", "y1"},
               "case.mesh");
    cfg.mesh.file = jm.value("file", std::string());
    cfg.mesh.generator = jm.value("generator", std::string());
    cfg.mesh.ni = jm.value("ni", 30);
    cfg.mesh.nj = jm.value("nj", 30);
    cfg.mesh.r_inner = jm.value("r_inner", 0.1);
    cfg.mesh.r_outer = jm.value("r_outer", 0.35);
    cfg.mesh.theta0_deg = jm.value("theta0_deg", 90.0);
    cfg.mesh.theta1_deg = jm.value("theta1_deg", 180.0);
    cfg.mesh.first_cell = jm.value("first_cell", 0.0);
    cfg.mesh.x0 = jm.value("x0", 0.0);
    cfg.mesh.x1 = jm.value("x1", 1.0);
    cfg.mesh.y0 = jm.value("y0", 0.0);
    cfg.mesh.y1 = jm.value("y1", 1.0);
    if (cfg.mesh.file.empty() == cfg.mesh.generator.empty())
      throw InputError("config: case.mesh needs exactly one of 'file' or 'generator'");

    const auto& jb = jc.at("bc");
    check_keys(jb, {"imin", "imax", "jmin", "jmax"}, "case.bc");
    const char* names[4] = {"imin", "imax", "jmin", "jmax"};
    for (int s = 0; s < 4; ++s)
      cfg.bcs[s] = parse_bc(jb.at(names[s]), std::string("case.bc.") + names[s]);

    if (jc.contains("init")) {
      const auto& ji = jc.at("init");
      check_keys(ji, {"type", "path"}, "case.init");
      cfg.init.type = ji.value("type", std::string("upstream"));
      cfg.init.path = ji.value("path", std::string());
      if (cfg.init.type != "upstream" && cfg.init.type != "macro-file")
        throw InputError("config: init type must be 'upstream' or 'macro-file'");
      if (cfg.init.type == "macro-file" && cfg.init.path.empty())
        throw InputError("config: init macro-file needs a path");
    }

    if (j.contains("output")) {
      const auto& jo = j.at("output");
      check_keys(jo, {"dir", "vtk", "macro", "wall_flux", "residuals"}, "output");
      cfg.output.dir = jo.value("dir", std::string("."));
      cfg.output.vtk = jo.value("vtk", std::string("fields.vtk"));
      cfg.output.macro = jo.value("macro", std::string("fields.dat"));
      cfg.output.wall_flux = jo.value("wall_flux", std::string("wall_flux.csv"));
      cfg.output.residuals = jo.value("residuals", std::string("residuals.csv"));
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("config ") + path + ": " + e.what());
  }
  return cfg;
}

} // namespace rarevel
