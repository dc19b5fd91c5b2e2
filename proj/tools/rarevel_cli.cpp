// Command-line front end: grid generation, steady solves, flux comparison,
// mesh generation and file summaries.

#include <cstdio>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "rarevel/config.hpp"
#include "rarevel/grid_io.hpp"
#include "rarevel/output.hpp"
#include "rarevel/rankine_hugoniot.hpp"
#include "rarevel/sample_fields.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_input = 2;
constexpr int exit_no_convergence = 3;
constexpr int exit_numerical = 4;

using namespace rarevel;

struct GridgenArgs {
  std::string fields_path, out_path = "grid.json";
  double c = 4.0, a = 2.0;
  std::string mode = "q1";
  bool extend = false;
  double wall_T = 0.0;
  int symmetrize = -1;
  bool rankine_hugoniot = false;
  double mach = 0.0, rho_up = 0.0, T_up = 0.0, T_wall = 0.0;
  bool axisym = false;
  int n_omega = 30;
  int max_depth = 12;
  // gas
  double R = 208.13, mu_ref = 2.117e-5, T_ref = 273.0, omega_visc = 0.81;
  int delta = 0, d_v = 2;
};

GasModel gas_from(const GridgenArgs& ga) {
  GasModel gas;
  gas.R = ga.R;
  gas.mu_ref = ga.mu_ref;
  gas.T_ref = ga.T_ref;
  gas.omega_visc = ga.omega_visc;
  gas.delta = ga.delta;
  gas.d_v = ga.d_v;
  gas.validate();
  return gas;
}

void grid_summary(const FineGridSpec& spec, const AmrVelocityGrid& grid) {
  long fine = spec.total_nodes();
  if (grid.coord == CoordSystem::cylindrical)
    fine *= grid.mode == QuadMode::p0 ? grid.n_omega : grid.n_omega + 1;
  const long amr = static_cast<long>(grid.points.size());
  double emin = 1e300, emax = 0.0;
  for (const auto& leaf : grid.leaves)
    for (int a = 0; a < std::min(grid.dim, 2); ++a) {
      const double e = grid.leaf_hi(leaf, a) - grid.leaf_lo(leaf, a);
      emin = std::min(emin, e);
      emax = std::max(emax, e);
    }
  std::printf("fine grid:   ");
  for (int a = 0; a < spec.dim; ++a) std::printf("%s%d", a ? " x " : "", spec.n_nodes[a]);
  std::printf(" nodes (dv = %.6g m/s), %ld points\n", spec.dv, fine);
  std::printf("AMR grid:    %zu leaves, %ld %s points\n", grid.leaves.size(), amr,
              to_string(grid.mode).c_str());
  std::printf("reduction:   %.2fx\n", fine / static_cast<double>(amr));
  std::printf("cell edges:  min %.6g, max %.6g m/s\n", emin, emax);
}

int cmd_gridgen(const GridgenArgs& ga) {
  const GasModel gas = gas_from(ga);
  MacroField field;
  if (ga.rankine_hugoniot) {
    if (!(ga.mach > 1.0) || !(ga.T_up > 0.0) || !(ga.rho_up > 0.0) || !(ga.T_wall > 0.0))
      throw InputError("gridgen --rankine-hugoniot needs --mach > 1, --rho-up, --t-up, --t-wall");
    PrimitiveState up;
    up.rho = ga.rho_up;
    up.T = ga.T_up;
    const double gamma = (5.0 + gas.delta) / (3.0 + gas.delta);
    up.u = {ga.mach * std::sqrt(gamma * gas.R * ga.T_up), 0.0, 0.0};
    field = rankine_hugoniot_fields(up, ga.T_wall, gas);
  } else {
    if (ga.fields_path.empty()) throw InputError("gridgen needs --fields or --rankine-hugoniot");
    field = load_macro_field(ga.fields_path);
  }

  const QuadMode mode = ga.mode == "p0" ? QuadMode::p0 : QuadMode::q1;
  const bool extend = ga.extend || (mode == QuadMode::p0 && ga.extend);
  std::optional<double> wall_T;
  if (ga.wall_T > 0.0) wall_T = ga.wall_T;

  AmrVelocityGrid grid;
  FineGridSpec spec;
  if (ga.axisym) {
    spec = fine_grid_spec_axisym(field, gas, ga.c, ga.a, extend);
    grid = generate_axisym_grid(field, gas, ga.c, ga.a, ga.n_omega, extend, ga.max_depth);
    attach_quadrature(grid, mode);
  } else {
    spec = fine_grid_spec(field, gas, ga.c, ga.a, extend);
    if (ga.symmetrize >= 0) {
      const FineGridSpec hspec = half_spec(spec, ga.symmetrize);
      const SupportFunction phi = build_support_function(field, hspec, gas, ga.c, wall_T);
      grid = generate_amr(hspec, phi, ga.a, ga.max_depth);
      attach_quadrature(grid, mode);
      grid = symmetrize_grid(grid, ga.symmetrize);
      spec = symmetrize_spec(spec, ga.symmetrize);
    } else {
      const SupportFunction phi = build_support_function(field, spec, gas, ga.c, wall_T);
      grid = generate_amr(spec, phi, ga.a, ga.max_depth);
      attach_quadrature(grid, mode);
    }
  }
  write_grid_json(grid, ga.out_path);
  grid_summary(spec, grid);
  std::printf("wrote %s\n", ga.out_path.c_str());
  return exit_ok;
}

int cmd_solve(const std::string& config_path, const std::string& grid_path,
              const std::string& init_override) {
  RunConfig cfg = load_run_config(config_path);
  if (!init_override.empty()) {
    if (init_override == "upstream") {
      cfg.init.type = "upstream";
    } else {
      cfg.init.type = "macro-file";
      cfg.init.path = init_override;
    }
  }
  const AmrVelocityGrid grid = read_grid_json(grid_path);
  const SpaceMesh2D mesh = cfg.mesh.build();

  BgkSolver solver(mesh, grid, cfg.gas, cfg.bcs, cfg.solver);

  std::optional<MacroField> init_field;
  std::optional<PrimitiveState> init_state;
  if (cfg.init.type == "macro-file") {
    init_field = load_macro_field(cfg.init.path);
  } else {
    for (const auto& bc : cfg.bcs)
      if (const auto* in = std::get_if<Inflow>(&bc)) {
        init_state = in->state;
        break;
      }
    if (!init_state) throw InputError("init 'upstream' needs an inflow boundary");
  }

  const SteadySolveReport report = solver.run_to_steady(init_field, init_state);

  namespace fs = std::filesystem;
  fs::create_directories(cfg.output.dir);
  const auto path = [&](const std::string& name) { return (fs::path(cfg.output.dir) / name).string(); };
  write_vtk_fields(report.final_field, cfg.gas, path(cfg.output.vtk));
  save_macro_field(report.final_field, path(cfg.output.macro), field_extrema_comment(report.final_field));
  write_wall_flux_csv(report.wall_flux, report.wall_param_name, path(cfg.output.wall_flux));
  write_residual_csv(report.residual_history, report.dt_history, path(cfg.output.residuals));

  std::printf("%s after %d iterations, residual %.3e (%.1f s)\n",
              report.converged ? "converged" : "NOT converged", report.outer_iterations,
              report.residual_history.empty() ? 0.0 : report.residual_history.back(),
              report.wall_seconds);
  std::printf("wrote %s, %s, %s, %s\n", path(cfg.output.vtk).c_str(), path(cfg.output.macro).c_str(),
              path(cfg.output.wall_flux).c_str(), path(cfg.output.residuals).c_str());
  return report.converged ? exit_ok : exit_no_convergence;
}

int cmd_flux_compare(const std::string& a, const std::string& b, double tol) {
  const FluxComparison cmp = compare_flux_files(a, b);
  std::printf("max relative difference: %.4f%%\n", 100.0 * cmp.max_rel);
  std::printf("L2  relative difference: %.4f%%\n", 100.0 * cmp.l2_rel);
  std::printf("samples compared: %zu\n", cmp.samples);
  if (tol > 0.0 && cmp.max_rel > tol) {
    std::printf("FAIL: above tolerance %.4f%%\n", 100.0 * tol);
    return exit_no_convergence;
  }
  return exit_ok;
}

int cmd_info(const std::string& path) {
  if (path.size() > 5 && path.substr(path.size() - 5) == ".json") {
    const AmrVelocityGrid grid = read_grid_json(path);
    std::printf("grid: %s, dim %d, mode %s\n", to_string(grid.coord).c_str(), grid.dim,
                to_string(grid.mode).c_str());
    for (int a = 0; a < grid.dim; ++a)
      std::printf("  axis %d: [%.6g, %.6g]\n", a, grid.root_lo[a], grid.root_hi[a]);
    std::printf("  leaves %zu, points %zu\n", grid.leaves.size(), grid.points.size());
    double wsum = 0.0;
    for (double w : grid.weights) wsum += w;
    std::printf("  sum(weights) = %.12g, root volume = %.12g\n", wsum, grid.root_volume());
    if (grid.symmetry_axis >= 0) std::printf("  symmetric about v[%d] = 0\n", grid.symmetry_axis);
    return exit_ok;
  }
  const MacroField field = load_macro_field(path);
  std::printf("macro field: %d x %d", field.ni, field.nj);
  if (field.nk > 1) std::printf(" x %d", field.nk);
  std::printf(" cells, %d velocity components\n%s\n", field.vel_dim,
              field_extrema_comment(field).c_str());
  return exit_ok;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"locally refined discrete-velocity grids and a steady BGK solver"};
  app.require_subcommand(1);

  GridgenArgs ga;
  auto* gridgen = app.add_subcommand("gridgen", "generate an AMR velocity grid from macro fields");
  gridgen->add_option("--fields", ga.fields_path, "macro-field file");
  gridgen->add_option("--c", ga.c, "support width parameter");
  gridgen->add_option("--a", ga.a, "grid step parameter");
  gridgen->add_option("--mode", ga.mode, "quadrature: q1 or p0")
      ->check(CLI::IsMember({"q1", "p0"}));
  gridgen->add_flag("--extend", ga.extend, "widen fine bounds by one step per side (p0)");
  gridgen->add_option("--wall-t", ga.wall_T, "wall temperature sample at v = 0");
  gridgen->add_option("--symmetrize", ga.symmetrize, "mirror the grid about this velocity axis");
  gridgen->add_flag("--rankine-hugoniot", ga.rankine_hugoniot,
                    "build the 3-state upstream/downstream/wall field instead of reading one");
  gridgen->add_option("--mach", ga.mach, "upstream Mach number (with --rankine-hugoniot)");
  gridgen->add_option("--rho-up", ga.rho_up, "upstream density");
  gridgen->add_option("--t-up", ga.T_up, "upstream temperature");
  gridgen->add_option("--t-wall", ga.T_wall, "wall temperature");
  gridgen->add_flag("--axisym", ga.axisym, "cylindrical (v_x, zeta, omega) grid");
  gridgen->add_option("--n-omega", ga.n_omega, "omega cells in [0, pi]");
  gridgen->add_option("--max-depth", ga.max_depth, "refinement cap");
  gridgen->add_option("--gas-r", ga.R, "gas constant R");
  gridgen->add_option("--gas-mu-ref", ga.mu_ref, "reference viscosity");
  gridgen->add_option("--gas-t-ref", ga.T_ref, "reference temperature");
  gridgen->add_option("--gas-omega", ga.omega_visc, "viscosity exponent");
  gridgen->add_option("--gas-delta", ga.delta, "internal degrees of freedom");
  gridgen->add_option("--gas-dv", ga.d_v, "velocity dimension (2 or 3)");
  gridgen->add_option("-o,--output", ga.out_path, "grid file to write");

  std::string cfg_path, grid_path, init_override;
  auto* solve = app.add_subcommand("solve", "run the steady BGK solver");
  solve->add_option("--config", cfg_path, "run configuration JSON")->required();
  solve->add_option("--grid", grid_path, "velocity grid JSON")->required();
  solve->add_option("--init", init_override, "'upstream' or a macro-field path (overrides config)");

  std::string flux_a, flux_b;
  double flux_tol = 0.0;
  auto* fcmp = app.add_subcommand("flux-compare", "compare two wall-flux CSV profiles");
  fcmp->add_option("a", flux_a, "first profile")->required();
  fcmp->add_option("b", flux_b, "second profile")->required();
  fcmp->add_option("--tol", flux_tol, "fail when the max relative difference exceeds this");

  MeshSpec ms;
  std::string mesh_out = "mesh.json";
  auto* meshgen = app.add_subcommand("mesh-gen", "write a structured mesh file");
  meshgen->add_option("--generator", ms.generator, "annulus or rectangle")->required();
  meshgen->add_option("--ni", ms.ni, "cells in i");
  meshgen->add_option("--nj", ms.nj, "cells in j");
  meshgen->add_option("--r-inner", ms.r_inner, "annulus inner radius");
  meshgen->add_option("--r-outer", ms.r_outer, "annulus outer radius");
  meshgen->add_option("--theta0", ms.theta0_deg, "start angle, degrees");
  meshgen->add_option("--theta1", ms.theta1_deg, "end angle, degrees");
  meshgen->add_option("--first-cell", ms.first_cell, "wall-normal first cell height");
  meshgen->add_option("--x0", ms.x0);
  meshgen->add_option("--x1", ms.x1);
  meshgen->add_option("--y0", ms.y0);
  meshgen->add_option("--y1", ms.y1);
  meshgen->add_option("-o,--output", mesh_out, "mesh file to write");

  std::string info_path;
  auto* info = app.add_subcommand("info", "summarize a grid or macro-field file");
  info->add_option("path", info_path)->required();

  std::string sf_case = "cylinder", sf_out = "field.dat";
  int sf_ni = 50, sf_nj = 50;
  double sf_router = 0.35, sf_first = 0.0;
  auto* sfield = app.add_subcommand("sample-field", "write an analytic bow-shock surrogate field");
  sfield->add_option("--case", sf_case, "cylinder or sphere")
      ->check(CLI::IsMember({"cylinder", "sphere"}));
  sfield->add_option("--ni", sf_ni);
  sfield->add_option("--nj", sf_nj);
  sfield->add_option("--r-outer", sf_router);
  sfield->add_option("--first-cell", sf_first);
  sfield->add_option("-o,--output", sf_out, "field file to write");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gridgen->parsed()) return cmd_gridgen(ga);
    if (solve->parsed()) return cmd_solve(cfg_path, grid_path, init_override);
    if (fcmp->parsed()) return cmd_flux_compare(flux_a, flux_b, flux_tol);
    if (meshgen->parsed()) {
      ms.file.clear();
      write_mesh_json(ms.build(), mesh_out);
      std::printf("wrote %s\n", mesh_out.c_str());
      return exit_ok;
    }
    if (info->parsed()) return cmd_info(info_path);
    if (sfield->parsed()) {
      const BowShockParams par = sf_case == "sphere" ? sphere_mach20_air() : cylinder_mach20_argon();
      const MacroField field = sf_case == "sphere"
                                   ? bow_shock_field_axisym(sf_ni, sf_nj, sf_router, sf_first, par)
                                   : bow_shock_field(sf_ni, sf_nj, sf_router, sf_first, par);
      save_macro_field(field, sf_out,
                       "analytic bow-shock surrogate, case " + sf_case + "\n" +
                           field_extrema_comment(field));
      std::printf("wrote %s\n", sf_out.c_str());
      return exit_ok;
    }
  } catch (const InputError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return exit_input;
  } catch (const DomainError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return exit_input;
  } catch (const ConvergenceError& e) {
    std::fprintf(stderr, "convergence failure: %s\n", e.what());
    return exit_no_convergence;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return exit_numerical;
  }
  return exit_ok;
}
