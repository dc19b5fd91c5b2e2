#pragma once

#include <optional>
#include <string>

#include "rarevel/solver.hpp"

namespace rarevel {

struct MeshSpec {
  std::string file; ///< mesh JSON path; empty when a generator is used
  std::string generator; ///< "annulus" | "rectangle"
  int ni = 30, nj = 30;
  // annulus
  double r_inner = 0.1, r_outer = 0.35, theta0_deg = 90.0, theta1_deg = 180.0, first_cell = 0.0;
  // rectangle
  double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;

  SpaceMesh2D build() const;
};

struct GridGenConfig {
  double c = 4.0;
  double a = 2.0;
  std::string mode = "q1"; ///< q1 | p0
  bool extend_for_p0 = false;
  int n_omega = 30;
  std::string coordinate_system = "cartesian"; ///< cartesian | cylindrical
  std::optional<double> wall_T; ///< adds the wall sample to the support function
  std::optional<int> symmetrize_axis;
  int max_depth = 12;
};

struct InitSpec {
  std::string type = "upstream"; ///< upstream | macro-file
  std::string path;
};

struct OutputSpec {
  std::string dir = ".";
  std::string vtk = "fields.vtk";
  std::string macro = "fields.dat";
  std::string wall_flux = "wall_flux.csv";
  std::string residuals = "residuals.csv";
};

/// Whole-run configuration (schema 1). Unknown keys anywhere are rejected.
struct RunConfig {
  GasModel gas;
  GridGenConfig grid;
  SolverConfig solver;
  MeshSpec mesh;
  std::array<BoundaryCondition, 4> bcs{Outflow{}, Outflow{}, Outflow{}, Outflow{}};
  InitSpec init;
  OutputSpec output;
};

RunConfig load_run_config(const std::string& path);

} // namespace rarevel
