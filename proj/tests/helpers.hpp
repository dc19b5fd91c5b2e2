#pragma once

#include <random>

#include "rarevel/amr_grid.hpp"
#include "rarevel/equilibrium.hpp"

namespace testutil {

using namespace rarevel;

inline GasModel argon2d() {
  GasModel gas;
  gas.R = 208.13;
  gas.mu_ref = 2.117e-5;
  gas.T_ref = 273.0;
  gas.omega_visc = 0.81;
  gas.delta = 0;
  gas.d_v = 2;
  return gas;
}

inline GasModel argon3d() {
  GasModel gas = argon2d();
  gas.d_v = 3;
  return gas;
}

inline GasModel air2d() {
  GasModel gas;
  gas.R = 287.0;
  gas.mu_ref = 1.716e-5;
  gas.T_ref = 273.0;
  gas.omega_visc = 0.77;
  gas.delta = 2;
  gas.d_v = 2;
  return gas;
}

/// Random macro field with moderate contrasts, ni x nj cells.
inline MacroField random_field(std::mt19937& rng, int ni, int nj, int vel_dim,
                               double T_lo = 100.0, double T_hi = 2000.0, double u_max = 800.0) {
  std::uniform_real_distribution<double> ut(-u_max, u_max);
  std::uniform_real_distribution<double> tt(T_lo, T_hi);
  std::uniform_real_distribution<double> rt(1e-6, 1e-4);
  MacroField field;
  field.ni = ni;
  field.nj = nj;
  field.vel_dim = vel_dim;
  field.cells.resize(static_cast<std::size_t>(ni) * nj);
  for (auto& c : field.cells) {
    c.rho = rt(rng);
    for (int a = 0; a < vel_dim; ++a) c.u[a] = ut(rng);
    c.T = tt(rng);
  }
  return field;
}

/// AMR grid (with quadrature) generated from a random field.
inline AmrVelocityGrid random_amr_grid(std::mt19937& rng, const GasModel& gas, QuadMode mode,
                                       int ncellmax = 4) {
  std::uniform_int_distribution<int> nd(1, ncellmax);
  const MacroField field = random_field(rng, nd(rng), nd(rng), gas.d_v);
  const FineGridSpec spec = fine_grid_spec(field, gas, 4.0, 2.0, false);
  const SupportFunction phi = build_support_function(field, spec, gas, 4.0);
  AmrVelocityGrid grid = generate_amr(spec, phi, 2.0);
  attach_quadrature(grid, mode);
  return grid;
}

} // namespace testutil
