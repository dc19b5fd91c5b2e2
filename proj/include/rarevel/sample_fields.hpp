#pragma once

#include "rarevel/macro_field.hpp"
#include "rarevel/space_mesh.hpp"

namespace rarevel {

/// Analytic bow-shock surrogate for a macroscopic pre-simulation around a
/// circular body: upstream state, normal-shock downstream values and a
/// smooth tanh blend across a curved shock front, with a cooled no-slip
/// wall layer. Good enough to drive grid generation and solver
/// initialization when no flow solver output is at hand.
struct BowShockParams {
  double r_body = 0.1;     ///< m
  double rho_up = 3.17e-6; ///< kg/m^3
  double u_up = 5810.0;    ///< m/s, along +x
  double T_up = 242.4;     ///< K
  double T_wall = 293.0;   ///< K
  double gamma = 5.0 / 3.0;
  double R = 208.13; ///< J/(kg K)

  double standoff = 0.055;    ///< shock distance from the body at stagnation, m
  double standoff_growth = 0.9; ///< relative growth of the standoff toward the shoulder
  double shock_width = 0.022; ///< tanh blend width, m
  double layer_width = 0.045; ///< wall cooling layer thickness, m
  double peak_T_factor = 0.95; ///< peak layer temperature / RH downstream temperature
  double side_T_exponent = 2.0; ///< azimuthal decay power of the layer temperature
  double side_T_floor = 0.06;   ///< residual layer temperature fraction at the shoulder
  double expansion_cooling = 0.0; ///< upstream cooling depth near the shoulder (0 disables)
};

/// State at position (x, y) (body centered at the origin, flow along +x,
/// stagnation at (-r_body, 0)).
PrimitiveState bow_shock_state(double x, double y, const BowShockParams& par);

/// Field sampled at the cell centers of an annulus-sector mesh
/// (theta 90..180 degrees); same layout the solver meshes use.
MacroField bow_shock_field(int ni, int nj, double r_outer, double first_cell,
                           const BowShockParams& par);

/// Axisymmetric variant: the same construction read as (x, r) with
/// velocity components (u_x, u_r); the sphere case of the experiments.
MacroField bow_shock_field_axisym(int ni, int nj, double r_outer, double first_cell,
                                  const BowShockParams& par);

/// Parameter presets for the shipped sample data.
BowShockParams cylinder_mach20_argon();
BowShockParams sphere_mach20_air();

/// Header comment documenting the field extrema (parsed by consumers that
/// want to sanity-check a shipped file against its generator).
std::string field_extrema_comment(const MacroField& field);

} // namespace rarevel
