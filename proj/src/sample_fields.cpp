#include "rarevel/sample_fields.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "rarevel/rankine_hugoniot.hpp"

namespace rarevel {

PrimitiveState bow_shock_state(double x, double y, const BowShockParams& par) {
  const double r = std::hypot(x, y);
  const double chi = M_PI - std::atan2(std::abs(y), x); // angle from the stagnation ray
  const double cchi = std::cos(chi), schi = std::sin(chi);

  const double a_up = std::sqrt(par.gamma * par.R * par.T_up);
  const double mach = par.u_up / a_up;
  const NormalShockRatios rh = normal_shock_ratios(par.gamma, mach);
  const double T_down = par.T_up * rh.temperature;
  const double u_down = par.u_up * rh.velocity;

  // curved shock front and smooth transition across it
  const double r_shock = par.r_body + par.standoff * (1.0 + par.standoff_growth * (1.0 - cchi));
  const double s = 0.5 * (1.0 - std::tanh((r - r_shock) / par.shock_width));

  // layer temperature: stagnation peak decaying like the oblique-shock
  // normal Mach component toward the shoulder
  const double azi = par.side_T_floor +
                     (1.0 - par.side_T_floor) * std::pow(std::max(cchi, 0.0), par.side_T_exponent);
  const double T_layer = par.peak_T_factor * T_down * azi;

  // wall cooling layer
  const double bw = std::exp(-(r - par.r_body) / par.layer_width);

  double T_up_eff = par.T_up;
  if (par.expansion_cooling > 0.0) {
    // over-shoulder expansion cooling of the outer flow
    const double pw = schi * schi * schi * schi;
    T_up_eff = par.T_up * (1.0 - par.expansion_cooling * pw);
  }

  double T = T_up_eff + (std::max(T_layer, par.T_wall) - T_up_eff) * s;
  T = T * (1.0 - bw) + par.T_wall * bw;

  // speed: decelerated behind the shock (strongly at stagnation, mildly at
  // the shoulder), no-slip at the wall
  const double post_frac = rh.velocity + (1.0 - rh.velocity) * std::pow(schi, 1.5);
  double speed = par.u_up * (1.0 - s * (1.0 - post_frac));
  speed *= (1.0 - bw);

  // direction turns from free stream to the body tangent behind the shock
  const double phi = M_PI - chi; // polar angle of the point
  const double tx = std::sin(phi), ty = -std::cos(phi); // tangent toward the shoulder
  double dx = (1.0 - s) + s * tx;
  double dy = s * ty * (y >= 0.0 ? 1.0 : -1.0);
  const double dn = std::hypot(dx, dy);
  if (dn > 1e-12) {
    dx /= dn;
    dy /= dn;
  } else {
    dx = 1.0;
    dy = 0.0;
  }

  // pressure-based density: free stream to a Newtonian-like stagnation load
  const double p_up = par.rho_up * par.R * par.T_up;
  const double p_stag = par.rho_up * par.u_up * par.u_up;
  const double p = p_up + s * (p_stag * (0.12 + 0.88 * cchi * cchi) - p_up);

  PrimitiveState st;
  st.T = std::max(T, 0.35 * std::min(par.T_up, par.T_wall));
  st.rho = std::max(p / (par.R * st.T), 0.3 * par.rho_up);
  st.u = {speed * dx, speed * dy, 0.0};
  (void)u_down;
  return st;
}

namespace {

MacroField sample_on_annulus(int ni, int nj, double r_outer, double first_cell,
                             const BowShockParams& par) {
  const SpaceMesh2D mesh = annulus_sector_mesh(ni, nj, par.r_body, r_outer, 90.0, 180.0, first_cell);
  MacroField field;
  field.ni = ni;
  field.nj = nj;
  field.vel_dim = 2;
  field.cells.resize(static_cast<std::size_t>(ni) * nj);
  field.centroids.resize(field.cells.size());
  for (int i = 0; i < ni; ++i)
    for (int j = 0; j < nj; ++j) {
      const Vec3 c = mesh.cell_center(i, j);
      field.cells[field.index(i, j)] = bow_shock_state(c[0], c[1], par);
      field.centroids[field.index(i, j)] = c;
    }
  return field;
}

} // namespace

MacroField bow_shock_field(int ni, int nj, double r_outer, double first_cell,
                           const BowShockParams& par) {
  return sample_on_annulus(ni, nj, r_outer, first_cell, par);
}

MacroField bow_shock_field_axisym(int ni, int nj, double r_outer, double first_cell,
                                  const BowShockParams& par) {
  // same geometry read as (x, r >= 0); the radial velocity is the y component
  MacroField field = sample_on_annulus(ni, nj, r_outer, first_cell, par);
  return field;
}

BowShockParams cylinder_mach20_argon() {
  BowShockParams par;
  par.r_body = 0.1;
  par.rho_up = 3.17e-6;
  par.u_up = 5810.0;
  par.T_up = 242.4;
  par.T_wall = 293.0;
  par.gamma = 5.0 / 3.0;
  par.R = 208.13;
  return par;
}

BowShockParams sphere_mach20_air() {
  BowShockParams par;
  par.r_body = 0.1;
  par.rho_up = 3.17e-6;
  par.u_up = 5317.0;
  par.T_up = 175.86;
  par.T_wall = 280.0;
  par.gamma = 1.4;
  par.R = 287.0;
  par.peak_T_factor = 0.9;
  par.expansion_cooling = 0.5;
  return par;
}

std::string field_extrema_comment(const MacroField& field) {
  double rho_min = 1e300, rho_max = 0.0, t_min = 1e300, t_max = 0.0, u_max = 0.0;
  for (const auto& c : field.cells) {
    rho_min = std::min(rho_min, c.rho);
    rho_max = std::max(rho_max, c.rho);
    t_min = std::min(t_min, c.T);
    t_max = std::max(t_max, c.T);
    u_max = std::max(u_max, std::sqrt(norm2(c.u)));
  }
  char buf[256];
  std::ostringstream out;
  std::snprintf(buf, sizeof(buf), "extrema rho_min=%.6g rho_max=%.6g", rho_min, rho_max);
  out << buf << "\n";
  std::snprintf(buf, sizeof(buf), "extrema T_min=%.6g T_max=%.6g u_max=%.6g", t_min, t_max, u_max);
  out << buf;
  return out.str();
}

} // namespace rarevel
