#include "rarevel/rankine_hugoniot.hpp"

#include <cmath>

namespace rarevel {

NormalShockRatios normal_shock_ratios(double gamma, double mach) {
  if (!(mach > 1.0)) throw DomainError("normal shock: upstream Mach number must exceed 1");
  const double m2 = mach * mach;
  NormalShockRatios r;
  r.density = (gamma + 1.0) * m2 / ((gamma - 1.0) * m2 + 2.0);
  r.velocity = 1.0 / r.density;
  r.pressure = (2.0 * gamma * m2 - (gamma - 1.0)) / (gamma + 1.0);
  r.temperature = r.pressure / r.density;
  return r;
}

MacroField rankine_hugoniot_fields(const PrimitiveState& upstream, double wall_T,
                                   const GasModel& gas) {
  upstream.validate();
  gas.validate();
  if (!(wall_T > 0.0)) throw DomainError("rankine_hugoniot_fields: wall temperature must be positive");

  const double gamma = (5.0 + gas.delta) / (3.0 + gas.delta);
  const double speed = std::sqrt(norm2(upstream.u));
  const double mach = speed / std::sqrt(gamma * gas.R * upstream.T);
  const NormalShockRatios r = normal_shock_ratios(gamma, mach);

  PrimitiveState down;
  down.rho = upstream.rho * r.density;
  for (int a = 0; a < gas.d_v; ++a) down.u[a] = upstream.u[a] * r.velocity;
  down.T = upstream.T * r.temperature;

  PrimitiveState wall;
  wall.rho = down.rho;
  wall.u = Vec3{};
  wall.T = wall_T;

  MacroField field;
  field.ni = 3;
  field.nj = 1;
  field.vel_dim = gas.d_v;
  field.cells = {upstream, down, wall};
  return field;
}

} // namespace rarevel
