#pragma once

#include "rarevel/macro_field.hpp"

namespace rarevel {

struct NormalShockRatios {
  double density;     ///< rho2 / rho1
  double velocity;    ///< u2 / u1
  double temperature; ///< T2 / T1
  double pressure;    ///< p2 / p1
};

/// Stationary normal-shock jump relations for a perfect gas.
NormalShockRatios normal_shock_ratios(double gamma, double mach);

/// Three-state surrogate for a CNS field: {upstream, downstream via the
/// normal-shock relations with gamma = (5 + delta)/(3 + delta), wall
/// (u = 0, T_wall)} as a 3-cell field consumable by the support-function
/// builder. The shock normal is the upstream flow direction.
MacroField rankine_hugoniot_fields(const PrimitiveState& upstream, double wall_T,
                                   const GasModel& gas);

} // namespace rarevel
