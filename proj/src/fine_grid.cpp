#include "rarevel/fine_grid.hpp"

#include <algorithm>
#include <cmath>

namespace rarevel {

namespace {

struct AxisExtrema {
  double lo, hi;
};

// max/min over cells of u_a +- c sqrt(RT); component < 0 selects sqrt(RT)
// alone (used for the radial axis upper bound via u_r).
AxisExtrema axis_bounds(const MacroField& field, const GasModel& gas, double c, int comp) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& p : field.cells) {
    const double w = c * std::sqrt(gas.R * p.T);
    lo = std::min(lo, p.u[comp] - w);
    hi = std::max(hi, p.u[comp] + w);
  }
  return {lo, hi};
}

double min_thermal_speed(const MacroField& field, const GasModel& gas) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& p : field.cells) m = std::min(m, std::sqrt(gas.R * p.T));
  return m;
}

void fit_axis(FineGridSpec& spec, int axis, double lo, double hi, bool clamp_lo) {
  const double span = hi - lo;
  if (!(span > 0.0)) throw InputError("fine grid: degenerate axis span");
  int steps = static_cast<int>(std::ceil(span / spec.dv - 1e-12));
  if (steps < 1) steps = 1;
  const double excess = steps * spec.dv - span;
  if (clamp_lo) {
    hi += excess; // zeta_min stays 0
  } else {
    lo -= 0.5 * excess;
    hi += 0.5 * excess;
  }
  if (spec.p0_extended) {
    if (!clamp_lo) {
      lo -= spec.dv;
      steps += 2;
    } else {
      steps += 1;
    }
    hi += spec.dv;
  }
  spec.lo[axis] = lo;
  spec.hi[axis] = hi;
  spec.n_nodes[axis] = steps + 1;
  spec.clamped_lo[axis] = clamp_lo;
}

FineGridSpec make_spec(const MacroField& field, const GasModel& gas, double c, double a,
                       bool extend_for_p0, bool axisym) {
  if (!(c > 0.0) || !(a > 0.0)) throw InputError("fine grid: c and a must be positive");
  field.validate();
  gas.validate();

  FineGridSpec spec;
  spec.dim = axisym ? 2 : field.vel_dim;
  spec.dv = a * min_thermal_speed(field, gas);
  spec.p0_extended = extend_for_p0;

  for (int axis = 0; axis < spec.dim; ++axis) {
    AxisExtrema b = axis_bounds(field, gas, c, axis);
    const bool clamp = axisym && axis == 1;
    if (clamp) b.lo = 0.0;
    fit_axis(spec, axis, b.lo, b.hi, clamp);
  }
  return spec;
}

} // namespace

FineGridSpec fine_grid_spec(const MacroField& field, const GasModel& gas, double c, double a,
                            bool extend_for_p0) {
  return make_spec(field, gas, c, a, extend_for_p0, false);
}

FineGridSpec fine_grid_spec_axisym(const MacroField& field, const GasModel& gas, double c,
                                   double a, bool extend_for_p0) {
  if (field.vel_dim < 2) throw InputError("axisym fine grid: field needs (u_x, u_r) velocities");
  return make_spec(field, gas, c, a, extend_for_p0, true);
}

} // namespace rarevel
