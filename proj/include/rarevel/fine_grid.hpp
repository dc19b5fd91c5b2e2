#pragma once

#include <array>
#include <cstdint>

#include "rarevel/macro_field.hpp"

namespace rarevel {

/// Uniform fine-lattice description per velocity axis. Nodes are
/// v_min + q dv, q = 0 .. n_nodes-1; bounds have been stretched so the span
/// is an exact multiple of dv (symmetric stretch, except axes whose lower
/// bound is clamped, where only the upper bound moves).
struct FineGridSpec {
  int dim = 0;
  std::array<double, 3> lo{}, hi{};
  std::array<int, 3> n_nodes{};
  double dv = 0.0;
  bool p0_extended = false;
  std::array<bool, 3> clamped_lo{}; ///< true for the radial (zeta) axis

  /// Canonical node coordinate: exact convex combination on the integer
  /// lattice. For bitwise-symmetric bounds (lo == -hi) this is bitwise odd
  /// in q, which the symmetry machinery relies on.
  double node(int axis, int q) const {
    const double den = static_cast<double>(n_nodes[axis] - 1);
    return (lo[axis] * (n_nodes[axis] - 1 - q) + hi[axis] * q) / den;
  }

  long total_nodes() const {
    long n = 1;
    for (int a = 0; a < dim; ++a) n *= n_nodes[a];
    return n;
  }
};

/// Bounds per axis from u +- c sqrt(RT) extrema, step dv = a min sqrt(RT),
/// integer step fitting, optional widening by one step per side for P0 use.
FineGridSpec fine_grid_spec(const MacroField& field, const GasModel& gas, double c, double a,
                            bool extend_for_p0);

/// Axisymmetric variant on the (v_x, zeta) half-plane: axis 0 bounds from
/// u_x, axis 1 upper bound from u_r + c sqrt(RT) with the lower bound
/// clamped to zero.
FineGridSpec fine_grid_spec_axisym(const MacroField& field, const GasModel& gas, double c,
                                   double a, bool extend_for_p0);

} // namespace rarevel
