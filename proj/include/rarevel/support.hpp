#pragma once

#include <optional>
#include <vector>

#include "rarevel/fine_grid.hpp"

namespace rarevel {

/// Per-fine-node width estimate sqrt(RT) in m/s: for each lattice node the
/// smallest sqrt(RT) among the space cells whose distribution support
/// (sphere of center u, radius c sqrt(RT)) covers the node, defaulting to
/// the field maximum in the tails. An optional extra sample at v = 0
/// carries the wall temperature.
struct SupportFunction {
  std::vector<double> values; ///< flattened, axis 0 fastest
  double max_value = 0.0;
  std::optional<double> wall_value; ///< sqrt(R T_wall) at v = 0

  std::size_t index(const FineGridSpec& spec, int q0, int q1, int q2 = 0) const {
    return static_cast<std::size_t>(q0) +
           static_cast<std::size_t>(spec.n_nodes[0]) *
               (static_cast<std::size_t>(q1) +
                static_cast<std::size_t>(spec.dim > 2 ? spec.n_nodes[1] : 1) * q2);
  }
};

/// Space cells are visited in descending sqrt(RT) order and overwrite every
/// node inside their support sphere, so the final value at a node is the
/// minimum over covering spheres (boundary nodes included, <=).
/// For axisymmetric fields the same procedure runs on the (v_x, zeta)
/// half-plane with centers (u_x, u_r).
SupportFunction build_support_function(const MacroField& field, const FineGridSpec& spec,
                                       const GasModel& gas, double c,
                                       std::optional<double> wall_T = std::nullopt);

} // namespace rarevel
