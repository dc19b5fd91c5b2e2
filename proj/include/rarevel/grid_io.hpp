#pragma once

#include <string>

#include "rarevel/amr_grid.hpp"

namespace rarevel {

/// JSON grid document: coordinate_system, root_bounds, mode, leaves
/// (center/half_width/level), points, weights, optional symmetry pairing.
/// Floating point is written with 17 significant digits so a write/read
/// cycle is exact.
void write_grid_json(const AmrVelocityGrid& grid, const std::string& path);
AmrVelocityGrid read_grid_json(const std::string& path);

} // namespace rarevel
