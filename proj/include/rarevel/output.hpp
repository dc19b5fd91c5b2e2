#pragma once

#include <string>
#include <vector>

#include "rarevel/solver.hpp"

namespace rarevel {

/// Legacy-VTK structured grid (ASCII): points at cell centroids,
/// POINT_DATA rho, u, T, p.
void write_vtk_fields(const MacroField& field, const GasModel& gas, const std::string& path);

/// One row per wall face: theta_deg (or arc position), x, y, q_n.
void write_wall_flux_csv(const std::vector<WallFluxSample>& flux, const std::string& param_name,
                         const std::string& path);

/// iter,residual,dt
void write_residual_csv(const std::vector<double>& residuals, const std::vector<double>& dts,
                        const std::string& path);

struct FluxComparison {
  double max_rel = 0.0; ///< max |a-b| / max |a|
  double l2_rel = 0.0;  ///< ||a-b||_2 / ||a||_2
  std::size_t samples = 0;
};

/// Reads two wall-flux CSVs and compares the profiles; when the parameter
/// samplings differ, b is linearly interpolated onto a's parameters over
/// the overlapping range.
FluxComparison compare_flux_files(const std::string& path_a, const std::string& path_b);

} // namespace rarevel
