#pragma once

#include <string>
#include <vector>

#include "rarevel/kinetic.hpp"

namespace rarevel {

/// 2D structured curvilinear mesh of ni x nj quadrilateral cells.
/// Face normals are scaled by face length; i-faces point towards +i,
/// j-faces towards +j, so the outward normals of a cell sum to zero.
struct SpaceMesh2D {
  int ni = 0, nj = 0;
  std::vector<double> xn, yn; ///< nodes, (ni+1)*(nj+1), node(i,j) = i*(nj+1)+j
  std::vector<double> area;   ///< ni*nj, cell(i,j) = i*nj+j
  std::vector<double> inx, iny; ///< i-face normals, (ni+1)*nj, face(i,j) = i*nj+j
  std::vector<double> jnx, jny; ///< j-face normals, ni*(nj+1), face(i,j) = i*(nj+1)+j

  /// Optional wall-profile parameter per j cell on the imin side (for the
  /// heat-flux output): angle from the stagnation point in degrees for the
  /// annulus generator, cumulative arc length otherwise.
  std::vector<double> wall_param;
  std::string wall_param_name = "s_m";

  std::size_t node(int i, int j) const { return static_cast<std::size_t>(i) * (nj + 1) + j; }
  std::size_t cell(int i, int j) const { return static_cast<std::size_t>(i) * nj + j; }
  std::size_t iface(int i, int j) const { return static_cast<std::size_t>(i) * nj + j; }
  std::size_t jface(int i, int j) const { return static_cast<std::size_t>(i) * (nj + 1) + j; }

  Vec3 cell_center(int i, int j) const {
    const std::size_t n00 = node(i, j), n10 = node(i + 1, j), n11 = node(i + 1, j + 1),
                      n01 = node(i, j + 1);
    return {0.25 * (xn[n00] + xn[n10] + xn[n11] + xn[n01]),
            0.25 * (yn[n00] + yn[n10] + yn[n11] + yn[n01]), 0.0};
  }

  double total_volume() const {
    double v = 0.0;
    for (double a : area) v += a;
    return v;
  }

  /// Computes areas and face normals from the node coordinates; checks all
  /// cell areas are positive and each cell's scaled normals close up.
  void build_metrics();
};

/// Polar annulus sector around a circular body: i runs wall-normal from the
/// body (i = 0) to the outer arc, j runs along the wall from polar angle
/// theta0 to theta1 (degrees, measured from the +x axis). Wall-normal
/// spacing is geometrically stretched so the first cell height is
/// first_cell (0 keeps uniform spacing). wall_param holds the angle from
/// the stagnation point at (-r_inner, 0).
SpaceMesh2D annulus_sector_mesh(int ni, int nj, double r_inner, double r_outer, double theta0_deg,
                                double theta1_deg, double first_cell = 0.0);

/// Axis-aligned rectangle [x0,x1] x [y0,y1]; i follows x (wall-normal by
/// convention), j follows y. Node coordinates are evaluated so that a
/// bitwise-symmetric bound pair (y0 == -y1) yields bitwise-symmetric rows.
SpaceMesh2D rectangle_mesh(int ni, int nj, double x0, double x1, double y0, double y1);

/// Mesh JSON file (nodes + generator metadata), 17-digit round-trip exact.
void write_mesh_json(const SpaceMesh2D& mesh, const std::string& path);
SpaceMesh2D read_mesh_json(const std::string& path);

} // namespace rarevel
