#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rarevel/support.hpp"

namespace rarevel {

enum class CoordSystem { cartesian, cylindrical };
enum class QuadMode { none, q1, p0 };

std::string to_string(CoordSystem c);
std::string to_string(QuadMode m);

/// Axis-aligned box on the integer lattice of its grid: the box spans
/// [lo, lo+size] lattice ticks per axis. Dyadic leaves at refinement level
/// L have size = den / 2^L ticks.
struct GridLeaf {
  std::array<std::int64_t, 3> lo{};
  std::array<std::int64_t, 3> size{};
  int level = 0;
};

/// Tree-structured velocity grid with a flat quadrature view. Leaves
/// partition the root box exactly; geometry is anchored on an integer
/// lattice (den ticks per axis) so vertex identification and mirror
/// symmetry are exact.
struct AmrVelocityGrid {
  CoordSystem coord = CoordSystem::cartesian;
  int dim = 0;
  std::array<double, 3> root_lo{}, root_hi{};
  std::array<std::int64_t, 3> den{};
  std::vector<GridLeaf> leaves;

  QuadMode mode = QuadMode::none;
  std::vector<Vec3> points;
  std::vector<double> weights;

  int symmetry_axis = -1;            ///< velocity component mirrored, -1 if none
  std::vector<std::int32_t> pairing; ///< q -> q' with v_q' = mirror(v_q)

  int n_omega = 0;     ///< cylindrical: number of omega cells in [0, pi]
  double d_omega = 0.0;

  /// Canonical lattice coordinate; bitwise odd in k when lo == -hi.
  double lat(int axis, std::int64_t k) const {
    return (root_lo[axis] * static_cast<double>(den[axis] - k) +
            root_hi[axis] * static_cast<double>(k)) /
           static_cast<double>(den[axis]);
  }
  /// Same on the half-tick lattice (leaf centers).
  double lat_half(int axis, std::int64_t k2) const {
    const std::int64_t d2 = 2 * den[axis];
    return (root_lo[axis] * static_cast<double>(d2 - k2) +
            root_hi[axis] * static_cast<double>(k2)) /
           static_cast<double>(d2);
  }

  double leaf_lo(const GridLeaf& c, int axis) const { return lat(axis, c.lo[axis]); }
  double leaf_hi(const GridLeaf& c, int axis) const { return lat(axis, c.lo[axis] + c.size[axis]); }
  Vec3 leaf_center(const GridLeaf& c) const {
    Vec3 x{};
    for (int a = 0; a < dim; ++a) x[a] = lat_half(a, 2 * c.lo[a] + c.size[a]);
    return x;
  }
  Vec3 leaf_half_width(const GridLeaf& c) const {
    Vec3 h{};
    for (int a = 0; a < dim; ++a) h[a] = 0.5 * (leaf_hi(c, a) - leaf_lo(c, a));
    return h;
  }
  /// Leaf measure: box volume, or the exact cylindrical volume
  /// dvx * dzeta * domega * zeta_center for cylindrical grids.
  double leaf_volume(const GridLeaf& c) const;
  double root_volume() const;

  QuadratureView quadrature() const {
    return {std::span<const Vec3>(points), std::span<const double>(weights), dim};
  }

  void validate_for_solve() const;
};

/// Recursive dyadic refinement of the root box: a cell splits into 2^dim
/// children while any edge exceeds a * min(phi over contained fine nodes),
/// tails (cells without nodes) using a * max(phi). The optional wall sample
/// of phi participates in cells containing v = 0.
AmrVelocityGrid generate_amr(const FineGridSpec& spec, const SupportFunction& phi, double a,
                             int max_depth = 12);

/// Attach the quadrature: q1 places points at distinct leaf vertices with
/// corner-averaged weights, p0 at leaf centers with volume weights. Either
/// way the weights sum to the root volume.
void attach_quadrature(AmrVelocityGrid& grid, QuadMode mode);

/// The unrefined fine lattice as a grid (leaves = lattice cells).
AmrVelocityGrid uniform_grid_from_spec(const FineGridSpec& spec, QuadMode mode);

/// Mirror the grid about v_axis = 0. A one-sided root (lo == 0) is doubled;
/// an already-symmetric grid is checked and gains its pairing. The result
/// carries the q <-> q' involution used by symmetry boundary conditions.
AmrVelocityGrid symmetrize_grid(const AmrVelocityGrid& grid, int axis);

/// Restrict a spec to [0, hi] on one axis (for build-then-mirror pipelines).
FineGridSpec half_spec(const FineGridSpec& spec, int axis);
/// Widen a spec to symmetric bounds [-V, V] on one axis.
FineGridSpec symmetrize_spec(const FineGridSpec& spec, int axis);

/// Cylindrical AMR grid: 2D refinement in the (v_x, zeta) half-plane from
/// the field's (u_x, u_r) data, then a tensor product with n_omega uniform
/// omega cells in [0, pi]. Quadrature weights carry the cylindrical measure.
AmrVelocityGrid generate_axisym_grid(const MacroField& field, const GasModel& gas, double c,
                                     double a, int n_omega, bool extend_for_p0,
                                     int max_depth = 12);

/// Grid backed directly by points and weights (no leaf tree); used for
/// hand-crafted quadratures and file-loaded point sets.
AmrVelocityGrid grid_from_points(int dim, std::vector<Vec3> pts, std::vector<double> w);

} // namespace rarevel
