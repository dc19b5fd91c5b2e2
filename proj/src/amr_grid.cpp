#include "rarevel/amr_grid.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace rarevel {

std::string to_string(CoordSystem c) {
  return c == CoordSystem::cartesian ? "cartesian" : "cylindrical";
}
std::string to_string(QuadMode m) {
  switch (m) {
  case QuadMode::q1: return "q1";
  case QuadMode::p0: return "p0";
  default: return "none";
  }
}

double AmrVelocityGrid::leaf_volume(const GridLeaf& c) const {
  double v = 1.0;
  for (int a = 0; a < dim; ++a) v *= leaf_hi(c, a) - leaf_lo(c, a);
  if (coord == CoordSystem::cylindrical) v *= lat_half(1, 2 * c.lo[1] + c.size[1]);
  return v;
}

double AmrVelocityGrid::root_volume() const {
  double v = 1.0;
  for (int a = 0; a < dim; ++a) v *= root_hi[a] - root_lo[a];
  if (coord == CoordSystem::cylindrical)
    v *= 0.5 * (root_hi[1] + root_lo[1]); // integral of zeta across [lo, hi]
  return v;
}

void AmrVelocityGrid::validate_for_solve() const {
  if (mode == QuadMode::none || points.empty())
    throw InputError("velocity grid carries no quadrature");
  if (points.size() != weights.size()) throw InputError("velocity grid: points/weights mismatch");
}

namespace {

struct NodeCoords {
  std::array<std::vector<double>, 3> axis;
};

NodeCoords lattice_nodes(const FineGridSpec& spec) {
  NodeCoords n;
  for (int a = 0; a < spec.dim; ++a) {
    n.axis[a].resize(spec.n_nodes[a]);
    for (int q = 0; q < spec.n_nodes[a]; ++q) n.axis[a][q] = spec.node(a, q);
  }
  return n;
}

// Smallest phi over the fine nodes inside the closed cell box; the wall
// sample at v = 0 joins when the box straddles the origin. Returns +inf
// for cells containing neither.
double min_phi_in_box(const AmrVelocityGrid& grid, const GridLeaf& cell,
                      const FineGridSpec& spec, const SupportFunction& phi,
                      const NodeCoords& nodes) {
  std::array<int, 3> first{}, last{};
  bool empty = false;
  for (int a = 0; a < spec.dim; ++a) {
    const double lo = grid.leaf_lo(cell, a);
    const double hi = grid.leaf_hi(cell, a);
    const auto& xs = nodes.axis[a];
    first[a] = static_cast<int>(std::lower_bound(xs.begin(), xs.end(), lo) - xs.begin());
    last[a] = static_cast<int>(std::upper_bound(xs.begin(), xs.end(), hi) - xs.begin()) - 1;
    if (first[a] > last[a]) empty = true;
  }
  double m = std::numeric_limits<double>::infinity();
  if (!empty) {
    const int n0 = spec.n_nodes[0];
    const int n1 = spec.dim > 1 ? spec.n_nodes[1] : 1;
    const int q2lo = spec.dim > 2 ? first[2] : 0, q2hi = spec.dim > 2 ? last[2] : 0;
    const int q1lo = spec.dim > 1 ? first[1] : 0, q1hi = spec.dim > 1 ? last[1] : 0;
    for (int q2 = q2lo; q2 <= q2hi; ++q2)
      for (int q1 = q1lo; q1 <= q1hi; ++q1) {
        const std::size_t row =
            static_cast<std::size_t>(n0) * (q1 + static_cast<std::size_t>(n1) * q2);
        for (int q0 = first[0]; q0 <= last[0]; ++q0)
          m = std::min(m, phi.values[row + q0]);
      }
  }
  if (phi.wall_value) {
    bool has_origin = true;
    for (int a = 0; a < spec.dim; ++a)
      has_origin = has_origin && grid.leaf_lo(cell, a) <= 0.0 && 0.0 <= grid.leaf_hi(cell, a);
    if (has_origin) m = std::min(m, *phi.wall_value);
  }
  return m;
}

void sort_leaves(AmrVelocityGrid& grid) {
  std::sort(grid.leaves.begin(), grid.leaves.end(), [&](const GridLeaf& a, const GridLeaf& b) {
    for (int ax = 0; ax < grid.dim; ++ax) {
      const std::int64_t ca = 2 * a.lo[ax] + a.size[ax];
      const std::int64_t cb = 2 * b.lo[ax] + b.size[ax];
      if (ca != cb) return ca < cb;
    }
    return false;
  });
}

// Quadrature construction shared by q1/p0, cartesian/cylindrical. Returns
// the integer lattice key of each point (vertex ticks for q1, center
// half-ticks for p0) so callers can match mirrored points exactly.
std::vector<std::array<std::int64_t, 3>> build_quadrature(AmrVelocityGrid& grid, QuadMode mode) {
  grid.points.clear();
  grid.weights.clear();
  grid.mode = mode;
  std::vector<std::array<std::int64_t, 3>> keys;
  if (mode == QuadMode::none) return keys;

  const bool cyl = grid.coord == CoordSystem::cylindrical;

  if (mode == QuadMode::p0) {
    keys.reserve(grid.leaves.size());
    grid.points.reserve(grid.leaves.size());
    grid.weights.reserve(grid.leaves.size());
    for (const auto& c : grid.leaves) {
      std::array<std::int64_t, 3> k{};
      for (int a = 0; a < grid.dim; ++a) k[a] = 2 * c.lo[a] + c.size[a];
      keys.push_back(k);
      grid.points.push_back(grid.leaf_center(c));
      grid.weights.push_back(grid.leaf_volume(c));
    }
    return keys;
  }

  // q1: gather per-vertex contributions, then sum in value order so that
  // mirrored vertices accumulate bitwise-identical weights.
  std::map<std::array<std::int64_t, 3>, std::vector<double>> verts;
  const int corners = 1 << grid.dim;
  for (const auto& c : grid.leaves) {
    std::array<double, 3> edge{1.0, 1.0, 1.0};
    for (int a = 0; a < grid.dim; ++a) edge[a] = grid.leaf_hi(c, a) - grid.leaf_lo(c, a);
    for (int s = 0; s < corners; ++s) {
      std::array<std::int64_t, 3> k{};
      for (int a = 0; a < grid.dim; ++a)
        k[a] = c.lo[a] + (((s >> a) & 1) ? c.size[a] : 0);
      double w;
      if (!cyl) {
        w = 1.0;
        for (int a = 0; a < grid.dim; ++a) w *= 0.5 * edge[a];
      } else {
        const double zv = grid.lat(1, k[1]);
        const double zo = grid.lat(1, ((s >> 1) & 1) ? c.lo[1] : c.lo[1] + c.size[1]);
        w = (0.5 * edge[0]) * (0.5 * edge[2]) * edge[1] * (2.0 * zv + zo) / 6.0;
      }
      verts[k].push_back(w);
    }
  }
  keys.reserve(verts.size());
  grid.points.reserve(verts.size());
  grid.weights.reserve(verts.size());
  for (auto& [k, contribs] : verts) {
    std::sort(contribs.begin(), contribs.end());
    double w = 0.0;
    for (double x : contribs) w += x;
    Vec3 p{};
    for (int a = 0; a < grid.dim; ++a) p[a] = grid.lat(a, k[a]);
    keys.push_back(k);
    grid.points.push_back(p);
    grid.weights.push_back(w);
  }
  return keys;
}

} // namespace

AmrVelocityGrid generate_amr(const FineGridSpec& spec, const SupportFunction& phi, double a,
                             int max_depth) {
  if (!(a > 0.0)) throw InputError("generate_amr: a must be positive");
  if (phi.values.size() != static_cast<std::size_t>(spec.total_nodes()))
    throw InputError("generate_amr: support function does not match the fine grid");

  AmrVelocityGrid grid;
  grid.coord = CoordSystem::cartesian;
  grid.dim = spec.dim;
  const std::int64_t den = std::int64_t{1} << max_depth;
  for (int ax = 0; ax < spec.dim; ++ax) {
    grid.root_lo[ax] = spec.lo[ax];
    grid.root_hi[ax] = spec.hi[ax];
    grid.den[ax] = den;
  }

  const NodeCoords nodes = lattice_nodes(spec);
  const double m_tail = a * phi.max_value;

  GridLeaf root;
  root.size = {den, den, den};
  root.level = 0;

  std::vector<GridLeaf> stack{root};
  while (!stack.empty()) {
    GridLeaf cell = stack.back();
    stack.pop_back();

    const double mphi = min_phi_in_box(grid, cell, spec, phi, nodes);
    const double m = std::isfinite(mphi) ? a * mphi : m_tail;
    bool cut = false;
    for (int ax = 0; ax < spec.dim; ++ax)
      cut = cut || (grid.leaf_hi(cell, ax) - grid.leaf_lo(cell, ax) > m);

    if (!cut) {
      grid.leaves.push_back(cell);
      continue;
    }
    if (cell.level >= max_depth) {
      throw RefinementOverflowError(
          "generate_amr: refinement cap (" + std::to_string(max_depth) +
          " levels) exceeded at cell centered (" +
          std::to_string(grid.leaf_center(cell)[0]) + ", " +
          std::to_string(grid.leaf_center(cell)[1]) + ")");
    }
    for (int s = 0; s < (1 << spec.dim); ++s) {
      GridLeaf ch;
      ch.level = cell.level + 1;
      for (int ax = 0; ax < spec.dim; ++ax) {
        const std::int64_t h = cell.size[ax] / 2;
        ch.size[ax] = h;
        ch.lo[ax] = cell.lo[ax] + (((s >> ax) & 1) ? h : 0);
      }
      stack.push_back(ch);
    }
  }
  sort_leaves(grid);
  return grid;
}

void attach_quadrature(AmrVelocityGrid& grid, QuadMode mode) {
  if (grid.leaves.empty()) throw InputError("attach_quadrature: grid has no leaves");
  build_quadrature(grid, mode);
  if (grid.symmetry_axis >= 0) {
    // the pairing indexes points of a specific quadrature; rebuild it
    const int ax = grid.symmetry_axis;
    grid.symmetry_axis = -1;
    grid.pairing.clear();
    *(&grid) = symmetrize_grid(grid, ax);
  }
}

AmrVelocityGrid uniform_grid_from_spec(const FineGridSpec& spec, QuadMode mode) {
  AmrVelocityGrid grid;
  grid.coord = CoordSystem::cartesian;
  grid.dim = spec.dim;
  std::array<int, 3> ncell{1, 1, 1};
  for (int a = 0; a < spec.dim; ++a) {
    grid.root_lo[a] = spec.lo[a];
    grid.root_hi[a] = spec.hi[a];
    ncell[a] = spec.n_nodes[a] - 1;
    grid.den[a] = ncell[a];
  }
  for (int k = 0; k < ncell[2]; ++k)
    for (int j = 0; j < ncell[1]; ++j)
      for (int i = 0; i < ncell[0]; ++i) {
        GridLeaf c;
        c.lo = {i, j, k};
        c.size = {1, 1, 1};
        c.level = 0;
        grid.leaves.push_back(c);
      }
  sort_leaves(grid);
  if (mode != QuadMode::none) build_quadrature(grid, mode);
  return grid;
}

FineGridSpec half_spec(const FineGridSpec& spec, int axis) {
  FineGridSpec h = spec;
  const double target = std::max(spec.hi[axis], -spec.lo[axis]);
  int steps = static_cast<int>(std::ceil(target / spec.dv - 1e-12));
  if (steps < 1) steps = 1;
  h.lo[axis] = 0.0;
  h.hi[axis] = steps * spec.dv;
  h.n_nodes[axis] = steps + 1;
  h.clamped_lo[axis] = true;
  return h;
}

FineGridSpec symmetrize_spec(const FineGridSpec& spec, int axis) {
  FineGridSpec s = spec;
  const FineGridSpec h = half_spec(spec, axis);
  s.hi[axis] = h.hi[axis];
  s.lo[axis] = -h.hi[axis];
  s.n_nodes[axis] = 2 * (h.n_nodes[axis] - 1) + 1;
  s.clamped_lo[axis] = false;
  return s;
}

AmrVelocityGrid symmetrize_grid(const AmrVelocityGrid& grid, int axis) {
  if (grid.coord != CoordSystem::cartesian)
    throw InputError("symmetrize_grid: only cartesian grids can be symmetrized");
  if (axis < 0 || axis >= grid.dim) throw InputError("symmetrize_grid: bad axis");

  AmrVelocityGrid out;
  const bool one_sided = grid.root_lo[axis] == 0.0 && grid.root_hi[axis] > 0.0;
  const bool symmetric = grid.root_lo[axis] == -grid.root_hi[axis] && grid.root_hi[axis] > 0.0;
  if (!one_sided && !symmetric)
    throw InputError("symmetrize_grid: root box neither one-sided nor symmetric about the plane");

  if (one_sided) {
    out = grid;
    out.leaves.clear();
    out.root_lo[axis] = -grid.root_hi[axis];
    out.den[axis] = 2 * grid.den[axis];
    const std::int64_t shift = grid.den[axis];
    for (const auto& c : grid.leaves) {
      GridLeaf up = c;
      up.lo[axis] = shift + c.lo[axis];
      up.level = c.level + 1;
      GridLeaf dn = c;
      dn.lo[axis] = shift - (c.lo[axis] + c.size[axis]);
      dn.level = c.level + 1;
      out.leaves.push_back(up);
      out.leaves.push_back(dn);
    }
    sort_leaves(out);
  } else {
    out = grid;
    // leaf structure must already mirror; verify on the integer lattice
    std::map<std::array<std::int64_t, 4>, int> seen;
    for (const auto& c : out.leaves) {
      std::array<std::int64_t, 4> key{c.lo[0], c.lo[1], c.lo[2], 0};
      key[3] = c.size[axis];
      seen[key] += 1;
    }
    for (const auto& c : out.leaves) {
      std::array<std::int64_t, 4> mk{c.lo[0], c.lo[1], c.lo[2], c.size[axis]};
      mk[axis] = out.den[axis] - (c.lo[axis] + c.size[axis]);
      if (!seen.count(mk))
        throw InputError("symmetrize_grid: leaf structure not symmetric about the plane");
    }
  }

  const QuadMode mode = grid.mode == QuadMode::none ? QuadMode::none : grid.mode;
  out.symmetry_axis = axis;
  out.pairing.clear();
  if (mode != QuadMode::none) {
    const auto keys = build_quadrature(out, mode);
    const std::int64_t mden = (mode == QuadMode::p0 ? 2 : 1) * out.den[axis];
    std::map<std::array<std::int64_t, 3>, std::int32_t> index;
    for (std::size_t q = 0; q < keys.size(); ++q) index[keys[q]] = static_cast<std::int32_t>(q);
    out.pairing.resize(keys.size());
    for (std::size_t q = 0; q < keys.size(); ++q) {
      auto mk = keys[q];
      mk[axis] = mden - mk[axis];
      const auto it = index.find(mk);
      if (it == index.end())
        throw InputError("symmetrize_grid: point set not symmetric about the plane");
      out.pairing[q] = it->second;
    }
  }
  return out;
}

AmrVelocityGrid generate_axisym_grid(const MacroField& field, const GasModel& gas, double c,
                                     double a, int n_omega, bool extend_for_p0, int max_depth) {
  if (n_omega < 2) throw InputError("generate_axisym_grid: n_omega must be at least 2");
  const FineGridSpec spec2 = fine_grid_spec_axisym(field, gas, c, a, extend_for_p0);
  const SupportFunction phi = build_support_function(field, spec2, gas, c);
  const AmrVelocityGrid plane = generate_amr(spec2, phi, a, max_depth);

  AmrVelocityGrid grid;
  grid.coord = CoordSystem::cylindrical;
  grid.dim = 3;
  grid.root_lo = {plane.root_lo[0], plane.root_lo[1], 0.0};
  grid.root_hi = {plane.root_hi[0], plane.root_hi[1], M_PI};
  grid.den = {plane.den[0], plane.den[1], n_omega};
  grid.n_omega = n_omega;
  grid.d_omega = M_PI / n_omega;
  grid.leaves.reserve(plane.leaves.size() * n_omega);
  for (const auto& c : plane.leaves)
    for (int k = 0; k < n_omega; ++k) {
      GridLeaf l;
      l.lo = {c.lo[0], c.lo[1], k};
      l.size = {c.size[0], c.size[1], 1};
      l.level = c.level;
      grid.leaves.push_back(l);
    }
  sort_leaves(grid);
  return grid;
}

AmrVelocityGrid grid_from_points(int dim, std::vector<Vec3> pts, std::vector<double> w) {
  if (pts.size() != w.size() || pts.empty())
    throw InputError("grid_from_points: need matching non-empty points and weights");
  AmrVelocityGrid grid;
  grid.coord = CoordSystem::cartesian;
  grid.dim = dim;
  grid.mode = QuadMode::p0;
  grid.points = std::move(pts);
  grid.weights = std::move(w);
  for (int a = 0; a < dim; ++a) {
    double lo = grid.points[0][a], hi = grid.points[0][a];
    for (const auto& p : grid.points) {
      lo = std::min(lo, p[a]);
      hi = std::max(hi, p[a]);
    }
    grid.root_lo[a] = lo;
    grid.root_hi[a] = hi;
    grid.den[a] = 1;
  }
  return grid;
}

} // namespace rarevel
