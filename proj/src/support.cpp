#include "rarevel/support.hpp"

#include <algorithm>
#include <cmath>

namespace rarevel {

SupportFunction build_support_function(const MacroField& field, const FineGridSpec& spec,
                                       const GasModel& gas, double c,
                                       std::optional<double> wall_T) {
  field.validate();
  if (!(c > 0.0)) throw InputError("support function: c must be positive");

  // psi(I) = sqrt(RT) per space cell, visited in descending order so the
  // last write at a node is the smallest covering value.
  struct CellRec {
    double psi;
    Vec3 u;
  };
  std::vector<CellRec> recs(field.cells.size());
  for (std::size_t i = 0; i < field.cells.size(); ++i) {
    recs[i].psi = std::sqrt(gas.R * field.cells[i].T);
    recs[i].u = field.cells[i].u;
  }
  std::stable_sort(recs.begin(), recs.end(),
                   [](const CellRec& a, const CellRec& b) { return a.psi > b.psi; });

  SupportFunction phi;
  phi.max_value = recs.front().psi;
  phi.values.assign(static_cast<std::size_t>(spec.total_nodes()), phi.max_value);

  // Per-axis node coordinates computed once.
  std::array<std::vector<double>, 3> nodes;
  for (int a = 0; a < spec.dim; ++a) {
    nodes[a].resize(spec.n_nodes[a]);
    for (int q = 0; q < spec.n_nodes[a]; ++q) nodes[a][q] = spec.node(a, q);
  }

  const int n0 = spec.n_nodes[0];
  const int n1 = spec.dim > 1 ? spec.n_nodes[1] : 1;
  const int n2 = spec.dim > 2 ? spec.n_nodes[2] : 1;

  for (const auto& rec : recs) {
    const double r2 = (c * rec.psi) * (c * rec.psi);
    // Only the index box that can intersect the sphere is scanned.
    std::array<int, 3> qlo{}, qhi{};
    bool empty = false;
    for (int a = 0; a < spec.dim; ++a) {
      const auto& xs = nodes[a];
      const double lo = rec.u[a] - c * rec.psi;
      const double hi = rec.u[a] + c * rec.psi;
      const int first = static_cast<int>(std::lower_bound(xs.begin(), xs.end(), lo) - xs.begin());
      const int last = static_cast<int>(std::upper_bound(xs.begin(), xs.end(), hi) - xs.begin()) - 1;
      if (first > last) {
        empty = true;
        break;
      }
      qlo[a] = first;
      qhi[a] = last;
    }
    if (empty) continue;
    if (spec.dim < 3) qlo[2] = qhi[2] = 0;
    if (spec.dim < 2) qlo[1] = qhi[1] = 0;

    for (int q2 = qlo[2]; q2 <= qhi[2]; ++q2) {
      const double d2c = spec.dim > 2 ? (nodes[2][q2] - rec.u[2]) * (nodes[2][q2] - rec.u[2]) : 0.0;
      for (int q1 = qlo[1]; q1 <= qhi[1]; ++q1) {
        const double d1 = spec.dim > 1 ? nodes[1][q1] - rec.u[1] : 0.0;
        const double d12 = d2c + d1 * d1;
        const std::size_t row =
            static_cast<std::size_t>(n0) * (q1 + static_cast<std::size_t>(n1) * q2);
        for (int q0 = qlo[0]; q0 <= qhi[0]; ++q0) {
          const double d0 = nodes[0][q0] - rec.u[0];
          if (d12 + d0 * d0 <= r2) phi.values[row + q0] = rec.psi;
        }
      }
    }
    (void)n2;
  }

  if (wall_T) {
    if (!(*wall_T > 0.0)) throw DomainError("support function: wall temperature must be positive");
    phi.wall_value = std::sqrt(gas.R * *wall_T);
  }
  return phi;
}

} // namespace rarevel
