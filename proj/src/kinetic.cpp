#include "rarevel/kinetic.hpp"

namespace rarevel {

ConservedState moments(std::span<const double> f, std::span<const double> g,
                       const QuadratureView& grid) {
  const std::size_t n = grid.points.size();
  if (f.size() != n || g.size() != n || grid.weights.size() != n)
    throw InputError("moments: f, g and grid must have equal point counts");

  // term grouping matches the equilibrium residual evaluation bit for bit,
  // so moments(M, N) of a zero-residual equilibrium reproduce U exactly
  ConservedState U;
  double rho = 0.0, e = 0.0;
  Vec3 mom{};
  for (std::size_t q = 0; q < n; ++q) {
    const double w = grid.weights[q];
    rho += f[q] * w;
    double v2 = 0.0;
    for (int a = 0; a < grid.dim; ++a) {
      mom[a] += grid.points[q][a] * f[q] * w;
      v2 += grid.points[q][a] * grid.points[q][a];
    }
    e += 0.5 * v2 * f[q] * w;
    e += g[q] * w;
  }
  U.rho = rho;
  U.momentum = mom;
  U.E = e;
  return U;
}

} // namespace rarevel
