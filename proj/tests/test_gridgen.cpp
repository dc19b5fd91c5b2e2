#include <doctest.h>

#include <map>
#include <set>

#include "helpers.hpp"
#include "rarevel/rankine_hugoniot.hpp"

using namespace rarevel;
using namespace testutil;

namespace {

// brute-force support-function oracle: the closed-form minimum over covering
// spheres with the field maximum as default; no sorting involved
std::vector<double> support_oracle(const MacroField& field, const FineGridSpec& spec,
                                   const GasModel& gas, double c) {
  std::vector<double> psi(field.cells.size());
  double psi_max = 0.0;
  for (std::size_t i = 0; i < field.cells.size(); ++i) {
    psi[i] = std::sqrt(gas.R * field.cells[i].T);
    psi_max = std::max(psi_max, psi[i]);
  }
  std::vector<double> out(static_cast<std::size_t>(spec.total_nodes()), psi_max);
  const int n0 = spec.n_nodes[0];
  const int n1 = spec.dim > 1 ? spec.n_nodes[1] : 1;
  for (long idx = 0; idx < spec.total_nodes(); ++idx) {
    const int q0 = static_cast<int>(idx % n0);
    const int q1 = static_cast<int>((idx / n0) % n1);
    const int q2 = static_cast<int>(idx / (static_cast<long>(n0) * n1));
    Vec3 v{spec.node(0, q0), spec.dim > 1 ? spec.node(1, q1) : 0.0,
           spec.dim > 2 ? spec.node(2, q2) : 0.0};
    double best = psi_max;
    for (std::size_t i = 0; i < field.cells.size(); ++i) {
      double d2 = 0.0;
      for (int a = 0; a < spec.dim; ++a) {
        const double d = v[a] - field.cells[i].u[a];
        d2 += d * d;
      }
      if (d2 <= (c * psi[i]) * (c * psi[i])) best = std::min(best, psi[i]);
    }
    out[idx] = best;
  }
  return out;
}

double min_phi_in_leaf(const AmrVelocityGrid& grid, const GridLeaf& leaf, const FineGridSpec& spec,
                       const SupportFunction& phi) {
  double m = std::numeric_limits<double>::infinity();
  const int n0 = spec.n_nodes[0];
  const int n1 = spec.dim > 1 ? spec.n_nodes[1] : 1;
  for (long idx = 0; idx < spec.total_nodes(); ++idx) {
    const int q0 = static_cast<int>(idx % n0);
    const int q1 = static_cast<int>((idx / n0) % n1);
    bool inside = true;
    const double x0 = spec.node(0, q0);
    inside = inside && grid.leaf_lo(leaf, 0) <= x0 && x0 <= grid.leaf_hi(leaf, 0);
    if (spec.dim > 1) {
      const double x1 = spec.node(1, q1);
      inside = inside && grid.leaf_lo(leaf, 1) <= x1 && x1 <= grid.leaf_hi(leaf, 1);
    }
    if (inside) m = std::min(m, phi.values[idx]);
  }
  return m;
}

} // namespace

TEST_CASE("fine grid bounds and step for a single cell") {
  GasModel gas = argon2d();
  gas.R = 1.0; // so sqrt(RT) = sqrt(T)
  MacroField field;
  field.ni = field.nj = 1;
  field.nj = 1;
  field.vel_dim = 2;
  PrimitiveState p;
  p.rho = 1.0;
  p.u = {100.0, 0.0, 0.0};
  p.T = 2500.0; // sqrt(RT) = 50
  field.cells = {p};

  const FineGridSpec spec = fine_grid_spec(field, gas, 4.0, 2.0, false);
  CHECK(spec.lo[0] == doctest::Approx(-100.0).epsilon(1e-14));
  CHECK(spec.hi[0] == doctest::Approx(300.0).epsilon(1e-14));
  CHECK(spec.lo[1] == doctest::Approx(-200.0).epsilon(1e-14));
  CHECK(spec.hi[1] == doctest::Approx(200.0).epsilon(1e-14));
  CHECK(spec.dv == doctest::Approx(100.0));
  CHECK(spec.n_nodes[0] == 5);
  CHECK(spec.n_nodes[1] == 5);

  const FineGridSpec ext = fine_grid_spec(field, gas, 4.0, 2.0, true);
  CHECK(ext.n_nodes[0] == 7);
  CHECK(ext.lo[0] == doctest::Approx(-200.0));
  CHECK(ext.hi[0] == doctest::Approx(400.0));
}

TEST_CASE("fine grid step from the coldest cell") {
  GasModel gas = argon2d();
  std::mt19937 rng(5);
  MacroField field = random_field(rng, 2, 1, 2);
  field.cells[0].T = 900.0;
  field.cells[1].T = 250.0;
  const FineGridSpec spec = fine_grid_spec(field, gas, 4.0, 1.5, false);
  CHECK(spec.dv == doctest::Approx(1.5 * std::sqrt(gas.R * 250.0)).epsilon(1e-14));
}

TEST_CASE("fine grid rejects empty fields and bad parameters") {
  MacroField empty;
  CHECK_THROWS_AS(fine_grid_spec(empty, argon2d(), 4.0, 2.0, false), InputError);
}

TEST_CASE("support function: uniform field is constant") {
  GasModel gas = argon2d();
  MacroField field;
  field.ni = 3;
  field.nj = 2;
  field.vel_dim = 2;
  PrimitiveState p;
  p.rho = 1e-5;
  p.u = {0.0, 0.0, 0.0};
  p.T = 300.0;
  field.cells.assign(6, p);
  const FineGridSpec spec = fine_grid_spec(field, gas, 3.0, 1.0, false);
  const SupportFunction phi = build_support_function(field, spec, gas, 3.0);
  const double expect = std::sqrt(gas.R * 300.0);
  for (double v : phi.values) CHECK(v == expect);
}

TEST_CASE("support function: two-sphere field") {
  GasModel gas = argon2d();
  gas.R = 1.0;
  MacroField field;
  field.ni = 2;
  field.nj = 1;
  field.vel_dim = 2;
  PrimitiveState a, b;
  a.rho = b.rho = 1.0;
  a.u = b.u = {0.0, 0.0, 0.0};
  a.T = 100.0 * 100.0; // psi = 100
  b.T = 300.0 * 300.0; // psi = 300
  field.cells = {a, b};
  const FineGridSpec spec = fine_grid_spec(field, gas, 3.0, 0.5, false);
  const SupportFunction phi = build_support_function(field, spec, gas, 3.0);

  const int n0 = spec.n_nodes[0];
  for (long idx = 0; idx < spec.total_nodes(); ++idx) {
    const double vx = spec.node(0, static_cast<int>(idx % n0));
    const double vy = spec.node(1, static_cast<int>(idx / n0));
    const double r = std::hypot(vx, vy);
    if (r <= 300.0)
      CHECK(phi.values[idx] == 100.0);
    else if (r <= 900.0)
      CHECK(phi.values[idx] == 300.0);
    else
      CHECK(phi.values[idx] == 300.0); // tails take the maximum
  }
}

TEST_CASE("support function equals the closed-form oracle on random fields") {
  std::mt19937 rng(101);
  const GasModel gas = argon2d();
  for (int rep = 0; rep < 25; ++rep) {
    std::uniform_int_distribution<int> nd(1, 6);
    const MacroField field = random_field(rng, nd(rng), nd(rng), 2);
    const FineGridSpec spec = fine_grid_spec(field, gas, 3.5, 1.0, rep % 2 == 0);
    const SupportFunction phi = build_support_function(field, spec, gas, 3.5);
    const std::vector<double> oracle = support_oracle(field, spec, gas, 3.5);
    REQUIRE(phi.values.size() == oracle.size());
    for (std::size_t k = 0; k < oracle.size(); ++k) REQUIRE(phi.values[k] == oracle[k]);
  }
}

TEST_CASE("amr: uniform support with no cut gives a single leaf") {
  GasModel gas = argon2d();
  MacroField field;
  field.ni = field.nj = 1;
  field.vel_dim = 2;
  field.cells = {PrimitiveState{1.0, {0.0, 0.0, 0.0}, 300.0}};
  const FineGridSpec spec = fine_grid_spec(field, gas, 4.0, 2.0, false);
  const SupportFunction phi = build_support_function(field, spec, gas, 4.0);
  // a huge so every edge fits
  AmrVelocityGrid grid = generate_amr(spec, phi, 1e9);
  CHECK(grid.leaves.size() == 1);

  // a chosen so exactly one bisection is forced: edge in (m/2, m]
  const double s = phi.max_value;
  const double le = spec.hi[0] - spec.lo[0];
  const double a1 = 0.75 * le / s; // a*s in (le/2, le)
  AmrVelocityGrid g1 = generate_amr(spec, phi, a1);
  CHECK(g1.leaves.size() == 4);
  for (const auto& leaf : g1.leaves) CHECK(leaf.level == 1);
}

TEST_CASE("amr terminal property and partition on random fields") {
  std::mt19937 rng(55);
  const GasModel gas = argon2d();
  for (int rep = 0; rep < 10; ++rep) {
    std::uniform_int_distribution<int> nd(1, 5);
    const MacroField field = random_field(rng, nd(rng), nd(rng), 2);
    const FineGridSpec spec = fine_grid_spec(field, gas, 4.0, 2.0, false);
    const SupportFunction phi = build_support_function(field, spec, gas, 4.0);
    const double a = 1.0 + 0.2 * (rep % 5);
    AmrVelocityGrid grid = generate_amr(spec, phi, a);

    double vol = 0.0;
    for (const auto& leaf : grid.leaves) {
      vol += grid.leaf_volume(leaf);
      const double m = min_phi_in_leaf(grid, leaf, spec, phi);
      if (std::isfinite(m)) {
        for (int ax = 0; ax < 2; ++ax)
          CHECK(grid.leaf_hi(leaf, ax) - grid.leaf_lo(leaf, ax) <= a * m * (1.0 + 1e-12));
      }
    }
    CHECK(vol == doctest::Approx(grid.root_volume()).epsilon(1e-12));

    // dyadic disjointness: low corners are all distinct (combined with the
    // exact volume sum this pins a partition)
    std::set<std::pair<std::int64_t, std::int64_t>> seen;
    for (const auto& leaf : grid.leaves) {
      CHECK(!seen.count({leaf.lo[0], leaf.lo[1]}));
      seen.insert({leaf.lo[0], leaf.lo[1]});
    }
  }
}

TEST_CASE("amr determinism and a-monotonicity") {
  std::mt19937 rng(77);
  const GasModel gas = argon2d();
  const MacroField field = random_field(rng, 4, 4, 2);
  const FineGridSpec spec = fine_grid_spec(field, gas, 4.0, 2.0, false);
  const SupportFunction phi = build_support_function(field, spec, gas, 4.0);

  AmrVelocityGrid g1 = generate_amr(spec, phi, 2.0);
  AmrVelocityGrid g2 = generate_amr(spec, phi, 2.0);
  REQUIRE(g1.leaves.size() == g2.leaves.size());
  for (std::size_t k = 0; k < g1.leaves.size(); ++k) {
    CHECK(g1.leaves[k].lo == g2.leaves[k].lo);
    CHECK(g1.leaves[k].size == g2.leaves[k].size);
  }

  std::size_t prev = 0;
  for (double a : {2.0, 1.6, 1.2, 0.9, 0.7}) {
    AmrVelocityGrid g = generate_amr(spec, phi, a);
    CHECK(g.leaves.size() >= prev);
    prev = g.leaves.size();
  }
}

TEST_CASE("amr refinement cap errors out") {
  GasModel gas = argon2d();
  gas.R = 1.0;
  MacroField field;
  field.ni = 2;
  field.nj = 1;
  field.vel_dim = 2;
  PrimitiveState hot, cold;
  hot.rho = cold.rho = 1.0;
  hot.u = {0.0, 0.0, 0.0};
  cold.u = {0.0, 0.0, 0.0};
  hot.T = 1e4; // psi 100
  cold.T = 1.0; // psi 1
  field.cells = {hot, cold};
  const FineGridSpec spec = fine_grid_spec(field, gas, 4.0, 2.0, false);
  const SupportFunction phi = build_support_function(field, spec, gas, 4.0);
  CHECK_THROWS_AS(generate_amr(spec, phi, 1e-4, 6), RefinementOverflowError);
}

TEST_CASE("quadrature weights: single leaf and 2x2 patterns") {
  GasModel gas = argon2d();
  MacroField field;
  field.ni = field.nj = 1;
  field.vel_dim = 2;
  field.cells = {PrimitiveState{1.0, {0.0, 0.0, 0.0}, 300.0}};
  const FineGridSpec spec = fine_grid_spec(field, gas, 4.0, 2.0, false);
  const SupportFunction phi = build_support_function(field, spec, gas, 4.0);

  AmrVelocityGrid one = generate_amr(spec, phi, 1e9);
  REQUIRE(one.leaves.size() == 1);
  const double area = one.root_volume();
  attach_quadrature(one, QuadMode::q1);
  CHECK(one.points.size() == 4);
  for (double w : one.weights) CHECK(w == doctest::Approx(area / 4.0).epsilon(1e-14));
  attach_quadrature(one, QuadMode::p0);
  CHECK(one.points.size() == 1);
  CHECK(one.weights[0] == doctest::Approx(area).epsilon(1e-14));

  // four equal leaves: 9 q1 points with the h^2 / h^2/2 / h^2/4 pattern
  const double s = phi.max_value;
  const double le = spec.hi[0] - spec.lo[0];
  AmrVelocityGrid four = generate_amr(spec, phi, 0.75 * le / s);
  REQUIRE(four.leaves.size() == 4);
  attach_quadrature(four, QuadMode::q1);
  CHECK(four.points.size() == 9);
  const double h2 = four.root_volume() / 4.0; // leaf area
  std::multiset<double> ws;
  for (double w : four.weights) ws.insert(w / h2);
  // 4 corners at 1/4, 4 edge midpoints at 1/2, 1 center at 1
  CHECK(std::count_if(ws.begin(), ws.end(), [](double x) { return std::abs(x - 0.25) < 1e-12; }) == 4);
  CHECK(std::count_if(ws.begin(), ws.end(), [](double x) { return std::abs(x - 0.5) < 1e-12; }) == 4);
  CHECK(std::count_if(ws.begin(), ws.end(), [](double x) { return std::abs(x - 1.0) < 1e-12; }) == 1);
}

TEST_CASE("quadrature sums equal the root volume on random grids") {
  std::mt19937 rng(99);
  const GasModel gas = argon2d();
  for (int rep = 0; rep < 8; ++rep) {
    AmrVelocityGrid grid = random_amr_grid(rng, gas, QuadMode::q1);
    double w1 = 0.0;
    for (double w : grid.weights) w1 += w;
    CHECK(w1 == doctest::Approx(grid.root_volume()).epsilon(1e-12));
    const std::size_t verts = grid.points.size();
    attach_quadrature(grid, QuadMode::p0);
    double w0 = 0.0;
    for (double w : grid.weights) w0 += w;
    CHECK(w0 == doctest::Approx(grid.root_volume()).epsilon(1e-12));
    CHECK(grid.points.size() == grid.leaves.size());
    CHECK(verts > grid.leaves.size()); // q1 vertex count exceeds the leaf count
  }
}

TEST_CASE("uniform grid from spec reproduces trapezoid weights") {
  GasModel gas = argon2d();
  MacroField field;
  field.ni = field.nj = 1;
  field.vel_dim = 2;
  field.cells = {PrimitiveState{1.0, {50.0, -20.0, 0.0}, 400.0}};
  const FineGridSpec spec = fine_grid_spec(field, gas, 4.0, 1.0, false);
  AmrVelocityGrid grid = uniform_grid_from_spec(spec, QuadMode::q1);
  CHECK(grid.points.size() == static_cast<std::size_t>(spec.total_nodes()));
  const double h = spec.dv;
  double wmin = 1e300, wmax = 0.0, wsum = 0.0;
  for (double w : grid.weights) {
    wmin = std::min(wmin, w);
    wmax = std::max(wmax, w);
    wsum += w;
  }
  CHECK(wmin == doctest::Approx(h * h / 4.0).epsilon(1e-12)); // corners
  CHECK(wmax == doctest::Approx(h * h).epsilon(1e-12));       // interior
  CHECK(wsum == doctest::Approx(grid.root_volume()).epsilon(1e-12));
}

TEST_CASE("wall sample refines the origin cell") {
  GasModel gas = argon2d();
  MacroField field;
  field.ni = field.nj = 1;
  field.vel_dim = 2;
  field.cells = {PrimitiveState{1e-5, {2000.0, 0.0, 0.0}, 5000.0}};
  const FineGridSpec spec = fine_grid_spec(field, gas, 4.0, 2.0, false);
  const SupportFunction no_wall = build_support_function(field, spec, gas, 4.0);
  const SupportFunction with_wall = build_support_function(field, spec, gas, 4.0, 80.0);
  REQUIRE(with_wall.wall_value.has_value());
  AmrVelocityGrid g0 = generate_amr(spec, no_wall, 2.0);
  AmrVelocityGrid g1 = generate_amr(spec, with_wall, 2.0);
  CHECK(g1.leaves.size() > g0.leaves.size());
  // the cell containing v = 0 obeys the wall bound
  const double bound = 2.0 * *with_wall.wall_value;
  for (const auto& leaf : g1.leaves) {
    const bool has0 = g1.leaf_lo(leaf, 0) <= 0.0 && 0.0 <= g1.leaf_hi(leaf, 0) &&
                      g1.leaf_lo(leaf, 1) <= 0.0 && 0.0 <= g1.leaf_hi(leaf, 1);
    if (has0)
      for (int ax = 0; ax < 2; ++ax)
        CHECK(g1.leaf_hi(leaf, ax) - g1.leaf_lo(leaf, ax) <= bound * (1.0 + 1e-12));
  }
}

TEST_CASE("rankine-hugoniot normal shock relations") {
  const NormalShockRatios r = normal_shock_ratios(5.0 / 3.0, 3.0);
  CHECK(r.density == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(r.velocity == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(r.temperature == doctest::Approx(11.0 / 3.0).epsilon(1e-14));

  const NormalShockRatios near = normal_shock_ratios(1.4, 1.0 + 1e-9);
  CHECK(near.density == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(near.temperature == doctest::Approx(1.0).epsilon(1e-7));

  CHECK_THROWS_AS(normal_shock_ratios(1.4, 0.8), DomainError);
}

TEST_CASE("rankine-hugoniot three-state field") {
  const GasModel gas = argon2d();
  PrimitiveState up;
  up.rho = 3.17e-6;
  up.T = 242.4;
  const double gamma = (5.0 + gas.delta) / (3.0 + gas.delta);
  up.u = {20.0 * std::sqrt(gamma * gas.R * up.T), 0.0, 0.0};
  const MacroField field = rankine_hugoniot_fields(up, 293.0, gas);
  REQUIRE(field.cell_count() == 3);
  CHECK(field.cells[0].T == up.T);
  CHECK(field.cells[1].T > 100.0 * up.T); // strong shock heating
  CHECK(field.cells[1].u[0] == doctest::Approx(up.u[0] / 3.97).epsilon(0.01));
  CHECK(field.cells[2].u[0] == 0.0);
  CHECK(field.cells[2].T == 293.0);

  PrimitiveState slow = up;
  slow.u = {0.5 * std::sqrt(gamma * gas.R * up.T), 0.0, 0.0};
  CHECK_THROWS_AS(rankine_hugoniot_fields(slow, 293.0, gas), DomainError);
}

TEST_CASE("symmetrize: one-sided grid doubles with an exact pairing") {
  std::mt19937 rng(31);
  const GasModel gas = argon2d();
  MacroField field = random_field(rng, 3, 3, 2);
  const FineGridSpec spec = fine_grid_spec(field, gas, 4.0, 2.0, false);
  const FineGridSpec hspec = half_spec(spec, 1);
  CHECK(hspec.lo[1] == 0.0);
  const SupportFunction phi = build_support_function(field, hspec, gas, 4.0);
  AmrVelocityGrid half = generate_amr(hspec, phi, 2.0);
  attach_quadrature(half, QuadMode::q1);
  const AmrVelocityGrid full = symmetrize_grid(half, 1);

  CHECK(full.root_lo[1] == -full.root_hi[1]);
  CHECK(full.points.size() <= 2 * half.points.size()); // shared plane vertices dedup
  CHECK(full.points.size() > half.points.size());
  REQUIRE(full.pairing.size() == full.points.size());
  for (std::size_t q = 0; q < full.points.size(); ++q) {
    const auto qp = static_cast<std::size_t>(full.pairing[q]);
    CHECK(full.pairing[qp] == static_cast<std::int32_t>(q)); // involution
    CHECK(full.points[qp][0] == full.points[q][0]);
    CHECK(full.points[qp][1] == -full.points[q][1]);
    CHECK(full.weights[qp] == full.weights[q]);
  }

  double vol = 0.0;
  for (double w : full.weights) vol += w;
  CHECK(vol == doctest::Approx(full.root_volume()).epsilon(1e-12));
}

TEST_CASE("symmetrize: already symmetric uniform grid is a fixed point") {
  GasModel gas = argon2d();
  MacroField field;
  field.ni = field.nj = 1;
  field.vel_dim = 2;
  field.cells = {PrimitiveState{1.0, {0.0, 0.0, 0.0}, 300.0}}; // symmetric bounds
  FineGridSpec spec = fine_grid_spec(field, gas, 4.0, 1.0, false);
  AmrVelocityGrid grid = uniform_grid_from_spec(spec, QuadMode::q1);
  const AmrVelocityGrid sym = symmetrize_grid(grid, 1);
  CHECK(sym.points.size() == grid.points.size());
  REQUIRE(sym.pairing.size() == sym.points.size());
  for (std::size_t q = 0; q < sym.points.size(); ++q) {
    const auto qp = static_cast<std::size_t>(sym.pairing[q]);
    CHECK(sym.pairing[qp] == static_cast<std::int32_t>(q));
    CHECK(sym.points[qp][1] == -sym.points[q][1]);
  }
}

TEST_CASE("symmetrize rejects unsymmetrizable roots") {
  std::mt19937 rng(41);
  AmrVelocityGrid grid = random_amr_grid(rng, argon2d(), QuadMode::q1);
  // generic random bounds are neither one-sided nor symmetric
  if (grid.root_lo[1] != 0.0 && grid.root_lo[1] != -grid.root_hi[1])
    CHECK_THROWS_AS(symmetrize_grid(grid, 1), InputError);
}

TEST_CASE("axisymmetric grid: bounds, replicas and cylindrical volume") {
  GasModel gas = air2d();
  MacroField field;
  field.ni = 2;
  field.nj = 1;
  field.vel_dim = 2;
  PrimitiveState a, b;
  a.rho = b.rho = 1e-5;
  a.u = {1000.0, -400.0, 0.0}; // negative radial velocity: zeta_min still 0
  a.T = 300.0;
  b.u = {3000.0, 500.0, 0.0};
  b.T = 900.0;
  field.cells = {a, b};

  const FineGridSpec spec = fine_grid_spec_axisym(field, gas, 4.0, 2.0, false);
  CHECK(spec.lo[1] == 0.0);
  CHECK(spec.hi[1] > 0.0);

  AmrVelocityGrid grid = generate_axisym_grid(field, gas, 4.0, 2.0, 8, false);
  CHECK(grid.coord == CoordSystem::cylindrical);
  CHECK(grid.n_omega == 8);
  CHECK(grid.root_hi[2] == doctest::Approx(M_PI));

  attach_quadrature(grid, QuadMode::p0);
  double vol = 0.0;
  for (double w : grid.weights) vol += w;
  CHECK(vol == doctest::Approx(grid.root_volume()).epsilon(1e-12));
  CHECK(grid.points.size() % 8 == 0); // n_omega replicas of the plane grid

  attach_quadrature(grid, QuadMode::q1);
  vol = 0.0;
  for (double w : grid.weights) vol += w;
  CHECK(vol == doctest::Approx(grid.root_volume()).epsilon(1e-12));
  CHECK(grid.points.size() % 9 == 0); // n_omega + 1 vertex planes
}

TEST_CASE("uniform axisym field gives an unrefined cylindrical grid") {
  GasModel gas = air2d();
  MacroField field;
  field.ni = 2;
  field.nj = 2;
  field.vel_dim = 2;
  PrimitiveState p;
  p.rho = 1e-5;
  p.u = {500.0, 100.0, 0.0};
  p.T = 300.0;
  field.cells.assign(4, p);
  AmrVelocityGrid grid = generate_axisym_grid(field, gas, 4.0, 20.0, 4, false);
  // a = 20 is far above any edge: single plane cell x 4 omega cells
  CHECK(grid.leaves.size() == 4);
}
