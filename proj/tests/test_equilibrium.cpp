#include <doctest.h>

#include "helpers.hpp"

using namespace rarevel;
using namespace testutil;

namespace {

MomentVec to_vec(const ConservedState& U, int d_v) {
  MomentVec v{};
  v[0] = U.rho;
  for (int a = 0; a < d_v; ++a) v[1 + a] = U.momentum[a];
  v[1 + d_v] = U.E;
  return v;
}

ConservedState from_vec(const MomentVec& v, int d_v) {
  ConservedState U;
  U.rho = v[0];
  for (int a = 0; a < d_v; ++a) U.momentum[a] = v[1 + a];
  U.E = v[1 + d_v];
  return U;
}

AmrVelocityGrid wide_uniform_grid(const GasModel& gas, const PrimitiveState& p, double c,
                                  double a) {
  MacroField field;
  field.ni = field.nj = 1;
  field.vel_dim = gas.d_v;
  field.cells = {p};
  FineGridSpec spec = fine_grid_spec(field, gas, c, a, false);
  return uniform_grid_from_spec(spec, QuadMode::q1);
}

} // namespace

TEST_CASE("initial alpha reproduces the continuous maxwellian") {
  GasModel gas = argon2d();
  SUBCASE("unit case") {
    GasModel unit = gas;
    unit.R = 1.0;
    PrimitiveState p{1.0, {0.0, 0.0, 0.0}, 1.0};
    const MomentVec a = initial_alpha(p, unit);
    CHECK(a[0] == doctest::Approx(-std::log(2.0 * M_PI)).epsilon(1e-14));
    CHECK(a[1] == 0.0);
    CHECK(a[2] == 0.0);
    CHECK(a[3] == doctest::Approx(-1.0));
  }
  SUBCASE("exp(alpha.m) equals the maxwellian") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> vr(-2000.0, 2000.0);
    PrimitiveState p{4.2e-6, {317.0, -95.0, 0.0}, 734.0};
    const MomentVec a = initial_alpha(p, gas);
    CHECK(a[1] == doctest::Approx(p.u[0] / (gas.R * p.T)).epsilon(1e-14));
    CHECK(a[2] == doctest::Approx(p.u[1] / (gas.R * p.T)).epsilon(1e-14));
    for (int k = 0; k < 20; ++k) {
      const Vec3 v{vr(rng), vr(rng), 0.0};
      const MomentVec m = moment_vector(v, 2);
      double e = 0.0;
      for (int i = 0; i < 4; ++i) e += a[i] * m[i];
      CHECK(std::exp(e) == doctest::Approx(maxwellian_value(p, v, gas)).epsilon(1e-13));
    }
  }
}

TEST_CASE("equilibrium on a wide fine grid stays near the continuous limit") {
  const GasModel gas = argon2d();
  PrimitiveState p{3.1e-6, {400.0, 150.0, 0.0}, 300.0};
  const AmrVelocityGrid grid = wide_uniform_grid(gas, p, 8.0, 0.5);
  const ConservedState U = conserved_from_primitive(p, gas);
  const DiscreteEquilibrium eq = solve_discrete_equilibrium(U, grid.quadrature(), gas, 1e-12, 50);
  CHECK(eq.newton_iterations <= 5);
  const MomentVec a0 = initial_alpha(p, gas);
  for (int k = 0; k < 4; ++k) CHECK(eq.alpha[k] == doctest::Approx(a0[k]).epsilon(1e-6));

  // defining contract: moments of (M, N) reproduce U
  const ConservedState Um = moments(eq.M, eq.N, grid.quadrature());
  CHECK(Um.rho == doctest::Approx(U.rho).epsilon(1e-11));
  CHECK(Um.momentum[0] == doctest::Approx(U.momentum[0]).epsilon(1e-10));
  CHECK(Um.E == doctest::Approx(U.E).epsilon(1e-11));
  for (double m : eq.M) CHECK(m > 0.0);
  for (double n : eq.N) CHECK(n > 0.0); // delta_eff = 1 for 2D argon
}

TEST_CASE("equilibrium conservation on random AMR grids") {
  std::mt19937 rng(13);
  const GasModel gas = argon2d();
  int solved = 0;
  for (int rep = 0; rep < 40; ++rep) {
    std::uniform_int_distribution<int> nd(1, 4);
    const MacroField field = random_field(rng, nd(rng), nd(rng), 2);
    const FineGridSpec spec = fine_grid_spec(field, gas, 4.0, 2.0, false);
    const SupportFunction phi = build_support_function(field, spec, gas, 4.0);
    AmrVelocityGrid grid = generate_amr(spec, phi, 2.0);
    attach_quadrature(grid, rep % 2 ? QuadMode::p0 : QuadMode::q1);
    // states drawn from the field itself are representable on its grid
    for (const auto& cell : field.cells) {
      const ConservedState U = conserved_from_primitive(cell, gas);
      const DiscreteEquilibrium eq = solve_discrete_equilibrium(U, grid.quadrature(), gas);
      CHECK(eq.newton_iterations <= 20);
      const ConservedState Um = moments(eq.M, eq.N, grid.quadrature());
      const double vref = std::max(std::sqrt(norm2(cell.u)), std::sqrt(gas.R * cell.T));
      CHECK(std::abs(Um.rho - U.rho) <= 1e-9 * U.rho);
      CHECK(std::abs(Um.momentum[0] - U.momentum[0]) <= 1e-9 * U.rho * vref);
      CHECK(std::abs(Um.momentum[1] - U.momentum[1]) <= 1e-9 * U.rho * vref);
      CHECK(std::abs(Um.E - U.E) <= 1e-9 * U.E);
      for (double m : eq.M) CHECK(m > 0.0);
      ++solved;
    }
  }
  CHECK(solved > 80);
}

TEST_CASE("degenerate grids raise grid-inadequacy errors") {
  const GasModel gas = argon2d();
  // all points at one velocity: rank-deficient moment system
  std::vector<Vec3> pts(6, Vec3{100.0, 50.0, 0.0});
  std::vector<double> w(6, 1.0);
  AmrVelocityGrid grid = grid_from_points(2, pts, w);
  PrimitiveState p{1.0, {100.0, 50.0, 0.0}, 300.0};
  CHECK_THROWS_AS(
      solve_discrete_equilibrium(conserved_from_primitive(p, gas), grid.quadrature(), gas),
      GridInadequacyError);
}

TEST_CASE("jacobian products: chain rule and finite differences") {
  std::mt19937 rng(29);
  const GasModel gas = argon2d();
  std::uniform_real_distribution<double> pr(-1.0, 1.0);

  for (int rep = 0; rep < 10; ++rep) {
    const AmrVelocityGrid grid = random_amr_grid(rng, gas, rep % 2 ? QuadMode::q1 : QuadMode::p0);
    // a state well inside the grid box
    PrimitiveState p;
    p.rho = 2.0e-5;
    for (int a = 0; a < 2; ++a) p.u[a] = 0.5 * (grid.root_lo[a] + grid.root_hi[a]);
    const double span =
        std::min(grid.root_hi[0] - grid.root_lo[0], grid.root_hi[1] - grid.root_lo[1]);
    p.T = std::pow(span / 10.0, 2.0) / gas.R;
    const ConservedState U = conserved_from_primitive(p, gas);
    const DiscreteEquilibrium eq = solve_discrete_equilibrium(U, grid.quadrature(), gas, 1e-13, 80);
    const EquilibriumOperator op = make_equilibrium_operator(eq, grid.quadrature(), gas);

    const double vref = std::max(std::sqrt(norm2(p.u)), std::sqrt(gas.R * p.T));
    const MomentVec scale{U.rho, U.rho * vref, U.rho * vref, U.E, 0.0};

    MomentVec dU{};
    for (int k = 0; k < 4; ++k) dU[k] = pr(rng) * scale[k];

    // chain rule: moments of (dM, dN) reproduce dU
    const MomentVec w = op.apply_inverse(dU);
    MomentVec back{};
    for (std::size_t q = 0; q < grid.points.size(); ++q) {
      const MomentVec m = moment_vector(grid.points[q], 2);
      const double dm = op.dM(eq.M[q], m, w);
      const double dn = op.dN(eq.N[q], m, w);
      for (int k = 0; k < 4; ++k) back[k] += m[k] * dm * grid.weights[q];
      back[3] += dn * grid.weights[q];
    }
    for (int k = 0; k < 4; ++k)
      CHECK(back[k] == doctest::Approx(dU[k]).epsilon(1e-10).scale(std::abs(scale[k]) + 1e-300));

    // central finite differences through the full Newton solve
    const double h = 1e-5;
    MomentVec up = to_vec(U, 2), dn_v = to_vec(U, 2);
    for (int k = 0; k < 4; ++k) {
      up[k] += h * dU[k];
      dn_v[k] -= h * dU[k];
    }
    const DiscreteEquilibrium eq_p =
        solve_discrete_equilibrium(from_vec(up, 2), grid.quadrature(), gas, 1e-13, 80, &eq.alpha);
    const DiscreteEquilibrium eq_m =
        solve_discrete_equilibrium(from_vec(dn_v, 2), grid.quadrature(), gas, 1e-13, 80, &eq.alpha);

    double num = 0.0, den = 0.0;
    for (std::size_t q = 0; q < grid.points.size(); ++q) {
      const MomentVec m = moment_vector(grid.points[q], 2);
      const double fd_m = (eq_p.M[q] - eq_m.M[q]) / (2.0 * h);
      const double fd_n = (eq_p.N[q] - eq_m.N[q]) / (2.0 * h);
      const double an_m = op.dM(eq.M[q], m, w);
      const double an_n = op.dN(eq.N[q], m, w);
      num += (fd_m - an_m) * (fd_m - an_m) + (fd_n - an_n) * (fd_n - an_n);
      den += an_m * an_m + an_n * an_n;
    }
    CHECK(std::sqrt(num / den) <= 1e-5);
  }
}

TEST_CASE("monoatomic 3D: N vanishes and the moment matrix reduces") {
  std::mt19937 rng(31);
  const GasModel gas = argon3d(); // delta_eff = 0
  std::uniform_int_distribution<int> nd(1, 2);
  MacroField field = random_field(rng, nd(rng), nd(rng), 3);
  const FineGridSpec spec = fine_grid_spec(field, gas, 4.0, 2.0, false);
  const SupportFunction phi = build_support_function(field, spec, gas, 4.0);
  AmrVelocityGrid grid = generate_amr(spec, phi, 2.0);
  attach_quadrature(grid, QuadMode::p0);

  const PrimitiveState p = field.cells[0];
  const DiscreteEquilibrium eq =
      solve_discrete_equilibrium(conserved_from_primitive(p, gas), grid.quadrature(), gas);
  for (double n : eq.N) CHECK(n == 0.0);
  const EquilibriumOperator op = make_equilibrium_operator(eq, grid.quadrature(), gas);
  // A equals the plain monoatomic moment matrix: sum m^T m M w
  std::array<double, 25> a_ref{};
  for (std::size_t q = 0; q < grid.points.size(); ++q) {
    const MomentVec m = moment_vector(grid.points[q], 3);
    const double mw = eq.M[q] * grid.weights[q];
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) a_ref[i * 5 + j] += m[i] * m[j] * mw;
  }
  for (int k = 0; k < 25; ++k)
    CHECK(op.A[k] == doctest::Approx(a_ref[k]).epsilon(1e-12).scale(std::abs(a_ref[k]) + 1e-300));

  std::vector<double> Df, Dg;
  op.diagonals(grid.quadrature(), eq.M, eq.N, Df, Dg);
  for (double d : Dg) CHECK(d == 0.0);
  for (double d : Df) CHECK(d > 0.0);
}

TEST_CASE("warm start efficiency inside the grid") {
  const GasModel gas = argon2d();
  PrimitiveState base{1e-5, {0.0, 0.0, 0.0}, 500.0};
  const AmrVelocityGrid grid = wide_uniform_grid(gas, base, 6.0, 0.5);
  const double s = std::sqrt(gas.R * base.T);
  std::mt19937 rng(41);
  std::uniform_real_distribution<double> ur(-0.45, 0.45);
  for (int k = 0; k < 30; ++k) {
    PrimitiveState p = base;
    p.u = {ur(rng) * s, ur(rng) * s, 0.0};
    p.T = base.T * (0.8 + 0.02 * k);
    const DiscreteEquilibrium eq =
        solve_discrete_equilibrium(conserved_from_primitive(p, gas), grid.quadrature(), gas);
    CHECK(eq.newton_iterations <= 5);
  }
}

TEST_CASE("alpha_E stays negative") {
  const GasModel gas = argon2d();
  PrimitiveState p{1e-5, {900.0, 0.0, 0.0}, 400.0};
  const AmrVelocityGrid grid = wide_uniform_grid(gas, p, 5.0, 1.0);
  const DiscreteEquilibrium eq =
      solve_discrete_equilibrium(conserved_from_primitive(p, gas), grid.quadrature(), gas);
  CHECK(eq.alpha[3] < 0.0);
}
