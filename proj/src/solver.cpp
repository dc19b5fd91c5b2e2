#include "rarevel/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "rarevel/parallel.hpp"

namespace rarevel {

namespace {

// Upwind split helpers
inline double pos(double a) { return a > 0.0 ? a : 0.0; }
inline double neg(double a) { return a < 0.0 ? a : 0.0; }

// Face fluxes and divergence for one velocity point. base points at the
// ghost-padded field array (f or g), out at the divergence slot of cell
// (0,0) with spacing out_stride between cells (cell-major, i*nj+j order).
void point_divergence(const double* base, const DistributionField& F, const SpaceMesh2D& mesh,
                      double vx, double vy, int order, bool half_factor, double* iflux,
                      double* jflux, double* out, long out_stride) {
  const int ni = mesh.ni, nj = mesh.nj;
  const long nq = F.nq;
  const long row = static_cast<long>(nj + 4) * nq; // +1 in i
  const double lim_fac = half_factor ? 0.5 : 1.0;

  for (int i = 0; i <= ni; ++i)
    for (int j = 0; j < nj; ++j) {
      const double a = vx * mesh.inx[mesh.iface(i, j)] + vy * mesh.iny[mesh.iface(i, j)];
      const double* c = base + (static_cast<std::size_t>(i + 2) * (nj + 4) + (j + 2)) * nq;
      const double fm = c[-row], fp = c[0]; // cells i-1 and i
      double flux = pos(a) * fm + neg(a) * fp;
      if (order >= 2) {
        const double d0 = fm - c[-2 * row];
        const double d1 = fp - fm;
        const double d2 = c[row] - fp;
        flux += std::abs(a) * lim_fac * minmod3(d0, d1, d2);
      }
      iflux[mesh.iface(i, j)] = flux;
    }
  for (int i = 0; i < ni; ++i)
    for (int j = 0; j <= nj; ++j) {
      const double a = vx * mesh.jnx[mesh.jface(i, j)] + vy * mesh.jny[mesh.jface(i, j)];
      const double* c = base + (static_cast<std::size_t>(i + 2) * (nj + 4) + (j + 2)) * nq;
      const double fm = c[-static_cast<long>(nq)], fp = c[0]; // cells j-1 and j
      double flux = pos(a) * fm + neg(a) * fp;
      if (order >= 2) {
        const double d0 = fm - c[-2 * static_cast<long>(nq)];
        const double d1 = fp - fm;
        const double d2 = c[nq] - fp;
        flux += std::abs(a) * lim_fac * minmod3(d0, d1, d2);
      }
      jflux[mesh.jface(i, j)] = flux;
    }
  for (int i = 0; i < ni; ++i)
    for (int j = 0; j < nj; ++j) {
      const double div = (iflux[mesh.iface(i + 1, j)] - iflux[mesh.iface(i, j)] +
                          jflux[mesh.jface(i, j + 1)] - jflux[mesh.jface(i, j)]) /
                         mesh.area[mesh.cell(i, j)];
      out[(static_cast<long>(i) * nj + j) * out_stride] = div;
    }
}

} // namespace

void transport_divergence(const DistributionField& field, const SpaceMesh2D& mesh,
                          const AmrVelocityGrid& grid, int order, bool half_factor,
                          std::vector<double>& divf, std::vector<double>& divg) {
  const long nq = static_cast<long>(grid.points.size());
  const std::size_t n = static_cast<std::size_t>(mesh.ni) * mesh.nj * nq;
  divf.assign(n, 0.0);
  divg.assign(n, 0.0);
  std::vector<double> iflux(static_cast<std::size_t>(mesh.ni + 1) * mesh.nj);
  std::vector<double> jflux(static_cast<std::size_t>(mesh.ni) * (mesh.nj + 1));
  for (long q = 0; q < nq; ++q) {
    const double vx = grid.points[q][0], vy = grid.points[q][1];
    point_divergence(field.f.data() + q, field, mesh, vx, vy, order, half_factor, iflux.data(),
                     jflux.data(), divf.data() + q, nq);
    point_divergence(field.g.data() + q, field, mesh, vx, vy, order, half_factor, iflux.data(),
                     jflux.data(), divg.data() + q, nq);
  }
}

BgkSolver::BgkSolver(const SpaceMesh2D& mesh_, const AmrVelocityGrid& grid_, const GasModel& gas_,
                     std::array<BoundaryCondition, 4> bcs_, SolverConfig config_)
    : mesh(mesh_), grid(grid_), gas(gas_), bcs(bcs_), config(config_) {
  gas.validate();
  config.validate();
  if (gas.d_v != 2) throw InputError("solver: only d_v = 2 velocity grids are supported");
  if (grid.coord != CoordSystem::cartesian || grid.dim != 2)
    throw InputError("solver: space solver requires a 2D cartesian velocity grid");
  grid.validate_for_solve();

  ni = mesh.ni;
  nj = mesh.nj;
  nq = static_cast<long>(grid.points.size());
  D = gas.moment_dim();

  state.resize(ni, nj, nq);
  const std::size_t nc = static_cast<std::size_t>(ni) * nj;
  rhsf.assign(nc * nq, 0.0);
  rhsg.assign(nc * nq, 0.0);
  df.assign(nc * nq, 0.0);
  dg.assign(nc * nq, 0.0);
  alpha_.resize(nc);
  a_inv_.resize(nc);
  tau_.assign(nc, 0.0);
  u_.resize(nc);
  mq_.assign(nc * nq, 0.0);
  nq_eq_.assign(nc * nq, 0.0);
  df_diag_.assign(nc * nq, 0.0);
  dg_diag_.assign(nc * nq, 0.0);
  du_.resize(nc);
  w_.resize(nc);

  setup_boundary_data();
  setup_reference_scales();

  dt0 = compute_dt0();
  dt = config.dt_init > 0.0 ? config.dt_init : dt0;
}

double BgkSolver::compute_dt0() const {
  double vmax = 0.0;
  for (const auto& p : grid.points) vmax = std::max(vmax, std::sqrt(p[0] * p[0] + p[1] * p[1]));
  double dtmin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < ni; ++i)
    for (int j = 0; j < nj; ++j) {
      double per = 0.0;
      per += std::hypot(mesh.inx[mesh.iface(i, j)], mesh.iny[mesh.iface(i, j)]);
      per += std::hypot(mesh.inx[mesh.iface(i + 1, j)], mesh.iny[mesh.iface(i + 1, j)]);
      per += std::hypot(mesh.jnx[mesh.jface(i, j)], mesh.jny[mesh.jface(i, j)]);
      per += std::hypot(mesh.jnx[mesh.jface(i, j + 1)], mesh.jny[mesh.jface(i, j + 1)]);
      dtmin = std::min(dtmin, mesh.area[mesh.cell(i, j)] / (vmax * per + 1e-300));
    }
  return dtmin;
}

void BgkSolver::setup_reference_scales() {
  // Reference magnitudes from the first inflow state (init state otherwise,
  // handled in initialize_*). The residual is the RMS of RHS scaled by a
  // transport magnitude f_ref * vchar / L_ref per equation family.
  const PrimitiveState* ref = nullptr;
  for (const auto& bc : bcs)
    if (const auto* in = std::get_if<Inflow>(&bc)) {
      ref = &in->state;
      break;
    }
  if (!ref) return; // defer to initialization
  const PrimitiveState& p = *ref;
  const double vchar = std::max(std::sqrt(norm2(p.u)), std::sqrt(gas.R * p.T));
  const double l_ref = std::sqrt(mesh.total_volume());
  const double f_ref = p.rho * std::pow(2.0 * M_PI * gas.R * p.T, -0.5 * gas.d_v);
  const double g_ref = f_ref * gas.R * p.T * std::max(0.5 * gas.delta_eff(), 0.5);
  f_scale = f_ref * vchar / l_ref;
  g_scale = g_ref * vchar / l_ref;
}

void BgkSolver::setup_boundary_data() {
  for (int s = 0; s < 4; ++s) {
    const int count = (s < 2) ? nj : ni;
    if (const auto* wall = std::get_if<DiffuseWall>(&bcs[s])) {
      if (!(wall->T_w > 0.0)) throw InputError("diffuse wall: T_w must be positive");
      PrimitiveState pw{1.0, Vec3{}, wall->T_w};
      const DiscreteEquilibrium eq = solve_discrete_equilibrium(
          conserved_from_primitive(pw, gas), grid.quadrature(), gas, config.eq_tol,
          config.eq_max_iter);
      wall_f_[s] = eq.M;
      wall_g_[s] = eq.N;
      wall_den_[s].assign(count, 0.0);
      sigma_[s].assign(count, 0.0);
      for (int b = 0; b < count; ++b) {
        double nx, ny;
        if (s == side_imin) {
          nx = mesh.inx[mesh.iface(0, b)];
          ny = mesh.iny[mesh.iface(0, b)];
        } else if (s == side_imax) {
          nx = -mesh.inx[mesh.iface(ni, b)];
          ny = -mesh.iny[mesh.iface(ni, b)];
        } else if (s == side_jmin) {
          nx = mesh.jnx[mesh.jface(b, 0)];
          ny = mesh.jny[mesh.jface(b, 0)];
        } else {
          nx = -mesh.jnx[mesh.jface(b, nj)];
          ny = -mesh.jny[mesh.jface(b, nj)];
        }
        double den = 0.0;
        for (long q = 0; q < nq; ++q) {
          const double vn = grid.points[q][0] * nx + grid.points[q][1] * ny;
          if (vn > 0.0) den += vn * wall_f_[s][q] * grid.weights[q];
        }
        if (!(den > 0.0))
          throw GridInadequacyError("diffuse wall: no outgoing discrete velocities at face " +
                                    std::to_string(b) + " of side " + std::to_string(s));
        wall_den_[s][b] = den;
      }
    } else if (const auto* in = std::get_if<Inflow>(&bcs[s])) {
      const DiscreteEquilibrium eq = solve_discrete_equilibrium(
          conserved_from_primitive(in->state, gas), grid.quadrature(), gas, config.eq_tol,
          config.eq_max_iter);
      inflow_f_[s] = eq.M;
      inflow_g_[s] = eq.N;
    } else if (const auto* sym = std::get_if<SymmetryPlane>(&bcs[s])) {
      if (grid.symmetry_axis != sym->axis || grid.pairing.size() != static_cast<std::size_t>(nq))
        throw InputError("symmetry BC: grid carries no pairing for axis " +
                         std::to_string(sym->axis));
    }
  }
}

void BgkSolver::initialize_uniform(const PrimitiveState& p) {
  MacroField field;
  field.ni = ni;
  field.nj = nj;
  field.vel_dim = 2;
  field.cells.assign(static_cast<std::size_t>(ni) * nj, p);
  // row-major i fastest
  initialize_from_macro(field);
}

void BgkSolver::initialize_from_macro(const MacroField& field) {
  field.validate();
  if (field.ni != ni || field.nj != nj || field.nk != 1)
    throw InputError("initialize: macro field dims do not match the mesh");
  const long ncells = static_cast<long>(ni) * nj;
  parallel_for(ncells, [&](long b, long e, int) {
    for (long c = b; c < e; ++c) {
      const int i = static_cast<int>(c / nj), j = static_cast<int>(c % nj);
      const PrimitiveState& p = field.cells[field.index(i, j)];
      const DiscreteEquilibrium eq =
          solve_discrete_equilibrium(conserved_from_primitive(p, gas), grid.quadrature(), gas,
                                     config.eq_tol, config.eq_max_iter);
      alpha_[cidx(i, j)] = eq.alpha;
      double* fp = &state.f[state.idx(i, j, 0)];
      double* gp = &state.g[state.idx(i, j, 0)];
      for (long q = 0; q < nq; ++q) {
        fp[q] = eq.M[q];
        gp[q] = eq.N[q];
      }
    }
  });
  have_alpha_ = true;
  if (f_scale == 1.0 && g_scale == 1.0) {
    // no inflow reference: scale from the first init cell
    const PrimitiveState& p = field.cells[0];
    const double vchar = std::max(std::sqrt(norm2(p.u)), std::sqrt(gas.R * p.T));
    const double l_ref = std::sqrt(mesh.total_volume());
    const double f_ref = p.rho * std::pow(2.0 * M_PI * gas.R * p.T, -0.5 * gas.d_v);
    f_scale = f_ref * vchar / l_ref;
    g_scale = f_ref * gas.R * p.T * std::max(0.5 * gas.delta_eff(), 0.5) * vchar / l_ref;
  }
}

void BgkSolver::fill_ghosts() {
  for (int s = 0; s < 4; ++s) {
    const int count = (s < 2) ? nj : ni;
    for (int b = 0; b < count; ++b) {
      // cell/ghost indices and the into-gas face normal for this side
      int ci, cj, g1i, g1j, g2i, g2j, i2i, i2j;
      double nx, ny;
      if (s == side_imin) {
        ci = 0; cj = b; g1i = -1; g1j = b; g2i = -2; g2j = b; i2i = 1; i2j = b;
        nx = mesh.inx[mesh.iface(0, b)]; ny = mesh.iny[mesh.iface(0, b)];
      } else if (s == side_imax) {
        ci = ni - 1; cj = b; g1i = ni; g1j = b; g2i = ni + 1; g2j = b; i2i = ni - 2; i2j = b;
        nx = -mesh.inx[mesh.iface(ni, b)]; ny = -mesh.iny[mesh.iface(ni, b)];
      } else if (s == side_jmin) {
        ci = b; cj = 0; g1i = b; g1j = -1; g2i = b; g2j = -2; i2i = b; i2j = 1;
        nx = mesh.jnx[mesh.jface(b, 0)]; ny = mesh.jny[mesh.jface(b, 0)];
      } else {
        ci = b; cj = nj - 1; g1i = b; g1j = nj; g2i = b; g2j = nj + 1; i2i = b; i2j = nj - 2;
        nx = -mesh.jnx[mesh.jface(b, nj)]; ny = -mesh.jny[mesh.jface(b, nj)];
      }
      double* f1 = &state.f[state.idx(g1i, g1j, 0)];
      double* g1 = &state.g[state.idx(g1i, g1j, 0)];
      double* f2 = &state.f[state.idx(g2i, g2j, 0)];
      double* g2 = &state.g[state.idx(g2i, g2j, 0)];
      const double* fc = &state.f[state.idx(ci, cj, 0)];
      const double* gc = &state.g[state.idx(ci, cj, 0)];

      if (const auto* wall = std::get_if<DiffuseWall>(&bcs[s])) {
        (void)wall;
        double num = 0.0;
        for (long q = 0; q < nq; ++q) {
          const double vn = grid.points[q][0] * nx + grid.points[q][1] * ny;
          if (vn < 0.0) num += vn * fc[q] * grid.weights[q];
        }
        const double sg = -num / wall_den_[s][b];
        sigma_[s][b] = sg;
        for (long q = 0; q < nq; ++q) {
          const double vn = grid.points[q][0] * nx + grid.points[q][1] * ny;
          if (vn > 0.0) {
            f1[q] = sg * wall_f_[s][q];
            g1[q] = sg * wall_g_[s][q];
          } else { // never read by the upwind wall flux; interior value for safety
            f1[q] = fc[q];
            g1[q] = gc[q];
          }
          f2[q] = f1[q];
          g2[q] = g1[q];
        }
      } else if (std::get_if<Inflow>(&bcs[s])) {
        for (long q = 0; q < nq; ++q) {
          f1[q] = inflow_f_[s][q];
          g1[q] = inflow_g_[s][q];
          f2[q] = f1[q];
          g2[q] = g1[q];
        }
      } else if (std::get_if<Outflow>(&bcs[s])) {
        for (long q = 0; q < nq; ++q) {
          f1[q] = fc[q];
          g1[q] = gc[q];
          f2[q] = f1[q];
          g2[q] = g1[q];
        }
      } else { // symmetry: mirror first interior into layer 1, second into layer 2
        const double* fi2 = &state.f[state.idx(i2i, i2j, 0)];
        const double* gi2 = &state.g[state.idx(i2i, i2j, 0)];
        for (long q = 0; q < nq; ++q) {
          const long qp = grid.pairing[q];
          f1[q] = fc[qp];
          g1[q] = gc[qp];
          f2[q] = fi2[qp];
          g2[q] = gi2[qp];
        }
      }
    }
  }
}

double BgkSolver::assemble_rhs() {
  const long ncells = static_cast<long>(ni) * nj;

  // Per-cell moments, relaxation time, conservative equilibrium and its
  // linearization data. Cells are independent; each keeps its own
  // fixed-order reductions.
  parallel_for(ncells, [&](long b, long e, int) {
    for (long c = b; c < e; ++c) {
      const int i = static_cast<int>(c / nj), j = static_cast<int>(c % nj);
      const double* fp = &state.f[state.idx(i, j, 0)];
      const double* gp = &state.g[state.idx(i, j, 0)];
      const ConservedState U =
          moments(std::span(fp, static_cast<std::size_t>(nq)),
                  std::span(gp, static_cast<std::size_t>(nq)), grid.quadrature());
      PrimitiveState prim;
      DiscreteEquilibrium eq;
      try {
        prim = primitive_from_conserved(U, gas);
        const MomentVec warm = have_alpha_ ? alpha_[c] : initial_alpha(prim, gas);
        eq = solve_discrete_equilibrium(U, grid.quadrature(), gas, config.eq_tol,
                                        config.eq_max_iter, &warm);
      } catch (const std::runtime_error& err) {
        throw NumericalError(std::string(err.what()) + " [cell (" + std::to_string(i) + "," +
                             std::to_string(j) + ")]");
      }
      alpha_[c] = eq.alpha;
      tau_[c] = relaxation_time(prim, gas);
      u_[c] = MomentVec{U.rho, U.momentum[0], U.momentum[1], U.E, 0.0};

      const EquilibriumOperator op = make_equilibrium_operator(eq, grid.quadrature(), gas);
      op.lu.invert(a_inv_[c].data());

      const double* ai = a_inv_[c].data();
      double colE[5];
      for (int k = 0; k < D; ++k) colE[k] = ai[k * D + (D - 1)];
      double* Mrow = &mq_[c * nq];
      double* Nrow = &nq_eq_[c * nq];
      double* Dfr = &df_diag_[c * nq];
      double* Dgr = &dg_diag_[c * nq];
      const double aE = eq.alpha[D - 1];
      for (long q = 0; q < nq; ++q) {
        Mrow[q] = eq.M[q];
        Nrow[q] = eq.N[q];
        const MomentVec m = moment_vector(grid.points[q], 2);
        double x[5];
        for (int r = 0; r < D; ++r) {
          double sum = 0.0;
          for (int k2 = 0; k2 < D; ++k2) sum += ai[r * D + k2] * m[k2];
          x[r] = sum;
        }
        double s = 0.0;
        for (int k2 = 0; k2 < D; ++k2) s += m[k2] * x[k2];
        Dfr[q] = Mrow[q] * s * grid.weights[q];
        if (gas.delta_eff() > 0) {
          double t = 0.0;
          for (int k2 = 0; k2 < D; ++k2) t += m[k2] * colE[k2];
          t -= colE[D - 1] / aE;
          Dgr[q] = Nrow[q] * t * grid.weights[q];
        } else {
          Dgr[q] = 0.0;
        }
      }
    }
  });
  have_alpha_ = true;

  // Transport divergence, written as -div directly into the RHS.
  const int order = config.limiter_enabled ? 2 : 1;
  parallel_for(nq, [&](long qb, long qe, int) {
    std::vector<double> iflux(static_cast<std::size_t>(ni + 1) * nj);
    std::vector<double> jflux(static_cast<std::size_t>(ni) * (nj + 1));
    for (long q = qb; q < qe; ++q) {
      const double vx = grid.points[q][0], vy = grid.points[q][1];
      point_divergence(state.f.data() + q, state, mesh, vx, vy, order,
                       config.second_order_half_factor, iflux.data(), jflux.data(),
                       rhsf.data() + q, nq);
      point_divergence(state.g.data() + q, state, mesh, vx, vy, order,
                       config.second_order_half_factor, iflux.data(), jflux.data(),
                       rhsg.data() + q, nq);
    }
  });

  // RHS = -div + (M - f)/tau and per-cell residual partials.
  std::vector<double> part(static_cast<std::size_t>(ncells), 0.0);
  parallel_for(ncells, [&](long b, long e, int) {
    for (long c = b; c < e; ++c) {
      const int i = static_cast<int>(c / nj), j = static_cast<int>(c % nj);
      const double invtau = 1.0 / tau_[c];
      const double* fp = &state.f[state.idx(i, j, 0)];
      const double* gp = &state.g[state.idx(i, j, 0)];
      double* rf = &rhsf[c * nq];
      double* rg = &rhsg[c * nq];
      const double* Mrow = &mq_[c * nq];
      const double* Nrow = &nq_eq_[c * nq];
      double acc = 0.0;
      for (long q = 0; q < nq; ++q) {
        rf[q] = -rf[q] + invtau * (Mrow[q] - fp[q]);
        rg[q] = -rg[q] + invtau * (Nrow[q] - gp[q]);
        const double sf = rf[q] / f_scale;
        const double sg2 = rg[q] / g_scale;
        acc += (sf * sf + sg2 * sg2) * grid.weights[q];
      }
      part[c] = acc * mesh.area[mesh.cell(i, j)];
    }
  });
  double total = 0.0;
  for (long c = 0; c < ncells; ++c) total += part[c];
  double wsum = 0.0;
  for (long q = 0; q < nq; ++q) wsum += grid.weights[q];
  const double res = std::sqrt(total / (mesh.total_volume() * wsum));
  if (!std::isfinite(res)) throw DivergenceError("residual is not finite", iteration);
  return res;
}

void BgkSolver::jgs_solve() {
  const long ncells = static_cast<long>(ni) * nj;
  std::fill(df.begin(), df.end(), 0.0);
  std::fill(dg.begin(), dg.end(), 0.0);
  for (long c = 0; c < ncells; ++c) {
    du_[c] = MomentVec{};
    w_[c] = MomentVec{};
  }

  const bool line_i = config.sweep_axis == 0;
  const int nl = line_i ? ni : nj; // along the tridiagonal line
  const int nc = line_i ? nj : ni; // across

  const double inv_dt = 1.0 / dt;

  for (int p = 0; p < config.inner_sweeps; ++p) {
    // Jacobi loop over velocity points; each point owns its full
    // forward+backward line sweep, independent of the others.
    parallel_for(nq, [&](long qb, long qe, int) {
      std::vector<double> sub(nl), dia_f(nl), dia_g(nl), rf(nl), rg(nl), sup(nl), cp(nl),
          xf(nl), xg(nl);
      std::vector<double> ef(static_cast<std::size_t>(ncells)), eg(static_cast<std::size_t>(ncells));
      for (long q = qb; q < qe; ++q) {
        const double vx = grid.points[q][0], vy = grid.points[q][1];
        const MomentVec m = moment_vector(grid.points[q], 2);

        auto cell_of = [&](int l, int c2) { return line_i ? cidx(l, c2) : cidx(c2, l); };
        // v.nu at the lower along-line face of row l in line c2
        auto aface = [&](int l, int c2) {
          return line_i ? vx * mesh.inx[mesh.iface(l, c2)] + vy * mesh.iny[mesh.iface(l, c2)]
                        : vx * mesh.jnx[mesh.jface(c2, l)] + vy * mesh.jny[mesh.jface(c2, l)];
        };
        // v.nu at the cross face between lines c2-1 and c2, row l
        auto bface = [&](int l, int c2) {
          return line_i ? vx * mesh.jnx[mesh.jface(l, c2)] + vy * mesh.jny[mesh.jface(l, c2)]
                        : vx * mesh.inx[mesh.iface(c2, l)] + vy * mesh.iny[mesh.iface(c2, l)];
        };

        auto solve_line = [&](int c2, bool forward) {
          // E-term frozen at pass start: computed on first touch (forward)
          for (int l = 0; l < nl; ++l) {
            const std::size_t cc = cell_of(l, c2);
            const double area = mesh.area[cc]; // cell() and cidx() agree
            const double am = aface(l, c2), ap = aface(l + 1, c2);
            const double bmv = bface(l, c2), bpv = bface(l, c2 + 1);
            const double ac = (pos(ap) - neg(am)) / area;
            const double bc = (pos(bpv) - neg(bmv)) / area;
            const double invtau = 1.0 / tau_[cc];
            const std::size_t rq = cc * nq + q;

            if (forward) {
              // E dF = (1/tau)(dU M_q m . w) - (1/tau) D_q dF_q at the
              // previous inner iterate (df still holds it for this line)
              double mw = 0.0;
              for (int k = 0; k < D; ++k) mw += m[k] * w_[cc][k];
              double nw = mw - w_[cc][D - 1] / alpha_[cc][D - 1];
              ef[cc] = invtau * (mq_[rq] * mw - df_diag_[rq] * df[rq]);
              eg[cc] = gas.delta_eff() > 0 ? invtau * (nq_eq_[rq] * nw - dg_diag_[rq] * dg[rq]) : 0.0;
            }

            sub[l] = -pos(am) / area;
            sup[l] = neg(ap) / area;
            dia_f[l] = inv_dt + ac + bc + invtau * (1.0 - df_diag_[rq]);
            dia_g[l] = inv_dt + ac + bc + invtau * (1.0 - dg_diag_[rq]);

            double rhs_f = rhsf[rq] + ef[cc];
            double rhs_g = rhsg[rq] + eg[cc];
            if (c2 > 0) {
              const std::size_t nb = cell_of(l, c2 - 1) * nq + q;
              rhs_f += pos(bmv) / area * df[nb];
              rhs_g += pos(bmv) / area * dg[nb];
            }
            if (c2 < nc - 1) {
              const std::size_t nb = cell_of(l, c2 + 1) * nq + q;
              rhs_f -= neg(bpv) / area * df[nb];
              rhs_g -= neg(bpv) / area * dg[nb];
            }
            rf[l] = rhs_f;
            rg[l] = rhs_g;
          }
          // Thomas, two right-hand sides with distinct diagonals
          auto thomas = [&](std::vector<double>& dia, std::vector<double>& r,
                            std::vector<double>& x) {
            cp[0] = sup[0] / dia[0];
            x[0] = r[0] / dia[0];
            for (int l = 1; l < nl; ++l) {
              const double den = dia[l] - sub[l] * cp[l - 1];
              if (!(std::abs(den) > 0.0) || !std::isfinite(den))
                throw NumericalError("tridiagonal pivot underflow at line " + std::to_string(c2) +
                                     ", row " + std::to_string(l) + ", point " + std::to_string(q));
              cp[l] = sup[l] / den;
              x[l] = (r[l] - sub[l] * x[l - 1]) / den;
            }
            for (int l = nl - 2; l >= 0; --l) x[l] -= cp[l] * x[l + 1];
          };
          if (!(std::abs(dia_f[0]) > 0.0) || !(std::abs(dia_g[0]) > 0.0))
            throw NumericalError("tridiagonal pivot underflow at line " + std::to_string(c2));
          thomas(dia_f, rf, xf);
          thomas(dia_g, rg, xg);
          for (int l = 0; l < nl; ++l) {
            const std::size_t rq = cell_of(l, c2) * nq + q;
            df[rq] = xf[l];
            dg[rq] = xg[l];
          }
        };

        for (int c2 = 0; c2 < nc; ++c2) solve_line(c2, true);
        for (int c2 = nc - 1; c2 >= 0; --c2) solve_line(c2, false);
      }
    });

    // moments of dF for the next pass's E action
    parallel_for(ncells, [&](long b, long e, int) {
      for (long c = b; c < e; ++c) {
        MomentVec acc{};
        const double* dfp = &df[c * nq];
        const double* dgp = &dg[c * nq];
        for (long q = 0; q < nq; ++q) {
          const double w = grid.weights[q];
          const MomentVec m = moment_vector(grid.points[q], 2);
          for (int k = 0; k < D; ++k) acc[k] += m[k] * dfp[q] * w;
          acc[D - 1] += dgp[q] * w;
        }
        du_[c] = acc;
        MomentVec wv{};
        const double* ai = a_inv_[c].data();
        for (int r = 0; r < D; ++r) {
          double s = 0.0;
          for (int k = 0; k < D; ++k) s += ai[r * D + k] * acc[k];
          wv[r] = s;
        }
        w_[c] = wv;
      }
    });
  }
}

void BgkSolver::apply_update() {
  const long ncells = static_cast<long>(ni) * nj;
  // the retry path relies on the state being untouched on failure, so the
  // finiteness scan runs before anything is written
  std::vector<char> bad(static_cast<std::size_t>(ncells), 0);
  parallel_for(ncells, [&](long b, long e, int) {
    for (long c = b; c < e; ++c) {
      const double* dfp = &df[c * nq];
      const double* dgp = &dg[c * nq];
      for (long q = 0; q < nq; ++q)
        if (!std::isfinite(dfp[q]) || !std::isfinite(dgp[q])) {
          bad[c] = 1;
          break;
        }
    }
  });
  for (long c = 0; c < ncells; ++c)
    if (bad[c]) throw DivergenceError("non-finite update", iteration);

  std::vector<long> neg_part(static_cast<std::size_t>(ncells), 0);
  parallel_for(ncells, [&](long b, long e, int) {
    for (long c = b; c < e; ++c) {
      const int i = static_cast<int>(c / nj), j = static_cast<int>(c % nj);
      double* fp = &state.f[state.idx(i, j, 0)];
      double* gp = &state.g[state.idx(i, j, 0)];
      const double* dfp = &df[c * nq];
      const double* dgp = &dg[c * nq];
      long neg = 0;
      for (long q = 0; q < nq; ++q) {
        fp[q] += dfp[q];
        gp[q] += dgp[q];
        if (fp[q] < 0.0) ++neg;
      }
      neg_part[c] = neg;
    }
  });
  negative_f_count = 0;
  for (long c = 0; c < ncells; ++c) negative_f_count += neg_part[c];
}

double BgkSolver::advance() {
  fill_ghosts();
  const double res = assemble_rhs();
  jgs_solve();
  apply_update();
  const double cap = config.dt_max_factor * (config.dt_init > 0.0 ? config.dt_init : dt0);
  dt = std::min(dt * config.dt_growth, cap);
  ++iteration;
  return res;
}

SteadySolveReport BgkSolver::run_to_steady(const std::optional<MacroField>& init_field,
                                           const std::optional<PrimitiveState>& init_uniform) {
  const auto t_start = std::chrono::steady_clock::now();
  if (init_field)
    initialize_from_macro(*init_field);
  else if (init_uniform)
    initialize_uniform(*init_uniform);
  else
    throw InputError("run_to_steady: no initialization given");

  SteadySolveReport report;
  dt = config.dt_init > 0.0 ? config.dt_init : dt0;
  iteration = 0;

  for (int it = 1; it <= config.max_outer; ++it) {
    double res = 0.0;
    int retries = 0;
    for (;;) {
      try {
        res = advance();
        break;
      } catch (const NumericalError&) {
        if (++retries > 8) throw;
        dt = std::max(0.25 * dt, 1e-6 * dt0); // back off and retry the step
      }
    }
    report.residual_history.push_back(res);
    report.dt_history.push_back(dt);
    double smin = std::numeric_limits<double>::infinity(), smax = -smin;
    bool any_wall = false;
    for (int s = 0; s < 4; ++s)
      for (double sg : sigma_[s]) {
        smin = std::min(smin, sg);
        smax = std::max(smax, sg);
        any_wall = true;
      }
    report.sigma_history.emplace_back(any_wall ? smin : 0.0, any_wall ? smax : 0.0);
    report.negative_f_history.push_back(negative_f_count);
    report.outer_iterations = it;
    if (res <= config.steady_tol) {
      report.converged = true;
      break;
    }
  }

  fill_ghosts(); // fresh sigma for the flux extraction
  report.wall_flux = wall_heat_flux();
  report.wall_param_name = mesh.wall_param_name;
  report.final_field = extract_macro_field();

  // diagnostic: last 10% of the history non-increasing within noise
  const auto& h = report.residual_history;
  if (h.size() >= 10) {
    const std::size_t tail = h.size() - h.size() / 10;
    for (std::size_t k = tail; k < h.size(); ++k)
      if (h[k] > 1.5 * h[k - 1]) {
        report.tail_monotone = false;
        break;
      }
  }
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return report;
}

std::vector<WallFluxSample> BgkSolver::wall_heat_flux() const {
  std::vector<WallFluxSample> out;
  bool any = false;
  for (int s = 0; s < 4; ++s) {
    if (!std::get_if<DiffuseWall>(&bcs[s])) continue;
    any = true;
    const int count = (s < 2) ? nj : ni;
    for (int b = 0; b < count; ++b) {
      int ci, cj, n0i, n0j, n1i, n1j;
      double nx, ny;
      if (s == side_imin) {
        ci = 0; cj = b; nx = mesh.inx[mesh.iface(0, b)]; ny = mesh.iny[mesh.iface(0, b)];
        n0i = 0; n0j = b; n1i = 0; n1j = b + 1;
      } else if (s == side_imax) {
        ci = ni - 1; cj = b; nx = -mesh.inx[mesh.iface(ni, b)]; ny = -mesh.iny[mesh.iface(ni, b)];
        n0i = ni; n0j = b; n1i = ni; n1j = b + 1;
      } else if (s == side_jmin) {
        ci = b; cj = 0; nx = mesh.jnx[mesh.jface(b, 0)]; ny = mesh.jny[mesh.jface(b, 0)];
        n0i = b; n0j = 0; n1i = b + 1; n1j = 0;
      } else {
        ci = b; cj = nj - 1; nx = -mesh.jnx[mesh.jface(b, nj)]; ny = -mesh.jny[mesh.jface(b, nj)];
        n0i = b; n0j = nj; n1i = b + 1; n1j = nj;
      }
      const double len = std::hypot(nx, ny);
      const double* fc = &state.f[state.idx(ci, cj, 0)];
      const double* gc = &state.g[state.idx(ci, cj, 0)];
      const double sg = sigma_[s][b];
      // net energy flux into the wall: n_out = -n_gas, upwind face values
      double qn = 0.0;
      for (long q = 0; q < nq; ++q) {
        const double vn = grid.points[q][0] * nx + grid.points[q][1] * ny; // v . n_gas
        const double v2 = grid.points[q][0] * grid.points[q][0] + grid.points[q][1] * grid.points[q][1];
        const double fbar = vn > 0.0 ? sg * wall_f_[s][q] : fc[q];
        const double gbar = vn > 0.0 ? sg * wall_g_[s][q] : gc[q];
        qn -= (0.5 * v2 * fbar + gbar) * vn * grid.weights[q];
      }
      WallFluxSample w;
      w.q_n = qn / len;
      w.x = 0.5 * (mesh.xn[mesh.node(n0i, n0j)] + mesh.xn[mesh.node(n1i, n1j)]);
      w.y = 0.5 * (mesh.yn[mesh.node(n0i, n0j)] + mesh.yn[mesh.node(n1i, n1j)]);
      if ((s == side_imin || s == side_imax) && static_cast<std::size_t>(b) < mesh.wall_param.size())
        w.param = mesh.wall_param[b];
      else
        w.param = b;
      out.push_back(w);
    }
  }
  if (!any) throw InputError("wall_heat_flux: no diffuse-wall boundary present");
  return out;
}

MacroField BgkSolver::extract_macro_field() const {
  MacroField field;
  field.ni = ni;
  field.nj = nj;
  field.vel_dim = 2;
  field.cells.resize(static_cast<std::size_t>(ni) * nj);
  field.centroids.resize(field.cells.size());
  for (int i = 0; i < ni; ++i)
    for (int j = 0; j < nj; ++j) {
      const double* fp = &state.f[state.idx(i, j, 0)];
      const double* gp = &state.g[state.idx(i, j, 0)];
      const ConservedState U =
          moments(std::span(fp, static_cast<std::size_t>(nq)),
                  std::span(gp, static_cast<std::size_t>(nq)), grid.quadrature());
      field.cells[field.index(i, j)] = primitive_from_conserved(U, gas);
      field.centroids[field.index(i, j)] = mesh.cell_center(i, j);
    }
  return field;
}

} // namespace rarevel
