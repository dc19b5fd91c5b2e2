#pragma once

#include <optional>
#include <variant>

#include "rarevel/equilibrium.hpp"
#include "rarevel/macro_field.hpp"
#include "rarevel/space_mesh.hpp"

namespace rarevel {

struct DiffuseWall {
  double T_w = 0.0;
};
struct Inflow {
  PrimitiveState state;
};
struct Outflow {};
struct SymmetryPlane {
  int axis = 1;
};
using BoundaryCondition = std::variant<DiffuseWall, Inflow, Outflow, SymmetryPlane>;

/// Mesh sides in index order imin, imax, jmin, jmax.
enum Side : int { side_imin = 0, side_imax = 1, side_jmin = 2, side_jmax = 3 };

struct SolverConfig {
  double dt_init = 0.0;        ///< seconds; 0 picks CFL ~ 1 on the finest cell
  double dt_growth = 1.05;     ///< per-iteration growth factor
  double dt_max_factor = 1e6;  ///< cap = factor * initial dt
  int inner_sweeps = 3;        ///< P
  double steady_tol = 1e-8;
  int max_outer = 2000;
  bool limiter_enabled = true;            ///< second-order RHS fluxes
  bool second_order_half_factor = false;  ///< 1/2 on the limiter term
  double eq_tol = 1e-10;
  int eq_max_iter = 60;
  int sweep_axis = 0; ///< tridiagonal lines along i (0) or j (1)

  void validate() const {
    if (!(dt_init >= 0.0) || !(dt_growth >= 1.0) || !(dt_max_factor >= 1.0))
      throw InputError("solver config: bad dt policy");
    if (inner_sweeps < 1) throw InputError("solver config: inner_sweeps must be >= 1");
    if (!(steady_tol > 0.0) || max_outer < 1 || !(eq_tol > 0.0) || eq_max_iter < 1)
      throw InputError("solver config: bad tolerances");
    if (sweep_axis != 0 && sweep_axis != 1) throw InputError("solver config: sweep_axis must be 0 or 1");
  }
};

/// Interior cells plus two ghost layers per side; q fastest.
struct DistributionField {
  int ni = 0, nj = 0;
  long nq = 0;
  std::vector<double> f, g;

  void resize(int ni_, int nj_, long nq_) {
    ni = ni_;
    nj = nj_;
    nq = nq_;
    const std::size_t n = static_cast<std::size_t>(ni + 4) * (nj + 4) * nq;
    f.assign(n, 0.0);
    g.assign(n, 0.0);
  }
  /// i in [-2, ni+1], j in [-2, nj+1]
  std::size_t idx(int i, int j, long q) const {
    return (static_cast<std::size_t>(i + 2) * (nj + 4) + (j + 2)) * nq + q;
  }
};

struct WallFluxSample {
  double x = 0.0, y = 0.0;
  double param = 0.0; ///< theta in degrees (annulus) or arc position
  double q_n = 0.0;   ///< W/m^2, positive into the wall
};

struct SteadySolveReport {
  MacroField final_field;
  std::vector<double> residual_history;
  std::vector<double> dt_history;
  int outer_iterations = 0;
  bool converged = false;
  std::vector<WallFluxSample> wall_flux;
  std::string wall_param_name = "s_m";
  std::vector<std::pair<double, double>> sigma_history; ///< min/max per iteration
  std::vector<long> negative_f_history;                 ///< counted, never fatal
  bool tail_monotone = true; ///< last 10% of the history non-increasing within noise
  double wall_seconds = 0.0;
};

/// Steady-state discrete-velocity BGK solver on a 2D structured mesh:
/// ghost-cell boundary conditions, minmod-limited second-order upwind
/// transport, linearized implicit stepping and Jacobi/line-Gauss-Seidel
/// inner solves. The per-phase members are exposed so tests can drive the
/// phases individually and assemble dense oracles from the same data.
class BgkSolver {
public:
  BgkSolver(const SpaceMesh2D& mesh, const AmrVelocityGrid& grid, const GasModel& gas,
            std::array<BoundaryCondition, 4> bcs, SolverConfig config);

  void initialize_uniform(const PrimitiveState& state);
  void initialize_from_macro(const MacroField& field);

  /// Populates both ghost layers on all four sides from the boundary
  /// conditions; diffuse walls compute the re-emission density sigma that
  /// cancels the discrete wall mass flux.
  void fill_ghosts();

  /// U^n, tau^n, discrete equilibrium and Jacobian data per cell, then
  /// RHS = -div(v f) + (M - f)/tau (and the g analogue). Returns the scaled
  /// residual norm of the RHS.
  double assemble_rhs();

  /// P Jacobi passes over velocity points; each pass does one forward and
  /// one backward line-Gauss-Seidel sweep with exact tridiagonal inversion
  /// along the sweep axis, then refreshes the moments of dF.
  void jgs_solve();

  /// One outer iteration; returns the pre-update residual.
  double advance();

  SteadySolveReport run_to_steady(const std::optional<MacroField>& init_field,
                                  const std::optional<PrimitiveState>& init_uniform);

  std::vector<WallFluxSample> wall_heat_flux() const;

  MacroField extract_macro_field() const;

  // --- data (public: tests drive phases and build oracles from these) ---
  const SpaceMesh2D& mesh;
  const AmrVelocityGrid& grid;
  GasModel gas;
  std::array<BoundaryCondition, 4> bcs;
  SolverConfig config;

  int ni = 0, nj = 0;
  long nq = 0;
  int D = 0;

  DistributionField state;
  std::vector<double> rhsf, rhsg; ///< ni*nj*nq, q fastest
  std::vector<double> df, dg;     ///< ghost layout, ghosts always zero

  // per-cell equilibrium data refreshed by assemble_rhs
  std::vector<MomentVec> alpha_;
  std::vector<std::array<double, 25>> a_inv_;
  std::vector<double> tau_;
  std::vector<MomentVec> u_;
  std::vector<double> mq_, nq_eq_, df_diag_, dg_diag_; ///< ncells*nq
  bool have_alpha_ = false;

  // wall data per side
  std::array<std::vector<double>, 4> wall_f_, wall_g_; ///< wall equilibrium per point
  std::array<std::vector<double>, 4> wall_den_;        ///< per-face outgoing flux
  std::array<std::vector<double>, 4> sigma_;           ///< per-face, last fill_ghosts
  std::array<std::vector<double>, 4> inflow_f_, inflow_g_;

  double dt = 0.0;
  double dt0 = 0.0;
  long iteration = 0;
  long negative_f_count = 0; ///< last update

  std::size_t ridx(int i, int j, long q) const {
    return (static_cast<std::size_t>(i) * nj + j) * nq + q;
  }
  std::size_t cidx(int i, int j) const { return static_cast<std::size_t>(i) * nj + j; }

  /// Scaled residual-norm weights (reference-state based).
  double f_scale = 1.0, g_scale = 1.0;

private:
  void setup_reference_scales();
  void setup_boundary_data();
  double compute_dt0() const;
  void apply_update(); ///< f += df, g += dg with NaN guard and negativity count

  // scratch
  std::vector<MomentVec> du_, w_;
  std::vector<double> df_prev_, dg_prev_;
};

/// Standalone transport divergence (v_q . grad f)_ij per cell and point;
/// order 1 drops the limiter. Ghosts must be filled.
void transport_divergence(const DistributionField& field, const SpaceMesh2D& mesh,
                          const AmrVelocityGrid& grid, int order, bool half_factor,
                          std::vector<double>& divf, std::vector<double>& divg);

/// Three-argument minmod: 0 on any sign change, else the smallest magnitude.
inline double minmod3(double a, double b, double c) {
  if (a > 0.0 && b > 0.0 && c > 0.0) return std::min(a, std::min(b, c));
  if (a < 0.0 && b < 0.0 && c < 0.0) return std::max(a, std::max(b, c));
  return 0.0;
}

} // namespace rarevel
