#include "rarevel/equilibrium.hpp"

#include <cmath>

namespace rarevel {

MomentVec initial_alpha(const PrimitiveState& p, const GasModel& gas) {
  p.validate();
  const double rt = gas.R * p.T;
  MomentVec a{};
  double u2 = 0.0;
  for (int k = 0; k < gas.d_v; ++k) u2 += p.u[k] * p.u[k];
  a[0] = std::log(p.rho) - 0.5 * gas.d_v * std::log(2.0 * M_PI * rt) - u2 / (2.0 * rt);
  for (int k = 0; k < gas.d_v; ++k) a[1 + k] = p.u[k] / rt;
  a[1 + gas.d_v] = -1.0 / rt;
  return a;
}

DenseLU DenseLU::factor(const double* a, int n) {
  DenseLU f;
  f.n = n;
  for (int i = 0; i < n * n; ++i) f.lu[i] = a[i];
  double pmax = 0.0, pmin = std::numeric_limits<double>::infinity();
  for (int col = 0; col < n; ++col) {
    int p = col;
    double best = std::abs(f.lu[col * n + col]);
    for (int r = col + 1; r < n; ++r) {
      const double v = std::abs(f.lu[r * n + col]);
      if (v > best) {
        best = v;
        p = r;
      }
    }
    f.piv[col] = p;
    if (p != col)
      for (int c = 0; c < n; ++c) std::swap(f.lu[col * n + c], f.lu[p * n + c]);
    const double d = f.lu[col * n + col];
    pmax = std::max(pmax, std::abs(d));
    pmin = std::min(pmin, std::abs(d));
    if (!(std::abs(d) > 0.0) || !std::isfinite(d))
      throw GridInadequacyError("singular moment matrix: velocity grid cannot represent state");
    for (int r = col + 1; r < n; ++r) {
      const double l = f.lu[r * n + col] / d;
      f.lu[r * n + col] = l;
      for (int c = col + 1; c < n; ++c) f.lu[r * n + c] -= l * f.lu[col * n + c];
    }
  }
  if (pmin < 1e-14 * pmax)
    throw GridInadequacyError("ill-conditioned moment matrix: velocity grid too coarse or too "
                              "narrow for this state");
  return f;
}

void DenseLU::solve(const double* b, double* x) const {
  double y[5];
  for (int i = 0; i < n; ++i) y[i] = b[i];
  for (int col = 0; col < n; ++col)
    if (piv[col] != col) std::swap(y[col], y[piv[col]]);
  for (int r = 1; r < n; ++r)
    for (int c = 0; c < r; ++c) y[r] -= lu[r * n + c] * y[c];
  for (int r = n - 1; r >= 0; --r) {
    for (int c = r + 1; c < n; ++c) y[r] -= lu[r * n + c] * y[c];
    y[r] /= lu[r * n + r];
  }
  for (int i = 0; i < n; ++i) x[i] = y[i];
}

void DenseLU::invert(double* a_inv) const {
  double e[5], col[5];
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) e[i] = (i == j) ? 1.0 : 0.0;
    solve(e, col);
    for (int i = 0; i < n; ++i) a_inv[i * n + j] = col[i];
  }
}

namespace {

// Evaluates (M, N) and the moment residual G = moments - U. Returns the
// scaled max-norm of G.
double eval_residual(const MomentVec& alpha, const QuadratureView& grid, int D, double half_deff,
                     const MomentVec& u_vec, const MomentVec& scale, std::vector<double>& M,
                     std::vector<double>& N, MomentVec& G) {
  const std::size_t nq = grid.points.size();
  const double nfac = half_deff > 0.0 ? half_deff / (-alpha[D - 1]) : 0.0;
  G = MomentVec{};
  for (std::size_t q = 0; q < nq; ++q) {
    const MomentVec m = moment_vector(grid.points[q], D - 2);
    double e = 0.0;
    for (int k = 0; k < D; ++k) e += alpha[k] * m[k];
    const double Mq = std::exp(e);
    const double Nq = nfac * Mq;
    M[q] = Mq;
    N[q] = Nq;
    const double w = grid.weights[q];
    for (int k = 0; k < D; ++k) G[k] += m[k] * Mq * w;
    G[D - 1] += Nq * w;
  }
  for (int k = 0; k < D; ++k) G[k] -= u_vec[k];
  double res = 0.0;
  for (int k = 0; k < D; ++k) res = std::max(res, std::abs(G[k]) / scale[k]);
  return res;
}

void assemble_moment_matrix(const MomentVec& alpha, const QuadratureView& grid, int D,
                            const std::vector<double>& M, const std::vector<double>& N,
                            double* A) {
  const std::size_t nq = grid.points.size();
  const double aE = alpha[D - 1];
  for (int i = 0; i < D * D; ++i) A[i] = 0.0;
  for (std::size_t q = 0; q < nq; ++q) {
    const MomentVec m = moment_vector(grid.points[q], D - 2);
    const double mw = M[q] * grid.weights[q];
    for (int i = 0; i < D; ++i)
      for (int j = 0; j < D; ++j) A[i * D + j] += m[i] * m[j] * mw;
    const double nw = N[q] * grid.weights[q];
    if (nw != 0.0) {
      for (int j = 0; j < D; ++j) A[(D - 1) * D + j] += m[j] * nw;
      A[(D - 1) * D + (D - 1)] -= nw / aE;
    }
  }
}

} // namespace

DiscreteEquilibrium solve_discrete_equilibrium(const ConservedState& U, const QuadratureView& grid,
                                               const GasModel& gas, double tol, int max_iter,
                                               const MomentVec* warm_start) {
  U.validate();
  const int D = gas.moment_dim();
  if (grid.points.size() < static_cast<std::size_t>(D))
    throw GridInadequacyError("equilibrium: fewer quadrature points than moments");
  if (grid.dim != gas.d_v) throw InputError("equilibrium: grid/gas dimension mismatch");

  const PrimitiveState p = primitive_from_conserved(U, gas);
  const double vref = std::max(std::sqrt(norm2(p.u)), std::sqrt(gas.R * p.T));
  MomentVec u_vec{}, scale{};
  u_vec[0] = U.rho;
  for (int k = 0; k < gas.d_v; ++k) u_vec[1 + k] = U.momentum[k];
  u_vec[D - 1] = U.E;
  scale[0] = U.rho;
  for (int k = 0; k < gas.d_v; ++k) scale[1 + k] = U.rho * vref;
  scale[D - 1] = U.E;

  const double half_deff = 0.5 * gas.delta_eff();
  DiscreteEquilibrium eq;
  eq.alpha = warm_start ? *warm_start : initial_alpha(p, gas);
  eq.M.resize(grid.points.size());
  eq.N.resize(grid.points.size());

  std::vector<double> Mc(grid.points.size()), Nc(grid.points.size());
  MomentVec G{}, Gc{};
  double res = eval_residual(eq.alpha, grid, D, half_deff, u_vec, scale, eq.M, eq.N, G);

  std::array<double, 25> A{};
  for (int it = 0; it < max_iter; ++it) {
    if (res <= tol) {
      eq.residual_norm = res;
      eq.newton_iterations = it;
      return eq;
    }
    assemble_moment_matrix(eq.alpha, grid, D, eq.M, eq.N, A.data());
    const DenseLU lu = DenseLU::factor(A.data(), D);
    MomentVec rhs{}, step{};
    for (int k = 0; k < D; ++k) rhs[k] = -G[k];
    lu.solve(rhs.data(), step.data());

    // Damped update: keep alpha_E negative, back off while the residual
    // grows, at most 8 halvings before the step is taken anyway.
    double lambda = 1.0;
    MomentVec cand{};
    double res_c = 0.0;
    bool accepted = false;
    for (int h = 0; h <= 8 && !accepted; ++h) {
      for (int k = 0; k < D; ++k) cand[k] = eq.alpha[k] + lambda * step[k];
      if (cand[D - 1] < 0.0) {
        res_c = eval_residual(cand, grid, D, half_deff, u_vec, scale, Mc, Nc, Gc);
        if (res_c < res || (h == 8 && std::isfinite(res_c))) accepted = true;
      }
      if (!accepted) lambda *= 0.5;
    }
    while (!accepted) { // keep shrinking until alpha_E < 0 and the values are finite
      for (int k = 0; k < D; ++k) cand[k] = eq.alpha[k] + lambda * step[k];
      if (cand[D - 1] < 0.0) {
        res_c = eval_residual(cand, grid, D, half_deff, u_vec, scale, Mc, Nc, Gc);
        if (std::isfinite(res_c)) accepted = true;
      }
      if (!accepted) {
        lambda *= 0.5;
        if (lambda < 1e-30)
          throw GridInadequacyError("equilibrium Newton cannot find an admissible step");
      }
    }
    eq.alpha = cand;
    eq.M.swap(Mc);
    eq.N.swap(Nc);
    G = Gc;
    res = res_c;
  }
  if (res <= tol) {
    eq.residual_norm = res;
    eq.newton_iterations = max_iter;
    return eq;
  }
  throw ConvergenceError("equilibrium Newton did not converge in " + std::to_string(max_iter) +
                             " iterations",
                         res);
}

void EquilibriumOperator::diagonals(const QuadratureView& grid, const std::vector<double>& M,
                                    const std::vector<double>& N, std::vector<double>& Df,
                                    std::vector<double>& Dg) const {
  const std::size_t nq = grid.points.size();
  Df.resize(nq);
  Dg.resize(nq);
  // column A^-1 e_E, shared by every D^g_q
  double eE[5] = {0, 0, 0, 0, 0}, col[5];
  eE[D - 1] = 1.0;
  lu.solve(eE, col);
  double x[5];
  for (std::size_t q = 0; q < nq; ++q) {
    const MomentVec m = moment_vector(grid.points[q], D - 2);
    lu.solve(m.data(), x);
    double s = 0.0;
    for (int k = 0; k < D; ++k) s += m[k] * x[k];
    Df[q] = M[q] * s * grid.weights[q];
    if (delta_eff > 0.0) {
      double t = 0.0;
      for (int k = 0; k < D; ++k) t += m[k] * col[k];
      t -= col[D - 1] / alpha_E;
      Dg[q] = N[q] * t * grid.weights[q];
    } else {
      Dg[q] = 0.0;
    }
  }
}

EquilibriumOperator make_equilibrium_operator(const DiscreteEquilibrium& eq,
                                              const QuadratureView& grid, const GasModel& gas) {
  EquilibriumOperator op;
  op.D = gas.moment_dim();
  op.d_v = gas.d_v;
  op.alpha_E = eq.alpha[op.D - 1];
  op.delta_eff = gas.delta_eff();
  assemble_moment_matrix(eq.alpha, grid, op.D, eq.M, eq.N, op.A.data());
  op.lu = DenseLU::factor(op.A.data(), op.D);
  return op;
}

} // namespace rarevel
