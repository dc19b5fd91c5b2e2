#pragma once

#include <vector>

#include "rarevel/amr_grid.hpp"

namespace rarevel {

/// Discrete conservative equilibrium pair (M_q, N_q) = (exp(alpha.m(v_q)),
/// (delta_eff/2)(1/-alpha_E) exp(alpha.m(v_q))) whose discrete moments match
/// the prescribed state exactly (to the Newton tolerance).
struct DiscreteEquilibrium {
  MomentVec alpha{};         ///< entropic variable, D = d_v + 2 components
  std::vector<double> M, N;  ///< per-point values
  double residual_norm = 0.0;
  int newton_iterations = 0;
};

/// Exact continuous-Maxwellian exponent, the Newton warm start:
/// alpha = (ln(rho/(2 pi R T)^{d_v/2}) - |u|^2/(2RT), u/RT, -1/RT).
MomentVec initial_alpha(const PrimitiveState& p, const GasModel& gas);

/// Newton iteration on G(alpha) = moments(M(alpha), N(alpha)) - U with the
/// exact Jacobian, damped by step halving whenever alpha_E would leave the
/// integrable half-space or the residual grows.
DiscreteEquilibrium solve_discrete_equilibrium(const ConservedState& U, const QuadratureView& grid,
                                               const GasModel& gas, double tol = 1e-10,
                                               int max_iter = 50,
                                               const MomentVec* warm_start = nullptr);

/// Dense D x D LU with partial pivoting (D <= 5). Throws
/// GridInadequacyError when the matrix is singular or severely
/// ill-conditioned, which signals a velocity grid that cannot represent
/// the state.
struct DenseLU {
  int n = 0;
  std::array<double, 25> lu{};
  std::array<int, 5> piv{};

  static DenseLU factor(const double* a, int n);
  void solve(const double* b, double* x) const;
  void invert(double* a_inv) const;
};

/// Derivatives of the discrete equilibrium with respect to the conserved
/// state: dU M_q = M_q m(v_q) A^-1, dU N_q = N_q (m(v_q) - e_E/alpha_E) A^-1
/// with A(U) the moment matrix of the linearization. Also yields the scalar
/// diagonals D^f_q, D^g_q used by the implicit relaxation operator.
struct EquilibriumOperator {
  int D = 0;
  int d_v = 0;
  double alpha_E = 0.0;
  double delta_eff = 0.0;
  std::array<double, 25> A{};
  DenseLU lu;

  /// w = A^-1 dU
  MomentVec apply_inverse(const MomentVec& dU) const {
    MomentVec w{};
    lu.solve(dU.data(), w.data());
    return w;
  }
  /// dU M_q (dU) given w = A^-1 dU.
  double dM(double Mq, const MomentVec& mq, const MomentVec& w) const {
    double s = 0.0;
    for (int k = 0; k < D; ++k) s += mq[k] * w[k];
    return Mq * s;
  }
  /// dU N_q (dU) given w = A^-1 dU.
  double dN(double Nq, const MomentVec& mq, const MomentVec& w) const {
    double s = 0.0;
    for (int k = 0; k < D; ++k) s += mq[k] * w[k];
    s -= w[D - 1] / alpha_E;
    return Nq * s;
  }
  /// D^f_q = M_q m_q A^-1 m_q^T w_q and D^g_q = N_q (m_q - e_E/alpha_E) A^-1 e_E^T w_q.
  void diagonals(const QuadratureView& grid, const std::vector<double>& M,
                 const std::vector<double>& N, std::vector<double>& Df,
                 std::vector<double>& Dg) const;
};

EquilibriumOperator make_equilibrium_operator(const DiscreteEquilibrium& eq,
                                              const QuadratureView& grid, const GasModel& gas);

} // namespace rarevel
