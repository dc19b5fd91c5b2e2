#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "rarevel/errors.hpp"

namespace rarevel {

/// Fixed-capacity velocity vector; the active dimension is carried by
/// whatever grid or gas model the vector belongs to. Unused components
/// stay zero so dot products over the full capacity remain valid.
using Vec3 = std::array<double, 3>;

/// Moment-space vector (1, v, |v|^2/2): D = d_v + 2 <= 5 active entries.
using MomentVec = std::array<double, 5>;

inline double dot(const Vec3& a, const Vec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

inline double norm2(const Vec3& a) { return dot(a, a); }

/// Gas description: SI units throughout.
struct GasModel {
  double R = 0.0;         ///< gas constant, J/(kg K)
  double mu_ref = 0.0;    ///< reference viscosity, Pa s
  double T_ref = 0.0;     ///< reference temperature, K
  double omega_visc = 0.0;///< viscosity exponent
  int delta = 0;          ///< internal degrees of freedom (0 monoatomic, 2 diatomic)
  int d_v = 3;            ///< velocity-space dimension of the solver grid, 2 or 3

  /// Internal degrees seen by the reduced model: the eliminated velocity
  /// dimensions are folded into the internal-energy distribution, so that
  /// d_v + delta_eff == 3 + delta always holds.
  int delta_eff() const { return delta + (3 - d_v); }

  /// Moment-space dimension D = d_v + 2.
  int moment_dim() const { return d_v + 2; }

  void validate() const {
    if (!(R > 0.0)) throw DomainError("gas model: R must be positive");
    if (!(mu_ref > 0.0)) throw DomainError("gas model: mu_ref must be positive");
    if (!(T_ref > 0.0)) throw DomainError("gas model: T_ref must be positive");
    if (!(omega_visc >= 0.5 && omega_visc <= 1.5))
      throw DomainError("gas model: omega_visc outside [0.5, 1.5]");
    if (delta < 0) throw DomainError("gas model: delta must be non-negative");
    if (d_v != 2 && d_v != 3) throw DomainError("gas model: d_v must be 2 or 3");
  }
};

struct PrimitiveState {
  double rho = 0.0; ///< kg/m^3
  Vec3 u{};         ///< m/s, d_v active components
  double T = 0.0;   ///< K

  void validate() const {
    if (!(rho > 0.0)) throw DomainError("primitive state: rho must be positive");
    if (!(T > 0.0)) throw DomainError("primitive state: T must be positive");
  }
};

struct ConservedState {
  double rho = 0.0;  ///< kg/m^3
  Vec3 momentum{};   ///< kg/(m^2 s)
  double E = 0.0;    ///< J/m^3

  double internal_energy() const { return E - 0.5 * norm2(momentum) / rho; }

  void validate() const {
    if (!(rho > 0.0)) throw DomainError("conserved state: rho must be positive");
    if (!(internal_energy() > 0.0))
      throw DomainError("conserved state: non-positive internal energy");
  }
};

/// Collisional invariants m(v) = (1, v, |v|^2/2) on the active dimension.
inline MomentVec moment_vector(const Vec3& v, int d_v) {
  MomentVec m{};
  m[0] = 1.0;
  double v2 = 0.0;
  for (int a = 0; a < d_v; ++a) {
    m[1 + a] = v[a];
    v2 += v[a] * v[a];
  }
  m[1 + d_v] = 0.5 * v2;
  return m;
}

inline PrimitiveState primitive_from_conserved(const ConservedState& U, const GasModel& gas) {
  U.validate();
  PrimitiveState p;
  p.rho = U.rho;
  double ke = 0.0;
  for (int a = 0; a < gas.d_v; ++a) {
    p.u[a] = U.momentum[a] / U.rho;
    ke += p.u[a] * p.u[a];
  }
  ke *= 0.5 * U.rho;
  const double e_int = U.E - ke;
  if (!(e_int > 0.0)) throw DomainError("primitive_from_conserved: non-positive internal energy");
  p.T = e_int / (0.5 * (3.0 + gas.delta) * U.rho * gas.R);
  return p;
}

inline ConservedState conserved_from_primitive(const PrimitiveState& p, const GasModel& gas) {
  p.validate();
  ConservedState U;
  U.rho = p.rho;
  double ke = 0.0;
  for (int a = 0; a < gas.d_v; ++a) {
    U.momentum[a] = p.rho * p.u[a];
    ke += p.u[a] * p.u[a];
  }
  U.E = 0.5 * p.rho * ke + 0.5 * (3.0 + gas.delta) * p.rho * gas.R * p.T;
  return U;
}

/// Reduced Maxwellian on the d_v-dimensional grid:
/// rho (2 pi R T)^(-d_v/2) exp(-|v-u|^2 / (2 R T)).
inline double maxwellian_value(const PrimitiveState& p, const Vec3& v, const GasModel& gas) {
  const double rt = gas.R * p.T;
  double d2 = 0.0;
  for (int a = 0; a < gas.d_v; ++a) {
    const double dv = v[a] - p.u[a];
    d2 += dv * dv;
  }
  return p.rho * std::pow(2.0 * M_PI * rt, -0.5 * gas.d_v) * std::exp(-d2 / (2.0 * rt));
}

/// tau = mu(T) / (rho R T) with the power-law viscosity.
inline double relaxation_time(const PrimitiveState& p, const GasModel& gas) {
  const double mu = gas.mu_ref * std::pow(p.T / gas.T_ref, gas.omega_visc);
  return mu / (p.rho * gas.R * p.T);
}

/// Interface every quadrature-backed velocity grid exposes to the moment
/// machinery: flat arrays of points and weights plus the active dimension.
struct QuadratureView {
  std::span<const Vec3> points;
  std::span<const double> weights;
  int dim = 0;
};

/// Discrete moments of a reduced pair (f, g). Summation runs in ascending
/// point-index order so repeated calls are bit-identical.
ConservedState moments(std::span<const double> f, std::span<const double> g,
                       const QuadratureView& grid);

} // namespace rarevel
