#ifndef CASCADE_BLOCH_HPP
#define CASCADE_BLOCH_HPP

#include <Eigen/Dense>
#include <array>
#include <complex>

#include "cascade/species.hpp"

namespace cascade {

// Two-laser drive of the cascade. delta1 = omega_laser1 - omega_01,
// delta2 = omega_laser2 - omega_12; delta1 + delta2 detunes the two-photon
// transition. All angular frequencies, rad/s. Phases are fixed real: no
// observable in scope depends on them.
struct LaserConfig {
  double omega1 = 0;  // Rabi frequency of the lower transition, >= 0
  double omega2 = 0;  // Rabi frequency of the upper transition, >= 0
  double delta1 = 0;
  double delta2 = 0;

  void validate() const;
};

using DensityMatrix = Eigen::Matrix3cd;
using Liouvillian = Eigen::Matrix<std::complex<double>, 9, 9>;

// Generator of the driven, damped cascade acting on vec(rho)
// (column-major stacking), in natural units (frequencies divided by gamma1).
struct Generator {
  Liouvillian matrix;
  Species species;
  LaserConfig lasers;
  double velocity = 0;  // m/s
};

// Rotating-frame generator for the +x-propagating beam pair at atomic
// velocity v: couplings omega_i/2, level shifts -delta1' on |1> and
// -(delta1'+delta2') on |2> with delta_i' = delta_i - k_i v, decays
// gamma1: |1>->|0> and gamma2: |2>->|1> in Lindblad form.
Generator build_generator(const Species& species, const LaserConfig& lasers, double velocity);

struct SteadyState {
  DensityMatrix rho;
  bool saturated = false;  // rho_11 > 0.1: outside the perturbative rate picture
};

// Unique steady state of the generator, solved by replacing one redundant
// row of the singular system with the trace constraint. The result is
// Hermitian, unit trace, with |L vec(rho)| residual <= 1e-10 in natural
// units; throws solver_error (with a condition estimate) otherwise.
SteadyState steady_state(const Generator& gen);

// Real diagonal (p0, p1, p2); sums to 1 within 1e-10 for a valid state.
std::array<double, 3> populations(const DensityMatrix& rho);

// Apply the generator to a (not necessarily steady) density matrix.
DensityMatrix apply_generator(const Generator& gen, const DensityMatrix& rho);

}  // namespace cascade

#endif
