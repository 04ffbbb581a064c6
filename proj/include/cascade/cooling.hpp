#ifndef CASCADE_COOLING_HPP
#define CASCADE_COOLING_HPP

#include <optional>
#include <span>
#include <vector>

#include "cascade/bloch.hpp"
#include "cascade/rates.hpp"
#include "cascade/species.hpp"

namespace cascade {

// d/dp of the beam-pair rates at p = 0, by Richardson-extrapolated central
// differences with step verification (the Fano feature can be far narrower
// than gamma1, so a fixed step would silently alias it).
struct RateDerivatives {
  double dr1_dp = 0;  // 1/(s kg m/s)
  double dr2_dp = 0;
  double err1 = 0;  // |difference| of the last two refinement levels
  double err2 = 0;
};

RateDerivatives rate_derivatives_at_zero(const Species& species, const LaserConfig& lasers);

enum class RateChannel { r1, r2 };
double rate_derivative_at_zero(const Species& species, const LaserConfig& lasers,
                               RateChannel which);

// alpha = -2 hbar k1 R1'(0) - 2 hbar (k1+k2) R2'(0); positive damps.
double cooling_rate(const Species& species, const LaserConfig& lasers);

// H = R1(0)(1+chi1) hbar^2 k1^2/M + 2 R2(0)[(1+chi1) hbar^2 k1^2/M
//     + (1+chi2) hbar^2 k2^2/M], in watts.
double heating_rate(const Species& species, const LaserConfig& lasers,
                    const EmissionGeometry& geometry);

enum class Regime { cooling, heating, neutral };

struct CaptureRange {
  double dv = 0;             // m/s, half-width of the damping interval
  bool at_grid_edge = false; // no boundary found inside the scanned range
};

struct CoolingReport {
  double alpha = 0;              // 1/s
  double alpha_uncertainty = 0;  // propagated derivative error estimate
  double heating = 0;            // W
  std::optional<double> temperature;  // K; present iff regime == cooling
  Regime regime = Regime::neutral;
  std::optional<CaptureRange> capture;
  bool saturation_warning = false;  // rho11(v=0) > 0.1
};

// Full report: T = H/(kB alpha) when cooling. regime is `neutral` when
// |alpha| does not exceed its propagated error estimate. capture is computed
// on the default velocity grid when requested and the regime cools.
CoolingReport cooling_report(const Species& species, const LaserConfig& lasers,
                             const EmissionGeometry& geometry, bool with_capture = true);

// Smallest |v| > 0 where the damping condition v F(v) < 0 fails or |F|
// falls back below 10% of its scanned maximum, whichever comes first;
// grid walk then bisection to 1e-3 relative. vmax <= 0 selects the default
// grid half-width.
CaptureRange capture_range(const Species& species, const LaserConfig& lasers,
                           double vmax = 0, int points = 401);

// Closed-form solution of d<E>/dt = -2 alpha <E> + H.
double evolve_energy_linear(const CoolingReport& report, double energy0, double time);

struct EnergySample {
  double t = 0;  // s
  double energy = 0;  // J
};

// Integrates the full energy-evolution equation under a zero-mean Gaussian
// momentum ansatz with variance 2 M <E>; Gauss-Hermite quadrature (order 40,
// doubled once on validation failure) and adaptive explicit stepping at
// relative tolerance 1e-8.
std::vector<EnergySample> evolve_energy_full(const Species& species, const LaserConfig& lasers,
                                             const EmissionGeometry& geometry, double energy0,
                                             std::span<const double> time_grid,
                                             int quadrature_order = 40);

// Gauss-Hermite nodes/weights for weight exp(-x^2) (Golub-Welsch).
void gauss_hermite(int order, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace cascade

#endif
