#ifndef CASCADE_RATES_HPP
#define CASCADE_RATES_HPP

#include <iosfwd>
#include <span>
#include <vector>

#include "cascade/bloch.hpp"
#include "cascade/species.hpp"

namespace cascade {

// Net photon-scattering rates of the +x beam pair at one velocity.
// r1 = gamma1 rho11 - gamma2 rho22 (lower transition, net), r2 = gamma2 rho22.
// The -x pair is by contract the same quantity evaluated at -v.
struct RatePoint {
  double v = 0;   // m/s
  double r1 = 0;  // 1/s
  double r2 = 0;  // 1/s
};

struct RateProfile {
  Species species;
  LaserConfig lasers;
  std::vector<RatePoint> points;  // one per grid value, grid strictly increasing
};

RatePoint scattering_rates(const Species& species, const LaserConfig& lasers, double velocity);
double rate_r1_obe(const Species& species, const LaserConfig& lasers, double velocity);
double rate_r2_obe(const Species& species, const LaserConfig& lasers, double velocity);

// Perturbative lower-transition rate
//   (gamma1 omega1^2 / 8) |(d1'+d2'+i g2/2) / ((d1'+d2'+i g2/2)(d1'+i g1/2) - omega2^2/4)|^2
// valid for omega1 << gamma1 (see perturbative_drive_ok).
double rate_r1_perturbative(const Species& species, const LaserConfig& lasers, double velocity);
bool perturbative_drive_ok(const Species& species, const LaserConfig& lasers);

// Semiclassical force of both beam pairs,
//   F(v) = hbar k1 [R1(v) - R1(-v)] + hbar (k1+k2) [R2(v) - R2(-v)].
// Antisymmetric; F(0) = 0 by construction.
double force(const Species& species, const LaserConfig& lasers, double velocity);

struct ForcePoint {
  double v = 0;
  double r1 = 0;
  double r2 = 0;
  double f = 0;  // N
};

RateProfile rate_profile(const Species& species, const LaserConfig& lasers,
                         std::span<const double> velocity_grid);
std::vector<ForcePoint> force_profile(const Species& species, const LaserConfig& lasers,
                                      std::span<const double> velocity_grid);

// Default symmetric velocity grid: 401 points over +-2 gamma1/k1, or
// +-4 gamma2/k2 when |delta1| > 10 gamma1 (two-photon regime).
std::vector<double> default_velocity_grid(const Species& species, const LaserConfig& lasers,
                                          int points = 401);
double default_velocity_halfwidth(const Species& species, const LaserConfig& lasers);

// Zero-velocity absorption profile over a delta1 grid.
struct SpectrumPoint {
  double delta1 = 0;  // rad/s
  double r1 = 0;      // 1/s
};

std::vector<SpectrumPoint> absorption_spectrum(const Species& species, const LaserConfig& lasers,
                                               std::span<const double> delta1_grid);

// CSV emitters. Header comment records the configuration; >= 12 significant
// digits per value.
void write_rate_profile_csv(std::ostream& out, const Species& species, const LaserConfig& lasers,
                            std::span<const ForcePoint> points);
void write_spectrum_csv(std::ostream& out, const Species& species, const LaserConfig& lasers,
                        std::span<const SpectrumPoint> points);

}  // namespace cascade

#endif
