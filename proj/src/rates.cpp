#include "cascade/rates.hpp"

#include <cmath>
#include <complex>
#include <ostream>

#include "cascade/constants.hpp"
#include "cascade/errors.hpp"
#include "cascade/format.hpp"

namespace cascade {

RatePoint scattering_rates(const Species& species, const LaserConfig& lasers, double velocity) {
  SteadyState st = steady_state(build_generator(species, lasers, velocity));
  auto [p0, p1, p2] = populations(st.rho);
  RatePoint pt;
  pt.v = velocity;
  pt.r1 = species.gamma1 * p1 - species.gamma2 * p2;
  pt.r2 = species.gamma2 * p2;
  return pt;
}

double rate_r1_obe(const Species& species, const LaserConfig& lasers, double velocity) {
  return scattering_rates(species, lasers, velocity).r1;
}

double rate_r2_obe(const Species& species, const LaserConfig& lasers, double velocity) {
  return scattering_rates(species, lasers, velocity).r2;
}

bool perturbative_drive_ok(const Species& species, const LaserConfig& lasers) {
  return lasers.omega1 <= 0.05 * species.gamma1;
}

double rate_r1_perturbative(const Species& species, const LaserConfig& lasers, double velocity) {
  lasers.validate();
  const double d1p = lasers.delta1 - species.k1 * velocity;
  const double d2p = lasers.delta2 - species.k2 * velocity;
  const std::complex<double> num(d1p + d2p, species.gamma2 / 2.0);
  const std::complex<double> den =
      num * std::complex<double>(d1p, species.gamma1 / 2.0) - lasers.omega2 * lasers.omega2 / 4.0;
  const double ratio = std::norm(num / den);
  return species.gamma1 * lasers.omega1 * lasers.omega1 / 8.0 * ratio;
}

double force(const Species& species, const LaserConfig& lasers, double velocity) {
  RatePoint plus = scattering_rates(species, lasers, velocity);
  RatePoint minus = scattering_rates(species, lasers, -velocity);
  return hbar * species.k1 * (plus.r1 - minus.r1) +
         hbar * (species.k1 + species.k2) * (plus.r2 - minus.r2);
}

namespace {

void check_grid(std::span<const double> grid) {
  if (grid.empty()) throw invalid_argument_error("velocity grid is empty");
  for (size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) {
      throw invalid_argument_error("grid must be strictly increasing");
    }
  }
}

}  // namespace

RateProfile rate_profile(const Species& species, const LaserConfig& lasers,
                         std::span<const double> velocity_grid) {
  check_grid(velocity_grid);
  RateProfile profile;
  profile.species = species;
  profile.lasers = lasers;
  profile.points.reserve(velocity_grid.size());
  for (double v : velocity_grid) profile.points.push_back(scattering_rates(species, lasers, v));
  return profile;
}

std::vector<ForcePoint> force_profile(const Species& species, const LaserConfig& lasers,
                                      std::span<const double> velocity_grid) {
  check_grid(velocity_grid);
  std::vector<ForcePoint> out;
  out.reserve(velocity_grid.size());
  for (double v : velocity_grid) {
    RatePoint plus = scattering_rates(species, lasers, v);
    RatePoint minus = scattering_rates(species, lasers, -v);
    ForcePoint pt;
    pt.v = v;
    pt.r1 = plus.r1;
    pt.r2 = plus.r2;
    pt.f = hbar * species.k1 * (plus.r1 - minus.r1) +
           hbar * (species.k1 + species.k2) * (plus.r2 - minus.r2);
    out.push_back(pt);
  }
  return out;
}

double default_velocity_halfwidth(const Species& species, const LaserConfig& lasers) {
  const bool two_photon_regime = std::abs(lasers.delta1) > 10.0 * species.gamma1;
  if (two_photon_regime && species.gamma2 > 0) {
    return 4.0 * species.gamma2 / species.k2;
  }
  return 2.0 * species.gamma1 / species.k1;
}

std::vector<double> default_velocity_grid(const Species& species, const LaserConfig& lasers,
                                          int points) {
  if (points < 2) throw invalid_argument_error("velocity grid needs at least 2 points");
  const double vmax = default_velocity_halfwidth(species, lasers);
  // mirrored construction keeps the grid exactly antisymmetric
  std::vector<double> grid(points);
  for (int i = points / 2; i < points; ++i) {
    const double v = vmax * (2.0 * i - (points - 1)) / (points - 1);
    grid[i] = v;
    grid[points - 1 - i] = -v;
  }
  return grid;
}

std::vector<SpectrumPoint> absorption_spectrum(const Species& species, const LaserConfig& lasers,
                                               std::span<const double> delta1_grid) {
  check_grid(delta1_grid);
  std::vector<SpectrumPoint> out;
  out.reserve(delta1_grid.size());
  LaserConfig cfg = lasers;
  for (double d1 : delta1_grid) {
    cfg.delta1 = d1;
    out.push_back({d1, rate_r1_obe(species, cfg, 0.0)});
  }
  return out;
}

namespace {

void write_config_header(std::ostream& out, const Species& species, const LaserConfig& lasers) {
  out << "# species=" << species.name << " omega1=" << fmt_g(lasers.omega1)
      << " omega2=" << fmt_g(lasers.omega2) << " delta1=" << fmt_g(lasers.delta1)
      << " delta2=" << fmt_g(lasers.delta2) << "\n";
}

}  // namespace

void write_rate_profile_csv(std::ostream& out, const Species& species, const LaserConfig& lasers,
                            std::span<const ForcePoint> points) {
  write_config_header(out, species, lasers);
  out << "v_m_per_s,R1_per_s,R2_per_s,F_N\n";
  for (const ForcePoint& p : points) {
    out << fmt_g(p.v) << ',' << fmt_g(p.r1) << ',' << fmt_g(p.r2) << ',' << fmt_g(p.f) << "\n";
  }
}

void write_spectrum_csv(std::ostream& out, const Species& species, const LaserConfig& lasers,
                        std::span<const SpectrumPoint> points) {
  write_config_header(out, species, lasers);
  out << "delta1_rad_per_s,R1_per_s\n";
  for (const SpectrumPoint& p : points) {
    out << fmt_g(p.delta1) << ',' << fmt_g(p.r1) << "\n";
  }
}

}  // namespace cascade
