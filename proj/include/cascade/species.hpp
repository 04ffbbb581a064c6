#ifndef CASCADE_SPECIES_HPP
#define CASCADE_SPECIES_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace cascade {

// One cascade system |0> -> |1> -> |2>: lower transition (lambda1, gamma1),
// upper transition (lambda2, gamma2). All rates are angular frequencies.
struct Species {
  std::string name;
  double mass = 0;     // kg
  double lambda1 = 0;  // m
  double lambda2 = 0;  // m
  double gamma1 = 0;   // rad/s, decay |1> -> |0>
  double gamma2 = 0;   // rad/s, decay |2> -> |1>
  double k1 = 0;       // rad/m, 2*pi/lambda1 (derived)
  double k2 = 0;       // rad/m, 2*pi/lambda2 (derived)

  // Validating constructor; wavenumbers derived here. gamma2 = 0 is legal
  // (needed for the exact dark-state limits); file/preset ingestion is
  // stricter and rejects it.
  static Species make(std::string name, double mass_kg, double lambda1_m,
                      double lambda2_m, double gamma1_rad_s, double gamma2_rad_s);

  // Copy with a different upper-state decay rate (>= 0).
  Species with_gamma2(double gamma2_rad_s) const;
};

// Second moments of the spontaneous-emission angular patterns along the
// cooling axis. 2/5 for a dipole pattern; 1 reproduces 3D bookkeeping.
struct EmissionGeometry {
  double chi1 = 1.0;
  double chi2 = 1.0;

  static EmissionGeometry three_dimensional() { return {1.0, 1.0}; }
  static EmissionGeometry dipole() { return {0.4, 0.4}; }
  void validate() const;  // 0 <= chi_i <= 1
};

// Doppler limit temperature hbar*gamma/(2 kB) in kelvin.
double doppler_limit(double gamma_rad_s);

// Internal nondimensionalization scales for one species. Public interfaces
// are SI; these are the conversion factors used at module boundaries.
struct NaturalUnits {
  double frequency;  // rad/s  (gamma1)
  double velocity;   // m/s    (gamma1/k1)
  double momentum;   // kg m/s (m*gamma1/k1)
  double energy;     // J      (hbar*gamma1)

  double to_natural_frequency(double si) const { return si / frequency; }
  double from_natural_frequency(double nat) const { return nat * frequency; }
  double to_natural_velocity(double si) const { return si / velocity; }
  double from_natural_velocity(double nat) const { return nat * velocity; }
};

NaturalUnits natural_units(const Species& species);

// --- species data files -----------------------------------------------------
//
// Plain text, one record per species, `key = value` lines, records separated
// by a line `[species]`, comments start with `#`. Keys: name, mass_u,
// lambda1_nm, lambda2_nm, gamma1_over_2pi_MHz, gamma2_over_2pi_MHz.

std::vector<Species> parse_species_stream(std::istream& in, const std::string& origin);
std::vector<Species> load_species_file(const std::string& path);

// Bundled species table (Mg, Ca, Cs). The environment variable
// CASCADE_COOL_SPECIES_PATH, when set, overrides the bundled data.
const std::string& bundled_species_text();

// Resolve a species by name: from `path` if non-empty, otherwise from
// CASCADE_COOL_SPECIES_PATH if set, otherwise from the bundled table.
Species load_species(const std::string& name, const std::string& path = {});

// Names available through the same resolution chain.
std::vector<std::string> species_names(const std::string& path = {});

}  // namespace cascade

#endif
