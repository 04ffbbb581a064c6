#ifndef CASCADE_CONSTANTS_HPP
#define CASCADE_CONSTANTS_HPP

namespace cascade {

// CODATA 2018 / exact SI values.
inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;
inline constexpr double hbar = 1.054571817e-34;        // J s
inline constexpr double k_boltzmann = 1.380649e-23;    // J/K (exact)
inline constexpr double atomic_mass_unit = 1.66053906660e-27;  // kg
inline constexpr double speed_of_light = 299792458.0;  // m/s (exact)

}  // namespace cascade

#endif
